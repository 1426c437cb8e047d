"""Cyclic Jacobi eigensolver for real symmetric matrices.

Pivots are visited in round-robin (tournament) order: each of the ``m - 1``
rounds of a sweep pairs every index with exactly one partner, so the ``m/2``
rotations of a round touch disjoint rows and columns and are applied together.
Every off-diagonal pair is annihilated once per sweep, as in the row-cyclic
scheme, and the quadratic convergence of cyclic Jacobi is retained.
"""
import numpy as np

from .errors import ConvergenceError

OFF_TOL = 1e-12
MAX_SWEEPS = 100


def _tournament(m):
    """Pairings of ``0..m-1`` (``m`` even) for the ``m - 1`` rounds of a sweep."""
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        half = m // 2
        p = np.array(players[:half])
        q = np.array(players[half:][::-1])
        rounds.append((np.minimum(p, q), np.maximum(p, q)))
        # Circle method: keep the first player fixed, rotate the rest.
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def off_norm(a):
    """Frobenius norm of the off-diagonal part."""
    off = a - np.diag(np.diag(a))
    return float(np.linalg.norm(off))


def jacobi_eigh(a, tol=OFF_TOL, max_sweeps=MAX_SWEEPS):
    """Eigen-decomposition of a real symmetric matrix.

    Parameters
    ----------
    a : (m, m) array_like
        Symmetric matrix; only a private copy is modified.
    tol : float
        Stop once the off-diagonal Frobenius norm drops below
        ``tol * max(1, ||a||_F)``.
    max_sweeps : int
        Sweep cap; exceeding it raises :class:`ConvergenceError`.

    Returns
    -------
    w : (m,) ndarray
        Eigenvalues in ascending order.
    v : (m, m) ndarray
        Orthonormal eigenvectors, ``v[:, k]`` belonging to ``w[k]``.
    """
    a = np.array(a, dtype=float)
    m = a.shape[0]
    if a.ndim != 2 or a.shape[1] != m:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    v = np.eye(m)
    if m == 1:
        return a.diagonal().copy(), v
    pad = m % 2
    if pad:
        # A decoupled zero row/column keeps the tournament pairing even.
        a = np.pad(a, ((0, 1), (0, 1)))
        v = np.eye(m + 1)
    size = a.shape[0]
    threshold = tol * max(1.0, float(np.linalg.norm(a)))
    rounds = _tournament(size)

    residual = off_norm(a)
    sweeps = 0
    while residual >= threshold:
        if sweeps == max_sweeps:
            raise ConvergenceError(
                f"Jacobi did not converge in {max_sweeps} sweeps (off-diagonal norm {residual:.3e})",
                residual=residual,
            )
        for p, q in rounds:
            apq = a[p, q]
            active = apq != 0.0
            if not active.any():
                continue
            app, aqq = a[p, p], a[q, q]
            safe = np.where(active, apq, 1.0)
            theta = (aqq - app) / (2.0 * safe)
            t = np.where(theta >= 0, 1.0, -1.0) / (np.abs(theta) + np.hypot(theta, 1.0))
            t = np.where(active, t, 0.0)
            c = 1.0 / np.hypot(t, 1.0)
            s = t * c

            # The round's rotations act on disjoint index pairs: one orthogonal factor.
            rot = np.eye(size)
            rot[p, p] = c
            rot[q, q] = c
            rot[p, q] = s
            rot[q, p] = -s
            a = rot.T @ a @ rot
            a[p, q] = 0.0
            a[q, p] = 0.0
            v = v @ rot
        sweeps += 1
        residual = off_norm(a)

    w = a.diagonal().copy()
    if pad:
        # Drop the padding eigenpair: its vector is the unit vector on the pad.
        keep = np.argmax(np.abs(v[m, :]))
        mask = np.arange(size) != keep
        w, v = w[mask], v[:m, mask]
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]
