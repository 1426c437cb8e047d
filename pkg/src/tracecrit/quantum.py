"""Density operators, trace distance and binary state discrimination.

Complex Hermitian spectra come from :func:`tracecrit.jacobi.jacobi_eigh`
applied to the real symmetric embedding ``[[X, -Y], [Y, X]]`` of
``H = X + iY``.  The embedding has the spectrum of ``H`` with every eigenvalue
doubled, so a single real solver covers everything here.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .classical import Distribution
from .errors import DimensionError, ValidationError
from .jacobi import jacobi_eigh

MAX_DIM = 64
HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-9
PSD_TOL = 1e-9
PRIOR_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    """Complex Hermitian matrix of dimension at most 64."""

    entries: np.ndarray

    def __post_init__(self):
        m = np.array(self.entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
            raise ValidationError(f"operator must be a non-empty square matrix, got shape {m.shape}")
        if m.shape[0] > MAX_DIM:
            raise ValidationError(f"dimension {m.shape[0]} exceeds the cap of {MAX_DIM}")
        if not np.all(np.isfinite(m)):
            raise ValidationError("operator has non-finite entries")
        gap = np.abs(m - m.conj().T).max()
        if gap > HERMITIAN_TOL:
            raise ValidationError(f"operator is not Hermitian (max |H - H^dagger| = {gap:.3e})")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def __sub__(self, other):
        if not isinstance(other, HermitianOperator):
            return NotImplemented
        _check_dims(self, other)
        return HermitianOperator(self.entries - other.entries)

    def scaled(self, factor: float) -> "HermitianOperator":
        return HermitianOperator(float(factor) * self.entries)

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "entries": [[[z.real, z.imag] for z in row] for row in self.entries.tolist()],
        }


def _check_dims(a, b):
    if a.dim != b.dim:
        raise DimensionError(f"operator dimensions differ: {a.dim} vs {b.dim}")


def operator_from_dict(data: Mapping) -> HermitianOperator:
    if not isinstance(data, Mapping) or "entries" not in data:
        raise ValidationError("operator: missing field 'entries'")
    try:
        arr = np.asarray(data["entries"], dtype=float)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"operator: field 'entries' is not a numeric array ({exc})") from None
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise ValidationError("operator: 'entries' must be a D x D array of [re, im] pairs")
    if "dim" in data and data["dim"] != arr.shape[0]:
        raise ValidationError(f"operator: 'dim' is {data['dim']} but entries have {arr.shape[0]} rows")
    return HermitianOperator(arr[..., 0] + 1j * arr[..., 1])


def embedding(h: HermitianOperator) -> np.ndarray:
    """Real symmetric ``2D x 2D`` matrix with the spectrum of ``h`` doubled."""
    x, y = h.entries.real, h.entries.imag
    return np.block([[x, -y], [y, x]])


def hermitian_eigenvalues(h: HermitianOperator) -> np.ndarray:
    """Eigenvalues of ``h`` in ascending order."""
    w, _ = jacobi_eigh(embedding(h))
    # Sorted doubled spectrum: consecutive entries are copies of one eigenvalue.
    return w.reshape(h.dim, 2).mean(axis=1)


def trace_norm(h: HermitianOperator) -> float:
    """Sum of absolute eigenvalues."""
    return math.fsum(np.abs(hermitian_eigenvalues(h)))


class DensityOperator(HermitianOperator):
    """Unit-trace positive semidefinite Hermitian operator."""

    def __post_init__(self):
        super().__post_init__()
        tr = np.trace(self.entries)
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValidationError(f"trace {tr.real:.12g} is not within {TRACE_TOL:g} of 1")
        lowest = hermitian_eigenvalues(self)[0]
        if lowest < -PSD_TOL:
            raise ValidationError(f"operator is not positive semidefinite (eigenvalue {lowest:.3e})")

    @classmethod
    def from_operator(cls, h: HermitianOperator) -> "DensityOperator":
        return cls(h.entries)

    @classmethod
    def pure(cls, state) -> "DensityOperator":
        psi = np.asarray(state, dtype=complex)
        psi = psi / np.linalg.norm(psi)
        return cls(np.outer(psi, psi.conj()))


def density_from_dict(data: Mapping) -> DensityOperator:
    return DensityOperator.from_operator(operator_from_dict(data))


def trace_distance(rho0: DensityOperator, rho1: DensityOperator) -> float:
    """Half the trace norm of ``rho0 - rho1``."""
    _check_dims(rho0, rho1)
    return 0.5 * trace_norm(HermitianOperator(rho0.entries - rho1.entries))


def embed_classical(p: Distribution) -> DensityOperator:
    """Diagonal density operator carrying ``p`` on its diagonal."""
    if p.n_outcomes > MAX_DIM:
        raise ValidationError(f"{p.n_outcomes} outcomes exceeds the dimension cap of {MAX_DIM}")
    return DensityOperator(np.diag(p.weights).astype(complex))


def _check_priors(p0, p1):
    if p1 is None:
        p1 = 1.0 - p0
    for name, value in (("p0", p0), ("p1", p1)):
        if not 0.0 <= value <= 1.0:
            raise ValidationError(f"prior {name} = {value!r} is outside [0, 1]")
    if abs(p0 + p1 - 1.0) > PRIOR_TOL:
        raise ValidationError(f"priors sum to {p0 + p1!r}, not 1")
    return p0, p1


def helstrom_correct_probability(rho0: DensityOperator, rho1: DensityOperator, p0: float, p1: float | None = None) -> float:
    """Optimal probability of correctly identifying which of two states is present.

    ``1/2 + 1/2 * || p0 rho0 - p1 rho1 ||_1``; with equal priors this is
    ``1/2 + d/2`` for the trace distance ``d``.
    """
    p0, p1 = _check_priors(p0, p1)
    _check_dims(rho0, rho1)
    weighted = HermitianOperator(p0 * rho0.entries - p1 * rho1.entries)
    return 0.5 + 0.5 * trace_norm(weighted)


def equal_prior_conditionals(d: float):
    """``(P(ideal|ideal), P(ideal|real)) = (1/2 + d/2, 1/2 - d/2)``.

    These are the per-hypothesis conditionals of the symmetrized decision rule
    at equal priors.  The optimal rule only pins down their average; see
    :func:`ml_decision_conditionals` for the conditionals of a concrete rule.
    """
    if not 0.0 <= d <= 1.0:
        raise ValidationError(f"d must lie in [0, 1], got {d!r}")
    return 0.5 + d / 2, 0.5 - d / 2


@dataclass(frozen=True)
class DecisionConditionals:
    accept_q_given_q: float
    accept_q_given_p: float
    correct_probability: float

    def to_dict(self) -> dict:
        return {
            "accept_q_given_q": self.accept_q_given_q,
            "accept_q_given_p": self.accept_q_given_p,
            "correct_probability": self.correct_probability,
        }


def ml_decision_conditionals(p: Distribution, q: Distribution) -> DecisionConditionals:
    """Conditionals of the maximum-likelihood test between ``p`` and ``q``.

    The rule declares ``q`` on the acceptance set ``{i : q_i >= p_i}``.  Its
    equal-prior success probability is ``1/2 + delta/2``, but the two
    conditionals on their own need not be ``1/2 +- delta/2``.
    """
    if p.n_outcomes != q.n_outcomes:
        raise DimensionError(f"sample space sizes differ: {p.n_outcomes} vs {q.n_outcomes}")
    pw, qw = p.weights, q.weights
    accept = qw >= pw
    qa = math.fsum(qw[accept])
    pa = math.fsum(pw[accept])
    return DecisionConditionals(qa, pa, 0.5 * (1.0 - pa + qa))


def composition_bound(d_ab: float, d_bc: float) -> float:
    """Triangle-inequality bound ``min(1, d_ab + d_bc)`` for a composed pair."""
    for name, value in (("d_ab", d_ab), ("d_bc", d_bc)):
        if not 0.0 <= value <= 1.0:
            raise ValidationError(f"{name} must lie in [0, 1], got {value!r}")
    return min(1.0, d_ab + d_bc)


def random_density_operator(rng: np.random.Generator, dim: int) -> DensityOperator:
    """Full-rank random state ``G G^dagger / tr``, ``G`` complex Gaussian."""
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = g @ g.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return DensityOperator(rho / np.trace(rho).real)

