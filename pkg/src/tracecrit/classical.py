"""Finite probability distributions, statistical distance and couplings.

A :class:`Distribution` is stored either densely (an explicit weight vector,
``N <= 2**20``) or sparsely as a uniform background weight plus a list of
piecewise-constant overrides.  The sparse form lets keys of up to 50 bits be
handled without enumerating ``2**n`` outcomes: every operation below works on
the piecewise-constant representation and groups equal-weight outcomes in
closed form.

Outcome ``i`` of an ``n``-bit sample space is identified with the bit string
``format(i, f"0{n}b")`` (most significant bit first), so a bit prefix selects a
contiguous block of indices.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import DimensionError, ValidationError

MASS_TOL = 1e-9
NEG_TOL = 1e-12
DENSE_LIMIT = 2**20
COUPLING_LIMIT = 2**12
MAX_SPARSE_OUTCOMES = 2**62


def entry_tol(n_outcomes):
    """Slack for per-outcome comparisons; shrinks with 1/N so huge sparse spaces stay meaningful."""
    return min(NEG_TOL, 1e-6 / n_outcomes)


def _check_mass(mass, tol):
    if not math.isfinite(mass) or abs(mass - 1.0) > tol:
        raise ValidationError(f"total mass {mass!r} is not within {tol:g} of 1")


def _clean_weights(values, what):
    values = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(values)):
        raise ValidationError(f"{what} contains non-finite entries")
    if values.size and values.min() < -NEG_TOL:
        i = int(values.argmin())
        raise ValidationError(f"{what}[{i}] = {values[i]!r} is negative")
    return np.clip(values, 0.0, None)


class Distribution:
    """Probability distribution over the outcomes ``0 .. N-1``.

    Use :meth:`dense`, :meth:`sparse` or :meth:`uniform` to build one; the
    constructors validate non-negativity (entries below ``-1e-12`` are
    rejected, smaller negatives are clamped to zero) and normalization to
    within ``tol``.  Instances are immutable.
    """

    __slots__ = ("_n", "_weights", "_background", "_seg_start", "_seg_stop", "_seg_val")

    def __init__(self, n_outcomes, weights=None, background=0.0, segments=None):
        # Internal; callers go through the classmethods which validate.
        self._n = int(n_outcomes)
        self._weights = weights
        self._background = float(background)
        if segments is None:
            segments = (np.zeros(0, np.int64), np.zeros(0, np.int64), np.zeros(0))
        self._seg_start, self._seg_stop, self._seg_val = segments
        for arr in (self._weights, self._seg_start, self._seg_stop, self._seg_val):
            if arr is not None:
                arr.setflags(write=False)

    # -- construction ------------------------------------------------------

    @classmethod
    def dense(cls, weights, *, tol=MASS_TOL):
        w = _clean_weights(weights, "weights")
        if w.ndim != 1 or w.size == 0:
            raise ValidationError("weights must be a non-empty 1-d sequence")
        if w.size > DENSE_LIMIT:
            raise ValidationError(f"dense form is limited to {DENSE_LIMIT} outcomes, got {w.size}")
        _check_mass(math.fsum(w), tol)
        return cls(w.size, weights=w.copy())

    @classmethod
    def sparse(cls, n_outcomes, background, overrides=None, ranges=None, *, tol=MASS_TOL):
        """Uniform ``background`` weight with explicit exceptions.

        Parameters
        ----------
        n_outcomes : int
            Size of the sample space (may be as large as ``2**62``).
        background : float
            Weight of every outcome not covered by ``overrides`` or ``ranges``.
        overrides : mapping of int to float, optional
            Single-outcome weights.
        ranges : iterable of (start, stop, weight), optional
            Half-open index blocks ``[start, stop)`` sharing one weight.
        """
        n = int(n_outcomes)
        if n < 1 or n > MAX_SPARSE_OUTCOMES:
            raise ValidationError(f"n_outcomes must be in [1, 2**62], got {n_outcomes!r}")
        bg = float(_clean_weights([background], "background")[0])
        starts, stops, vals = [], [], []
        for idx, w in (overrides or {}).items():
            starts.append(int(idx))
            stops.append(int(idx) + 1)
            vals.append(w)
        for start, stop, w in ranges or ():
            starts.append(int(start))
            stops.append(int(stop))
            vals.append(w)
        seg_start = np.asarray(starts, dtype=np.int64)
        seg_stop = np.asarray(stops, dtype=np.int64)
        seg_val = _clean_weights(vals, "overrides")
        order = np.argsort(seg_start, kind="stable")
        seg_start, seg_stop, seg_val = seg_start[order], seg_stop[order], seg_val[order]
        if seg_start.size:
            if seg_start[0] < 0 or seg_stop[-1] > n or np.any(seg_stop <= seg_start):
                raise ValidationError("override indices must lie in [0, n_outcomes) with start < stop")
            if np.any(seg_start[1:] < seg_stop[:-1]):
                raise ValidationError("overrides and ranges overlap")
        lengths = (seg_stop - seg_start).astype(float)
        covered = int((seg_stop - seg_start).sum())
        mass = bg * (n - covered) + math.fsum(lengths * seg_val)
        _check_mass(mass, tol)
        return cls(n, background=bg, segments=(seg_start, seg_stop, seg_val))

    @classmethod
    def uniform(cls, n_outcomes):
        n = int(n_outcomes)
        if n <= DENSE_LIMIT:
            return cls.dense(np.full(n, 1.0 / n))
        return cls.sparse(n, 1.0 / n)

    @classmethod
    def uniform_bits(cls, n_bits):
        return cls.uniform(2 ** int(n_bits))

    @classmethod
    def _from_pieces(cls, n, starts, stops, values, *, tol=MASS_TOL):
        """Rebuild a sparse distribution from a full piecewise-constant cover."""
        lengths = stops - starts
        k = int(np.argmax(lengths))
        keep = np.arange(starts.size) != k
        ranges = zip(starts[keep].tolist(), stops[keep].tolist(), values[keep].tolist())
        return cls.sparse(n, values[k], ranges=ranges, tol=tol)

    # -- accessors ---------------------------------------------------------

    @property
    def n_outcomes(self) -> int:
        return self._n

    @property
    def n_bits(self):
        """Bit length ``n`` when ``N == 2**n``, otherwise ``None``."""
        if self._n & (self._n - 1) == 0:
            return self._n.bit_length() - 1
        return None

    @property
    def is_dense(self) -> bool:
        return self._weights is not None

    @property
    def background(self) -> float:
        if self.is_dense:
            raise AttributeError("dense distributions have no background weight")
        return self._background

    @property
    def weights(self) -> np.ndarray:
        """Dense weight vector (read-only); expands sparse forms up to ``2**20``."""
        if self.is_dense:
            return self._weights
        if self._n > DENSE_LIMIT:
            raise ValidationError(f"cannot expand {self._n} outcomes into dense form")
        w = np.full(self._n, self._background)
        for s, e, v in zip(self._seg_start, self._seg_stop, self._seg_val):
            w[s:e] = v
        w.setflags(write=False)
        return w

    def to_dense(self) -> "Distribution":
        if self.is_dense:
            return self
        return Distribution(self._n, weights=self.weights.copy())

    def weight(self, index) -> float:
        index = int(index)
        if not 0 <= index < self._n:
            raise IndexError(index)
        if self.is_dense:
            return float(self._weights[index])
        k = int(np.searchsorted(self._seg_start, index, side="right")) - 1
        if k >= 0 and index < self._seg_stop[k]:
            return float(self._seg_val[k])
        return self._background

    def total_mass(self) -> float:
        s, e, v = self.pieces()
        return math.fsum((e - s) * v)

    def pieces(self):
        """Piecewise-constant cover ``(starts, stops, values)`` of ``[0, N)``."""
        if self.is_dense:
            starts = np.arange(self._n, dtype=np.int64)
            return starts, starts + 1, np.asarray(self._weights)
        gap_start = np.concatenate(([0], self._seg_stop))
        gap_stop = np.concatenate((self._seg_start, [self._n]))
        gap = gap_stop > gap_start
        starts = np.concatenate((self._seg_start, gap_start[gap]))
        stops = np.concatenate((self._seg_stop, gap_stop[gap]))
        values = np.concatenate((self._seg_val, np.full(int(gap.sum()), self._background)))
        order = np.argsort(starts, kind="stable")
        return starts[order].astype(np.int64), stops[order].astype(np.int64), values[order]

    # -- serialization -----------------------------------------------------

    def to_dict(self) -> dict:
        if self.is_dense:
            return {"n_outcomes": self._n, "weights": self._weights.tolist()}
        single = (self._seg_stop - self._seg_start) == 1
        out = {
            "n_outcomes": self._n,
            "background": self._background,
            "overrides": {
                str(i): v
                for i, v in zip(self._seg_start[single].tolist(), self._seg_val[single].tolist())
            },
        }
        if not single.all():
            many = ~single
            out["ranges"] = [
                [s, e, v]
                for s, e, v in zip(
                    self._seg_start[many].tolist(),
                    self._seg_stop[many].tolist(),
                    self._seg_val[many].tolist(),
                )
            ]
        return out

    @classmethod
    def from_dict(cls, data: Mapping, *, tol=MASS_TOL) -> "Distribution":
        if not isinstance(data, Mapping):
            raise ValidationError("distribution must be a JSON object")
        if "n_outcomes" not in data:
            raise ValidationError("distribution: missing field 'n_outcomes'")
        n = data["n_outcomes"]
        if not isinstance(n, int) or isinstance(n, bool):
            raise ValidationError("distribution: field 'n_outcomes' must be an integer")
        if "weights" in data:
            w = data["weights"]
            if not isinstance(w, list) or len(w) != n:
                raise ValidationError(f"distribution: field 'weights' must be a list of {n} numbers")
            try:
                arr = np.asarray(w, dtype=float)
            except (TypeError, ValueError) as exc:
                raise ValidationError(f"distribution: field 'weights' is not numeric ({exc})") from None
            return cls.dense(arr, tol=tol)
        if "background" not in data:
            raise ValidationError("distribution: need either 'weights' or 'background'")
        try:
            overrides = {int(k): float(v) for k, v in (data.get("overrides") or {}).items()}
            ranges = [(int(s), int(e), float(v)) for s, e, v in data.get("ranges") or ()]
            background = float(data["background"])
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"distribution: malformed sparse fields ({exc})") from None
        return cls.sparse(n, background, overrides, ranges, tol=tol)

    def __repr__(self):
        if self.is_dense:
            return f"Distribution.dense({self._weights.tolist()!r})"
        return (
            f"Distribution.sparse(n_outcomes={self._n}, background={self._background!r}, "
            f"{self._seg_start.size} overrides)"
        )


def _check_same_space(p, q):
    if p.n_outcomes != q.n_outcomes:
        raise DimensionError(f"sample space sizes differ: {p.n_outcomes} vs {q.n_outcomes}")


def _merged_pieces(p, q):
    """Common refinement of the piece covers of ``p`` and ``q``."""
    ps, _, pv = p.pieces()
    qs, _, qv = q.pieces()
    bounds = np.union1d(ps, qs)
    stops = np.append(bounds[1:], p.n_outcomes)
    vp = pv[np.searchsorted(ps, bounds, side="right") - 1]
    vq = qv[np.searchsorted(qs, bounds, side="right") - 1]
    return bounds, stops, vp, vq


def statistical_distance(p: Distribution, q: Distribution) -> float:
    """Half the L1 distance between two distributions on the same space."""
    _check_same_space(p, q)
    if p.is_dense and q.is_dense:
        return 0.5 * float(np.abs(p.weights - q.weights).sum())
    starts, stops, vp, vq = _merged_pieces(p, q)
    return 0.5 * math.fsum((stops - starts) * np.abs(vp - vq))


def best_guess(p: Distribution):
    """Most likely outcome and its weight; ties go to the smallest index."""
    if p.is_dense:
        i = int(np.argmax(p.weights))
        return i, float(p.weights[i])
    starts, _, values = p.pieces()
    k = int(np.argmax(values))
    return int(starts[k]), float(values[k])


def guessing_probability(p: Distribution) -> float:
    """Success probability of the optimal single guess, i.e. the largest atom."""
    return best_guess(p)[1]


@dataclass(frozen=True, eq=False)
class Coupling:
    """Joint distribution with its two marginals."""

    joint: np.ndarray
    row_marginal: Distribution
    col_marginal: Distribution
    tol: float = field(default=MASS_TOL, repr=False)

    def __post_init__(self):
        j = np.asarray(self.joint, dtype=float)
        if j.ndim != 2:
            raise ValidationError("joint must be a matrix")
        if j.shape != (self.row_marginal.n_outcomes, self.col_marginal.n_outcomes):
            raise DimensionError(
                f"joint shape {j.shape} does not match marginals "
                f"({self.row_marginal.n_outcomes}, {self.col_marginal.n_outcomes})"
            )
        if j.min() < 0:
            raise ValidationError(f"joint has negative entry {j.min()!r}")
        _check_mass(math.fsum(j.ravel()), self.tol)
        if np.abs(j.sum(axis=1) - self.row_marginal.weights).max() > self.tol:
            raise ValidationError("row sums do not match the row marginal")
        if np.abs(j.sum(axis=0) - self.col_marginal.weights).max() > self.tol:
            raise ValidationError("column sums do not match the column marginal")
        j = j.copy()
        j.setflags(write=False)
        object.__setattr__(self, "joint", j)

    @classmethod
    def from_joint(cls, joint, *, tol=MASS_TOL):
        j = np.asarray(joint, dtype=float)
        return cls(j, Distribution.dense(j.sum(axis=1), tol=tol), Distribution.dense(j.sum(axis=0), tol=tol), tol)

    def to_dict(self) -> dict:
        return {
            "joint": self.joint.tolist(),
            "row_marginal": self.row_marginal.to_dict(),
            "col_marginal": self.col_marginal.to_dict(),
        }


def maximal_coupling(p: Distribution, q: Distribution) -> Coupling:
    """Coupling of ``p`` and ``q`` that puts the most mass on the diagonal.

    The diagonal carries ``min(p_i, q_i)``; the leftover masses are joined
    independently off the diagonal.  The diagonal mass is ``1 - delta(p, q)``.
    """
    _check_same_space(p, q)
    if p.n_outcomes > COUPLING_LIMIT:
        raise ValidationError(f"maximal_coupling is limited to {COUPLING_LIMIT} outcomes")
    pw, qw = p.weights, q.weights
    common = np.minimum(pw, qw)
    joint = np.diag(common)
    rp, rq = pw - common, qw - common
    spill = rq.sum()
    if spill > 0:
        # rp_i * rq_i == 0 for every i, so the diagonal stays untouched.
        joint += np.outer(rp, rq / spill)
    return Coupling(joint, p, q)


def equality_probability(c: Coupling) -> float:
    """Mass the coupling puts on the event ``X == Y``."""
    if c.joint.shape[0] != c.joint.shape[1]:
        raise DimensionError(f"equality needs a square coupling, got {c.joint.shape}")
    return math.fsum(np.diag(c.joint))


@dataclass(frozen=True)
class Infeasible:
    """No mixture component exists; records the worst offending entry."""

    index: int | None
    value: float
    reason: str

    def __bool__(self):
        return False

    def to_dict(self) -> dict:
        return {"feasible": False, "index": self.index, "value": self.value, "reason": self.reason}


def _check_lambda(lam):
    if not (0.0 < lam <= 1.0):
        raise ValidationError(f"lambda must lie in (0, 1], got {lam!r}")


def mixture_residual(p_x: Distribution, p_y: Distribution, lam: float, *, tol=MASS_TOL):
    """Solve ``p_x = (1 - lam) p_y + lam p'`` for a distribution ``p'``.

    Returns the residual distribution ``p'`` when it exists, otherwise an
    :class:`Infeasible` naming the most negative candidate entry.
    """
    _check_lambda(lam)
    _check_same_space(p_x, p_y)
    if p_x.is_dense and p_y.is_dense:
        cand = (p_x.weights - (1.0 - lam) * p_y.weights) / lam
        starts = np.arange(cand.size, dtype=np.int64)
        stops = starts + 1
    else:
        starts, stops, vx, vy = _merged_pieces(p_x, p_y)
        cand = (vx - (1.0 - lam) * vy) / lam
    k = int(np.argmin(cand))
    if cand[k] < -entry_tol(p_x.n_outcomes):
        return Infeasible(int(starts[k]), float(cand[k]), "negative residual weight")
    cand = np.clip(cand, 0.0, None)
    mass = math.fsum((stops - starts) * cand)
    if abs(mass - 1.0) > tol:
        return Infeasible(None, mass, "residual mass is not 1")
    if p_x.is_dense and p_y.is_dense:
        return Distribution.dense(cand, tol=tol)
    return Distribution._from_pieces(p_x.n_outcomes, starts, stops, cand, tol=tol)


@dataclass(frozen=True)
class MixtureBoundsCheck:
    """Outcome of the per-outcome uniform-mixture bounds test.

    ``below`` and ``above`` list half-open index ranges whose weight falls
    outside ``[lower, upper]``.
    """

    feasible: bool
    lam: float
    lower: float
    upper: float
    below: tuple = ()
    above: tuple = ()

    def __bool__(self):
        return self.feasible

    def to_dict(self) -> dict:
        return {
            "feasible": self.feasible,
            "lambda": self.lam,
            "lower": self.lower,
            "upper": self.upper,
            "below": [list(r) for r in self.below],
            "above": [list(r) for r in self.above],
        }


def uniform_mixture_bounds_check(p: Distribution, lam: float) -> MixtureBoundsCheck:
    """Test ``(1-lam)/N <= p_i <= lam + (1-lam)/N`` for every outcome."""
    _check_lambda(lam)
    n = p.n_outcomes
    lower = (1.0 - lam) / n
    upper = lam + lower
    starts, stops, values = p.pieces()
    slack = entry_tol(n)
    lo = values < lower - slack
    hi = values > upper + slack
    below = tuple(zip(starts[lo].tolist(), stops[lo].tolist()))
    above = tuple(zip(starts[hi].tolist(), stops[hi].tolist()))
    return MixtureBoundsCheck(not (below or above), lam, lower, upper, below, above)


def parse_bits(bits, what):
    if isinstance(bits, str):
        if bits and set(bits) <= {"0", "1"}:
            return bits
    elif isinstance(bits, Sequence) and bits and all(b in (0, 1) for b in bits):
        return "".join(str(int(b)) for b in bits)
    raise ValidationError(f"{what} must be a non-empty bit string, got {bits!r}")


def prefix_block(n_bits: int, prefix: str):
    """Index range ``[start, stop)`` of all ``n_bits`` strings starting with ``prefix``."""
    m = len(prefix)
    width = n_bits - m
    start = int(prefix, 2) << width
    return start, start + (1 << width)


def condition_on_prefix(p: Distribution, prefix_bits, *, tol=MASS_TOL) -> Distribution:
    """Distribution of the remaining ``n - m`` bits given the first ``m`` bits."""
    n = p.n_bits
    if n is None:
        raise ValidationError(f"{p.n_outcomes} outcomes is not a power of two")
    prefix = parse_bits(prefix_bits, "prefix_bits")
    m = len(prefix)
    if m >= n:
        raise ValidationError(f"prefix length {m} must be smaller than the key length {n}")
    lo, hi = prefix_block(n, prefix)
    if p.is_dense:
        block = p.weights[lo:hi]
        mass = math.fsum(block)
        if mass <= 0:
            raise ValidationError(f"prefix {prefix!r} has zero probability")
        return Distribution.dense(block / mass, tol=tol)
    starts, stops, values = p.pieces()
    inside = (stops > lo) & (starts < hi)
    s = np.maximum(starts[inside], lo) - lo
    e = np.minimum(stops[inside], hi) - lo
    v = values[inside]
    mass = math.fsum((e - s) * v)
    if mass <= 0:
        raise ValidationError(f"prefix {prefix!r} has zero probability")
    return Distribution._from_pieces(hi - lo, s, e, v / mass, tol=tol)


def random_distribution(rng: np.random.Generator, n_outcomes: int, concentration=1.0) -> Distribution:
    """Dirichlet draw, handy for sweeps and property tests."""
    return Distribution.dense(rng.dirichlet(np.full(n_outcomes, float(concentration))))

