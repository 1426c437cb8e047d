"""Security-bound arithmetic and extremal / counterexample distributions.

Every scalar result is a :class:`BoundReport` carrying the inputs it was
computed from and a derivation label.  Readings of the criterion that are
known not to hold (the per-bit BER bound, failure probability per bit) are
labelled ``naive-interpretation`` so they are never emitted as guarantees.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .classical import Distribution, parse_bits, prefix_block
from .errors import ValidationError

PAPER_FORMULA = "paper-formula"
DERIVED = "derived-construction"
NAIVE = "naive-interpretation"
DERIVATIONS = (PAPER_FORMULA, DERIVED, NAIVE)

KPA_MAX_BITS = 50

NAIVE_BER_NOTE = (
    "naive reading, not a guarantee: assumes the key equals an ideal key except "
    "with probability d, which the criterion does not imply"
)
BER_PRINT_NOTE = "(1 - d)/2 + d simplifies to 1/2 + d/2; a value of 1 + d/2 would exceed 1"
PER_BIT_NOTE = (
    "naive reading, not a guarantee: dividing a single-round criterion by the "
    "number of bits ever produced assumes independent bits and rounds"
)


@dataclass(frozen=True)
class BoundReport:
    name: str
    value: float
    inputs: dict
    derivation: str
    notes: tuple = field(default=())

    def __post_init__(self):
        if self.derivation not in DERIVATIONS:
            raise ValueError(f"unknown derivation label {self.derivation!r}")
        if not (self.value == self.value and abs(self.value) != float("inf")):
            raise ValueError(f"bound {self.name} is not finite: {self.value!r}")

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "value": self.value,
            "inputs": dict(self.inputs),
            "derivation": self.derivation,
            "notes": list(self.notes),
        }


@dataclass(frozen=True)
class PerBitReport(BoundReport):
    """Failure-per-bit figure plus its extrapolation over many bits."""

    accumulated: float | None = None

    @property
    def per_bit(self) -> float:
        return self.value

    def accumulated_over(self, bits: float) -> float:
        return self.inputs["d"] * (bits / self.inputs["total_bits"])

    def to_dict(self) -> dict:
        out = super().to_dict()
        out["per_bit"] = self.value
        if self.accumulated is not None:
            out["accumulated"] = self.accumulated
        return out


def _check_d(d, upper=1.0):
    if not 0.0 <= d <= upper:
        raise ValidationError(f"d must lie in [0, {upper:g}], got {d!r}")


def _check_n(n):
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise ValidationError(f"n must be a positive integer, got {n!r}")
    return int(n)


def guessing_bound(n: int, d: float) -> BoundReport:
    """Largest probability of guessing an ``n``-bit key at distance ``d`` from uniform."""
    n = _check_n(n)
    _check_d(d)
    return BoundReport("guessing_bound", min(1.0, 2.0**-n + d), {"n": n, "d": d}, PAPER_FORMULA)


def extremal_guessing_distribution(n: int, d: float, outcome: int = 0) -> Distribution:
    """Distribution at distance exactly ``d`` from uniform that attains :func:`guessing_bound`.

    One outcome carries ``2**-n + d``; the deficit ``d`` is spread evenly over
    the other ``2**n - 1`` outcomes.  Returned in sparse form.
    """
    n = _check_n(n)
    size = 2**n
    base = 2.0**-n
    _check_d(d, 1.0 - base)
    if not 0 <= outcome < size:
        raise ValidationError(f"outcome {outcome} outside [0, {size})")
    background = max(base - d / (size - 1), 0.0)
    return Distribution.sparse(size, background, {outcome: base + d})


def kpa_distance(n: int, m: int) -> float:
    """Closed-form distance from uniform of :func:`kpa_counterexample`."""
    return 2.0**-m - 2.0**-n


def kpa_counterexample(n: int, m: int, special_prefix=None, completion=None) -> Distribution:
    """Key distribution that a known ``m``-bit prefix can fully compromise.

    All ``n``-bit strings starting with ``special_prefix`` get weight zero
    except ``special_prefix + completion``, which takes the whole block mass
    ``2**-m``.  Every other string keeps its uniform weight ``2**-n``.  Given
    the special prefix the rest of the key is therefore determined; given any
    other prefix the rest is uniform.
    """
    n = _check_n(n)
    m = _check_n(m)
    if m >= n:
        raise ValidationError(f"prefix length m={m} must be smaller than n={n}")
    if n > KPA_MAX_BITS:
        raise ValidationError(f"n={n} exceeds the cap of {KPA_MAX_BITS} bits")
    prefix = parse_bits(special_prefix if special_prefix is not None else "0" * m, "special_prefix")
    tail = parse_bits(completion if completion is not None else "0" * (n - m), "completion")
    if len(prefix) != m or len(tail) != n - m:
        raise ValidationError(f"need an {m}-bit prefix and an {n - m}-bit completion")
    lo, hi = prefix_block(n, prefix)
    target = int(prefix + tail, 2)
    ranges = [(lo, target, 0.0), (target, target + 1, 2.0**-m), (target + 1, hi, 0.0)]
    return Distribution.sparse(2**n, 2.0**-n, ranges=[r for r in ranges if r[1] > r[0]])


def naive_ber_bound(d: float) -> BoundReport:
    """Per-bit error rate bound ``(1 - d)/2 + d`` of the naive reading."""
    _check_d(d)
    return BoundReport(
        "naive_ber_bound", (1.0 - d) / 2 + d, {"d": d}, NAIVE, (NAIVE_BER_NOTE, BER_PRINT_NOTE)
    )


def markov_tail_bound(average_value: float, threshold: float) -> BoundReport:
    """Markov bound on the fraction of instances whose value reaches ``threshold``."""
    if threshold <= 0:
        raise ValidationError(f"threshold must be positive, got {threshold!r}")
    if average_value < 0:
        raise ValidationError(f"average_value must be non-negative, got {average_value!r}")
    return BoundReport(
        "markov_tail_bound",
        min(1.0, average_value / threshold),
        {"average_value": average_value, "threshold": threshold},
        DERIVED,
    )


def failure_per_bit(d: float, total_bits: float, accumulate_bits: float | None = None) -> PerBitReport:
    """``d / total_bits`` and, optionally, that rate summed over ``accumulate_bits``."""
    _check_d(d)
    if not total_bits >= 1:
        raise ValidationError(f"total_bits must be at least 1, got {total_bits!r}")
    per_bit = d / total_bits
    inputs = {"d": d, "total_bits": total_bits}
    accumulated = None
    if accumulate_bits is not None:
        if accumulate_bits < 0:
            raise ValidationError(f"accumulate_bits must be non-negative, got {accumulate_bits!r}")
        inputs["accumulate_bits"] = accumulate_bits
        accumulated = d * (accumulate_bits / total_bits)
    return PerBitReport("failure_per_bit", per_bit, inputs, NAIVE, (PER_BIT_NOTE,), accumulated)
