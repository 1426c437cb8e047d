"""Multi-round leakage simulator.

Each round produces a ``key_len``-bit key whose criterion value averages
``d_level``.  The adversary models are the worst cases such an average still
allows: a round is either fully exposed or untouched, so leaked bits come in
whole-key blocks.  Rounds are independent of each other; bits inside a round
are not.

Per-round randomness is keyed by ``(seed, block index)`` through
``numpy.random.SeedSequence`` spawn keys, so blocks can be evaluated in any
order or in parallel and the totals are bit-identical to a sequential run.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .bounds import failure_per_bit, markov_tail_bound
from .errors import ValidationError

FULL_ROUND = "full-round-bernoulli"
THRESHOLD = "per-round-threshold"
ADVERSARIES = (FULL_ROUND, THRESHOLD)
BLOCK_ROUNDS = 1 << 16

ACCUMULATED_READINGS = (
    "accumulated bit-failure probability: expected number of failed bits over all l bits",
    "probability that all l bits are compromised together",
)


@dataclass(frozen=True)
class SimConfig:
    rounds: int
    key_len: int
    d_level: float
    adversary: str = FULL_ROUND
    threshold: float | None = None
    seed: int = 0

    def __post_init__(self):
        for name in ("rounds", "key_len"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < 1:
                raise ValidationError(f"{name} must be a positive integer, got {value!r}")
        if not 0.0 <= self.d_level <= 1.0:
            raise ValidationError(f"d_level must lie in [0, 1], got {self.d_level!r}")
        if self.adversary not in ADVERSARIES:
            raise ValidationError(f"adversary must be one of {ADVERSARIES}, got {self.adversary!r}")
        if self.adversary == THRESHOLD:
            if self.threshold is None or not 0.0 < self.threshold <= 1.0:
                raise ValidationError(f"threshold must lie in (0, 1], got {self.threshold!r}")
        elif self.threshold is not None:
            raise ValidationError(f"threshold only applies to the {THRESHOLD!r} adversary")
        if isinstance(self.seed, bool) or not isinstance(self.seed, (int, np.integer)) or not 0 <= self.seed < 2**64:
            raise ValidationError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")

    @property
    def total_bits(self) -> int:
        return self.rounds * self.key_len

    @classmethod
    def from_dict(cls, data) -> "SimConfig":
        if not isinstance(data, dict):
            raise ValidationError("simulation config must be a JSON object")
        unknown = set(data) - {"rounds", "key_len", "d_level", "adversary", "threshold", "seed"}
        if unknown:
            raise ValidationError(f"simulation config: unknown fields {sorted(unknown)}")
        missing = {"rounds", "key_len", "d_level"} - set(data)
        if missing:
            raise ValidationError(f"simulation config: missing fields {sorted(missing)}")
        return cls(**data)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class SimReport:
    config: SimConfig
    rounds_compromised: float
    bits_leaked: float
    leaked_fraction: float
    naive_accumulated_failure: float
    expected_fraction: float
    std_error: float
    kind: str = "monte-carlo"

    @property
    def seed_echo(self) -> int:
        return self.config.seed

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "config": self.config.to_dict(),
            "seed_echo": self.seed_echo,
            "total_bits": self.config.total_bits,
            "rounds_compromised": self.rounds_compromised,
            "bits_leaked": self.bits_leaked,
            "leaked_fraction": self.leaked_fraction,
            "expected_fraction": self.expected_fraction,
            "std_error": self.std_error,
            "naive_accumulated_failure": self.naive_accumulated_failure,
            "naive_accumulated_failure_derivation": "naive-interpretation",
            "naive_accumulated_failure_readings": list(ACCUMULATED_READINGS),
        }


def compromise_probability(config: SimConfig) -> float:
    """Per-round probability that the adversary model exposes the whole key."""
    if config.adversary == FULL_ROUND:
        return config.d_level
    return markov_tail_bound(config.d_level, config.threshold).value


def _naive_accumulated(config):
    l = config.total_bits
    return failure_per_bit(config.d_level, l, l).accumulated


def analytic_expectation(config: SimConfig) -> SimReport:
    """Closed-form mean and Monte Carlo standard error for ``config``."""
    p = compromise_probability(config)
    mean_rounds = p * config.rounds
    return SimReport(
        config,
        rounds_compromised=mean_rounds,
        bits_leaked=mean_rounds * config.key_len,
        leaked_fraction=p,
        naive_accumulated_failure=_naive_accumulated(config),
        expected_fraction=p,
        std_error=math.sqrt(p * (1.0 - p) / config.rounds),
        kind="analytic",
    )


def _block_count(seed, block, n_rounds, p):
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(block,))))
    return int(np.count_nonzero(rng.random(n_rounds) < p))


def simulate_rounds(config: SimConfig, workers: int = 1) -> SimReport:
    """Monte Carlo realization of the leakage over ``config.rounds`` rounds.

    ``workers > 1`` evaluates round blocks on a thread pool; the result is
    identical to ``workers=1``.
    """
    p = compromise_probability(config)
    n_blocks = -(-config.rounds // BLOCK_ROUNDS)
    sizes = [min(BLOCK_ROUNDS, config.rounds - b * BLOCK_ROUNDS) for b in range(n_blocks)]
    if workers > 1 and n_blocks > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            counts = list(pool.map(_block_count, [config.seed] * n_blocks, range(n_blocks), sizes, [p] * n_blocks))
    else:
        counts = [_block_count(config.seed, b, size, p) for b, size in enumerate(sizes)]
    compromised = sum(counts)
    bits = compromised * config.key_len
    expected = analytic_expectation(config)
    return SimReport(
        config,
        rounds_compromised=compromised,
        bits_leaked=bits,
        leaked_fraction=bits / config.total_bits,
        naive_accumulated_failure=expected.naive_accumulated_failure,
        expected_fraction=expected.expected_fraction,
        std_error=expected.std_error,
    )
