"""Born-rule statistical model over fixed-length sequences.

Probabilities are squared amplitude moduli of the network state; the
training objective is the free energy F(u|S) = −Σ_s m(s) log μ(s), whose
per-sequence mean differs from the KL divergence to the empirical
distribution only by the (parameter-independent) empirical entropy.

All logarithms are natural (nats).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Mapping, Sequence

from .network import SequenceState, TensorNetwork, amplitude

Distribution = dict[SequenceState, float]


@dataclass(frozen=True)
class SymbolSet:
    """Ordered alphabet. ``scheme`` records how tokens map back to text."""

    symbols: tuple
    scheme: str = "chars"

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(self.symbols))
        if not self.symbols:
            raise ValueError("symbol set must be nonempty")
        if len(set(self.symbols)) != len(self.symbols):
            raise ValueError("symbols must be distinct")

    @property
    def size(self) -> int:
        return len(self.symbols)

    def index(self) -> dict:
        return {tok: i for i, tok in enumerate(self.symbols)}


@dataclass(frozen=True)
class SampleMultiset:
    """Fixed-length training sequences with positive multiplicities."""

    n: int
    entries: Mapping[SequenceState, int]

    def __post_init__(self):
        entries = {tuple(int(x) for x in s): int(m) for s, m in dict(self.entries).items()}
        object.__setattr__(self, "entries", entries)
        if self.n < 1:
            raise ValueError("sequence length must be positive")
        for s, m in entries.items():
            if len(s) != self.n:
                raise ValueError(f"sequence {s} has length {len(s)}, expected {self.n}")
            if m < 1:
                raise ValueError(f"multiplicity of {s} must be >= 1, got {m}")

    @property
    def cardinality(self) -> int:
        return sum(self.entries.values())

    def items(self):
        return self.entries.items()


def born_probability(net: TensorNetwork, sequence: Sequence[int]) -> float:
    """Squared amplitude modulus of the basis sequence."""
    return abs(amplitude(net, sequence)) ** 2


def empirical_distribution(sample: SampleMultiset) -> Distribution:
    """Normalized frequencies m(s)/|S|."""
    total = sample.cardinality
    if total < 1:
        raise ValueError("empty sample")
    return {s: m / total for s, m in sample.items()}


def log_likelihood(net: TensorNetwork, sample: SampleMultiset) -> float:
    """Free energy F(u|S) = −Σ_s m(s) log μ(s). Lower is better.

    A zero-amplitude sample sequence makes the objective infinite; this is
    reported as ``inf`` together with a warning naming the sequence rather
    than being epsilon-smoothed away.
    """
    total = 0.0
    for s, m in sample.items():
        p = born_probability(net, s)
        if p == 0.0:
            warnings.warn(
                f"sequence {s} has zero model probability; objective is infinite",
                RuntimeWarning,
                stacklevel=2,
            )
            return math.inf
        total -= m * math.log(p)
    return total


def entropy(p: Distribution) -> float:
    """Shannon entropy in nats, with 0 log 0 = 0."""
    return -sum(w * math.log(w) for w in p.values() if w > 0.0)


def kl_divergence(p: Distribution, q: Distribution) -> float:
    """D(p‖q) = Σ p log(p/q), with 0 log(0/q) = 0.

    Returns ``inf`` when q(s) = 0 somewhere p(s) > 0: the divergence is
    genuinely infinite and no clipping is applied.
    """
    total = 0.0
    for s, ps in p.items():
        if ps <= 0.0:
            continue
        qs = q.get(s, 0.0)
        if qs <= 0.0:
            return math.inf
        total += ps * math.log(ps / qs)
    return max(total, 0.0)


def model_distribution(net: TensorNetwork, sequences: Sequence[SequenceState]) -> Distribution:
    """Born probabilities of the given sequences (not normalized over them)."""
    return {tuple(s): born_probability(net, s) for s in sequences}


def all_sequences(net: TensorNetwork) -> list[SequenceState]:
    """Every basis sequence of the network's Out space, in row-major order."""
    dims = net.site_dims
    total = 1
    for d in dims:
        total *= d
    seqs = []
    for flat in range(total):
        s = []
        rem = flat
        for d in reversed(dims):
            s.append(rem % d)
            rem //= d
        seqs.append(tuple(reversed(s)))
    return seqs
