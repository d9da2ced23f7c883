"""Finite prefixes of real sequences and the elementary operations on them.

Every infinite sequence is held as an explicit prefix together with the
index its first entry corresponds to. Weights, partial sums and series
terms start at 0; ``X_n`` and Cesaro ``t_n`` start at 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError, InvalidInputError
from .reports import DEFAULT_THRESHOLDS, FAIL, INCONCLUSIVE, PASS, CheckReport, Thresholds

Generator = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class SequencePrefix:
    """Values ``s_base, s_{base+1}, ...`` of a real sequence.

    ``generator`` (optional) maps an integer index array to values and lets
    the prefix be regrown to any length with :meth:`extend`.
    """

    values: np.ndarray
    base: int = 0
    generator: Generator | None = None

    def __post_init__(self):
        arr = np.array(self.values, dtype=float).reshape(-1)
        if self.base not in (0, 1):
            raise InvalidInputError(f"index base must be 0 or 1, got {self.base}")
        if not np.all(np.isfinite(arr)):
            bad = int(np.argmax(~np.isfinite(arr))) + self.base
            raise InvalidInputError(f"non-finite entry at index {bad}")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @classmethod
    def from_generator(cls, generator: Generator, length: int, base: int = 0) -> "SequencePrefix":
        idx = np.arange(base, base + length)
        return cls(np.asarray(generator(idx), dtype=float), base, generator)

    def extend(self, length: int) -> "SequencePrefix":
        if self.generator is None:
            raise InvalidInputError("sequence has no generator; cannot extend")
        return SequencePrefix.from_generator(self.generator, length, self.base)

    def __len__(self) -> int:
        return self.values.size

    def __iter__(self):
        return iter(self.values)

    @property
    def indices(self) -> np.ndarray:
        return np.arange(self.base, self.base + len(self))

    @property
    def last_index(self) -> int:
        return self.base + len(self) - 1

    def at(self, n: int) -> float:
        """Value at index ``n`` (counted from ``base``)."""
        pos = n - self.base
        if not 0 <= pos < len(self):
            raise IndexError(f"index {n} outside prefix [{self.base}, {self.last_index}]")
        return float(self.values[pos])

    def window(self, start: int, stop: int) -> np.ndarray:
        """Values for indices ``start <= n < stop``."""
        lo, hi = start - self.base, stop - self.base
        if lo < 0 or hi > len(self):
            raise IndexError(f"indices [{start}, {stop}) outside prefix [{self.base}, {self.last_index}]")
        return self.values[lo:hi]

    def head(self, length: int) -> "SequencePrefix":
        if length > len(self):
            raise InvalidInputError(f"prefix has {len(self)} entries, {length} requested")
        return SequencePrefix(self.values[:length], self.base, self.generator)

    def __repr__(self) -> str:
        return f"SequencePrefix(base={self.base}, N={len(self)}, values={np.array2string(self.values, threshold=8)})"


def as_prefix(values, base: int = 0) -> SequencePrefix:
    if isinstance(values, SequencePrefix):
        return values
    return SequencePrefix(np.asarray(values, dtype=float), base)


@dataclass(frozen=True, eq=False)
class WeightSystem:
    """Positive weights ``p_n`` with ``P_n`` (base 0) and ``X_n`` (base 1)."""

    p: SequencePrefix
    P: SequencePrefix
    X: SequencePrefix

    def __len__(self) -> int:
        return len(self.p)

    def head(self, length: int) -> "WeightSystem":
        return build_weight_system(self.p.head(length))

    def ratio_P_over_p(self) -> np.ndarray:
        """``P_n / p_n`` for n = 0 .. N-1."""
        return self.P.values / self.p.values


@dataclass(frozen=True, eq=False)
class FactorProfile:
    """A factor sequence ``lambda_n`` with its quasi-monotone companion and tolerances.

    All three are indexed from 1. ``lam`` carries one entry more than the
    others so that ``lambda_n - lambda_{n+1}`` exists for every ``n``.
    """

    lam: SequencePrefix
    companion: SequencePrefix
    delta: SequencePrefix

    def __post_init__(self):
        if not (self.lam.base == self.companion.base == self.delta.base):
            raise InvalidInputError("lambda, companion and delta must share an index base")
        if len(self.lam) < len(self.companion) + 1:
            raise InvalidInputError(
                f"lambda needs {len(self.companion) + 1} entries to difference against "
                f"{len(self.companion)} companion entries, got {len(self.lam)}"
            )
        if len(self.delta) != len(self.companion):
            raise InvalidInputError("delta and companion lengths differ")
        if np.any(self.delta.values < 0):
            bad = int(np.argmax(self.delta.values < 0)) + self.delta.base
            raise DomainError(f"delta must be nonnegative; delta_{bad} < 0")

    def __len__(self) -> int:
        return len(self.companion)

    def head(self, length: int) -> "FactorProfile":
        return FactorProfile(self.lam.head(length + 1), self.companion.head(length), self.delta.head(length))


def forward_difference(s: SequencePrefix) -> SequencePrefix:
    """``(Delta s)_n = s_n - s_{n+1}``; one entry shorter than ``s``."""
    s = as_prefix(s)
    if len(s) < 2:
        raise InvalidInputError("forward_difference needs at least 2 entries")
    return SequencePrefix(s.values[:-1] - s.values[1:], s.base)


def partial_sums(s: SequencePrefix) -> SequencePrefix:
    s = as_prefix(s)
    if len(s) < 1:
        raise InvalidInputError("partial_sums needs at least 1 entry")
    return SequencePrefix(np.cumsum(s.values), s.base)


def build_weight_system(p: SequencePrefix) -> WeightSystem:
    p = as_prefix(p)
    if p.base != 0:
        raise InvalidInputError("weights p_n are indexed from 0")
    if len(p) < 1:
        raise InvalidInputError("weights must be nonempty")
    bad = np.flatnonzero(p.values <= 0)
    if bad.size:
        n = int(bad[0])
        raise DomainError(f"weights must be positive; p_{n} = {p.values[n]!r}")
    P = np.cumsum(p.values)
    X = np.cumsum(p.values[1:] / P[1:])
    return WeightSystem(p, SequencePrefix(P, 0), SequencePrefix(X, 1))


def total_variation(s: SequencePrefix) -> float:
    """Sum of ``|Delta s_n|`` over the prefix."""
    return math.fsum(np.abs(forward_difference(s).values))


def check_quasi_monotone(
    d: SequencePrefix,
    delta: SequencePrefix,
    tail_fraction: float | None = None,
    thresholds: Thresholds = DEFAULT_THRESHOLDS,
    check_id: str = "quasi_monotone",
) -> CheckReport:
    """Finite-prefix check that ``d`` is delta-quasi-monotone.

    Clauses: (i) ``Delta d_n >= -delta_n`` wherever both sides exist;
    (ii) ``d_n > 0`` on the final ``tail_fraction`` of the prefix;
    (iii) ``max |d_n|`` over the final ``decay_window`` is at most
    ``decay_ratio`` times the max over the rest, standing in for ``d_n -> 0``.
    """
    d, delta = as_prefix(d), as_prefix(delta)
    if tail_fraction is None:
        tail_fraction = thresholds.tail_fraction
    if not 0 < tail_fraction < 1:
        raise DomainError(f"tail_fraction must lie in (0, 1), got {tail_fraction}")
    if d.base != delta.base:
        raise InvalidInputError("d and delta must share an index base")
    N = len(d)
    if N < 2:
        raise InvalidInputError("need at least 2 terms of d")
    if len(delta) not in (N - 1, N):
        raise InvalidInputError(f"delta has {len(delta)} entries; expected {N - 1} or {N}")
    if np.any(delta.values < 0):
        raise DomainError("delta must be nonnegative")

    cutoff_pos = N - max(1, math.ceil(tail_fraction * N))
    window = max(1, math.ceil(thresholds.decay_window * N))
    used = {
        "tail_fraction": tail_fraction,
        "positivity_cutoff_index": cutoff_pos + d.base,
        "decay_ratio": thresholds.decay_ratio,
        "decay_window": thresholds.decay_window,
    }
    notes = []
    violations = []

    diff = d.values[:-1] - d.values[1:]
    bad = np.flatnonzero(diff < -delta.values[: N - 1])
    if bad.size:
        n = int(bad[0]) + d.base
        violations.append(n)
        notes.append(f"clause (i) Delta d_n >= -delta_n fails first at n={n}")

    bad = np.flatnonzero(d.values[cutoff_pos:] <= 0)
    if bad.size:
        n = int(bad[0]) + cutoff_pos + d.base
        violations.append(n)
        notes.append(f"clause (ii) d_n > 0 beyond n={cutoff_pos + d.base} fails first at n={n}")

    verdict_iii = PASS
    head_part = np.abs(d.values[: N - window])
    tail_part = np.abs(d.values[N - window :])
    if head_part.size == 0:
        verdict_iii = INCONCLUSIVE
        notes.append("clause (iii) prefix too short to compare head and tail")
    else:
        limit = thresholds.decay_ratio * float(head_part.max())
        over = np.flatnonzero(tail_part > limit)
        if over.size:
            n = int(over[0]) + N - window + d.base
            violations.append(n)
            notes.append(
                f"clause (iii) tail max {tail_part.max():.6g} exceeds "
                f"{thresholds.decay_ratio} x head max {head_part.max():.6g}; first at n={n}"
            )
    notes.append("'ultimately' is judged on the final tail_fraction of the prefix")

    if violations:
        return CheckReport(check_id, FAIL, None, min(violations), used, tuple(notes))
    return CheckReport(check_id, verdict_iii, None, None, used, tuple(notes))
