"""Absolute summability index series and their boundedness diagnostics.

Each index ``sum_n c_n |D_n|^k`` is returned as its summands and partial
sums (both indexed from 1). Whether the series converges is only ever
estimated, see :func:`assess_boundedness`.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DomainError, InvalidInputError, NumericalError
from .matrices import NormalMatrix, apply_series_form
from .means import cesaro_means, riesz_mean
from .reports import DEFAULT_THRESHOLDS, FAIL, PASS, CheckReport, Thresholds
from .sequences import SequencePrefix, WeightSystem, as_prefix, partial_sums

# above this, (P_n/p_n)^(k-1) is formed in log space
_LOG_SPACE_RATIO = 1e8


@dataclass(frozen=True, eq=False)
class AbsoluteIndexTrace:
    method: str
    k: float
    terms: SequencePrefix
    cumulative: SequencePrefix

    def __len__(self) -> int:
        return len(self.terms)

    def to_json(self) -> dict:
        return {
            "method": self.method,
            "k": self.k,
            "n": self.terms.indices.tolist(),
            "term": self.terms.values.tolist(),
            "cumulative": self.cumulative.values.tolist(),
        }

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["n", "term", "cumulative"])
            for n, t, c in zip(self.terms.indices, self.terms.values, self.cumulative.values):
                writer.writerow([int(n), f"{t:.17g}", f"{c:.17g}"])

    @classmethod
    def read_csv(cls, path, method: str = "unknown", k: float = 1.0) -> "AbsoluteIndexTrace":
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        base = int(data[0, 0]) if data.size else 1
        return cls(method, k, SequencePrefix(data[:, 1], base), SequencePrefix(data[:, 2], base))

    def write_json(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json()))


def _trace(method: str, k: float, terms: np.ndarray) -> AbsoluteIndexTrace:
    return AbsoluteIndexTrace(method, k, SequencePrefix(terms, 1), SequencePrefix(np.cumsum(terms), 1))


def _check_k(k: float) -> float:
    k = float(k)
    if not k >= 1:
        raise DomainError(f"k must be at least 1, got {k}")
    return k


def _weighted_power(ratio: np.ndarray, diff: np.ndarray, k: float) -> np.ndarray:
    """``ratio^(k-1) |diff|^k``, in log space where ``ratio`` is huge."""
    absd = np.abs(diff)
    out = ratio ** (k - 1.0) * absd**k
    big = (ratio > _LOG_SPACE_RATIO) & (absd > 0)
    if np.any(big):
        out[big] = np.exp((k - 1.0) * np.log(ratio[big]) + k * np.log(absd[big]))
    return out


def cesaro_index(a: SequencePrefix, alpha: float, k: float, rtol: float = 1e-8) -> AbsoluteIndexTrace:
    """Summands ``|t_n^alpha|^k / n`` of the ``|C, alpha|_k`` index.

    The equivalent form ``n^(k-1) |u_n - u_{n-1}|^k`` is computed as well;
    a disagreement beyond ``rtol`` raises :class:`NumericalError`.
    """
    k = _check_k(k)
    a = as_prefix(a)
    if len(a) < 2:
        raise InvalidInputError("need at least 2 series terms")
    means = cesaro_means(a, alpha)
    n = means.t.indices.astype(float)
    terms = np.abs(means.t.values) ** k / n
    other = n ** (k - 1.0) * np.abs(np.diff(means.u.values)) ** k
    scale = max(float(np.max(terms)), np.finfo(float).tiny)
    if not np.allclose(other, terms, rtol=rtol, atol=rtol * scale):
        worst = int(np.argmax(np.abs(other - terms))) + 1
        raise NumericalError(f"the two |C,{alpha}|_{k} forms disagree at n={worst}")
    return _trace("cesaro", k, terms)


def riesz_index(a: SequencePrefix, w: WeightSystem, k: float) -> AbsoluteIndexTrace:
    """Summands ``(P_n/p_n)^(k-1) |w_n - w_{n-1}|^k`` of the ``|N, p_n|_k`` index."""
    k = _check_k(k)
    a = as_prefix(a)
    if len(a) < 2:
        raise InvalidInputError("need at least 2 series terms")
    wn = riesz_mean(partial_sums(a), w).values
    N = len(a)
    ratio = w.ratio_P_over_p()[1:N]
    return _trace("riesz", k, _weighted_power(ratio, np.diff(wn), k))


def matrix_index(a: SequencePrefix, A: NormalMatrix, w: WeightSystem, k: float) -> AbsoluteIndexTrace:
    """Summands ``(P_n/p_n)^(k-1) |dA_n(s)|^k`` of the ``|A, p_n|_k`` index."""
    k = _check_k(k)
    a = as_prefix(a)
    if A.size < 2:
        raise InvalidInputError("matrix needs at least 2 rows")
    if len(w) < A.size:
        raise InvalidInputError(f"weights cover {len(w)} indices, matrix has {A.size} rows")
    dA = apply_series_form(A, a).dAn.values
    ratio = w.ratio_P_over_p()[1 : A.size]
    return _trace("matrix", k, _weighted_power(ratio, dA, k))


@dataclass(frozen=True)
class BoundednessVerdict:
    bounded_estimate: bool
    tail_increment: float
    fitted_growth_exponent: float
    prefix_length: int
    tail_threshold: float
    growth_threshold: float
    final_value: float

    def to_dict(self) -> dict:
        return {
            "bounded_estimate": self.bounded_estimate,
            "tail_increment": self.tail_increment,
            "fitted_growth_exponent": self.fitted_growth_exponent,
            "prefix_length": self.prefix_length,
            "tail_threshold": self.tail_threshold,
            "growth_threshold": self.growth_threshold,
            "final_value": self.final_value,
        }


def _cumulative_values(obj) -> np.ndarray:
    if isinstance(obj, AbsoluteIndexTrace):
        return obj.cumulative.values
    return as_prefix(obj).values


def assess_boundedness(trace, thresholds: Thresholds = DEFAULT_THRESHOLDS) -> BoundednessVerdict:
    """Estimate whether the partial sums ``S_m`` stay bounded.

    Two signals over the final half of the prefix: the increment
    ``S_N - S_{N/2}`` must stay below ``tail_rel * S_N + tail_abs``, and the
    power-law exponent through the two endpoints, ``log2(S_N / S_{N/2})``,
    must stay below ``growth_max``.
    """
    S = _cumulative_values(trace)
    N = S.size
    if N < 16:
        raise InvalidInputError(f"need at least 16 partial sums, got {N}")
    s_end, s_mid = float(S[-1]), float(S[N // 2 - 1])
    increment = abs(s_end - s_mid)
    tail_threshold = thresholds.tail_rel * abs(s_end) + thresholds.tail_abs
    if s_end <= 0 or s_end == s_mid:
        exponent = 0.0
    elif s_mid <= 0:
        exponent = math.inf
    else:
        exponent = math.log2(s_end / s_mid)
    bounded = increment < tail_threshold and exponent < thresholds.growth_max
    return BoundednessVerdict(bounded, increment, exponent, N, tail_threshold, thresholds.growth_max, s_end)


def boundedness_report(check_id: str, trace, thresholds: Thresholds = DEFAULT_THRESHOLDS) -> CheckReport:
    """:func:`assess_boundedness` as a :class:`CheckReport`.

    A failing report points at the first index of the final half where the
    partial sums have moved away from ``S_{N/2}``.
    """
    S = _cumulative_values(trace)
    base = trace.cumulative.base if isinstance(trace, AbsoluteIndexTrace) else as_prefix(trace).base
    verdict = assess_boundedness(trace, thresholds)
    used = {
        "tail_rel": thresholds.tail_rel,
        "tail_abs": thresholds.tail_abs,
        "growth_max": thresholds.growth_max,
    }
    notes = (
        f"S_N = {verdict.final_value:.17g}",
        f"tail increment S_N - S_(N/2) = {verdict.tail_increment:.6g} (threshold {verdict.tail_threshold:.6g})",
        f"growth exponent log2(S_N/S_(N/2)) = {verdict.fitted_growth_exponent:.6g}",
        f"prefix length N = {verdict.prefix_length}",
    )
    if verdict.bounded_estimate:
        return CheckReport(check_id, PASS, verdict.final_value, None, used, notes)
    mid = S.size // 2 - 1
    grown = np.flatnonzero(S[mid:] != S[mid])
    first = int(grown[0]) + mid + base if grown.size else S.size - 1 + base
    return CheckReport(check_id, FAIL, None, first, used, notes)
