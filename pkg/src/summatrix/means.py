"""Cesaro means of order alpha and Riesz (weighted) means."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InvalidInputError
from .sequences import SequencePrefix, WeightSystem, as_prefix, partial_sums


def _check_order(alpha: float) -> float:
    alpha = float(alpha)
    if not alpha > -1:
        raise DomainError(f"Cesaro order must exceed -1, got {alpha}")
    return alpha


def cesaro_coefficients(alpha: float, count: int) -> np.ndarray:
    """``A_0^alpha, ..., A_{count-1}^alpha`` by the product recurrence.

    No domain check: orders down to -2 occur internally as ``alpha - 1``.
    """
    if count <= 0:
        return np.empty(0)
    n = np.arange(1, count, dtype=float)
    return np.concatenate(([1.0], np.cumprod((alpha + n) / n)))


def cesaro_coefficient(alpha: float, n: int) -> float:
    """``A_n^alpha = (alpha+1)...(alpha+n)/n!``; zero for negative ``n``."""
    alpha = _check_order(alpha)
    if n < 0:
        return 0.0
    value = 1.0
    for j in range(1, n + 1):
        value *= (alpha + j) / j
    return value


@dataclass(frozen=True, eq=False)
class CesaroMeans:
    """``u`` holds means of the partial sums (base 0); ``t`` of ``n a_n`` (base 1)."""

    alpha: float
    u: SequencePrefix
    t: SequencePrefix


def cesaro_means(a: SequencePrefix, alpha: float) -> CesaroMeans:
    a = as_prefix(a)
    alpha = _check_order(alpha)
    if a.base != 0:
        raise InvalidInputError("series terms a_n are indexed from 0")
    N = len(a)
    if N < 1:
        raise InvalidInputError("series must be nonempty")
    s = partial_sums(a).values
    norm = cesaro_coefficients(alpha, N)
    n = np.arange(N, dtype=float)
    if alpha == 1.0:
        # A_n^1 = n + 1 and A_{n-v}^0 = 1: both sums are running sums
        norm = n + 1.0
        u = np.cumsum(s) / norm
        t = np.cumsum(n * a.values) / norm
    else:
        kernel = cesaro_coefficients(alpha - 1.0, N)
        u = np.convolve(kernel, s)[:N] / norm
        t = np.convolve(kernel, n * a.values)[:N] / norm
    return CesaroMeans(alpha, SequencePrefix(u, 0), SequencePrefix(t[1:], 1))


def riesz_mean(s: SequencePrefix, w: WeightSystem) -> SequencePrefix:
    """``w_n = (1/P_n) sum_{v<=n} p_v s_v``."""
    s = as_prefix(s)
    if s.base != 0:
        raise InvalidInputError("partial sums s_n are indexed from 0")
    N = len(s)
    if N > len(w):
        raise InvalidInputError(f"weights cover {len(w)} indices, sequence has {N}")
    p = w.p.values[:N]
    return SequencePrefix(np.cumsum(p * s.values) / w.P.values[:N], 0)
