"""Fourier coefficients, the symmetrization phi, its fractional means and z_n.

Quadrature is composite Simpson on uniform grids. Panels are split at
declared jump points and never straddle them; values at a segment's ends
are taken as one-sided limits by nudging inward.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DomainError, InvalidInputError
from .means import cesaro_means
from .sequences import SequencePrefix, as_prefix

TWO_PI = 2.0 * math.pi
_NUDGE = 1e-12  # relative inward offset for one-sided endpoint values


def wrap(t):
    """Map ``t`` into ``(-pi, pi]``."""
    t = np.asarray(t, dtype=float)
    w = np.mod(t + math.pi, TWO_PI) - math.pi
    return np.where(w == -math.pi, math.pi, w)


@dataclass(frozen=True)
class PeriodicFunction:
    """A function on ``(-pi, pi]`` extended with period ``2 pi``.

    ``evaluator`` must accept numpy arrays. ``jumps`` lists the known
    discontinuities in ``(-pi, pi]``.
    """

    evaluator: Callable[[np.ndarray], np.ndarray]
    description: str = ""
    jumps: tuple[float, ...] = field(default=())

    def __post_init__(self):
        probe = np.linspace(-math.pi, math.pi, 4096, endpoint=False) + math.pi / 4096
        if not np.all(np.isfinite(self(probe))):
            raise InvalidInputError(f"function {self.description!r} is not finite on the probe grid")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return np.broadcast_to(np.asarray(self.evaluator(wrap(t)), dtype=float), t.shape).copy()


def _segments(lo: float, hi: float, breaks) -> list[tuple[float, float]]:
    cuts = sorted({b for b in breaks if lo < b < hi})
    edges = [lo, *cuts, hi]
    return [(a, b) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def _jump_positions(jumps, lo: float, hi: float) -> list[float]:
    """All periodic copies of ``jumps`` that fall inside ``[lo, hi]``."""
    out = []
    for j in jumps:
        first = math.ceil((lo - j) / TWO_PI)
        last = math.floor((hi - j) / TWO_PI)
        out.extend(j + m * TWO_PI for m in range(first, last + 1))
    return out


def _simpson_nodes(segments, intervals: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of composite Simpson over ``segments``.

    ``intervals`` is spread over the segments by length, each getting an even
    count of at least 2.
    """
    total = sum(b - a for a, b in segments)
    nodes, weights = [], []
    for a, b in segments:
        m = max(2, int(round(intervals * (b - a) / total)))
        m += m % 2
        x = np.linspace(a, b, m + 1)
        eps = _NUDGE * (b - a)
        x[0] += eps
        x[-1] -= eps
        w = np.full(m + 1, 2.0)
        w[1::2] = 4.0
        w[0] = w[-1] = 1.0
        nodes.append(x)
        weights.append(w * (b - a) / (3.0 * m))
    return np.concatenate(nodes), np.concatenate(weights)


def _coefficient_integrals(f: PeriodicFunction, N: int, intervals: int) -> np.ndarray:
    """``(1/pi) int f(t) e^{int} dt`` for n = 0..N on ``[-pi, pi]``."""
    x, wts = _simpson_nodes(_segments(-math.pi, math.pi, f.jumps), intervals)
    fw = f(x) * wts / math.pi
    step = np.exp(1j * x)
    out = np.empty(N + 1, dtype=complex)
    # re-anchor the phasor recurrence every block to bound drift
    block = 64
    for start in range(0, N + 1, block):
        phase = np.exp(1j * start * x)
        for n in range(start, min(start + block, N + 1)):
            out[n] = np.dot(fw, phase)
            phase *= step
    return out


@dataclass(frozen=True, eq=False)
class FourierData:
    """Coefficients ``a_n, b_n`` and terms ``C_n(x)``, all indexed from 1."""

    a: SequencePrefix
    b: SequencePrefix
    x: float
    C: SequencePrefix
    a0: float = 0.0
    quadrature_error: float = 0.0

    def series_terms(self) -> SequencePrefix:
        """``C_n(x)`` with a zero constant term prepended (indexed from 0)."""
        return SequencePrefix(np.concatenate(([0.0], self.C.values)), 0)


def fourier_coefficients(
    f: PeriodicFunction, N: int, quadrature_points: int | None = None, with_error: bool = False
):
    """``a_n, b_n`` for n = 1..N by composite Simpson.

    ``quadrature_points`` counts Simpson intervals over ``[-pi, pi]`` and must
    be at least ``8 N``; default is ``max(8192, 8 N)``. With ``with_error``
    also returns ``a_0`` and a Richardson estimate (grid vs half grid) of the
    largest coefficient error.
    """
    if N < 1:
        raise InvalidInputError("need N >= 1")
    if quadrature_points is None:
        quadrature_points = max(8192, 8 * N)
    if quadrature_points < 8 * N:
        raise InvalidInputError(f"quadrature_points must be at least 8*N = {8 * N}, got {quadrature_points}")
    fine = _coefficient_integrals(f, N, quadrature_points)
    a = SequencePrefix(fine.real[1:], 1)
    b = SequencePrefix(fine.imag[1:], 1)
    if not with_error:
        return a, b
    coarse = _coefficient_integrals(f, N, quadrature_points // 2)
    err = float(np.max(np.abs(fine - coarse))) / 15.0
    return a, b, float(fine.real[0]), err


def fourier_data(f: PeriodicFunction, x: float, N: int, quadrature_points: int | None = None) -> FourierData:
    a, b, a0, err = fourier_coefficients(f, N, quadrature_points, with_error=True)
    n = np.arange(1, N + 1)
    C = a.values * np.cos(n * x) + b.values * np.sin(n * x)
    return FourierData(a, b, float(x), SequencePrefix(C, 1), a0, err)


def phi(f: PeriodicFunction, x: float) -> PeriodicFunction:
    """``phi(t) = (f(x+t) + f(x-t)) / 2``, meaningful on ``(0, pi)``."""
    jumps = set()
    for j in f.jumps:
        for t in (j - x, x - j):
            tw = float(wrap(t))
            if 0 < abs(tw) < math.pi:
                jumps.add(abs(tw))
    return PeriodicFunction(
        lambda t: 0.5 * (f(x + t) + f(x - t)),
        f"phi[{f.description}, x={x:.6g}]",
        tuple(sorted(jumps)),
    )


def phi_alpha(g: PeriodicFunction, alpha: float, t, quadrature_points: int = 4096):
    """``(alpha / t^alpha) int_0^t (t-u)^(alpha-1) g(u) du`` for ``t`` in ``(0, pi]``.

    For ``alpha >= 1`` the integrand is bounded and integrated directly. For
    ``alpha < 1`` the substitution ``u = t (1 - s^(1/alpha))`` removes the
    endpoint singularity. ``t`` may be a scalar or an array.
    """
    alpha = float(alpha)
    if not alpha > 0:
        raise DomainError(f"alpha must be positive, got {alpha}")
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(ts <= 0):
        raise DomainError("phi_alpha needs t > 0")
    out = np.empty(ts.shape)
    for i, ti in enumerate(ts):
        jumps = _jump_positions(g.jumps, 0.0, ti)
        if alpha >= 1:
            u, w = _simpson_nodes(_segments(0.0, ti, jumps), quadrature_points)
            out[i] = alpha / ti**alpha * np.dot(w, (ti - u) ** (alpha - 1.0) * g(u))
        else:
            s_breaks = [(1.0 - j / ti) ** alpha for j in jumps]
            s, w = _simpson_nodes(_segments(0.0, 1.0, s_breaks), quadrature_points)
            out[i] = np.dot(w, g(ti * (1.0 - s ** (1.0 / alpha))))
    return float(out[0]) if np.ndim(t) == 0 else out


def phi_alpha_function(g: PeriodicFunction, alpha: float, quadrature_points: int = 1024):
    """``t -> phi_alpha(t)`` on ``(0, pi]`` as a vectorized callable."""

    def evaluate(t):
        t = np.asarray(t, dtype=float)
        return np.asarray(phi_alpha(g, alpha, t.reshape(-1), quadrature_points)).reshape(t.shape)

    return evaluate


def z_mean(C: SequencePrefix) -> SequencePrefix:
    """``z_n = (1/(n+1)) sum_{v=1..n} v C_v``."""
    C = as_prefix(C, base=1)
    if len(C) == 0:
        raise InvalidInputError("z_mean needs at least one term")
    if C.base != 1:
        raise InvalidInputError("C_v is indexed from 1")
    v = C.indices.astype(float)
    return SequencePrefix(np.cumsum(v * C.values) / (v + 1.0), 1)


def z_via_cesaro(C: SequencePrefix) -> SequencePrefix:
    """``z_n`` as the order-1 Cesaro ``t_n`` of the series with terms ``C_v``."""
    terms = SequencePrefix(np.concatenate(([0.0], as_prefix(C, base=1).values)), 0)
    return cesaro_means(terms, 1.0).t


def bv_estimate(g, interval: tuple[float, float], grid_points: int) -> float:
    """Total variation of ``g`` sampled on a uniform grid over the open interval."""
    lo, hi = map(float, interval)
    if not lo < hi:
        raise InvalidInputError(f"empty interval ({lo}, {hi})")
    if grid_points < 64:
        raise InvalidInputError(f"grid_points must be at least 64, got {grid_points}")
    t = np.linspace(lo, hi, grid_points)
    eps = _NUDGE * (hi - lo)
    t[0] += eps
    t[-1] -= eps
    values = np.asarray(g(t), dtype=float)
    return float(np.sum(np.abs(np.diff(values))))


def bv_profile(g, interval: tuple[float, float], start: int = 64, stop: int = 8192) -> list[tuple[int, float]]:
    """``bv_estimate`` on dyadically refined grids ``start, 2 start, ..., stop``."""
    out = []
    m = start
    while m <= stop:
        out.append((m, bv_estimate(g, interval, m)))
        m *= 2
    return out
