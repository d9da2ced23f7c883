"""Finite-prefix checks of the summability-factor hypotheses and conclusions.

O(.) claims are judged by :func:`~summatrix.reports.sup_stabilization`,
"< infinity" claims by :func:`~summatrix.indices.boundedness_report`, and
pointwise inequalities exactly (up to a stated float tolerance).
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError, InvalidInputError
from .indices import boundedness_report
from .matrices import NormalMatrix, WeightedMeanMatrix, _offset, associate
from .means import cesaro_means
from .reports import (
    DEFAULT_THRESHOLDS,
    FAIL,
    INCONCLUSIVE,
    PASS,
    CheckReport,
    Thresholds,
    sup_stabilization,
)
from .sequences import (
    FactorProfile,
    SequencePrefix,
    WeightSystem,
    as_prefix,
    check_quasi_monotone,
)


def canonical_profile(w: WeightSystem, N: int) -> FactorProfile:
    """A factor profile built to satisfy the factor hypotheses for weights ``w``.

    ``lambda_n = 1/X_n^2``, companion ``A_n = |Delta lambda_n| + 1/(n^2 X_n)``
    and ``delta_n = max(0, -Delta A_n) + 1/(n^3 X_n)``, for n = 1..N
    (``lambda`` to N+1). Needs ``X_1 .. X_{N+2}``.
    """
    if len(w.X) < N + 2:
        raise InvalidInputError(f"weights give X_1..X_{len(w.X)}; need X_{N + 2}")
    X = w.X.values[: N + 2]
    n = np.arange(1, N + 3, dtype=float)
    lam = 1.0 / X**2
    A = np.abs(lam[:-1] - lam[1:]) + 1.0 / (n[:-1] ** 2 * X[:-1])
    delta = np.maximum(0.0, -(A[:-1] - A[1:])) + 1.0 / (n[:-2] ** 3 * X[:-2])
    return FactorProfile(SequencePrefix(lam[: N + 1], 1), SequencePrefix(A[:N], 1), SequencePrefix(delta, 1))


def constant_profile(w: WeightSystem, N: int, value: float = 1.0) -> FactorProfile:
    """``lambda_n = value`` with the canonical cushion as companion: a negative control."""
    if len(w.X) < N:
        raise InvalidInputError(f"weights give X_1..X_{len(w.X)}; need X_{N}")
    X = w.X.values[:N]
    n = np.arange(1, N + 1, dtype=float)
    A = 1.0 / (n**2 * X)
    dA = np.append(A[:-1] - A[1:], A[-1])
    delta = np.maximum(0.0, -dA) + 1.0 / (n**3 * X)
    return FactorProfile(SequencePrefix(np.full(N + 1, value), 1), SequencePrefix(A, 1), SequencePrefix(delta, 1))


def zero_profile(N: int) -> FactorProfile:
    zeros = np.zeros(N)
    return FactorProfile(SequencePrefix(np.zeros(N + 1), 1), SequencePrefix(zeros, 1), SequencePrefix(zeros, 1))


def _x_for(w: WeightSystem, N: int) -> np.ndarray:
    if len(w.X) < N:
        raise InvalidInputError(f"weights give X_1..X_{len(w.X)}; need X_{N}")
    return w.X.values[:N]


def check_Pn_O_npn(w: WeightSystem, thresholds: Thresholds = DEFAULT_THRESHOLDS) -> CheckReport:
    """``P_n = O(n p_n)``: stabilization of ``sup P_n / (n p_n)`` over n >= 1."""
    if len(w) < 16:
        raise InvalidInputError(f"need at least 16 weights, got {len(w)}")
    n = np.arange(1, len(w))
    ratio = w.P.values[1:] / (n * w.p.values[1:])
    return sup_stabilization("Pn=O(n*pn)", ratio, n, thresholds)


def check_factor_hypotheses(
    fp: FactorProfile, w: WeightSystem, thresholds: Thresholds = DEFAULT_THRESHOLDS
) -> list[CheckReport]:
    """Reports for the factor hypotheses, in order:

    companion delta-quasi-monotone; ``sum n X_n delta_n`` bounded;
    ``sum A_n X_n`` convergent; ``|Delta lambda_n| <= |A_n|`` pointwise;
    ``lambda_n -> 0``.
    """
    N = len(fp)
    X = _x_for(w, N)
    n = np.arange(1, N + 1, dtype=float)
    A = fp.companion.values
    reports = []

    if not np.any(A):
        reports.append(
            CheckReport(
                "factor.quasi_monotone",
                PASS,
                thresholds={"tail_fraction": thresholds.tail_fraction},
                notes=("companion is identically zero; the positivity clause is waived as the degenerate case",),
            )
        )
    else:
        reports.append(check_quasi_monotone(fp.companion, fp.delta, thresholds=thresholds, check_id="factor.quasi_monotone"))

    reports.append(boundedness_report("factor.sum_nX_delta", SequencePrefix(np.cumsum(n * X * fp.delta.values), 1), thresholds))
    reports.append(boundedness_report("factor.sum_AX", SequencePrefix(np.cumsum(A * X), 1), thresholds))

    dlam = np.abs(fp.lam.values[:N] - fp.lam.values[1 : N + 1])
    bad = np.flatnonzero(dlam > np.abs(A))
    if bad.size:
        reports.append(
            CheckReport(
                "factor.dlambda_le_A",
                FAIL,
                first_violation=int(bad[0]) + 1,
                notes=(f"{bad.size} violation(s) of |Delta lambda_n| <= |A_n|",),
            )
        )
    else:
        reports.append(CheckReport("factor.dlambda_le_A", PASS))

    reports.append(_null_report("factor.lambda_null", fp.lam.values[:N], thresholds))
    return reports


def _null_report(check_id: str, values: np.ndarray, thresholds: Thresholds) -> CheckReport:
    """``x_n -> 0`` proxy: final-window max of |x| against the head max."""
    N = values.size
    window = max(1, int(np.ceil(thresholds.decay_window * N)))
    head = np.abs(values[: N - window])
    tail = np.abs(values[N - window :])
    used = {"decay_ratio": thresholds.decay_ratio, "decay_window": thresholds.decay_window}
    if head.size == 0:
        return CheckReport(check_id, INCONCLUSIVE, thresholds=used, notes=("prefix too short",))
    limit = thresholds.decay_ratio * float(head.max())
    over = np.flatnonzero(tail > limit)
    if over.size:
        first = int(over[0]) + N - window + 1
        return CheckReport(
            check_id, FAIL, None, first, used,
            (f"tail max {tail.max():.6g} > {thresholds.decay_ratio} x head max {head.max():.6g}",),
        )
    return CheckReport(check_id, PASS, thresholds=used)


def check_tn_condition(
    a: SequencePrefix, w: WeightSystem, k: float, thresholds: Thresholds = DEFAULT_THRESHOLDS
) -> CheckReport:
    """``sum_{n<=m} (p_n/P_n) |t_n|^k / X_n^(k-1) = O(X_m)`` with ``t_n`` the (C,1) mean of ``n a_n``."""
    k = float(k)
    if not k >= 1:
        raise DomainError(f"k must be at least 1, got {k}")
    a = as_prefix(a)
    t = cesaro_means(a, 1.0).t.values
    M = t.size
    if M < 1:
        raise InvalidInputError("need at least 2 series terms")
    X = _x_for(w, M)
    pn_Pn = w.p.values[1 : M + 1] / w.P.values[1 : M + 1]
    S = np.cumsum(pn_Pn * np.abs(t) ** k / X ** (k - 1.0))
    report = sup_stabilization(f"tn_condition[k={k:g}]", S / X, np.arange(1, M + 1), thresholds)
    return report


def _require_positive(A: NormalMatrix) -> None:
    if isinstance(A, WeightedMeanMatrix):
        return  # p_v / P_n > 0 by construction
    neg = np.flatnonzero(A.packed < 0)
    if neg.size:
        raise DomainError(f"positive normal matrix required: packed entry {int(neg[0])} is negative")
    diag = A.diagonal()
    if np.any(diag <= 0):
        n = int(np.argmax(diag <= 0))
        raise DomainError(f"positive normal matrix required: a_{{{n},{n}}} <= 0")


_POSITIVITY_NOTE = "positivity convention: entries >= 0 and diagonal > 0"
_DELTA_NOTE = "hat_bound uses the row difference a_{nv} - a_{n-1,v} for the bar-Delta"


def check_matrix_conditions(
    A: NormalMatrix, w: WeightSystem, thresholds: Thresholds = DEFAULT_THRESHOLDS
) -> list[CheckReport]:
    """The four matrix conditions: ``abar_{n0} = 1``; ``a_{n-1,v} >= a_{nv}``;
    ``a_{nn} = O(p_n/P_n)``; ``ahat_{n,v+1} = O(v |a_{nv} - a_{n-1,v}|)``.

    Weighted-mean matrices are checked through their closed forms, which
    reduce column_nonincreasing to ``P_{n-1} <= P_n`` and the hat_bound ratio to ``P_v / (v p_v)``.
    """
    _require_positive(A)
    N = A.size
    if len(w) < N:
        raise InvalidInputError(f"weights cover {len(w)} rows, matrix has {N}")
    if N < 4:
        raise InvalidInputError("need at least 4 rows")
    if isinstance(A, WeightedMeanMatrix):
        return _weighted_mean_conditions(A, w, thresholds)

    assoc = associate(A)
    tol = thresholds.exact_tol
    reports = []

    starts = np.array([_offset(n) for n in range(N)])
    abar0 = assoc.abar[starts]
    bad = np.flatnonzero(np.abs(abar0 - 1.0) > tol)
    reports.append(_exact_report("matrix.row_sum_one", bad, {"exact_tol": tol}))

    first20 = None
    for n in range(1, N):
        diff = A.row(n - 1) - A.row(n)[:n]
        bad = np.flatnonzero(diff < -thresholds.monotone_tol)
        if bad.size:
            first20 = (n, int(bad[0]))
            break
    if first20 is None:
        reports.append(CheckReport("matrix.column_nonincreasing", PASS, thresholds={"monotone_tol": thresholds.monotone_tol}))
    else:
        reports.append(CheckReport("matrix.column_nonincreasing", FAIL, None, first20, {"monotone_tol": thresholds.monotone_tol}))

    n_idx = np.arange(N)
    ratio21 = A.diagonal() * w.ratio_P_over_p()[:N]
    reports.append(sup_stabilization("matrix.diagonal_bound", ratio21, n_idx, thresholds))

    row_sup = np.zeros(N - 2)
    for n in range(2, N):
        v = np.arange(1, n)
        dbar = A.row(n)[1:n] - A.row(n - 1)[1:n]
        ahat_next = assoc.ahat_row(n)[2 : n + 1]
        zero = dbar == 0
        broken = zero & (ahat_next != 0)
        if np.any(broken):
            bad_v = int(v[np.argmax(broken)])
            return reports + [
                CheckReport(
                    "matrix.hat_bound", FAIL, None, (n, bad_v), {},
                    (_DELTA_NOTE, _POSITIVITY_NOTE, f"bar-Delta a is zero but ahat is not at (n, v) = ({n}, {bad_v})"),
                )
            ]
        live = ~zero
        if np.any(live):
            row_sup[n - 2] = np.max(np.abs(ahat_next[live]) / (v[live] * np.abs(dbar[live])))
    reports.append(sup_stabilization("matrix.hat_bound", row_sup, np.arange(2, N), thresholds, (_DELTA_NOTE, _POSITIVITY_NOTE)))
    return reports


def _exact_report(check_id: str, bad: np.ndarray, used: dict) -> CheckReport:
    if bad.size:
        return CheckReport(check_id, FAIL, None, int(bad[0]), used, (f"{bad.size} violation(s)",))
    return CheckReport(check_id, PASS, thresholds=used)


def _weighted_mean_conditions(A: WeightedMeanMatrix, w: WeightSystem, thresholds: Thresholds) -> list[CheckReport]:
    N = A.size
    P = w.P.values[:N]
    p = w.p.values[:N]
    tol = thresholds.exact_tol
    closed = ("evaluated through the weighted-mean closed forms",)
    reports = []

    abar0 = P / P
    reports.append(_exact_report("matrix.row_sum_one", np.flatnonzero(np.abs(abar0 - 1.0) > tol), {"exact_tol": tol}))

    bad = np.flatnonzero(P[:-1] > P[1:])
    if bad.size:
        reports.append(CheckReport("matrix.column_nonincreasing", FAIL, None, (int(bad[0]) + 1, 0), {"monotone_tol": thresholds.monotone_tol}, closed))
    else:
        reports.append(CheckReport("matrix.column_nonincreasing", PASS, thresholds={"monotone_tol": thresholds.monotone_tol}, notes=closed))

    reports.append(sup_stabilization("matrix.diagonal_bound", (p / P) * (P / p), np.arange(N), thresholds, closed))

    v = np.arange(1, N - 1)
    per_v = P[1 : N - 1] / (v * p[1 : N - 1])
    row_sup = np.maximum.accumulate(per_v)  # row n takes v = 1..n-1
    reports.append(sup_stabilization("matrix.hat_bound", row_sup, np.arange(2, N), thresholds, closed + (_DELTA_NOTE, _POSITIVITY_NOTE)))
    return reports


def check_lemma_conclusions(fp: FactorProfile, w: WeightSystem, thresholds: Thresholds = DEFAULT_THRESHOLDS) -> list[CheckReport]:
    """``|lambda_n| X_n = O(1)``, ``n X_n |A_n| = O(1)``, ``sum n X_n |Delta A_n| < infinity``."""
    N = len(fp)
    X = _x_for(w, N)
    n = np.arange(1, N + 1)
    A = fp.companion.values
    return [
        sup_stabilization("lemma.lambda_X", np.abs(fp.lam.values[:N]) * X, n, thresholds),
        sup_stabilization("lemma.nXA", n * X * np.abs(A), n, thresholds),
        boundedness_report(
            "lemma.sum_nX_dA",
            SequencePrefix(np.cumsum(n[:-1] * X[:-1] * np.abs(A[:-1] - A[1:])), 1),
            thresholds,
        ),
    ]


def bv_report(check_id: str, profile: list[tuple[int, float]], thresholds: Thresholds = DEFAULT_THRESHOLDS) -> CheckReport:
    """Judge a dyadic variation profile: the last refinement must not raise the variation
    by more than ``stabilize_pass`` (pass) or ``stabilize_inconclusive`` (inconclusive)."""
    grids = [m for m, _ in profile]
    values = [v for _, v in profile]
    used = {
        "stabilize_pass": thresholds.stabilize_pass,
        "stabilize_inconclusive": thresholds.stabilize_inconclusive,
        "grids": grids,
    }
    notes = tuple(f"grid {m}: variation {v:.10g}" for m, v in profile)
    prev, last = values[-2], values[-1]
    growth = 1.0 if last <= prev else (last / prev if prev > 0 else np.inf)
    if growth <= thresholds.stabilize_pass:
        return CheckReport(check_id, PASS, last, None, used, notes)
    if growth <= thresholds.stabilize_inconclusive:
        return CheckReport(check_id, INCONCLUSIVE, last, None, used, notes)
    return CheckReport(check_id, FAIL, last, grids[-1], used, notes)


def lemma_consistency(hypotheses: list[CheckReport], conclusions: list[CheckReport]) -> tuple[bool, str]:
    """Hypotheses all pass (or are inconclusive) but a conclusion fails: inconsistent."""
    failed_h = [r.check_id for r in hypotheses if r.verdict == FAIL]
    failed_c = [r.check_id for r in conclusions if r.verdict == FAIL]
    if failed_h:
        return True, f"hypotheses failed: {', '.join(failed_h)}"
    if failed_c:
        return False, f"all hypotheses hold but conclusions failed: {', '.join(failed_c)}"
    return True, "all hypotheses and conclusions hold"
