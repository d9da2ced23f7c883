"""Check reports and the threshold knobs that produce them.

Every asymptotic statement is judged on a finite prefix, so each report
carries the thresholds it was judged with.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Any

import numpy as np

PASS = "pass"
FAIL = "fail"
INCONCLUSIVE = "inconclusive"
VERDICTS = (PASS, FAIL, INCONCLUSIVE)


@dataclass(frozen=True)
class Thresholds:
    """Knobs for every finite-prefix proxy in the package."""

    # O(.) checks: growth of the final-quarter sup over the first three quarters
    stabilize_pass: float = 1.05
    stabilize_inconclusive: float = 1.25
    # "< infinity" checks on partial sums
    tail_rel: float = 0.05
    tail_abs: float = 1e-9
    growth_max: float = 0.1
    # delta-quasi-monotone proxies
    tail_fraction: float = 0.5
    decay_ratio: float = 0.1
    decay_window: float = 0.1
    # float comparisons standing in for exact equalities / inequalities
    exact_tol: float = 1e-12
    monotone_tol: float = 1e-15

    def as_dict(self) -> dict[str, float]:
        return dataclasses.asdict(self)

    def replace(self, **overrides: float) -> "Thresholds":
        unknown = set(overrides) - {f.name for f in dataclasses.fields(self)}
        if unknown:
            raise KeyError(f"unknown threshold(s): {sorted(unknown)}")
        return dataclasses.replace(self, **{k: float(v) for k, v in overrides.items()})


DEFAULT_THRESHOLDS = Thresholds()


@dataclass(frozen=True)
class CheckReport:
    check_id: str
    verdict: str
    bounding_constant: float | None = None
    first_violation: int | tuple[int, int] | None = None
    thresholds: dict[str, Any] = field(default_factory=dict)
    notes: tuple[str, ...] = ()

    def __post_init__(self):
        if self.verdict not in VERDICTS:
            raise ValueError(f"verdict must be one of {VERDICTS}, got {self.verdict!r}")
        if self.verdict == FAIL and self.first_violation is None:
            raise ValueError(f"{self.check_id}: a failing report needs first_violation")

    @property
    def passed(self) -> bool:
        return self.verdict == PASS

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"id": self.check_id, "verdict": self.verdict}
        if self.bounding_constant is not None:
            out["constant"] = _json_float(self.bounding_constant)
        if self.first_violation is not None:
            fv = self.first_violation
            out["first_violation"] = list(fv) if isinstance(fv, tuple) else fv
        out["thresholds"] = dict(self.thresholds)
        out["notes"] = list(self.notes)
        return out

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "CheckReport":
        fv = data.get("first_violation")
        constant = data.get("constant")
        if isinstance(constant, str):
            constant = float(constant)  # "inf", "-inf", "nan"
        if isinstance(fv, list):
            fv = tuple(fv)
        return cls(
            check_id=data["id"],
            verdict=data["verdict"],
            bounding_constant=constant,
            first_violation=fv,
            thresholds=dict(data.get("thresholds", {})),
            notes=tuple(data.get("notes", ())),
        )


def _json_float(x: float) -> float | str:
    x = float(x)
    if np.isfinite(x):
        return x
    return "inf" if x > 0 else ("-inf" if x < 0 else "nan")


def sup_stabilization(
    check_id: str,
    ratios,
    indices,
    thresholds: Thresholds = DEFAULT_THRESHOLDS,
    notes: tuple[str, ...] = (),
) -> CheckReport:
    """Judge an O(1) claim on ``ratios`` by whether its running sup has settled.

    The sup over the final quarter is compared with the sup over the first
    three quarters: growth up to ``stabilize_pass`` passes, up to
    ``stabilize_inconclusive`` is inconclusive, anything larger fails. The
    reported constant is the sup over the whole prefix.
    """
    r = np.abs(np.asarray(ratios, dtype=float))
    idx = np.asarray(indices)
    if r.size == 0:
        raise ValueError(f"{check_id}: no ratios to judge")
    used = {
        "stabilize_pass": thresholds.stabilize_pass,
        "stabilize_inconclusive": thresholds.stabilize_inconclusive,
    }
    split = max(1, (3 * r.size) // 4)
    head, tail = r[:split], r[split:]
    head_sup = float(np.max(head))
    overall = float(np.max(r))
    if tail.size == 0 or overall <= head_sup:
        return CheckReport(check_id, PASS, overall, None, used, notes)
    growth = overall / head_sup if head_sup > 0 else np.inf
    notes = notes + (f"final-quarter sup / three-quarter sup = {growth:.6g}",)
    if growth <= thresholds.stabilize_pass:
        return CheckReport(check_id, PASS, overall, None, used, notes)
    if growth <= thresholds.stabilize_inconclusive:
        return CheckReport(check_id, INCONCLUSIVE, overall, None, used, notes)
    limit = thresholds.stabilize_inconclusive * head_sup
    first = int(idx[split + int(np.argmax(tail > limit))])
    return CheckReport(check_id, FAIL, overall, first, used, notes)
