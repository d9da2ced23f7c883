"""The theorem-verification pipeline and its file outputs.

A run builds weights, factor profile, matrix and Fourier data from an
:class:`ExperimentConfig`, checks every hypothesis, and, when none fails,
computes the ``|A, p_n|_k`` index of ``sum C_n(x) lambda_n`` for each k.
Data files (suite JSON, trace CSV/JSON, Fourier table) are deterministic;
timestamps live only in the ``run_meta.json`` sidecar.
"""

from __future__ import annotations

import json
import logging
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .checks import (
    bv_report,
    canonical_profile,
    check_factor_hypotheses,
    check_lemma_conclusions,
    check_matrix_conditions,
    check_Pn_O_npn,
    check_tn_condition,
    constant_profile,
    lemma_consistency,
    zero_profile,
)
from .config import ExperimentConfig
from .errors import InvalidInputError
from .fourier import FourierData, bv_profile, fourier_data, phi, phi_alpha_function, z_mean
from .indices import AbsoluteIndexTrace, boundedness_report, matrix_index
from .library import generate, load_sequence, periodic_function, tabulated_function
from .matrices import NormalMatrix, matrix_factory
from .reports import FAIL, CheckReport, sup_stabilization
from .sequences import FactorProfile, SequencePrefix, WeightSystem, build_weight_system

log = logging.getLogger(__name__)

HYPOTHESIS = "hypothesis"
CONCLUSION = "conclusion"
CONTEXT = "context"


def load_source(source: dict, length: int, base: int = 0, seed: int | None = None) -> SequencePrefix:
    """A sequence from ``{"generator": key}`` or ``{"file": path}``, cut to ``length``."""
    if "generator" in source:
        return generate(source["generator"], length, base, seed)
    seq = load_sequence(source["file"], base)
    if len(seq) < length:
        raise InvalidInputError(f"{source['file']} has {len(seq)} entries, {length} needed")
    return seq.head(length)


def build_weights(cfg: ExperimentConfig, length: int) -> WeightSystem:
    return build_weight_system(load_source(cfg.weights, length, 0, cfg.seed))


def build_factor(cfg: ExperimentConfig, w: WeightSystem, N: int) -> FactorProfile:
    source = cfg.factor
    if source.get("profile") == "canonical":
        return canonical_profile(w, N)
    if source.get("profile") == "constant":
        return constant_profile(w, N)
    if source.get("profile") == "zero":
        return zero_profile(N)
    return FactorProfile(
        load_source(source["lambda"], N + 1, 1, cfg.seed),
        load_source(source["companion"], N, 1, cfg.seed),
        load_source(source["delta"], N, 1, cfg.seed),
    )


def build_matrix(cfg: ExperimentConfig, size: int, w: WeightSystem) -> NormalMatrix:
    if "factory" in cfg.matrix:
        return matrix_factory(cfg.matrix["factory"], size, w)
    return NormalMatrix.load(cfg.matrix["file"]).leading(size)


def build_function(cfg: ExperimentConfig):
    if "name" in cfg.function:
        return periodic_function(cfg.function["name"])
    return tabulated_function(cfg.function["file"])


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    reports: list[tuple[str, CheckReport]]
    traces: dict[float, AbsoluteIndexTrace] = field(default_factory=dict)
    fourier: FourierData | None = None
    z: SequencePrefix | None = None
    consistent: bool = True
    message: str = ""
    runtime: float = 0.0

    @property
    def exit_code(self) -> int:
        return 0 if self.consistent else 1

    def by_id(self, check_id: str) -> CheckReport:
        for _, r in self.reports:
            if r.check_id == check_id:
                return r
        raise KeyError(check_id)

    def suite(self) -> list[dict]:
        return [{"role": role, **r.to_dict()} for role, r in self.reports]

    def summary_table(self) -> str:
        rows = [("id", "role", "verdict", "constant", "first_violation")]
        for role, r in self.reports:
            const = "" if r.bounding_constant is None else f"{r.bounding_constant:.6g}"
            fv = "" if r.first_violation is None else str(r.first_violation)
            rows.append((r.check_id, role, r.verdict, const, fv))
        widths = [max(len(row[i]) for row in rows) for i in range(5)]
        lines = ["  ".join(c.ljust(wd) for c, wd in zip(row, widths)).rstrip() for row in rows]
        lines.insert(1, "  ".join("-" * wd for wd in widths))
        status = "CONSISTENT" if self.consistent else "INCONSISTENT"
        lines.append("")
        lines.append(f"{self.config.name}: {status}: {self.message}")
        return "\n".join(lines)


def run_theorem_experiment(cfg: ExperimentConfig, compute_traces: bool = True) -> ExperimentResult:
    """Run every check for ``cfg`` and, if no hypothesis fails, the conclusion traces."""
    started = time.perf_counter()
    th = cfg.threshold_set
    N = cfg.N
    w = build_weights(cfg, N + 3)
    fp = build_factor(cfg, w, N)
    A = build_matrix(cfg, N + 1, w)
    f = build_function(cfg)
    log.info("computing %d Fourier coefficients", N)
    fd = fourier_data(f, cfg.x, N, cfg.quadrature_points)
    terms = fd.series_terms()
    z = z_mean(fd.C)

    reports: list[tuple[str, CheckReport]] = []
    hyp = [check_Pn_O_npn(w.head(N + 1), th)]
    hyp += check_factor_hypotheses(fp, w, th)
    hyp += [check_tn_condition(terms, w, k, th) for k in cfg.k]
    hyp += check_matrix_conditions(A, w, th)
    g = phi(f, cfg.x)
    hyp.append(bv_report("phi1_BV(0,pi)", bv_profile(phi_alpha_function(g, 1.0), (0.0, math.pi)), th))
    reports += [(HYPOTHESIS, r) for r in hyp]

    ctx = [
        bv_report("phi_BV(0,pi)", bv_profile(g, (0.0, math.pi)), th),
        sup_stabilization("z_n=O(1)", z.values, z.indices, th),
    ]
    reports += [(CONTEXT, r) for r in ctx]

    concl = check_lemma_conclusions(fp, w, th)
    traces: dict[float, AbsoluteIndexTrace] = {}
    hyp_failed = any(r.verdict == FAIL for r in hyp)
    if compute_traces and not hyp_failed:
        factored = SequencePrefix(np.concatenate(([0.0], fd.C.values * fp.lam.values[:N])), 0)
        for k in cfg.k:
            trace = matrix_index(factored, A, w, k)
            traces[k] = trace
            concl.append(boundedness_report(f"conclusion.|A,pn|_k[k={k:g}]", trace, th))
    reports += [(CONCLUSION, r) for r in concl]

    consistent, message = lemma_consistency(hyp, concl)
    if compute_traces and hyp_failed:
        message += "; conclusion traces skipped"
    return ExperimentResult(cfg, reports, traces, fd, z, consistent, message, time.perf_counter() - started)


def emit_trace(trace: AbsoluteIndexTrace, path) -> Path:
    """CSV ``n,term,cumulative`` at 17 significant digits."""
    path = Path(path)
    trace.write_csv(path)
    return path


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def write_outputs(result: ExperimentResult, out_dir=None) -> list[Path]:
    cfg = result.config
    out = Path(out_dir) if out_dir is not None else cfg.resolved_output_dir()
    out.mkdir(parents=True, exist_ok=True)
    written = []

    suite_path = out / "suite.json"
    suite_path.write_text(_dump(result.suite()))
    written.append(suite_path)

    table_path = out / "summary.txt"
    table_path.write_text(result.summary_table() + "\n")
    written.append(table_path)

    for k, trace in result.traces.items():
        stem = f"trace_k{k:g}"
        if cfg.emit in ("csv", "both"):
            written.append(emit_trace(trace, out / f"{stem}.csv"))
        if cfg.emit in ("json", "both"):
            p = out / f"{stem}.json"
            p.write_text(_dump(trace.to_json()))
            written.append(p)

    if result.fourier is not None and cfg.emit in ("csv", "both"):
        p = out / "fourier.csv"
        fd = result.fourier
        cols = np.column_stack([fd.C.indices, fd.a.values, fd.b.values, fd.C.values, result.z.values])
        np.savetxt(p, cols, delimiter=",", header="n,a_n,b_n,C_n,z_n", comments="", fmt=["%d"] + ["%.17g"] * 4)
        written.append(p)

    meta = {
        "version": __version__,
        "finished": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
        "runtime_seconds": result.runtime,
        "exit_code": result.exit_code,
        "quadrature_error_estimate": None if result.fourier is None else result.fourier.quadrature_error,
        "config": cfg.to_dict(),
    }
    meta_path = out / "run_meta.json"
    meta_path.write_text(_dump(meta))
    written.append(meta_path)
    return written
