"""Command-line front end.

Exit codes: 0 success (or hypotheses and conclusions consistent), 1 a
conclusion failed although every hypothesis held, 2 configuration error,
3 runtime or numeric error.
"""

from __future__ import annotations

import functools
import json
import logging
import math
import sys
from pathlib import Path

import click
import numpy as np

from .config import EMIT_CHOICES, SCENARIOS, ConfigError, ExperimentConfig, scenario
from .errors import SummatrixError
from .experiment import (
    build_function,
    build_matrix,
    build_weights,
    emit_trace,
    load_source,
    run_theorem_experiment,
    write_outputs,
)
from .fourier import bv_profile, fourier_data, phi, phi_alpha_function, z_mean
from .indices import assess_boundedness, cesaro_index, matrix_index, riesz_index
from .matrices import apply_series_form
from .means import cesaro_means, riesz_mean
from .sequences import partial_sums

EXIT_OK, EXIT_INCONSISTENT, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2, 3


def _source_flag(value: str | None, key: str):
    """``@path`` names a file, anything else a generator/factory/function key."""
    if value is None:
        return None
    if value.startswith("@"):
        return {"file": value[1:]}
    return {key: value}


def _parse_thresholds(items) -> dict:
    out = {}
    for item in items:
        name, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--threshold expects name=value, got {item!r}")
        try:
            out[name.strip()] = float(value)
        except ValueError:
            raise ConfigError(f"--threshold {name}: {value!r} is not a number") from None
    return out


def common_options(func):
    options = [
        click.option("--config", "config_path", type=click.Path(dir_okay=False), help="JSON config file."),
        click.option("--scenario", type=click.Choice(sorted(SCENARIOS)), help="Start from a canned scenario."),
        click.option("--N", "N", type=int, help="Prefix length (>= 16)."),
        click.option("--k", "k", type=float, multiple=True, help="Exponent k >= 1; repeatable."),
        click.option("--x", "x", type=float, help="Evaluation point of the Fourier series."),
        click.option("--alpha", type=float, help="Cesaro order."),
        click.option("--weights", help="Weight generator key, or @file."),
        click.option("--series", help="Series-term generator key, or @file."),
        click.option("--matrix", help="Matrix factory, or @file (JSON triangular format)."),
        click.option("--function", "function", help="Built-in function key, or @file (CSV t,f)."),
        click.option("--factor", type=click.Choice(["canonical", "constant", "zero"]), help="Factor profile."),
        click.option("--quadrature-points", type=int, help="Simpson intervals (>= 8N)."),
        click.option("--out", "output_dir", type=click.Path(file_okay=False), help="Output directory."),
        click.option("--emit", type=click.Choice(EMIT_CHOICES), help="Output formats."),
        click.option("--seed", type=int, help="Seed for random generators."),
        click.option("--threshold", "threshold", multiple=True, help="Threshold override name=value; repeatable."),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def resolve_config(params: dict) -> ExperimentConfig:
    if params.get("config_path") and params.get("scenario"):
        raise ConfigError("give either --config or --scenario, not both")
    if params.get("config_path"):
        path = Path(params["config_path"])
        if not path.exists():
            raise ConfigError(f"config file not found: {path}")
        base = ExperimentConfig.load(path).to_dict()
    elif params.get("scenario"):
        base = scenario(params["scenario"]).to_dict()
    else:
        base = ExperimentConfig().to_dict()
    overrides = {
        "N": params.get("N"),
        "k": list(params["k"]) if params.get("k") else None,
        "x": params.get("x"),
        "alpha": params.get("alpha"),
        "weights": _source_flag(params.get("weights"), "generator"),
        "series": _source_flag(params.get("series"), "generator"),
        "matrix": _source_flag(params.get("matrix"), "factory"),
        "function": _source_flag(params.get("function"), "name"),
        "factor": {"profile": params["factor"]} if params.get("factor") else None,
        "quadrature_points": params.get("quadrature_points"),
        "output_dir": params.get("output_dir"),
        "emit": params.get("emit"),
        "seed": params.get("seed"),
    }
    base.update({key: value for key, value in overrides.items() if value is not None})
    if params.get("threshold"):
        base["thresholds"] = {**base.get("thresholds", {}), **_parse_thresholds(params["threshold"])}
    return ExperimentConfig.from_dict(base)


def handle_errors(func):
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except ConfigError as exc:
            click.echo(f"config error: {exc}", err=True)
            sys.exit(EXIT_CONFIG)
        except (SummatrixError, OSError, FloatingPointError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_RUNTIME)

    return wrapper


def _out_dir(cfg: ExperimentConfig) -> Path:
    out = cfg.resolved_output_dir()
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, allow_nan=False) + "\n")


def _csv(path: Path, header: str, columns) -> None:
    data = np.column_stack(columns)
    fmt = ["%d"] + ["%.17g"] * (data.shape[1] - 1)
    np.savetxt(path, data, delimiter=",", header=header, comments="", fmt=fmt)


def _emit_traces(cfg, out: Path, traces: dict, payload: dict) -> None:
    for stem, trace in traces.items():
        verdict = assess_boundedness(trace, cfg.threshold_set) if len(trace) >= 16 else None
        payload[stem] = {"verdict": None if verdict is None else verdict.to_dict()}
        if cfg.emit in ("csv", "both"):
            emit_trace(trace, out / f"{stem}.csv")
        if cfg.emit in ("json", "both"):
            payload[stem]["trace"] = trace.to_json()
        label = "n/a (prefix < 16)" if verdict is None else ("bounded" if verdict.bounded_estimate else "unbounded")
        click.echo(f"{stem}: S_N = {trace.cumulative.values[-1]:.10g}  estimate: {label}")


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Log progress to stderr.")
@click.version_option(package_name="summatrix")
def main(verbose: bool):
    """Summability means, absolute summability indices and theorem checks."""
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")


@main.command()
@common_options
@handle_errors
def means(**params):
    """Cesaro and Riesz means of a series, with |C,alpha|_k and |N,p_n|_k traces."""
    cfg = resolve_config(params)
    out = _out_dir(cfg)
    a = load_source(cfg.series, cfg.N, 0, cfg.seed)
    w = build_weights(cfg, cfg.N)
    cm = cesaro_means(a, cfg.alpha)
    s = partial_sums(a)
    wn = riesz_mean(s, w)
    t_full = np.concatenate(([np.nan], cm.t.values))
    if cfg.emit in ("csv", "both"):
        _csv(out / "means.csv", "n,a_n,s_n,u_n,t_n,w_n", [a.indices, a.values, s.values, cm.u.values, t_full, wn.values])
    traces = {}
    for k in cfg.k:
        traces[f"cesaro_k{k:g}"] = cesaro_index(a, cfg.alpha, k)
        traces[f"riesz_k{k:g}"] = riesz_index(a, w, k)
    payload = {"alpha": cfg.alpha, "N": cfg.N}
    if cfg.emit in ("json", "both"):
        payload.update({"u": cm.u.values.tolist(), "t": cm.t.values.tolist(), "w": wn.values.tolist()})
    _emit_traces(cfg, out, traces, payload)
    _write_json(out / "means.json", payload)


@main.command()
@common_options
@handle_errors
def matrix(**params):
    """Apply a normal matrix to a series; emit A_n(s), its differences and |A,p_n|_k traces."""
    cfg = resolve_config(params)
    out = _out_dir(cfg)
    a = load_source(cfg.series, cfg.N, 0, cfg.seed)
    w = build_weights(cfg, cfg.N)
    A = build_matrix(cfg, cfg.N, w)
    res = apply_series_form(A, a)
    if cfg.emit in ("csv", "both"):
        dA = np.concatenate(([res.An.values[0]], res.dAn.values))
        _csv(out / "transform.csv", "n,A_n,dA_n", [res.An.indices, res.An.values, dA])
    payload = {"N": cfg.N, "matrix": cfg.matrix}
    if cfg.emit in ("json", "both"):
        payload.update({"A_n": res.An.values.tolist(), "dA_n": res.dAn.values.tolist()})
    traces = {f"matrix_k{k:g}": matrix_index(a, A, w, k) for k in cfg.k}
    _emit_traces(cfg, out, traces, payload)
    _write_json(out / "matrix.json", payload)


@main.command()
@common_options
@handle_errors
def fourier(**params):
    """Fourier coefficients, C_n(x), z_n(x) and variation profiles of phi and phi_1."""
    cfg = resolve_config(params)
    out = _out_dir(cfg)
    f = build_function(cfg)
    fd = fourier_data(f, cfg.x, cfg.N, cfg.quadrature_points)
    z = z_mean(fd.C)
    if cfg.emit in ("csv", "both"):
        _csv(out / "fourier.csv", "n,a_n,b_n,C_n,z_n", [fd.C.indices, fd.a.values, fd.b.values, fd.C.values, z.values])
    g = phi(f, cfg.x)
    payload = {
        "function": f.description,
        "x": cfg.x,
        "N": cfg.N,
        "a0": fd.a0,
        "quadrature_error_estimate": fd.quadrature_error,
        "max_abs_z": float(np.max(np.abs(z.values))),
        "phi_variation_profile": bv_profile(g, (0.0, math.pi)),
        "phi1_variation_profile": bv_profile(phi_alpha_function(g, 1.0), (0.0, math.pi)),
    }
    if cfg.emit in ("json", "both"):
        payload.update({"a": fd.a.values.tolist(), "b": fd.b.values.tolist(), "C": fd.C.values.tolist(), "z": z.values.tolist()})
    _write_json(out / "fourier.json", payload)
    click.echo(f"{f.description} at x={cfg.x:.6g}: max|z_n| = {payload['max_abs_z']:.10g}, "
               f"quadrature error estimate {fd.quadrature_error:.3g}")


def _finish(result, out: Path) -> None:
    write_outputs(result, out)
    click.echo(result.summary_table())
    if not result.consistent:
        click.echo("INCONSISTENT: a conclusion failed although every hypothesis held", err=True)
    sys.exit(result.exit_code)


@main.command()
@common_options
@handle_errors
def check(**params):
    """Run every hypothesis and lemma check (no conclusion traces)."""
    cfg = resolve_config(params)
    _finish(run_theorem_experiment(cfg, compute_traces=False), _out_dir(cfg))


@main.command()
@common_options
@click.option("--list", "list_scenarios", is_flag=True, help="List canned scenarios and exit.")
@handle_errors
def experiment(list_scenarios: bool, **params):
    """Full pipeline: hypotheses, lemma conclusions and |A,p_n|_k traces of sum C_n(x) lambda_n."""
    if list_scenarios:
        for name, source in SCENARIOS.items():
            click.echo(f"{name}: N={source['N']} k={source['k']} weights={source['weights']} "
                       f"factor={source['factor']} function={source['function']}")
        return
    cfg = resolve_config(params)
    _finish(run_theorem_experiment(cfg), _out_dir(cfg))


if __name__ == "__main__":
    main()
