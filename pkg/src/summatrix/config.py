"""Experiment configuration: JSON schema, validation and canned scenarios.

A config is a JSON object; every key is optional except where a command
needs it::

    {
      "name": "bor-weighted-mean",
      "N": 10000,                       # prefix length, >= 16
      "k": [1, 2],                      # exponents, each >= 1
      "x": 1.5707963267948966,          # evaluation point of the Fourier series
      "alpha": 1.0,                     # Cesaro order for the `means` command
      "weights": {"generator": "ones"}, # or {"file": "p.json"} / {"file": "p.csv"}
      "series": {"generator": "alternating"},
      "factor": {"profile": "canonical"},   # canonical | constant | zero, or
                 # {"lambda": SRC, "companion": SRC, "delta": SRC}
      "matrix": {"factory": "weighted_mean"},  # identity | weighted_mean | cesaro1, or {"file": ...}
      "function": {"name": "sawtooth"},        # or {"file": "table.csv"}
      "quadrature_points": null,        # Simpson intervals, default max(8192, 8N)
      "output_dir": null,               # default $SUMMATRIX_OUTPUT_DIR or ./summatrix-out
      "emit": "both",                   # json | csv | both
      "seed": null,
      "thresholds": {"stabilize_pass": 1.05}
    }

Relative file paths are resolved against the config file's directory.
"""

from __future__ import annotations

import copy
import json
import math
import os
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any

from .errors import InvalidInputError
from .reports import Thresholds

OUTPUT_ENV = "SUMMATRIX_OUTPUT_DIR"
EMIT_CHOICES = ("json", "csv", "both")


class ConfigError(InvalidInputError):
    """Invalid experiment configuration."""


def _source(source: dict, what: str) -> dict:
    if not isinstance(source, dict) or len(source) != 1:
        raise ConfigError(f"{what} must be an object with exactly one key, got {source!r}")
    return source


@dataclass
class ExperimentConfig:
    name: str = "custom"
    N: int = 1000
    k: list[float] = field(default_factory=lambda: [1.0])
    x: float = math.pi / 2
    alpha: float = 1.0
    weights: dict = field(default_factory=lambda: {"generator": "ones"})
    series: dict = field(default_factory=lambda: {"generator": "alternating"})
    factor: dict = field(default_factory=lambda: {"profile": "canonical"})
    matrix: dict = field(default_factory=lambda: {"factory": "weighted_mean"})
    function: dict = field(default_factory=lambda: {"name": "sawtooth"})
    quadrature_points: int | None = None
    output_dir: str | None = None
    emit: str = "both"
    seed: int | None = None
    thresholds: dict = field(default_factory=dict)

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if not isinstance(self.N, int) or isinstance(self.N, bool) or self.N < 16:
            raise ConfigError(f"N must be an integer >= 16, got {self.N!r}")
        if not self.k:
            raise ConfigError("k needs at least one value")
        try:
            self.k = [float(v) for v in self.k]
            self.x = float(self.x)
            self.alpha = float(self.alpha)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"non-numeric k, x or alpha: {exc}") from exc
        if any(not v >= 1 for v in self.k):
            raise ConfigError(f"every k must be >= 1, got {self.k}")
        if self.emit not in EMIT_CHOICES:
            raise ConfigError(f"emit must be one of {EMIT_CHOICES}, got {self.emit!r}")
        if self.quadrature_points is not None and self.quadrature_points < 8 * self.N:
            raise ConfigError(f"quadrature_points must be at least 8*N = {8 * self.N}")
        for key, allowed in (
            ("weights", ("generator", "file")),
            ("series", ("generator", "file")),
            ("matrix", ("factory", "file")),
            ("function", ("name", "file")),
        ):
            source = _source(getattr(self, key), key)
            if next(iter(source)) not in allowed:
                raise ConfigError(f"{key} must use one of {allowed}")
        if "profile" in self.factor:
            if self.factor["profile"] not in ("canonical", "constant", "zero"):
                raise ConfigError(f"unknown factor profile {self.factor['profile']!r}")
        elif set(self.factor) != {"lambda", "companion", "delta"}:
            raise ConfigError("factor needs 'profile' or all of 'lambda', 'companion', 'delta'")
        else:
            for part in ("lambda", "companion", "delta"):
                source = _source(self.factor[part], f"factor.{part}")
                if next(iter(source)) not in ("generator", "file"):
                    raise ConfigError(f"factor.{part} must use 'generator' or 'file'")
        try:
            Thresholds().replace(**self.thresholds)
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad thresholds: {exc}") from exc
        for path in self.referenced_files():
            if not Path(path).exists():
                raise ConfigError(f"referenced file does not exist: {path}")

    def referenced_files(self) -> list[str]:
        sources = [self.weights, self.series, self.matrix, self.function]
        if "profile" not in self.factor:
            sources += [self.factor[p] for p in ("lambda", "companion", "delta")]
        return [s["file"] for s in sources if "file" in s]

    @property
    def threshold_set(self) -> Thresholds:
        return Thresholds().replace(**self.thresholds)

    def resolved_output_dir(self) -> Path:
        return Path(self.output_dir or os.environ.get(OUTPUT_ENV) or "summatrix-out")

    def to_dict(self) -> dict[str, Any]:
        return {f.name: copy.deepcopy(getattr(self, f.name)) for f in fields(self)}

    @classmethod
    def from_dict(cls, data: dict[str, Any], base_dir: Path | None = None) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config key(s): {sorted(unknown)}")
        data = copy.deepcopy(data)
        if base_dir is not None:
            _resolve_files(data, base_dir)
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        path = Path(path)
        try:
            data = json.loads(path.read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON: {exc}") from exc
        return cls.from_dict(data, path.parent)

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _resolve_files(data: dict, base_dir: Path) -> None:
    def fix(source):
        if isinstance(source, dict) and "file" in source and not Path(source["file"]).is_absolute():
            source["file"] = str(base_dir / source["file"])

    for key in ("weights", "series", "matrix", "function"):
        fix(data.get(key))
    factor = data.get("factor")
    if isinstance(factor, dict):
        for part in ("lambda", "companion", "delta"):
            fix(factor.get(part))


SCENARIOS: dict[str, dict[str, Any]] = {
    "bor-weighted-mean": {
        "name": "bor-weighted-mean",
        "N": 10000,
        "k": [1, 2],
        "x": math.pi / 2,
        "weights": {"generator": "ones"},
        "factor": {"profile": "canonical"},
        "matrix": {"factory": "weighted_mean"},
        "function": {"name": "sawtooth"},
    },
    "negative-constant-lambda": {
        "name": "negative-constant-lambda",
        "N": 1000,
        "k": [1],
        "x": math.pi / 2,
        "weights": {"generator": "geometric:2"},
        "factor": {"profile": "constant"},
        "matrix": {"factory": "weighted_mean"},
        "function": {"name": "sawtooth"},
    },
    "zero-series": {
        "name": "zero-series",
        "N": 2000,
        "k": [1, 2],
        "x": math.pi / 2,
        "weights": {"generator": "ones"},
        "factor": {"profile": "canonical"},
        "matrix": {"factory": "weighted_mean"},
        "function": {"name": "zero"},
    },
}


def scenario(name: str, **overrides) -> ExperimentConfig:
    if name not in SCENARIOS:
        raise ConfigError(f"unknown scenario {name!r}; choose from {sorted(SCENARIOS)}")
    data = copy.deepcopy(SCENARIOS[name])
    data.update(overrides)
    return ExperimentConfig.from_dict(data)
