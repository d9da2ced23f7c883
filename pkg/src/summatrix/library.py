"""Named sequence generators, built-in periodic functions and file loaders.

Sequence keys are ``name`` or ``name:param[,param...]``:

    zeros, ones, constant:c, harmonic (1/(n+1)), geometric:r (r^n),
    power:s ((n+1)^s), alternating ((-1)^n), alternating_harmonic
    ((-1)^n/(n+1)), linear (n), random:lo,hi (seeded uniform)

Function keys: sawtooth, square, abs, zero, sine:m, cosine:m,
polyjump:j1,j2,... (t plus a unit step at each j_i).
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .errors import InvalidInputError
from .fourier import PeriodicFunction
from .sequences import SequencePrefix


def _split_key(key: str) -> tuple[str, list[float]]:
    name, _, rest = key.partition(":")
    try:
        params = [float(x) for x in rest.split(",")] if rest else []
    except ValueError as exc:
        raise InvalidInputError(f"bad parameters in {key!r}") from exc
    return name.strip(), params


def _need(key: str, params: list[float], count: int) -> list[float]:
    if len(params) != count:
        raise InvalidInputError(f"{key!r} needs {count} parameter(s)")
    return params


def sequence_generator(key: str, seed: int | None = None):
    """Return ``index array -> values`` for a named sequence."""
    name, params = _split_key(key)
    if name == "zeros":
        return lambda n: np.zeros(np.shape(n))
    if name == "ones":
        return lambda n: np.ones(np.shape(n))
    if name == "constant":
        (c,) = _need(key, params, 1)
        return lambda n: np.full(np.shape(n), c)
    if name == "harmonic":
        return lambda n: 1.0 / (np.asarray(n, dtype=float) + 1.0)
    if name == "geometric":
        (r,) = _need(key, params, 1)
        return lambda n: r ** np.asarray(n, dtype=float)
    if name == "power":
        (e,) = _need(key, params, 1)
        return lambda n: (np.asarray(n, dtype=float) + 1.0) ** e
    if name == "alternating":
        return lambda n: np.where(np.asarray(n) % 2 == 0, 1.0, -1.0)
    if name == "alternating_harmonic":
        return lambda n: np.where(np.asarray(n) % 2 == 0, 1.0, -1.0) / (np.asarray(n, dtype=float) + 1.0)
    if name == "linear":
        return lambda n: np.asarray(n, dtype=float)
    if name == "random":
        lo, hi = _need(key, params, 2)

        def draw(n):
            n = np.asarray(n)
            # one stream per seed, indexed so prefixes of different length agree
            rng = np.random.default_rng(seed)
            values = rng.uniform(lo, hi, size=int(n.max()) + 1 if n.size else 0)
            return values[n]

        return draw
    raise InvalidInputError(f"unknown sequence generator {key!r}")


def generate(key: str, length: int, base: int = 0, seed: int | None = None) -> SequencePrefix:
    return SequencePrefix.from_generator(sequence_generator(key, seed), length, base)


def load_sequence(path, base: int = 0) -> SequencePrefix:
    """Read a JSON array or a single-column CSV (an optional header row is skipped)."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InvalidInputError(f"cannot read {path}: {exc}") from exc
    if path.suffix.lower() == ".json":
        try:
            values = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidInputError(f"{path}: invalid JSON: {exc}") from exc
        if not isinstance(values, list):
            raise InvalidInputError(f"{path}: expected a JSON array")
    else:
        values = []
        for i, row in enumerate(csv.reader(text.splitlines())):
            if not row or not row[0].strip():
                continue
            if len(row) != 1:
                raise InvalidInputError(f"{path}: line {i + 1} has {len(row)} columns, expected 1")
            try:
                values.append(float(row[0]))
            except ValueError:
                if i == 0:
                    continue
                raise InvalidInputError(f"{path}: line {i + 1} is not a number") from None
    try:
        return SequencePrefix(np.asarray(values, dtype=float), base)
    except (TypeError, ValueError) as exc:
        raise InvalidInputError(f"{path}: {exc}") from exc


def periodic_function(key: str) -> PeriodicFunction:
    name, params = _split_key(key)
    if name == "sawtooth":
        return PeriodicFunction(lambda t: t, "sawtooth f(t)=t", (math.pi,))
    if name == "square":
        return PeriodicFunction(np.sign, "square f(t)=sign(t)", (0.0, math.pi))
    if name == "abs":
        return PeriodicFunction(np.abs, "abs f(t)=|t|")
    if name == "zero":
        return PeriodicFunction(np.zeros_like, "zero f(t)=0")
    if name == "sine":
        (m,) = _need(key, params, 1)
        return PeriodicFunction(lambda t: np.sin(m * t), f"sin({m:g}t)")
    if name == "cosine":
        (m,) = _need(key, params, 1)
        return PeriodicFunction(lambda t: np.cos(m * t), f"cos({m:g}t)")
    if name == "polyjump":
        if not params:
            raise InvalidInputError("polyjump needs at least one jump location")
        js = sorted(float(j) for j in params)
        if any(not -math.pi < j < math.pi for j in js):
            raise InvalidInputError("polyjump locations must lie in (-pi, pi)")

        def f(t):
            return t + sum((t >= j).astype(float) for j in js)

        return PeriodicFunction(f, f"polyjump {js}", tuple(js) + (math.pi,))
    raise InvalidInputError(f"unknown function {key!r}")


def tabulated_function(path) -> PeriodicFunction:
    """Periodic linear interpolation of a two-column CSV ``t, f(t)``."""
    try:
        data = np.loadtxt(path, delimiter=",", ndmin=2, comments="#")
    except (OSError, ValueError):
        try:
            data = np.loadtxt(path, delimiter=",", ndmin=2, skiprows=1)
        except (OSError, ValueError) as exc:
            raise InvalidInputError(f"cannot read tabulated function {path}: {exc}") from exc
    if data.shape[1] != 2 or data.shape[0] < 2:
        raise InvalidInputError(f"{path}: need at least two rows of (t, f(t))")
    order = np.argsort(data[:, 0])
    t, y = data[order, 0], data[order, 1]
    return PeriodicFunction(lambda s: np.interp(s, t, y, period=2 * math.pi), f"table {Path(path).name}")
