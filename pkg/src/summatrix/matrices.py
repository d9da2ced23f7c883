"""Normal (lower-triangular, nonzero-diagonal) matrix transforms.

Entries are stored row-major in a packed array of ``N(N+1)/2`` doubles;
row ``n`` occupies ``packed[n(n+1)/2 : n(n+1)/2 + n + 1]``. Weighted-mean
matrices also carry their weights and use O(N) closed forms, so they can be
applied at sizes where the packed array would not fit in memory.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property, lru_cache
from pathlib import Path

import numpy as np

from .errors import InvalidInputError
from .sequences import SequencePrefix, WeightSystem, as_prefix, partial_sums


def _offset(n: int) -> int:
    return n * (n + 1) // 2


@lru_cache(maxsize=8)
def _packed_layout(size: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Row index, column index and row start offset of every packed slot."""
    rows = np.repeat(np.arange(size), np.arange(1, size + 1))
    starts = np.array([_offset(n) for n in range(size)], dtype=np.intp)
    cols = np.arange(rows.size) - starts[rows]
    for arr in (rows, cols, starts):
        arr.setflags(write=False)
    return rows, cols, starts


def _row_dot(packed: np.ndarray, size: int, x: np.ndarray) -> np.ndarray:
    """``sum_v M_{nv} x_v`` for every row of a packed triangle."""
    _, cols, starts = _packed_layout(size)
    return np.add.reduceat(packed * x[cols], starts)


class NormalMatrix:
    """Lower-triangular matrix ``a_{nv}``, ``0 <= v <= n < size``, nonzero diagonal."""

    weights: WeightSystem | None = None

    def __init__(self, packed, size: int):
        packed = np.array(packed, dtype=float).reshape(-1)
        if size < 1:
            raise InvalidInputError("matrix needs at least one row")
        if packed.size != _offset(size):
            raise InvalidInputError(f"{size} rows need {_offset(size)} packed entries, got {packed.size}")
        if not np.all(np.isfinite(packed)):
            raise InvalidInputError("matrix entries must be finite")
        _, _, starts = _packed_layout(size)
        diag = packed[starts + np.arange(size)]
        zero = np.flatnonzero(diag == 0)
        if zero.size:
            raise InvalidInputError(f"diagonal entry a_{{{zero[0]},{zero[0]}}} is zero")
        packed.setflags(write=False)
        self._packed = packed
        self._size = size

    @property
    def size(self) -> int:
        return self._size

    @property
    def packed(self) -> np.ndarray:
        return self._packed

    def row(self, n: int) -> np.ndarray:
        if not 0 <= n < self.size:
            raise IndexError(f"row {n} outside 0..{self.size - 1}")
        start = _offset(n)
        return self.packed[start : start + n + 1]

    def entry(self, n: int, v: int) -> float:
        """``a_{nv}``; zero above the diagonal and for ``n = -1``."""
        if n < 0 or v > n:
            return 0.0
        return float(self.row(n)[v])

    def diagonal(self) -> np.ndarray:
        _, _, starts = _packed_layout(self.size)
        return self.packed[starts + np.arange(self.size)]

    def dense(self) -> np.ndarray:
        rows, cols, _ = _packed_layout(self.size)
        out = np.zeros((self.size, self.size))
        out[rows, cols] = self.packed
        return out

    def rows(self) -> list[list[float]]:
        return [self.row(n).tolist() for n in range(self.size)]

    @classmethod
    def from_rows(cls, rows) -> "NormalMatrix":
        rows = [list(r) for r in rows]
        for n, r in enumerate(rows):
            if len(r) != n + 1:
                raise InvalidInputError(f"row {n} must have {n + 1} entries, got {len(r)}")
        return cls(np.concatenate([np.asarray(r, dtype=float) for r in rows]) if rows else [], len(rows))

    @classmethod
    def from_dense(cls, arr) -> "NormalMatrix":
        arr = np.asarray(arr, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise InvalidInputError("dense matrix must be square")
        if np.any(np.triu(arr, 1) != 0):
            raise InvalidInputError("matrix is not lower triangular")
        rows, cols, _ = _packed_layout(arr.shape[0])
        return cls(arr[rows, cols], arr.shape[0])

    def leading(self, size: int) -> "NormalMatrix":
        """The top-left ``size x size`` block."""
        if size > self.size:
            raise InvalidInputError(f"matrix has {self.size} rows, {size} requested")
        return NormalMatrix(self.packed[: _offset(size)], size)

    def to_json(self) -> dict:
        return {"n": self.size, "rows": self.rows()}

    @classmethod
    def from_json(cls, data: dict) -> "NormalMatrix":
        try:
            n, rows = int(data["n"]), data["rows"]
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInputError(f"matrix JSON needs 'n' and 'rows': {exc}") from exc
        if len(rows) != n:
            raise InvalidInputError(f"'n' is {n} but {len(rows)} rows given")
        return cls.from_rows(rows)

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json()))

    @classmethod
    def load(cls, path) -> "NormalMatrix":
        try:
            return cls.from_json(json.loads(Path(path).read_text()))
        except (OSError, json.JSONDecodeError) as exc:
            raise InvalidInputError(f"cannot read matrix from {path}: {exc}") from exc

    def __repr__(self) -> str:
        return f"{type(self).__name__}(size={self.size})"


class WeightedMeanMatrix(NormalMatrix):
    """``a_{nv} = p_v / P_n``. Entries are materialized only on demand."""

    def __init__(self, weights: WeightSystem, size: int):
        if size < 1:
            raise InvalidInputError("matrix needs at least one row")
        if size > len(weights):
            raise InvalidInputError(f"weights cover {len(weights)} rows, {size} requested")
        self.weights = weights
        self._size = size

    @cached_property
    def _packed(self) -> np.ndarray:
        rows, cols, _ = _packed_layout(self.size)
        packed = self.weights.p.values[cols] / self.weights.P.values[rows]
        packed.setflags(write=False)
        return packed

    def diagonal(self) -> np.ndarray:
        return self.weights.p.values[: self.size] / self.weights.P.values[: self.size]

    def leading(self, size: int) -> "WeightedMeanMatrix":
        return WeightedMeanMatrix(self.weights, size)

    def generic(self) -> NormalMatrix:
        """The same entries as a plain packed matrix (no closed forms)."""
        return NormalMatrix(self.packed, self.size)


def identity_matrix(size: int) -> NormalMatrix:
    _, cols, starts = _packed_layout(size)
    packed = np.zeros(_offset(size))
    packed[starts + np.arange(size)] = 1.0
    return NormalMatrix(packed, size)


def cesaro1_matrix(size: int) -> NormalMatrix:
    rows, _, _ = _packed_layout(size)
    return NormalMatrix(1.0 / (rows + 1.0), size)


def weighted_mean_matrix(w: WeightSystem, N: int) -> WeightedMeanMatrix:
    return WeightedMeanMatrix(w, N)


MATRIX_FACTORIES = ("identity", "weighted_mean", "cesaro1")


def matrix_factory(name: str, size: int, weights: WeightSystem | None = None) -> NormalMatrix:
    if name == "identity":
        return identity_matrix(size)
    if name == "cesaro1":
        return cesaro1_matrix(size)
    if name == "weighted_mean":
        if weights is None:
            raise InvalidInputError("weighted_mean matrix needs weights")
        return weighted_mean_matrix(weights, size)
    raise InvalidInputError(f"unknown matrix factory {name!r}; choose from {MATRIX_FACTORIES}")


@dataclass(frozen=True, eq=False)
class AssociatedMatrices:
    """Packed ``abar`` (row tail sums) and ``ahat`` (row differences of abar)."""

    abar: np.ndarray
    ahat: np.ndarray
    size: int

    def abar_at(self, n: int, v: int) -> float:
        if n < 0 or v > n:
            return 0.0
        return float(self.abar[_offset(n) + v])

    def ahat_at(self, n: int, v: int) -> float:
        if n < 0 or v > n:
            return 0.0
        return float(self.ahat[_offset(n) + v])

    def abar_row(self, n: int) -> np.ndarray:
        return self.abar[_offset(n) : _offset(n) + n + 1]

    def ahat_row(self, n: int) -> np.ndarray:
        return self.ahat[_offset(n) : _offset(n) + n + 1]


def _reverse_row_sums(A: NormalMatrix, compensated: bool) -> np.ndarray:
    if compensated:
        dense = A.dense()
        total = np.zeros(A.size)
        comp = np.zeros(A.size)
        out = np.zeros_like(dense)
        for v in range(A.size - 1, -1, -1):
            y = dense[:, v] - comp
            t = total + y
            comp = (t - total) - y
            total = t
            out[:, v] = total
        rows, cols, _ = _packed_layout(A.size)
        return out[rows, cols]
    abar = np.empty(_offset(A.size))
    for n in range(A.size):
        start = _offset(n)
        abar[start : start + n + 1] = np.cumsum(A.row(n)[::-1])[::-1]
    return abar


def associate(A: NormalMatrix, compensated: bool = False) -> AssociatedMatrices:
    """Build ``abar_{nv} = sum_{i=v..n} a_{ni}`` and ``ahat_{nv} = abar_{nv} - abar_{n-1,v}``.

    Row sums run right to left; ``compensated`` switches to Kahan summation.
    ``abar_{n-1,n}`` is taken as 0, so ``ahat_{nn} = a_{nn}``.
    """
    abar = _reverse_row_sums(A, compensated)
    ahat = abar.copy()
    for n in range(1, A.size):
        start, prev = _offset(n), _offset(n - 1)
        ahat[start : start + n] -= abar[prev : prev + n]
    abar.setflags(write=False)
    ahat.setflags(write=False)
    return AssociatedMatrices(abar, ahat, A.size)


def weighted_mean_associated(w: WeightSystem, N: int) -> AssociatedMatrices:
    """Closed forms ``abar_{nv} = (P_n - P_{v-1})/P_n`` and
    ``ahat_{n,v+1} = p_n P_v / (P_n P_{n-1})`` (with ``ahat_{n0} = 0`` for n >= 1)."""
    if N > len(w):
        raise InvalidInputError(f"weights cover {len(w)} rows, {N} requested")
    rows, cols, _ = _packed_layout(N)
    P = w.P.values
    p = w.p.values
    P_prev = np.where(cols > 0, P[np.maximum(cols - 1, 0)], 0.0)
    abar = (P[rows] - P_prev) / P[rows]
    ahat = np.where(
        cols > 0,
        p[rows] * P_prev / (P[rows] * np.where(rows > 0, P[np.maximum(rows - 1, 0)], 1.0)),
        0.0,
    )
    ahat[0] = abar[0]
    abar.setflags(write=False)
    ahat.setflags(write=False)
    return AssociatedMatrices(abar, ahat, N)


@dataclass(frozen=True, eq=False)
class MatrixTransformResult:
    """``An`` = ``A_n(s)`` (base 0); ``dAn`` = ``A_n(s) - A_{n-1}(s)`` (base 1)."""

    An: SequencePrefix
    dAn: SequencePrefix


def _leading(x: SequencePrefix, A: NormalMatrix, what: str) -> np.ndarray:
    if x.base != 0:
        raise InvalidInputError(f"{what} must be indexed from 0")
    if len(x) < A.size:
        raise InvalidInputError(f"{what} has {len(x)} entries; matrix has {A.size} rows")
    return x.values[: A.size]


def apply(A: NormalMatrix, s: SequencePrefix) -> MatrixTransformResult:
    """``A_n(s) = sum_{v<=n} a_{nv} s_v`` on the first ``A.size`` entries of ``s``."""
    sv = _leading(as_prefix(s), A, "sequence")
    if isinstance(A, WeightedMeanMatrix):
        An = np.cumsum(A.weights.p.values[: A.size] * sv) / A.weights.P.values[: A.size]
    else:
        An = _row_dot(A.packed, A.size, sv)
    return MatrixTransformResult(SequencePrefix(An, 0), SequencePrefix(np.diff(An), 1))


def apply_series_form(
    A: NormalMatrix, a: SequencePrefix, assoc: AssociatedMatrices | None = None
) -> MatrixTransformResult:
    """``A_n(s) = sum abar_{nv} a_v`` and ``dA_n(s) = sum ahat_{nv} a_v`` from series terms."""
    av = _leading(as_prefix(a), A, "series")
    if isinstance(A, WeightedMeanMatrix) and assoc is None:
        p = A.weights.p.values[: A.size]
        P = A.weights.P.values[: A.size]
        An = np.cumsum(p * np.cumsum(av)) / P
        inner = np.cumsum(P[:-1] * av[1:])
        dAn = p[1:] / (P[1:] * P[:-1]) * inner
        return MatrixTransformResult(SequencePrefix(An, 0), SequencePrefix(dAn, 1))
    if assoc is None:
        assoc = associate(A)
    An = _row_dot(assoc.abar, A.size, av)
    dA = _row_dot(assoc.ahat, A.size, av)
    return MatrixTransformResult(SequencePrefix(An, 0), SequencePrefix(dA[1:], 1))
