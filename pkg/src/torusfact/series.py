"""Finitely supported Fourier series on the torus T^k.

A series is a map from multi-indices j in Z^k to complex coefficients,
standing for the function x -> sum_j a_j exp(2 pi i j.x) on [0, 1)^k.
Multi-indices are plain tuples of ints; Python's tuple comparison is the
lexicographic order used for the plus/minus splitting.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from types import MappingProxyType
from typing import Mapping, Union

import numpy as np
import scipy.signal

from .errors import DimensionMismatch

MultiIndex = tuple


def _as_index(j, dim=None) -> tuple:
    idx = tuple(int(v) for v in j)
    if dim is not None and len(idx) != dim:
        raise DimensionMismatch(f"index {idx} has length {len(idx)}, expected {dim}")
    return idx


def _add_index(a, b):
    return tuple(x + y for x, y in zip(a, b))


def lex_sign(j) -> int:
    """Sign of j under the lexicographic order: -1, 0 or +1."""
    for v in j:
        if v:
            return 1 if v > 0 else -1
    return 0


@dataclass(frozen=True, eq=False)
class ScalarSeries:
    """Trigonometric polynomial with complex coefficients on T^dim."""

    dim: int
    terms: Mapping[tuple, complex]

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be positive")
        clean = {}
        for j, c in dict(self.terms).items():
            idx = _as_index(j, self.dim)
            c = complex(c)
            if not (np.isfinite(c.real) and np.isfinite(c.imag)):
                raise ValueError(f"non-finite coefficient at {idx}")
            if c != 0:
                clean[idx] = c
        object.__setattr__(self, "terms", MappingProxyType(clean))

    # constructors

    @classmethod
    def zero(cls, dim):
        return cls(dim, {})

    @classmethod
    def constant(cls, value, dim):
        return cls(dim, {(0,) * dim: value})

    @classmethod
    def character(cls, j, coefficient=1.0):
        j = _as_index(j)
        return cls(len(j), {j: coefficient})

    # algebra

    def _coerce(self, other):
        if isinstance(other, ScalarSeries):
            if other.dim != self.dim:
                raise DimensionMismatch(f"dim {self.dim} vs {other.dim}")
            return other
        if np.isscalar(other):
            return ScalarSeries.constant(other, self.dim)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for j, c in other.terms.items():
            out[j] = out.get(j, 0) + c
        return ScalarSeries(self.dim, out)

    __radd__ = __add__

    def __neg__(self):
        return ScalarSeries(self.dim, {j: -c for j, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, ScalarSeries):
            return mul(self, other)
        if np.isscalar(other):
            return ScalarSeries(self.dim, {j: c * other for j, c in self.terms.items()})
        return NotImplemented

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, ScalarSeries):
            return NotImplemented
        return self.dim == other.dim and dict(self.terms) == dict(other.terms)

    def __repr__(self):
        body = ", ".join(f"{j}: {c:.6g}" for j, c in sorted(self.terms.items()))
        return f"ScalarSeries(dim={self.dim}, {{{body}}})"

    def conj(self):
        """Pointwise complex conjugate: coefficients conjugated, indices negated."""
        return ScalarSeries(self.dim, {tuple(-v for v in j): c.conjugate()
                                       for j, c in self.terms.items()})

    def coefficient(self, j) -> complex:
        return self.terms.get(_as_index(j, self.dim), 0j)

    @property
    def mean(self) -> complex:
        return self.terms.get((0,) * self.dim, 0j)

    def degree(self) -> int:
        """Largest |j_i| over the spectrum (0 for constants and zero)."""
        return max((max(abs(v) for v in j) for j in self.terms), default=0)

    def trimmed(self, cutoff):
        return ScalarSeries(self.dim, {j: c for j, c in self.terms.items() if abs(c) > cutoff})

    def __call__(self, x):
        """Evaluate at points ``x`` of shape (..., dim)."""
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape[:-1], dtype=complex)
        for j, c in self.terms.items():
            out += c * np.exp(2j * np.pi * (x @ np.asarray(j, dtype=float)))
        return out

    def on_loop(self, axis):
        """Restriction to the coordinate loop through the origin along ``axis``."""
        out = {}
        for j, c in self.terms.items():
            out[(j[axis],)] = out.get((j[axis],), 0) + c
        return ScalarSeries(1, out)


@dataclass(frozen=True, eq=False)
class MatrixSeries:
    """n x n matrix trigonometric polynomial, stored as index -> coefficient matrix."""

    n: int
    dim: int
    coeffs: Mapping[tuple, np.ndarray]

    def __post_init__(self):
        clean = {}
        for j, c in dict(self.coeffs).items():
            idx = _as_index(j, self.dim)
            arr = np.array(c, dtype=complex).reshape(self.n, self.n)
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"non-finite coefficient at {idx}")
            if np.any(arr != 0):
                arr.setflags(write=False)
                clean[idx] = arr
        object.__setattr__(self, "coeffs", MappingProxyType(clean))

    @classmethod
    def zero(cls, n, dim):
        return cls(n, dim, {})

    @classmethod
    def constant(cls, matrix, dim):
        matrix = np.atleast_2d(np.asarray(matrix, dtype=complex))
        return cls(matrix.shape[0], dim, {(0,) * dim: matrix})

    @classmethod
    def identity(cls, n, dim):
        return cls.constant(np.eye(n), dim)

    @classmethod
    def from_entries(cls, entries):
        """Build from a nested list of ScalarSeries (or numbers, read as constants)."""
        n = len(entries)
        dim = next((e.dim for row in entries for e in row if isinstance(e, ScalarSeries)), None)
        if dim is None:
            raise ValueError("cannot infer dim from constant entries")
        out = {}
        for r, row in enumerate(entries):
            if len(row) != n:
                raise DimensionMismatch("entries must form a square array")
            for c, e in enumerate(row):
                if not isinstance(e, ScalarSeries):
                    e = ScalarSeries.constant(e, dim)
                if e.dim != dim:
                    raise DimensionMismatch("entries must share dim")
                for j, v in e.terms.items():
                    out.setdefault(j, np.zeros((n, n), dtype=complex))[r, c] += v
        return cls(n, dim, out)

    @classmethod
    def diagonal(cls, entries):
        n = len(entries)
        return cls.from_entries([[entries[i] if i == k else 0 for k in range(n)] for i in range(n)])

    def entry(self, row, col) -> ScalarSeries:
        return ScalarSeries(self.dim, {j: c[row, col] for j, c in self.coeffs.items()})

    @property
    def entries(self):
        return tuple(tuple(self.entry(r, c) for c in range(self.n)) for r in range(self.n))

    def _coerce(self, other):
        if isinstance(other, MatrixSeries):
            if (other.n, other.dim) != (self.n, self.dim):
                raise DimensionMismatch(f"({self.n}, {self.dim}) vs ({other.n}, {other.dim})")
            return other
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = {j: c.copy() for j, c in self.coeffs.items()}
        for j, c in other.coeffs.items():
            out[j] = out[j] + c if j in out else c
        return MatrixSeries(self.n, self.dim, out)

    def __neg__(self):
        return MatrixSeries(self.n, self.dim, {j: -c for j, c in self.coeffs.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __matmul__(self, other):
        return mul(self, other)

    def __mul__(self, other):
        if isinstance(other, ScalarSeries):
            return mul(self, MatrixSeries.diagonal([other] * self.n))
        if np.isscalar(other):
            return MatrixSeries(self.n, self.dim, {j: c * other for j, c in self.coeffs.items()})
        return NotImplemented

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, MatrixSeries):
            return NotImplemented
        if (self.n, self.dim) != (other.n, other.dim) or self.coeffs.keys() != other.coeffs.keys():
            return False
        return all(np.array_equal(c, other.coeffs[j]) for j, c in self.coeffs.items())

    def __repr__(self):
        return f"MatrixSeries(n={self.n}, dim={self.dim}, terms={len(self.coeffs)})"

    def conj_transpose(self):
        return MatrixSeries(self.n, self.dim, {tuple(-v for v in j): c.conj().T
                                               for j, c in self.coeffs.items()})

    def coefficient(self, j) -> np.ndarray:
        j = _as_index(j, self.dim)
        return self.coeffs[j] if j in self.coeffs else np.zeros((self.n, self.n), dtype=complex)

    def degree(self) -> int:
        return max((max(abs(v) for v in j) for j in self.coeffs), default=0)

    def trimmed(self, cutoff):
        out = {j: np.where(np.abs(c) > cutoff, c, 0) for j, c in self.coeffs.items()}
        return MatrixSeries(self.n, self.dim, out)

    def __call__(self, x):
        """Evaluate at points ``x`` of shape (..., dim); returns (..., n, n)."""
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape[:-1] + (self.n, self.n), dtype=complex)
        for j, c in self.coeffs.items():
            out += np.exp(2j * np.pi * (x @ np.asarray(j, dtype=float)))[..., None, None] * c
        return out


Series = Union[ScalarSeries, MatrixSeries]


@dataclass(frozen=True)
class LexSplit:
    """a = minus + zero + plus, with spectra in Gamma_- \\ 0, {0}, Gamma_+ \\ 0."""

    minus: Series
    zero: object
    plus: Series

    def total(self):
        if isinstance(self.minus, ScalarSeries):
            const = ScalarSeries.constant(self.zero, self.minus.dim)
        else:
            const = MatrixSeries.constant(self.zero, self.minus.dim)
        return self.minus + const + self.plus


_DENSE_THRESHOLD = 4096


def _to_dense(items, dim):
    keys = np.array(list(items), dtype=np.int64).reshape(-1, dim)
    lo = keys.min(axis=0)
    shape = tuple(keys.max(axis=0) - lo + 1)
    return lo, shape, keys - lo


def _dense_convolve(a_items, b_items, dim):
    """Direct (non-FFT) convolution of two coefficient maps via their bounding boxes."""
    lo_a, shape_a, rel_a = _to_dense(a_items, dim)
    lo_b, shape_b, rel_b = _to_dense(b_items, dim)
    da = np.zeros(shape_a, dtype=complex)
    db = np.zeros(shape_b, dtype=complex)
    da[tuple(rel_a.T)] = list(a_items.values())
    db[tuple(rel_b.T)] = list(b_items.values())
    dc = scipy.signal.convolve(da, db, mode="full", method="direct")
    lo = lo_a + lo_b
    return {tuple(int(v) for v in pos + lo): dc[tuple(pos)] for pos in np.argwhere(dc != 0)}


def mul(a: Series, b: Series) -> Series:
    """Exact coefficient convolution of two scalar or two matrix series."""
    if isinstance(a, ScalarSeries) and isinstance(b, ScalarSeries):
        if a.dim != b.dim:
            raise DimensionMismatch(f"dim {a.dim} vs {b.dim}")
        if len(a.terms) * len(b.terms) > _DENSE_THRESHOLD:
            return ScalarSeries(a.dim, _dense_convolve(a.terms, b.terms, a.dim))
        out = {}
        for j, x in a.terms.items():
            for k, y in b.terms.items():
                idx = _add_index(j, k)
                out[idx] = out.get(idx, 0) + x * y
        return ScalarSeries(a.dim, out)
    if isinstance(a, MatrixSeries) and isinstance(b, MatrixSeries):
        if a.dim != b.dim or a.n != b.n:
            raise DimensionMismatch(f"({a.n}, {a.dim}) vs ({b.n}, {b.dim})")
        if len(a.coeffs) * len(b.coeffs) > _DENSE_THRESHOLD:
            ea, eb = a.entries, b.entries
            return MatrixSeries.from_entries(
                [[sum((mul(ea[i][j], eb[j][k]) for j in range(a.n)), ScalarSeries.zero(a.dim))
                  for k in range(a.n)] for i in range(a.n)])
        out = {}
        for j, x in a.coeffs.items():
            for k, y in b.coeffs.items():
                idx = _add_index(j, k)
                out[idx] = out[idx] + x @ y if idx in out else x @ y
        return MatrixSeries(a.n, a.dim, out)
    raise TypeError(f"cannot multiply {type(a).__name__} and {type(b).__name__}")


def split_pm(a: Series) -> LexSplit:
    """Split by the lexicographic sign of each index; the constant term is kept apart."""
    if isinstance(a, ScalarSeries):
        items, make = a.terms, (lambda d: ScalarSeries(a.dim, d))
        zero = a.mean
    else:
        items, make = a.coeffs, (lambda d: MatrixSeries(a.n, a.dim, d))
        zero = a.coefficient((0,) * a.dim).copy()
    minus = {j: c for j, c in items.items() if lex_sign(j) < 0}
    plus = {j: c for j, c in items.items() if lex_sign(j) > 0}
    return LexSplit(make(minus), zero, make(plus))


def spectrum(a: Series) -> frozenset:
    if isinstance(a, ScalarSeries):
        return frozenset(a.terms)
    return frozenset(a.coeffs)


def wiener_norm(a: Series) -> float:
    """l1 norm of the coefficients; for matrices the max over entries."""
    if isinstance(a, ScalarSeries):
        return float(sum(abs(c) for c in a.terms.values()))
    if not a.coeffs:
        return 0.0
    return float(np.sum([np.abs(c) for c in a.coeffs.values()], axis=0).max())


def det_series(a: MatrixSeries) -> ScalarSeries:
    """Determinant by Laplace expansion along the first row, in exact convolution."""
    entries = a.entries

    def minor_det(rows, cols):
        if len(rows) == 1:
            return entries[rows[0]][cols[0]]
        total = ScalarSeries.zero(a.dim)
        for pos, c in enumerate(cols):
            e = entries[rows[0]][c]
            if not e.terms:
                continue
            sub = minor_det(rows[1:], cols[:pos] + cols[pos + 1:])
            term = mul(e, sub)
            total = total + term if pos % 2 == 0 else total - term
        return total

    return minor_det(tuple(range(a.n)), tuple(range(a.n)))


def random_series(rng, dim, degree, scale=1.0, integer=False, density=1.0):
    """Random scalar series with spectrum inside the box |j_i| <= degree."""
    terms = {}
    for j in itertools.product(range(-degree, degree + 1), repeat=dim):
        if rng.random() > density:
            continue
        if integer:
            c = complex(rng.integers(-3, 4), rng.integers(-3, 4))
        else:
            c = complex(rng.normal(), rng.normal()) * scale
        terms[j] = c
    return ScalarSeries(dim, terms)


def random_matrix_series(rng, n, dim, degree, scale=1.0, integer=False, density=1.0):
    return MatrixSeries.from_entries(
        [[random_series(rng, dim, degree, scale, integer, density) for _ in range(n)]
         for _ in range(n)])
