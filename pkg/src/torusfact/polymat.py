"""Matrix polynomials in z with ascending coefficient arrays of shape (deg+1, n, n)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .series import MatrixSeries


@dataclass(frozen=True, eq=False)
class MatrixPolynomial:
    """P(z) = sum_k coeffs[k] z^k with the leading stored coefficient nonzero."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex)
        if c.ndim == 2:
            c = c[None]
        if c.ndim != 3 or c.shape[1] != c.shape[2]:
            raise ValueError(f"coefficients must have shape (deg+1, n, n), got {c.shape}")
        c = trim(c)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def n(self) -> int:
        return self.coeffs.shape[1]

    @property
    def degree(self) -> int:
        return self.coeffs.shape[0] - 1

    def is_zero(self) -> bool:
        return not np.any(self.coeffs)

    def __call__(self, z):
        return evaluate_poly(self.coeffs, z)

    def __matmul__(self, other):
        return MatrixPolynomial(poly_mul(self.coeffs, other.coeffs))

    def to_series(self, shift=0) -> MatrixSeries:
        """The Laurent series z^shift P(z) on T^1."""
        return MatrixSeries(self.n, 1, {(k + shift,): c for k, c in enumerate(self.coeffs)})

    @classmethod
    def from_series(cls, a: MatrixSeries):
        """Return (shift, P) with a(z) = z^shift P(z) and P(0) != 0 (shift 0 for zero)."""
        if a.dim != 1:
            raise ValueError("matrix polynomials live on T^1")
        if not a.coeffs:
            return 0, cls(np.zeros((1, a.n, a.n)))
        lo = min(j[0] for j in a.coeffs)
        hi = max(j[0] for j in a.coeffs)
        c = np.zeros((hi - lo + 1, a.n, a.n), dtype=complex)
        for (j,), m in a.coeffs.items():
            c[j - lo] = m
        return lo, cls(c)


def trim(c, tol=0.0):
    """Drop trailing coefficient matrices whose entries are all <= tol in modulus."""
    k = c.shape[0]
    while k > 1 and np.abs(c[k - 1]).max() <= tol:
        k -= 1
    return c[:k]


def poly_mul(p, q):
    out = np.zeros((p.shape[0] + q.shape[0] - 1, p.shape[1], q.shape[2]), dtype=complex)
    for i, pi in enumerate(p):
        out[i:i + q.shape[0]] += pi @ q
    return out


def evaluate_poly(c, z):
    """Horner evaluation; ``z`` may be an array, result has shape z.shape + (n, m)."""
    z = np.asarray(z, dtype=complex)
    out = np.zeros(z.shape + c.shape[1:], dtype=complex)
    for coef in c[::-1]:
        out = out * z[..., None, None] + coef
    return out


def poly_eigenvalues(c):
    """Finite zeros of det P(z), from the block companion pencil."""
    c = np.asarray(c, dtype=complex)
    deg, n = c.shape[0] - 1, c.shape[1]
    if deg == 0:
        return np.zeros(0, dtype=complex)
    size = n * deg
    a = np.zeros((size, size), dtype=complex)
    b = np.eye(size, dtype=complex)
    a[:-n, n:] = np.eye(size - n)
    a[-n:, :] = -np.concatenate(list(c[:-1]), axis=1)
    b[-n:, -n:] = c[-1]
    w = scipy.linalg.eig(a, b, right=False)
    w = w[np.isfinite(w)]
    return w[np.abs(w) < 1e12]


def divide_linear(p, z0):
    """Synthetic division of a vector polynomial (deg+1, m) by (z - z0); returns (q, r)."""
    deg = p.shape[0] - 1
    if deg == 0:
        return np.zeros((1,) + p.shape[1:], dtype=complex), p[0].copy()
    q = np.zeros((deg,) + p.shape[1:], dtype=complex)
    acc = p[deg].copy()
    for k in range(deg - 1, -1, -1):
        q[k] = acc
        acc = p[k] + z0 * acc
    return q, acc


def coefficient_distance(p, q) -> float:
    """max_k ||p_k - q_k||_2 with the shorter polynomial padded by zeros."""
    m = max(p.shape[0], q.shape[0])
    pp = np.zeros((m,) + p.shape[1:], dtype=complex)
    qq = np.zeros((m,) + q.shape[1:], dtype=complex)
    pp[:p.shape[0]] = p
    qq[:q.shape[0]] = q
    return float(np.linalg.norm(pp - qq, ord=2, axis=(1, 2)).max())
