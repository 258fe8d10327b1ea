"""Smith normal form of square matrix polynomials by elementary operations."""

from __future__ import annotations

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import IdenticallySingular
from .polymat import MatrixPolynomial


def _trim(p, tol):
    k = len(p)
    while k > 0 and abs(p[k - 1]) <= tol:
        k -= 1
    return np.array(p[:k], dtype=complex)


def _deg(p):
    return len(p) - 1


def _add(a, b):
    m = max(len(a), len(b))
    out = np.zeros(m, dtype=complex)
    out[:len(a)] += a
    out[:len(b)] += b
    return out


def _mul(a, b):
    if len(a) == 0 or len(b) == 0:
        return np.zeros(0, dtype=complex)
    return np.convolve(a, b)


def _divmod(a, b, tol):
    if len(a) < len(b):
        return np.zeros(0, dtype=complex), a
    q, r = npoly.polydiv(a, b)
    return _trim(q, tol), _trim(r, tol)


class _Work:
    """A = E^{-1}-side bookkeeping: invariant P = E @ A @ F throughout."""

    def __init__(self, coeffs, tol):
        n = coeffs.shape[1]
        self.n = n
        self.tol = tol
        self.A = [[_trim(coeffs[:, i, j], tol) for j in range(n)] for i in range(n)]
        one = np.ones(1, dtype=complex)
        zero = np.zeros(0, dtype=complex)
        self.E = [[one if i == j else zero for j in range(n)] for i in range(n)]
        self.F = [[one if i == j else zero for j in range(n)] for i in range(n)]

    def swap_rows(self, i, t):
        A, E = self.A, self.E
        A[i], A[t] = A[t], A[i]
        for r in range(self.n):
            E[r][i], E[r][t] = E[r][t], E[r][i]

    def swap_cols(self, j, t):
        A, F = self.A, self.F
        for r in range(self.n):
            A[r][j], A[r][t] = A[r][t], A[r][j]
        F[j], F[t] = F[t], F[j]

    def row_sub(self, i, t, q):
        # row_i -= q row_t ; E[:, t] += q E[:, i]
        for c in range(self.n):
            self.A[i][c] = _trim(_add(self.A[i][c], -_mul(q, self.A[t][c])), self.tol)
            self.E[c][t] = _add(self.E[c][t], _mul(q, self.E[c][i]))

    def col_sub(self, j, t, q):
        # col_j -= q col_t ; F[t, :] += q F[j, :]
        for r in range(self.n):
            self.A[r][j] = _trim(_add(self.A[r][j], -_mul(q, self.A[r][t])), self.tol)
            self.F[t][r] = _add(self.F[t][r], _mul(q, self.F[j][r]))

    def scale_row(self, i, c):
        for k in range(self.n):
            self.A[i][k] = self.A[i][k] / c
            self.E[k][i] = self.E[k][i] * c


def _pivot(A, t, n):
    best = None
    for i in range(t, n):
        for j in range(t, n):
            p = A[i][j]
            if len(p) == 0:
                continue
            key = (_deg(p), -abs(p[-1]))
            if best is None or key < best[0]:
                best = (key, i, j)
    return best


def _to_poly(entries, n):
    deg = max(max(len(e) for e in row) for row in entries) - 1
    c = np.zeros((max(deg, 0) + 1, n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            e = entries[i][j]
            c[:len(e), i, j] = e
    return MatrixPolynomial(c)


def smith_form(P: MatrixPolynomial, tol=1e-10):
    """Return (E, D, F) with P = E D F, E and F unimodular and D = diag(d_1, ..., d_n).

    The d_i are monic and each divides the next. Coefficients below ``tol``
    times the largest coefficient of P are treated as zero.
    Raises IdenticallySingular if det P vanishes identically.
    """
    n = P.n
    atol = tol * max(float(np.abs(P.coeffs).max()), 1.0)
    w = _Work(P.coeffs, atol)
    A = w.A
    for t in range(n):
        for _ in range(10000):
            found = _pivot(A, t, n)
            if found is None:
                raise IdenticallySingular("det P vanishes identically")
            _, i, j = found
            if i != t:
                w.swap_rows(i, t)
            if j != t:
                w.swap_cols(j, t)
            dirty = False
            for i in range(t + 1, n):
                if len(A[i][t]):
                    q, _ = _divmod(A[i][t], A[t][t], atol)
                    w.row_sub(i, t, q)
                    dirty |= len(A[i][t]) > 0
            for j in range(t + 1, n):
                if len(A[t][j]):
                    q, _ = _divmod(A[t][j], A[t][t], atol)
                    w.col_sub(j, t, q)
                    dirty |= len(A[t][j]) > 0
            if dirty:
                continue
            # pivot must divide the whole trailing block
            bad = next(((i, j) for i in range(t + 1, n) for j in range(t + 1, n)
                        if len(A[i][j]) and len(_divmod(A[i][j], A[t][t], atol)[1])), None)
            if bad is None:
                break
            w.row_sub(t, bad[0], -np.ones(1, dtype=complex))
        else:  # pragma: no cover
            raise RuntimeError("Smith reduction did not terminate")
        w.scale_row(t, A[t][t][-1])
    # clean off-diagonal rounding leftovers
    for i in range(n):
        for j in range(n):
            if i != j:
                A[i][j] = np.zeros(0, dtype=complex)
    return _to_poly(w.E, n), _to_poly(A, n), _to_poly(w.F, n)


def diagonal_entries(D: MatrixPolynomial):
    """The diagonal of a diagonal matrix polynomial as trimmed ascending coefficient arrays."""
    out = []
    for i in range(D.n):
        out.append(_trim(D.coeffs[:, i, i], 0.0))
    return out


def poly_remainder(a, b, tol=0.0):
    """Remainder of scalar polynomial a modulo b (ascending coefficients)."""
    return _divmod(_trim(np.asarray(a, dtype=complex), tol), _trim(np.asarray(b, dtype=complex), tol), tol)[1]
