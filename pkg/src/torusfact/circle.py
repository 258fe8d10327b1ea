"""Wiener-Hopf factorization of matrix Laurent polynomials on the circle.

A(z) = A_-(z) diag(z^kappa) A_+(z), with A_+ a polynomial in z and A_- a
polynomial in 1/z, both invertible on the closed discs they live on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NearSingular, NoConvergence
from .grid import evaluate
from .polymat import (MatrixPolynomial, coefficient_distance, divide_linear, evaluate_poly,
                      poly_eigenvalues, poly_mul, trim)
from .scalar import loop_winding
from .series import MatrixSeries, det_series
from .smith import diagonal_entries, smith_form

ROOT_MARGIN = 1e-8


@dataclass(frozen=True)
class FactorizationResult:
    A_minus: MatrixSeries
    kappa: tuple
    A_plus: MatrixSeries
    residual: float
    grid: int = 0

    def middle(self) -> MatrixSeries:
        n = len(self.kappa)
        return MatrixSeries(n, 1, _diag_monomials(self.kappa))

    def reconstruct(self) -> MatrixSeries:
        return self.A_minus @ self.middle() @ self.A_plus


def _diag_monomials(kappa):
    n = len(kappa)
    coeffs = {}
    for i, k in enumerate(kappa):
        coeffs.setdefault((int(k),), np.zeros((n, n), dtype=complex))[i, i] = 1.0
    return coeffs


def _check_roots(roots, margin):
    if roots.size:
        gap = float(np.abs(np.abs(roots) - 1.0).min())
        if gap <= margin:
            raise NearSingular(f"det A has a zero at distance {gap:.3g} from the unit circle",
                               margin=gap)


def _extract_inside_zeros(P, scale):
    """Split P = Q P_plus where Q collects the zeros of det P inside the disc.

    One zero at a time: a unitary row transform makes the first row vanish at
    the zero, which is then divided out of that row.
    """
    n = P.shape[1]
    Q = np.eye(n, dtype=complex)[None]
    roots = poly_eigenvalues(P)
    count = int(np.sum(np.abs(roots) < 1.0))
    for _ in range(count):
        # zeros at the origin are taken from the rank of P(0): companion
        # eigenvalues of a multiple zero are only accurate to sqrt(eps)
        if np.linalg.svd(P[0], compute_uv=False)[-1] <= 1e-11 * scale:
            z0 = 0.0
        else:
            roots = poly_eigenvalues(P)
            inside = roots[np.abs(roots) < 1.0]
            if inside.size == 0:
                break
            z0 = inside[np.argmin(np.abs(inside))]
        u, _, _ = np.linalg.svd(evaluate_poly(P, z0))
        v = u[:, -1].conj()  # v @ P(z0) ~ 0
        basis, _ = np.linalg.qr(np.column_stack([v.conj(), np.eye(n)]))
        C = basis.conj().T
        CP = np.einsum("ij,kjl->kil", C, P)
        q, rem = divide_linear(CP[:, 0, :], z0)
        if np.abs(rem).max() > 1e-6 * scale:
            raise NoConvergence(f"zero {z0:.6g} could not be divided out (remainder {np.abs(rem).max():.3g})")
        newP = np.zeros((max(CP.shape[0], 1), n, n), dtype=complex)
        newP[:, 1:, :] = CP[:, 1:, :]
        newP[:q.shape[0], 0, :] = q
        P = trim(newP, 1e-13 * scale)
        # Q <- Q C^* diag(z - z0, 1, ..., 1)
        right = np.zeros((2, n, n), dtype=complex)
        right[0] = C.conj().T
        right[0][:, 0] *= -z0
        right[1][:, 0] = C.conj().T[:, 0]
        Q = poly_mul(Q, right)
    return Q, P, count


def _column_degrees(Q, tol):
    degs = []
    for j in range(Q.shape[2]):
        col = np.abs(Q[:, :, j]).max(axis=1)
        nz = np.flatnonzero(col > tol)
        degs.append(int(nz[-1]) if nz.size else -1)
    return degs


def _column_reduce(Q, target, scale):
    """Right unimodular operations making Q column reduced (sum of column degrees = target).

    Returns (Q_reduced, U_inv, degrees) with Q = Q_reduced @ U_inv.
    """
    n = Q.shape[1]
    tol = 1e-10 * scale
    Q = Q.copy()
    Uinv = np.eye(n, dtype=complex)[None]
    for _ in range(64 * n * max(Q.shape[0], 1)):
        degs = _column_degrees(Q, tol)
        if sum(degs) <= target:
            return trim(Q, tol), trim(Uinv, 1e-13 * max(np.abs(Uinv).max(), 1.0)), degs
        lead = np.column_stack([Q[d, :, j] for j, d in enumerate(degs)])
        _, _, vh = np.linalg.svd(lead)
        alpha = vh[-1].conj()
        significant = np.abs(alpha) > 1e-3 * np.abs(alpha).max()
        cand = [j for j in range(n) if significant[j]]
        k = max(cand, key=lambda j: (degs[j], abs(alpha[j])))
        t = np.zeros((degs[k] + 1, n), dtype=complex)
        for j in cand:
            t[degs[k] - degs[j], j] = alpha[j] / alpha[k]
        new = np.zeros((Q.shape[0], n), dtype=complex)
        for j in cand:
            shift = degs[k] - degs[j]
            new[shift:shift + degs[j] + 1] += t[shift, j] * Q[:degs[j] + 1, :, j]
        new[degs[k]] = 0.0
        Q[:, :, k] = new
        # U_inv <- (I - (t - e_k) e_k^T) U_inv : row_j -= t_j row_k for j != k
        grow = np.zeros((Uinv.shape[0] + degs[k], n, n), dtype=complex)
        grow[:Uinv.shape[0]] = Uinv
        rowk = Uinv[:, k, :].copy()
        for j in cand:
            if j == k:
                continue
            shift = degs[k] - degs[j]
            grow[shift:shift + rowk.shape[0], j, :] -= t[shift, j] * rowk
        Uinv = trim(grow, 0.0)
    raise NoConvergence("column reduction did not terminate")


def wh_factorize(A: MatrixSeries, grid=None, tol=1e-8, margin=ROOT_MARGIN) -> FactorizationResult:
    """Factor a matrix Laurent polynomial on T^1 as A_- diag(z^kappa) A_+.

    kappa is sorted in descending order. The zeros of det A inside the disc
    are peeled off one at a time into a left polynomial factor, which is then
    column reduced; its column degrees give the partial indices.

    Raises NearSingular if det A has a zero within ``margin`` of the circle,
    NoConvergence if the reconstruction misses ``tol`` on the check grid.
    """
    if A.dim != 1:
        raise ValueError("wh_factorize works on T^1")
    n = A.n
    shift, Ppoly = MatrixPolynomial.from_series(A)
    P = np.array(Ppoly.coeffs)
    scale = max(float(np.abs(P).max()), 1e-300)
    if not np.any(P):
        raise NearSingular("A is zero", margin=0.0)
    roots = poly_eigenvalues(P)
    _check_roots(roots, margin)
    lo = shift
    hi = shift + Ppoly.degree
    if grid is None:
        grid = max(64, 8 * (hi - lo + 1))
    z = np.exp(2j * np.pi * np.arange(grid) / grid)
    dets = np.abs(np.linalg.det(evaluate_poly(P, z)))
    if dets.min() <= margin * scale ** n:
        raise NearSingular(f"min |det A| = {dets.min():.3g} on {grid} nodes", margin=float(dets.min()))

    Q, Pplus, count = _extract_inside_zeros(P, scale)
    Qr, Uinv, degs = _column_reduce(Q, count, scale)
    Aplus = trim(poly_mul(Uinv, Pplus), 1e-14 * scale)

    kappa = [d + shift for d in degs]
    order = sorted(range(n), key=lambda j: -kappa[j])
    kappa = tuple(int(kappa[j]) for j in order)
    minus = {}
    for j_new, j in enumerate(order):
        for d in range(degs[j] + 1):
            minus.setdefault((d - degs[j],), np.zeros((n, n), dtype=complex))[:, j_new] = Qr[d, :, j]
    plus = {(d,): Aplus[d][order, :] for d in range(Aplus.shape[0])}
    A_minus = MatrixSeries(n, 1, minus)
    A_plus = MatrixSeries(n, 1, plus)

    check = int(max(grid, 4 * (Qr.shape[0] + Aplus.shape[0] + hi - lo)))
    result = FactorizationResult(A_minus, kappa, A_plus, 0.0, check)
    residual = float(np.abs(evaluate(result.reconstruct(), (check,)).samples
                            - evaluate(A, (check,)).samples).max())
    if residual > tol:
        raise NoConvergence(f"reconstruction residual {residual:.3g} exceeds {tol:g}")
    return FactorizationResult(A_minus, kappa, A_plus, residual, check)


def mean_motion(A, grid=256, margin=ROOT_MARGIN) -> int:
    """Winding number of det A along T^1."""
    if isinstance(A, MatrixPolynomial):
        A = A.to_series()
    if A.dim != 1:
        raise ValueError("mean_motion works on T^1")
    d = det_series(A)
    N = grid
    while True:
        values = evaluate(d, (N,)).samples[:, 0, 0]
        smallest = float(np.abs(values).min())
        if smallest <= margin:
            raise NearSingular(f"min |det A| = {smallest:.3g} on {N} nodes", margin=smallest)
        try:
            return loop_winding(values)[0]
        except Exception:
            if N > 1 << 16:
                raise
            N *= 2


@dataclass(frozen=True)
class Regularization:
    polynomial: MatrixPolynomial
    perturbation: float
    margin: float
    method: str
    degree_bound: int


def _det_margin(c, grid):
    # a zero between grid nodes can hide from the samples, so look at the roots too
    if not np.any(c):
        return 0.0
    roots = poly_eigenvalues(c)
    if roots.size and np.abs(np.abs(roots) - 1.0).min() <= ROOT_MARGIN:
        return 0.0
    z = np.exp(2j * np.pi * np.arange(grid) / grid)
    return float(np.abs(np.linalg.det(evaluate_poly(c, z))).min())


def regularize(P: MatrixPolynomial, eps: float, grid=1024, margin=1e-8) -> Regularization:
    """Perturb P by less than ``eps`` (max coefficient 2-norm) so det P has no zeros on T.

    Inputs already invertible on the grid come back unchanged. Otherwise the
    zeros of the Smith diagonal near the circle are pushed radially off it
    and E D' F is reassembled; if that cannot stay within ``eps``, a small
    multiple of the identity is added instead.
    """
    c = np.array(P.coeffs)
    n = P.n
    found = _det_margin(c, grid)
    if found > margin:
        return Regularization(P, 0.0, found, "unchanged", P.degree)

    try:
        E, D, F = smith_form(P)
    except Exception:
        E = D = F = None
    if E is not None:
        bound = E.degree + D.degree + F.degree
        diag = diagonal_entries(D)
        eta = 0.25
        while eta > 1e-12:
            moved = np.zeros((D.degree + 1, n, n), dtype=complex)
            for i, d in enumerate(diag):
                r = np.roots(d[::-1]) if len(d) > 1 else np.zeros(0)
                close = np.abs(np.abs(r) - 1.0) < eta
                r = np.where(close, np.where(np.abs(r) <= 1.0, 1.0 - eta, 1.0 + eta)
                             * np.exp(1j * np.angle(r)), r)
                newd = np.poly(r)[::-1] if r.size else np.ones(1)
                moved[:len(newd), i, i] = newd
            cand = poly_mul(poly_mul(E.coeffs, moved), F.coeffs)
            cand = trim(cand, 1e-14 * max(np.abs(cand).max(), 1.0))
            dist = coefficient_distance(cand, c)
            if dist < eps:
                m = _det_margin(cand, grid)
                if m > margin:
                    return Regularization(MatrixPolynomial(cand), dist, m, "smith", bound)
            eta /= 2

    # rotate the shift only when that clearly helps; ties keep eps/2 * I
    shifted = []
    for theta in np.linspace(0, 2 * np.pi, 16, endpoint=False):
        cand = c.copy()
        cand[0] = cand[0] + (eps / 2) * np.exp(1j * theta) * np.eye(n)
        shifted.append((_det_margin(cand, grid), cand))
    top = max(m for m, _ in shifted)
    m, cand = next(item for item in shifted if item[0] >= 0.999 * top)
    return Regularization(MatrixPolynomial(cand), eps / 2, m, "shift", P.degree)
