"""Input generators shared by the unit and acceptance tests."""

import numpy as np
import scipy.linalg

from torusfact.grid import SampledMap, evaluate, grid_nodes
from torusfact.polymat import MatrixPolynomial, poly_eigenvalues, poly_mul
from torusfact.series import (MatrixSeries, ScalarSeries, mul, random_matrix_series,
                              random_series, wiener_norm)


def cplx(rng, *shape):
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def contraction(rng, n, r):
    b = cplx(rng, n, n)
    return b * (r / np.linalg.norm(b, 2))


def monomial_diag(kappa):
    n = len(kappa)
    coeffs = {}
    for i, k in enumerate(kappa):
        coeffs.setdefault((int(k),), np.zeros((n, n), dtype=complex))[i, i] = 1.0
    return MatrixSeries(n, 1, coeffs)


def planted_circle(rng, n, kappa):
    """G1 (I + C/z) diag(z^kappa) (I + B z) G2 with |B|, |C| <= 0.6: indices are kappa."""
    minus = MatrixSeries(n, 1, {(0,): np.eye(n), (-1,): contraction(rng, n, 0.6)})
    plus = MatrixSeries(n, 1, {(0,): np.eye(n), (1,): contraction(rng, n, 0.6)})
    g1 = MatrixSeries.constant(cplx(rng, n, n), 1)
    g2 = MatrixSeries.constant(cplx(rng, n, n), 1)
    return g1 @ minus @ monomial_diag(kappa) @ plus @ g2


def root_gap(a: MatrixSeries) -> float:
    """Distance of the zeros of det a from the unit circle (in modulus)."""
    _, p = MatrixPolynomial.from_series(a)
    roots = poly_eigenvalues(p.coeffs)
    return float(np.abs(np.abs(roots) - 1.0).min()) if roots.size else np.inf


def generic_circle(rng, n, lo, hi, min_gap=0.3):
    """Random coefficients on degrees lo..hi, redrawn until det zeros keep ``min_gap`` from |z| = 1."""
    while True:
        a = MatrixSeries(n, 1, {(k,): cplx(rng, n, n) for k in range(lo, hi + 1)})
        if root_gap(a) > min_gap:
            return a


def singular_on_circle(rng, n):
    """G(z) diag(z - e^{i t}, 1, ...) H(z) with linear G, H: det vanishes at e^{i t}."""
    t = rng.uniform(0, 2 * np.pi)
    mid = np.zeros((2, n, n), dtype=complex)
    mid[0] = np.eye(n)
    mid[0, 0, 0] = -np.exp(1j * t)
    mid[1, 0, 0] = 1.0
    g = np.stack([np.eye(n) * 2 + 0.3 * cplx(rng, n, n), 0.3 * cplx(rng, n, n)])
    h = np.stack([np.eye(n) * 2 + 0.3 * cplx(rng, n, n), 0.3 * cplx(rng, n, n)])
    return MatrixPolynomial(poly_mul(poly_mul(g, mid), h)), np.exp(1j * t)


def exp_series(b: ScalarSeries, cutoff=1e-15) -> ScalarSeries:
    """Coefficients of e^b from samples on a grid fine enough that aliasing is below the cutoff."""
    N = 32
    while True:
        values = np.exp(evaluate(b, (N,) * b.dim).samples[..., 0, 0])
        hat = np.fft.fftn(values) / N ** b.dim
        freqs = np.fft.fftfreq(N, 1.0 / N).round().astype(int)
        outer = np.zeros((N,) * b.dim, dtype=bool)
        for ax in range(b.dim):
            shape = [1] * b.dim
            shape[ax] = N
            outer |= (np.abs(freqs) > N // 4).reshape(shape)
        scale = max(1.0, float(np.abs(hat).max()))
        if np.abs(hat[outer]).max() < cutoff * scale or N >= 512:
            break
        N *= 2
    terms = {}
    for pos in np.argwhere(np.abs(hat) > cutoff):
        terms[tuple(int(freqs[p]) for p in pos)] = hat[tuple(pos)]
    return ScalarSeries(b.dim, terms)


def planted_scalar(rng, c, degree=2, scale=0.06):
    """a = e^b <c, .> e^u for random degree-2 b, u; returns (a, b, u)."""
    dim = len(c)
    b = random_series(rng, dim, degree, scale=scale)
    u = random_series(rng, dim, degree, scale=scale)
    a = mul(ScalarSeries.character(tuple(c)), exp_series(b + u))
    return a, b, u


def random_antihermitian(rng, n, dim, degree, norm):
    """Anti-Hermitian trig polynomial with Wiener norm equal to ``norm``."""
    h = random_matrix_series(rng, n, dim, degree)
    h = (h - h.conj_transpose()) * 0.5
    return h * (norm / wiener_norm(h))


def exp_samples(h: MatrixSeries, grid) -> SampledMap:
    return SampledMap(scipy.linalg.expm(evaluate(h, grid).samples))


def random_unitary_field(rng, n, grid):
    """A random smooth unitary map on T^3 equal to I on {x3 = 0}.

    exp(sin^2(pi x3) H(x)) with H anti-Hermitian: the exponent vanishes at x3 = 0.
    """
    h = random_antihermitian(rng, n, 3, 2, float(rng.uniform(0.5, 3.0)))
    values = evaluate(h, grid).samples
    x3 = grid_nodes(grid)[..., 2]
    return SampledMap(scipy.linalg.expm((np.sin(np.pi * x3) ** 2)[..., None, None] * values))
