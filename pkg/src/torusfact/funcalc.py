"""Analytic functions of matrix series, computed pointwise and projected back."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import NoConvergence, SpectrumViolation
from .grid import SampledMap, _normalize_grid, evaluate, fejer_project
from .series import MatrixSeries, ScalarSeries

FUNCTIONS = ("sqrt", "log", "exp", "inverse", "power")


@dataclass(frozen=True)
class CalcResult:
    series: object
    sup_error: float
    margin: float
    degree: int
    grid: tuple


def _distance_to_cut(w):
    # distance from eigenvalues to the closed half-line (-inf, 0]
    return np.where(w.real >= 0, np.abs(w), np.abs(w.imag))


def spectral_margin(func, samples, exponent=None) -> float:
    if func == "exp" or (func == "power" and float(exponent).is_integer() and exponent >= 0):
        return float("inf")
    w = np.linalg.eigvals(samples)
    if func == "inverse" or func == "power" and float(exponent).is_integer():
        return float(np.abs(w).min())
    return float(_distance_to_cut(w).min())


def _scalar_apply(func, z, exponent):
    if func == "sqrt":
        return np.sqrt(z)
    if func == "log":
        return np.log(z)
    if func == "exp":
        return np.exp(z)
    if func == "inverse":
        return 1.0 / z
    return z ** exponent


def _node_apply(func, m, exponent):
    if func == "sqrt":
        return scipy.linalg.sqrtm(m)
    if func == "log":
        return scipy.linalg.logm(m)
    if func == "exp":
        return scipy.linalg.expm(m)
    if func == "inverse":
        return np.linalg.inv(m)
    return scipy.linalg.fractional_matrix_power(m, exponent)


def apply_pointwise(func, samples, exponent=None):
    """Standard functional calculus at every node of a (..., n, n) array."""
    if func not in FUNCTIONS:
        raise ValueError(f"unknown function {func!r}; expected one of {FUNCTIONS}")
    if func == "power" and exponent is None:
        raise ValueError("power needs an exponent")
    n = samples.shape[-1]
    if n == 1:
        return _scalar_apply(func, samples, exponent)
    if func == "inverse":
        return np.linalg.inv(samples)
    if func == "exp":
        return scipy.linalg.expm(samples)
    if func == "power" and float(exponent).is_integer():
        p = int(exponent)
        base = samples if p >= 0 else np.linalg.inv(samples)
        return np.linalg.matrix_power(base, abs(p))
    w, v = np.linalg.eig(samples)
    cond = np.linalg.cond(v)
    out = v @ (_scalar_apply(func, w, exponent)[..., None] * np.linalg.inv(v))
    flat_out = out.reshape(-1, n, n)
    flat_in = samples.reshape(-1, n, n)
    for i in np.flatnonzero(cond.reshape(-1) > 1e6):
        flat_out[i] = _node_apply(func, flat_in[i], exponent)
    return flat_out.reshape(samples.shape)


def functional_calc(func, a, grid=16, tol=1e-10, margin=1e-6, max_degree=128,
                    exponent=None) -> CalcResult:
    """Trigonometric-polynomial approximation of func(a) with certified sup-error.

    ``func`` is one of "sqrt", "log", "exp", "inverse", "power" (with
    ``exponent``). Principal branches are used for sqrt, log and non-integer
    powers. The function is applied at the nodes of ``grid``, projected onto
    degree (N-1)//2, and checked against the pointwise values on a grid of
    twice the density; the grid doubles until the check passes ``tol``.

    Raises SpectrumViolation if eigenvalues come within ``margin`` of the
    branch cut (or of zero for inverse), NoConvergence if the degree would
    exceed ``max_degree``.
    """
    scalar = isinstance(a, ScalarSeries)
    dim = a.dim
    grid = _normalize_grid(grid, dim)
    while True:
        degree = (min(grid) - 1) // 2
        if degree > max_degree:
            raise NoConvergence(f"{func}: tolerance {tol:g} not reached below degree {max_degree}")
        coarse = evaluate(a, grid).samples
        fine_grid = tuple(2 * N for N in grid)
        fine = evaluate(a, fine_grid).samples
        found = min(spectral_margin(func, coarse, exponent), spectral_margin(func, fine, exponent))
        if found <= margin:
            raise SpectrumViolation(
                f"{func}: eigenvalues within {found:.3g} of the forbidden set (margin {margin:g})",
                margin=found)
        values = SampledMap(apply_pointwise(func, coarse, exponent))
        proj = fejer_project(values, degree, kernel="dirichlet", cutoff=tol * 1e-4)
        target = apply_pointwise(func, fine, exponent)
        err = float(np.abs(evaluate(proj.series, fine_grid).samples - target).max())
        if err <= tol:
            series = proj.series
            if scalar:
                series = series.entry(0, 0)
            return CalcResult(series, err, found, degree, grid)
        grid = fine_grid
