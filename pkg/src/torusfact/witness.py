"""The witness diag(I, S o psi_m) on T^3 and its trigonometric approximants.

psi collapses the boundary of the unit cube to P = (1, 0, 0, 0) on S^3 and
sends the centre to -P; S identifies S^3 with SU(2); d_m wraps the first
coordinate m times.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ApproximationTooCoarse, GridTooCoarse, NotOnSphere
from .grid import SampledMap, _normalize_grid, fejer_project, grid_nodes, min_singular_value
from .series import MatrixSeries

_DEFAULT_AXIS = np.array([1.0, 0.0, 0.0])


def cube_to_sphere(x) -> np.ndarray:
    """psi(x) = (cos(pi(1 - rho)), sin(pi(1 - rho)) u) with y = 2x - 1, rho = |y|_inf, u = y/|y|_2.

    Works on arrays of shape (..., 3); the result has shape (..., 4).
    """
    y = 2.0 * np.asarray(x, dtype=float) - 1.0
    rho = np.abs(y).max(axis=-1)
    norm = np.linalg.norm(y, axis=-1)
    safe = np.where(norm > 0, norm, 1.0)
    u = np.where((norm > 0)[..., None], y / safe[..., None], _DEFAULT_AXIS)
    angle = np.pi * (1.0 - rho)
    return np.concatenate([np.cos(angle)[..., None], np.sin(angle)[..., None] * u], axis=-1)


def sphere_to_cube(s) -> np.ndarray:
    """Inverse of cube_to_sphere on S^3 minus P; -P goes back to the centre."""
    s = np.asarray(s, dtype=float)
    v = s[..., 1:]
    vnorm = np.linalg.norm(v, axis=-1)
    if np.any((vnorm == 0) & (s[..., 0] > 0)):
        raise ValueError("P = (1, 0, 0, 0) has the whole cube boundary as preimage")
    angle = np.arctan2(vnorm, s[..., 0])
    rho = 1.0 - angle / np.pi
    big = np.abs(v).max(axis=-1)
    y = np.where((big > 0)[..., None], v * (rho / np.where(big > 0, big, 1.0))[..., None], 0.0)
    return (y + 1.0) / 2.0


def su2_chart(s, tol=1e-12) -> np.ndarray:
    """S(s) = [[s1 + i s2, -(s3 - i s4)], [s3 + i s4, s1 - i s2]] for unit s in R^4."""
    s = np.asarray(s, dtype=float)
    defect = np.abs((s ** 2).sum(axis=-1) - 1.0)
    if np.any(defect > tol):
        raise NotOnSphere(f"|s|^2 deviates from 1 by {defect.max():.3g}")
    out = np.empty(s.shape[:-1] + (2, 2), dtype=complex)
    out[..., 0, 0] = s[..., 0] + 1j * s[..., 1]
    out[..., 0, 1] = -(s[..., 2] - 1j * s[..., 3])
    out[..., 1, 0] = s[..., 2] + 1j * s[..., 3]
    out[..., 1, 1] = s[..., 0] - 1j * s[..., 1]
    return out


def wrap(x, m) -> np.ndarray:
    """d_m(x) = (m x1 mod 1, x2, x3)."""
    x = np.array(x, dtype=float)
    x[..., 0] = np.mod(m * x[..., 0], 1.0)
    return x


def witness_values(x, n: int, m: int) -> np.ndarray:
    """diag(I_{n-2}, S(psi(d_m(x)))) at points of shape (..., 3)."""
    if n < 2:
        raise ValueError("the witness needs n >= 2")
    x = np.asarray(x, dtype=float)
    block = su2_chart(cube_to_sphere(wrap(x, m)), tol=1e-10)
    out = np.zeros(x.shape[:-1] + (n, n), dtype=complex)
    idx = np.arange(n - 2)
    out[..., idx, idx] = 1.0
    out[..., n - 2:, n - 2:] = block
    return out


def build_witness(n: int, m: int, grid=32) -> SampledMap:
    """Samples of the witness on a uniform grid of T^3 (sizes >= 8)."""
    grid = _normalize_grid(grid, 3)
    if min(grid) < 8:
        raise GridTooCoarse(f"witness grid must be at least 8 per axis, got {grid}")
    return SampledMap(witness_values(grid_nodes(grid), n, int(m)))


@dataclass(frozen=True)
class WitnessApproximation:
    series: MatrixSeries
    degree: int
    grid: tuple
    kernel: str
    sup_error: float
    offgrid_error: float
    min_singular: float
    offgrid_min_singular: float


def _offgrid(hat, grid):
    """Values of the folded coefficient array at the cell midpoints."""
    phase = np.ones(grid)
    for ax, N in enumerate(grid):
        f = np.fft.fftfreq(N, 1.0 / N)
        shape = [1] * 3
        shape[ax] = N
        phase = phase * np.exp(1j * np.pi * f / N).reshape(shape)
    return np.fft.ifftn(hat * phase[..., None, None], axes=(0, 1, 2)) * np.prod(grid)


def witness_series(n: int, m: int, degree: int, grid=None, kernel="fejer") -> WitnessApproximation:
    """Trigonometric approximant of the witness and its error report.

    ``sup_error`` and ``min_singular`` are measured on the sampling grid,
    ``offgrid_*`` at the centres of the grid cells. Raises
    ApproximationTooCoarse if the approximant is not within distance 1 of
    the witness on the grid (invertibility is then not guaranteed).
    """
    if grid is None:
        grid = 2 * degree + 2
    grid = _normalize_grid(grid, 3)
    X = build_witness(n, m, grid)
    proj = fejer_project(X, degree, kernel=kernel, cutoff=0.0)
    hat = np.zeros(grid + (n, n), dtype=complex)
    for j, c in proj.series.coeffs.items():
        hat[tuple(v % N for v, N in zip(j, grid))] += c
    approx = SampledMap(np.fft.ifftn(hat, axes=(0, 1, 2)) * np.prod(grid))
    err = float(np.linalg.norm(approx.samples - X.samples, ord=2, axis=(-2, -1)).max())
    if err >= 1.0:
        raise ApproximationTooCoarse(f"sup-error {err:.3f} at degree {degree} is not below 1")
    h = [0.5 / N for N in grid]
    mid = grid_nodes(grid) + np.array(h)
    mid_vals = _offgrid(hat, grid)
    mid_err = float(np.linalg.norm(mid_vals - witness_values(mid, n, m), ord=2, axis=(-2, -1)).max())
    mid_sv = float(np.linalg.svd(mid_vals, compute_uv=False)[..., -1].min())
    return WitnessApproximation(proj.series, degree, grid, kernel, err, mid_err,
                                min_singular_value(approx), mid_sv)
