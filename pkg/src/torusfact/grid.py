"""Matrix-valued samples on uniform grids of T^k and the maps between
series and samples: evaluation, Fourier projection, polar retraction."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GridTooCoarse, SingularSample
from .series import MatrixSeries, ScalarSeries


@dataclass(frozen=True, eq=False)
class SampledMap:
    """Samples of an n x n matrix function at the nodes i/N of a torus grid.

    ``samples`` has shape ``grid + (n, n)``; node ``(i_1, ..., i_k)`` sits at
    ``x = (i_1/N_1, ..., i_k/N_k)``.
    """

    samples: np.ndarray

    def __post_init__(self):
        s = np.array(self.samples, dtype=complex)
        if s.ndim < 3 or s.shape[-1] != s.shape[-2]:
            raise ValueError(f"samples must have shape grid + (n, n), got {s.shape}")
        if any(N < 2 for N in s.shape[:-2]):
            raise GridTooCoarse(f"grid sizes must be >= 2, got {s.shape[:-2]}")
        if not np.all(np.isfinite(s)):
            raise ValueError("samples must be finite")
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    @classmethod
    def from_function(cls, func, grid):
        """Sample ``func(x)`` where ``x`` has shape grid + (k,) and the result grid + (n, n)."""
        return cls(func(grid_nodes(grid)))

    @property
    def grid(self) -> tuple:
        return self.samples.shape[:-2]

    @property
    def dim(self) -> int:
        return len(self.grid)

    @property
    def n(self) -> int:
        return self.samples.shape[-1]

    def nodes(self) -> np.ndarray:
        return grid_nodes(self.grid)

    def __matmul__(self, other):
        if not isinstance(other, SampledMap):
            return NotImplemented
        if other.grid != self.grid:
            raise ValueError(f"grid {self.grid} vs {other.grid}")
        return SampledMap(self.samples @ other.samples)


def grid_nodes(grid) -> np.ndarray:
    axes = [np.arange(N) / N for N in grid]
    return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)


def _normalize_grid(grid, dim):
    if np.isscalar(grid):
        grid = (int(grid),) * dim
    grid = tuple(int(N) for N in grid)
    if len(grid) != dim:
        raise ValueError(f"grid {grid} does not match dim {dim}")
    if any(N < 2 for N in grid):
        raise GridTooCoarse(f"grid sizes must be >= 2, got {grid}")
    return grid


def evaluate(a, grid) -> SampledMap:
    """Sample a scalar or matrix series on a uniform grid.

    The coefficient of exp(2 pi i j.x) only matters modulo the grid size at
    the nodes, so the coefficients are folded into one array and summed with
    an inverse FFT; this is exact, not an interpolation.
    """
    if isinstance(a, ScalarSeries):
        a = MatrixSeries(1, a.dim, {j: [[c]] for j, c in a.terms.items()})
    grid = _normalize_grid(grid, a.dim)
    folded = np.zeros(grid + (a.n, a.n), dtype=complex)
    for j, c in a.coeffs.items():
        folded[tuple(v % N for v, N in zip(j, grid))] += c
    axes = tuple(range(a.dim))
    samples = np.fft.ifftn(folded, axes=axes) * np.prod(grid)
    return SampledMap(samples)


def _kernel_weights(kernel, degree, N):
    freqs = np.fft.fftfreq(N, 1.0 / N).round().astype(int)
    inside = np.abs(freqs) <= degree
    if kernel == "fejer":
        w = np.where(inside, 1.0 - np.abs(freqs) / (degree + 1.0), 0.0)
    elif kernel == "dirichlet":
        w = inside.astype(float)
    else:
        raise ValueError(f"unknown kernel {kernel!r}")
    return freqs, w


@dataclass(frozen=True)
class Projection:
    series: MatrixSeries
    degree: int
    kernel: str
    sup_error: float


def fejer_project(X: SampledMap, degree: int, kernel: str = "fejer", cutoff=None) -> Projection:
    """Trigonometric approximant of sampled data from its discrete Fourier coefficients.

    ``kernel="fejer"`` applies the Cesaro weights prod_i (1 - |j_i|/(D+1)),
    which keep the approximant inside the convex hull of the samples.
    ``kernel="dirichlet"`` is the plain truncation to |j_i| <= D; it
    reproduces trigonometric polynomials of degree <= D and converges
    spectrally for analytic data.

    Coefficients not exceeding ``cutoff`` (default: rounding level of the
    FFT) are dropped. ``sup_error`` is measured on the sampling grid.
    """
    grid = X.grid
    if any(N <= 2 * degree for N in grid):
        raise GridTooCoarse(f"grid {grid} must exceed 2*degree = {2 * degree}")
    s = X.samples
    scale = float(np.abs(s).max()) if s.size else 0.0
    if cutoff is None:
        cutoff = 1e-14 * max(scale, 1.0)
    if np.all(s == s[(0,) * X.dim]):
        series = MatrixSeries.constant(s[(0,) * X.dim], X.dim)
        return Projection(series, degree, kernel, 0.0)

    axes = tuple(range(X.dim))
    hat = np.fft.fftn(s, axes=axes) / np.prod(grid)
    weights = np.ones(grid)
    freqs = []
    for ax, N in enumerate(grid):
        f, w = _kernel_weights(kernel, degree, N)
        freqs.append(f)
        shape = [1] * X.dim
        shape[ax] = N
        weights = weights * w.reshape(shape)
    hat = hat * weights[..., None, None]

    coeffs = {}
    nz = np.argwhere(np.abs(hat).max(axis=(-1, -2)) > cutoff)
    for pos in nz:
        pos = tuple(pos)
        block = np.where(np.abs(hat[pos]) > cutoff, hat[pos], 0)
        coeffs[tuple(int(freqs[ax][p]) for ax, p in enumerate(pos))] = block
    series = MatrixSeries(X.n, X.dim, coeffs)
    # folded weighted coefficients give the approximant on the grid directly
    approx = np.fft.ifftn(hat, axes=axes) * np.prod(grid)
    err = float(np.abs(approx - s).max())
    return Projection(series, degree, kernel, err)


def unitarize(X: SampledMap, tol=1e-12) -> SampledMap:
    """Endpoint X (X^* X)^{-1/2} of the polar retraction, node by node."""
    u, sv, vh = np.linalg.svd(X.samples)
    smin = sv[..., -1]
    bad = smin <= tol * np.maximum(sv[..., 0], 1.0)
    if np.any(bad):
        node = tuple(int(i) for i in np.argwhere(bad)[0])
        raise SingularSample(f"sample at node {node} is singular", node=node)
    return SampledMap(u @ vh)


def unitarity_defect(X: SampledMap) -> float:
    s = X.samples
    eye = np.eye(X.n)
    return float(np.abs(np.conj(np.swapaxes(s, -1, -2)) @ s - eye).max())


def min_singular_value(X: SampledMap) -> float:
    return float(np.linalg.svd(X.samples, compute_uv=False)[..., -1].min())
