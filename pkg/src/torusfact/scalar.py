"""Scalar factorization a = e^{b-} e^{u-} <c,.> e^{b+} e^{u+} on T^q."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (AmbiguousWinding, NearSingular, NoConvergence, NonzeroWinding,
                     PhaseJumpTooLarge)
from .funcalc import functional_calc
from .grid import SampledMap, _normalize_grid, evaluate, fejer_project
from .series import ScalarSeries, mul, split_pm

ROUNDING_GAP = 0.1


def loop_winding(values, gap=ROUNDING_GAP):
    """Winding number of a closed sampled loop; returns (integer, raw value).

    Raises AmbiguousWinding if two consecutive samples differ in phase by more
    than pi/2, or if the raw count is not within ``gap`` of an integer.
    """
    values = np.asarray(values).reshape(-1)
    steps = np.angle(np.roll(values, -1) / values)
    if np.abs(steps).max() > np.pi / 2:
        raise AmbiguousWinding(
            f"phase step {np.abs(steps).max():.3f} exceeds pi/2 on {values.size} samples")
    raw = float(steps.sum() / (2 * np.pi))
    w = round(raw)
    if abs(raw - w) > gap:
        raise AmbiguousWinding(f"winding {raw:.4f} is not within {gap} of an integer")
    return int(w), raw


def winding_vector(a: ScalarSeries, grid=64, margin=1e-6) -> tuple:
    """Winding of ``a`` along each coordinate loop through the origin."""
    grid = _normalize_grid(grid, a.dim)
    values = evaluate(a, grid).samples[..., 0, 0]
    smallest = float(np.abs(values).min())
    if smallest <= margin:
        raise NearSingular(f"min |a| = {smallest:.3g} on grid {grid}", margin=smallest)
    out = []
    for axis, N in enumerate(grid):
        loop = evaluate(a.on_loop(axis), (N,)).samples[:, 0, 0]
        out.append(loop_winding(loop)[0])
    return tuple(out)


def _sampled_loop_windings(values):
    out = []
    for axis in range(values.ndim):
        idx = tuple(slice(None) if ax == axis else 0 for ax in range(values.ndim))
        out.append(loop_winding(values[idx])[0])
    return tuple(out)


def continuous_log(f: SampledMap, base=0.0, tol=1e-9) -> SampledMap:
    """Single-valued logarithm of a nonvanishing scalar map with zero winding.

    The phase is unwrapped axis by axis starting from the origin node, whose
    branch is the one closest to ``Im(base)``.
    """
    if f.n != 1:
        raise ValueError("continuous_log needs a 1 x 1 sampled map")
    values = f.samples[..., 0, 0]
    if np.any(values == 0):
        raise NearSingular("zero sample")
    for axis in range(values.ndim):
        steps = np.angle(np.roll(values, -1, axis=axis) / values)
        if np.abs(steps).max() > np.pi / 2:
            raise PhaseJumpTooLarge(f"phase step {np.abs(steps).max():.3f} along axis {axis}")
    windings = _sampled_loop_windings(values)
    if any(w != 0 for w in windings):
        raise NonzeroWinding(f"winding vector {windings} is not zero")

    phase = np.angle(values)
    origin = (0,) * values.ndim
    target = complex(base).imag
    phase = phase + 2 * np.pi * np.round((target - phase[origin]) / (2 * np.pi))
    for axis in range(values.ndim):
        idx = tuple(slice(None) if ax <= axis else 0 for ax in range(values.ndim))
        phase[idx] = np.unwrap(phase[idx], axis=axis)

    # every closing step must be a genuine small step, not a 2 pi jump
    for axis in range(values.ndim):
        closing = np.take(phase, 0, axis=axis) - np.take(phase, -1, axis=axis)
        wrapped = np.angle(np.exp(1j * closing))
        if np.abs(closing - wrapped).max() > tol:
            raise NonzeroWinding(f"phase does not close up along axis {axis}")
    return SampledMap((np.log(np.abs(values)) + 1j * phase)[..., None, None])


@dataclass(frozen=True)
class ScalarFactorization:
    c: tuple
    b_minus: ScalarSeries
    u_minus: ScalarSeries
    b_plus: ScalarSeries
    u_plus: ScalarSeries
    residual: float
    grid: tuple = ()

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        char = np.exp(2j * np.pi * (x @ np.asarray(self.c, dtype=float)))
        minus = np.exp(self.b_minus(x) + self.u_minus(x))
        plus = np.exp(self.b_plus(x) + self.u_plus(x))
        return minus * char * plus

    def on_grid(self, grid):
        """Reconstructed values at the nodes of ``grid``."""
        def values(s):
            return evaluate(s, grid).samples[..., 0, 0]
        char = values(ScalarSeries.character(self.c))
        return (np.exp(values(self.b_minus + self.u_minus)) * char
                * np.exp(values(self.b_plus + self.u_plus)))


def _project_log(g: ScalarSeries, grid, tol, max_degree):
    """Imaginary part of the continuous log of g, as a series certified on 2x grid."""
    while True:
        degree = (min(grid) - 1) // 2
        if degree > max_degree:
            raise NoConvergence(f"phase of a not resolved below degree {max_degree}")
        arg = continuous_log(evaluate(g, grid)).samples.imag * 1j
        proj = fejer_project(SampledMap(arg), degree, kernel="dirichlet", cutoff=tol * 1e-4)
        fine = tuple(2 * N for N in grid)
        target = continuous_log(evaluate(g, fine)).samples.imag * 1j
        err = float(np.abs(evaluate(proj.series, fine).samples - target).max())
        if err <= tol:
            return proj.series.entry(0, 0), err
        grid = fine


def scalar_factorize(a: ScalarSeries, grid=16, tol=1e-8, margin=1e-6, max_degree=128):
    """Factor a nonvanishing trigonometric polynomial into lexicographic halves.

    Returns exponents b-, u- (spectrum in the negative cone) and b+, u+
    (nonnegative cone, constants included) plus the winding vector c, with
    a = e^{b-} e^{u-} <c,.> e^{b+} e^{u+} to within ``tol`` on a check grid.
    """
    grid = _normalize_grid(grid, a.dim)
    win_grid = grid
    while True:
        try:
            c = winding_vector(a, win_grid, margin)
            break
        except AmbiguousWinding:
            if min(win_grid) > 4 * max_degree:
                raise
            win_grid = tuple(2 * N for N in win_grid)

    modulus = functional_calc("log", mul(a, a.conj()), grid, tol=tol / 8, margin=margin ** 2,
                              max_degree=max_degree)
    b = modulus.series * 0.5
    g = mul(a, ScalarSeries.character(tuple(-v for v in c)))
    u, _ = _project_log(g, max(modulus.grid, win_grid), tol / 8, max_degree)

    bs = split_pm(b)
    us = split_pm(u)
    const = ScalarSeries.constant(bs.zero + us.zero, a.dim)
    result = ScalarFactorization(c, bs.minus, us.minus, bs.plus + const, us.plus, 0.0)

    check = tuple(2 * N for N in max(modulus.grid, win_grid))
    residual = float(np.abs(result.on_grid(check) - evaluate(a, check).samples[..., 0, 0]).max())
    if residual > tol:
        raise NoConvergence(f"reconstruction residual {residual:.3g} exceeds {tol:g}")
    return ScalarFactorization(c, bs.minus, us.minus, bs.plus + const, us.plus, residual, check)
