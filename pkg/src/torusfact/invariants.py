"""Component invariants of invertible matrix functions on T^3.

The descriptor of X is (m, w): w is the winding of det X along the three
coordinate loops through the origin, and m the degree of the S^3 part of the
unitarized, slice-normalized X, computed from a discretized cubic trace
integral. A nonzero m keeps X out of the component of any factorable (or
triangularizable) matrix function.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (GridTooCoarse, Inconclusive, NearSingular, NotNormalizedOnSubtorus,
                     NotUnitary)
from .grid import SampledMap, min_singular_value, unitarity_defect, unitarize
from .scalar import ROUNDING_GAP, loop_winding


def _inv(s):
    return np.conj(np.swapaxes(s, -1, -2))


def _check_unitary(X: SampledMap, tol):
    defect = unitarity_defect(X)
    if defect > tol:
        raise NotUnitary(f"unitarity defect {defect:.3g} exceeds {tol:g}")


def _require_t3(X: SampledMap):
    if X.dim != 3:
        raise ValueError(f"expected samples on T^3, got dim {X.dim}")


def slice_normalize(X: SampledMap) -> SampledMap:
    """X(x) X(x1, x2, 0)^{-1} for unitary samples."""
    s = X.samples
    return SampledMap(s @ _inv(s[:, :, :1]))


def torus3_decompose(X: SampledMap, tol=1e-9):
    """Split a unitary X with X = I on {x3 = 0} as X = X1 X2 X3.

    X3(x) = X(x1, 0, x3)
    X2(x) = X(0, x2, x3) X(0, 0, x3)^{-1}
    X1(x) = X(x) X(x1, 0, x3)^{-1} X(0, 0, x3) X(0, x2, x3)^{-1}

    X1 is the identity on all three coordinate subtori, X2 depends on
    (x2, x3) only and X3 on (x1, x3) only.
    """
    _require_t3(X)
    _check_unitary(X, tol)
    s = X.samples
    off = float(np.abs(s[:, :, 0] - np.eye(X.n)).max())
    if off > tol:
        raise NotNormalizedOnSubtorus(f"|X - I| = {off:.3g} on the x3 = 0 slice")
    t2 = s[:, :1, :]          # X(x1, 0, x3)
    t1 = s[:1, :, :]          # X(0, x2, x3)
    axis = s[:1, :1, :]       # X(0, 0, x3)
    X3 = np.broadcast_to(t2, s.shape)
    X2 = np.broadcast_to(t1 @ _inv(axis), s.shape)
    X1 = s @ _inv(t2) @ axis @ _inv(t1)
    return SampledMap(X1), SampledMap(X2), SampledMap(X3)


def _log_derivatives(s):
    """X^{-1} d_a X by the fourth-order central stencil on the periodic grid."""
    inv = _inv(s)
    out = []
    for a in range(3):
        h = 1.0 / s.shape[a]

        def r(k):
            return np.roll(s, -k, axis=a)

        d = (8.0 * (r(1) - r(-1)) - (r(2) - r(-2))) / (12.0 * h)
        out.append(inv @ d)
    return out


def cubic_trace_integral(X: SampledMap) -> float:
    """-(1/8 pi^2) times the grid mean of Re tr(L1 [L2, L3]), L_a = X^{-1} d_a X."""
    L1, L2, L3 = _log_derivatives(X.samples)
    density = np.einsum("...ij,...ji->...", L1, L2 @ L3 - L3 @ L2).real
    return float(-density.mean() / (8.0 * np.pi ** 2))


def pi3_degree(X: SampledMap, tol=1e-9, gap=ROUNDING_GAP):
    """Return (raw, m) for a unitary X on T^3.

    X is slice-normalized and decomposed; raw is the cubic trace integral of
    the X1 factor, with orientation such that the witness with m = 1 gives +1.
    Raises GridTooCoarse if raw is not within ``gap`` of an integer.
    """
    _require_t3(X)
    _check_unitary(X, tol)
    if min(X.grid) < 5:
        raise GridTooCoarse(f"grid {X.grid} too small for the derivative stencil")
    X1, _, _ = torus3_decompose(slice_normalize(X), tol=max(tol, 1e-9))
    raw = cubic_trace_integral(X1)
    m = int(round(raw))
    if abs(raw - m) > gap:
        raise GridTooCoarse(f"degree integral {raw:.4f} is not within {gap} of an integer")
    return raw, m


def det_winding(X: SampledMap) -> tuple:
    """Winding of det X along each coordinate loop through the origin node."""
    d = np.linalg.det(X.samples)
    out = []
    for axis in range(X.dim):
        idx = tuple(slice(None) if ax == axis else 0 for ax in range(X.dim))
        out.append(loop_winding(d[idx])[0])
    return tuple(out)


@dataclass(frozen=True)
class ComponentDescriptor:
    m: int
    w: tuple
    raw: float = 0.0
    margin: float = 0.0
    grid: tuple = ()

    def key(self) -> tuple:
        return (self.m,) + tuple(self.w)


def component_descriptor(X: SampledMap, margin=1e-6, gap=ROUNDING_GAP) -> ComponentDescriptor:
    """(m, w) of an invertible sampled map on T^3; see the module docstring."""
    _require_t3(X)
    smallest = min_singular_value(X)
    if smallest <= margin:
        raise NearSingular(f"smallest singular value {smallest:.3g} on the grid", margin=smallest)
    w = det_winding(X)
    raw, m = pi3_degree(unitarize(X), tol=1e-8, gap=gap)
    return ComponentDescriptor(m, w, raw, smallest, X.grid)


@dataclass(frozen=True)
class InFactorSubgroup:
    j: tuple


@dataclass(frozen=True)
class Obstructed:
    m: int


@dataclass(frozen=True)
class Certificate:
    verdict: object
    descriptor: ComponentDescriptor

    @property
    def obstructed(self) -> bool:
        return isinstance(self.verdict, Obstructed)


def obstruction_certificate(X: SampledMap, margin=1e-6, gap=ROUNDING_GAP) -> Certificate:
    """Obstructed(m) if m != 0, otherwise InFactorSubgroup(w).

    The verdict is a function of the descriptor alone. Raises Inconclusive
    when the degree integral is not within ``gap`` of an integer.
    """
    try:
        desc = component_descriptor(X, margin=margin, gap=gap)
    except GridTooCoarse as exc:
        raise Inconclusive(str(exc)) from exc
    verdict = Obstructed(desc.m) if desc.m != 0 else InFactorSubgroup(tuple(desc.w))
    return Certificate(verdict, desc)
