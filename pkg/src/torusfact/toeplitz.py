"""Partial indices from kernel dimensions of finite Toeplitz sections.

This is deliberately independent of the factorization code: it only uses the
coefficients of A and dense singular values.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .errors import UnstableSections
from .series import MatrixSeries


def _band(A: MatrixSeries):
    idx = [j[0] for j in A.coeffs]
    return min(idx), max(idx)


def section_matrix(A: MatrixSeries, N: int, s: int) -> np.ndarray:
    """Matrix of x -> (coefficients of degree >= s of A x) for vector polynomials x of degree < N."""
    lo, hi = _band(A)
    n = A.n
    top = N - 1 + hi
    rows = max(top - s + 1, 0)
    M = np.zeros((rows * n, N * n), dtype=complex)
    for (j,), c in A.coeffs.items():
        for col in range(N):
            deg = col + j
            if deg >= s:
                r = deg - s
                M[r * n:(r + 1) * n, col * n:(col + 1) * n] = c
    return M


def _nullity(M, rtol, gap):
    """Numerical nullity, or None when a singular value falls between rtol and gap."""
    if M.shape[0] == 0:
        return M.shape[1]
    sv = scipy.linalg.svdvals(M)
    rel = sv / sv[0]
    if np.any((rel > rtol) & (rel < gap)):
        return None
    rank = int(np.sum(rel >= gap))
    return M.shape[1] - rank


def _indices(A, N, rtol, gap):
    lo, hi = _band(A)
    n = A.n
    k = {}
    for s in range(lo, hi + 2):
        k[s] = _nullity(section_matrix(A, N, s), rtol, gap)
        if k[s] is None:
            return None
    # #{kappa_j <= s} = k(s+1) - k(s)
    below = {s: k[s + 1] - k[s] for s in range(lo, hi + 1)}
    kappa = []
    prev = 0
    for s in range(lo, hi + 1):
        kappa += [s] * (below[s] - prev)
        prev = below[s]
    if k[lo] != 0 or prev != n or len(kappa) != n:
        return None
    return tuple(sorted(kappa, reverse=True))


def toeplitz_indices_oracle(A: MatrixSeries, sections=None, rtol=1e-8, gap=1e-3,
                            max_sections=512) -> tuple:
    """Sorted partial indices of an invertible matrix Laurent polynomial on T^1.

    For a shift s the section maps x to the part of degree >= s of A x; its
    kernel dimension k(s) grows by #{kappa_j <= s} from s to s+1. Relative
    singular values below ``rtol`` count as zero and those above ``gap`` as
    nonzero; anything in between leaves the section size unresolved.

    With ``sections`` given, sizes N and 2N must both resolve and agree.
    Without it N starts at max(4 * bandwidth, 32) and doubles up to
    ``max_sections`` until they do. Raises UnstableSections otherwise.
    """
    if A.dim != 1:
        raise ValueError("the Toeplitz oracle works on T^1")
    if not A.coeffs:
        raise UnstableSections("A is zero")
    lo, hi = _band(A)
    N = sections if sections is not None else max(4 * (hi - lo + 1), 32)
    first = _indices(A, N, rtol, gap)
    while True:
        second = _indices(A, 2 * N, rtol, gap)
        if first is not None and first == second:
            return first
        if sections is not None or 4 * N > max_sections:
            raise UnstableSections(f"sections {N} and {2 * N} give {first} and {second}")
        N, first = 2 * N, second
