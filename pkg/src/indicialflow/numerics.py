"""Dense complex linear algebra and quadrature primitives.

Everything else in the package is phrased in terms of these functions:
Hermitian eigendecomposition, inertia counts, numerical kernels and an
adaptive composite Gauss rule.
"""
from __future__ import annotations

from functools import lru_cache
from typing import Callable, NamedTuple

import numpy as np

from .errors import NotHermitian, NumericalFailure, QuadratureFailure

__all__ = [
    "SignatureTriple",
    "as_hermitian",
    "hermitian_eigen",
    "hermitian_signature",
    "kernel_basis",
    "adaptive_quadrature",
    "gauss_composite",
    "DEFAULT_ZERO_TOL",
    "DEFAULT_RANK_TOL",
]

DEFAULT_ZERO_TOL = 1e-9
DEFAULT_RANK_TOL = 1e-9
HERMITIAN_GATE = 1e-12


class SignatureTriple(NamedTuple):
    n_plus: int
    n_minus: int
    n_zero: int

    @property
    def value(self) -> int:
        """sig = n_plus - n_minus."""
        return self.n_plus - self.n_minus

    @property
    def dim(self) -> int:
        return self.n_plus + self.n_minus + self.n_zero


def _as_matrix(m) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or min(m.shape) < 1:
        raise ValueError(f"expected a nonempty 2-d matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def as_hermitian(m, gate: float = HERMITIAN_GATE) -> np.ndarray:
    """Validate ``m`` as Hermitian and return the exact symmetrization (M + M^H)/2."""
    m = _as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise NotHermitian(f"matrix is not square: {m.shape}")
    asym = np.max(np.abs(m - m.conj().T))
    if asym > gate * (1.0 + np.max(np.abs(m))):
        raise NotHermitian(f"asymmetry {asym:.3e} exceeds Hermiticity gate")
    return 0.5 * (m + m.conj().T)


def hermitian_eigen(m) -> tuple[np.ndarray, np.ndarray]:
    """Ascending eigenvalues and unitary eigenvectors of a Hermitian matrix."""
    h = as_hermitian(m)
    try:
        w, v = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"Hermitian eigensolver did not converge: {exc}") from exc
    return w, v


def hermitian_signature(m, zero_tol: float = DEFAULT_ZERO_TOL, relative: bool = True) -> SignatureTriple:
    """Inertia of a Hermitian matrix.

    With ``relative`` (the default) the threshold is ``zero_tol`` times the
    largest eigenvalue magnitude, floored at ``zero_tol`` itself.
    """
    if zero_tol <= 0:
        raise ValueError("zero_tol must be positive")
    w, _ = hermitian_eigen(m)
    thr = zero_tol * max(1.0, float(np.max(np.abs(w)))) if relative else zero_tol
    n_plus = int(np.count_nonzero(w > thr))
    n_minus = int(np.count_nonzero(w < -thr))
    return SignatureTriple(n_plus, n_minus, len(w) - n_plus - n_minus)


def kernel_basis(m, rank_tol: float = DEFAULT_RANK_TOL) -> np.ndarray:
    """Orthonormal basis (as columns) of the numerical kernel of ``m``.

    Singular values at or below ``rank_tol * max(1, s_max)`` count as zero.
    Returns an array of shape (cols, dim ker).
    """
    if rank_tol <= 0:
        raise ValueError("rank_tol must be positive")
    m = _as_matrix(m)
    _, s, vh = np.linalg.svd(m, full_matrices=True)
    thr = rank_tol * max(1.0, float(s[0]) if s.size else 0.0)
    rank = int(np.count_nonzero(s > thr))
    return vh[rank:].conj().T


@lru_cache(maxsize=32)
def _legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(order)


def gauss_composite(a: float, b: float, panels: int, order: int = 16) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of a composite Gauss-Legendre rule on [a, b]."""
    x, w = _legendre(order)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def adaptive_quadrature(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    tol: float = 1e-10,
    order: int = 10,
    max_panels: int = 20000,
) -> complex:
    """Integrate ``f`` over [a, b] by adaptive bisection of Gauss panels.

    ``f`` is called with a 1-d array of abscissae and must return values of
    the same length (real or complex). A panel is accepted once the rule on
    the whole panel agrees with the rule on its two halves to within the
    panel's share of ``tol``. ``b`` may be ``np.inf``; the half line is
    mapped to [0, 1) by x = a + s / (1 - s).
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if a == b:
        return 0.0
    if b < a:
        return -adaptive_quadrature(f, b, a, tol, order, max_panels)
    if np.isinf(b):
        def g(s):
            return f(a + s / (1.0 - s)) / (1.0 - s) ** 2
        return adaptive_quadrature(g, 0.0, 1.0, tol, order, max_panels)

    x, w = _legendre(order)

    def rule(lo, hi):
        half = 0.5 * (hi - lo)
        return half * np.dot(w, f(0.5 * (lo + hi) + half * x))

    total = 0.0
    length = b - a
    stack = [(a, b, rule(a, b))]
    panels = 0
    while stack:
        lo, hi, whole = stack.pop()
        mid = 0.5 * (lo + hi)
        left, right = rule(lo, mid), rule(mid, hi)
        panels += 1
        if abs(left + right - whole) <= tol * (hi - lo) / length:
            total += left + right
            continue
        if panels > max_panels:
            raise QuadratureFailure(f"subdivision cap of {max_panels} panels exceeded")
        stack.append((mid, hi, right))
        stack.append((lo, mid, left))
    return total
