"""Cutoff log-power sections at indicial roots and the spaces they span.

An element is u(x) = omega(x) x^{i s0} phi(log x) with the vector
polynomial phi(t) = sum_j e_j t^j. Writing t = log x, the operator
x D_x = -i d/dt acts on x^{i s0} F(t) as x^{i s0} (s0 - i d/dt) F, hence

    A u = x^{-1} x^{i s0} sum_k (-i)^k p^(k)(s0)/k! (Omega phi)^(k)(t).

The terms where no derivative falls on Omega form the singular part
x^{-1} x^{i s0} [p(s0 - i d/dt) phi](t); the rest lives where omega is
not locally constant. u lies in the maximal domain exactly when that
polynomial vanishes, which is a finite linear condition on e_0..e_K.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import comb, factorial
from typing import Callable

import numpy as np

from .cutoff import DEFAULT_CUTOFF, CutoffSpec
from .errors import BoundaryRoot, NotARoot
from .pencil import DEFAULT_ROOT_TOL, IndicialRoot, SelfAdjointPencil, evaluate, indicial_roots

__all__ = [
    "LogPowerElement",
    "SingularSpaceBasis",
    "IndicialImage",
    "apply_indicial_operator",
    "annihilation_matrix",
    "singular_space_basis",
    "strip_decomposition",
    "reduced_echelon",
]

ROOT_CHECK_TOL = 1e-6
KERNEL_RANK_TOL = 1e-7


def _phi_derivatives(coeffs: np.ndarray, t: np.ndarray, order: int) -> np.ndarray:
    """phi^(m)(t) for m = 0..order; shape (order + 1, len(t), n)."""
    K = coeffs.shape[0] - 1
    out = np.zeros((order + 1, t.size, coeffs.shape[1]), dtype=complex)
    for m in range(order + 1):
        for j in range(m, K + 1):
            out[m] += (factorial(j) // factorial(j - m)) * np.outer(t ** (j - m), coeffs[j])
    return out


@dataclass(frozen=True)
class LogPowerElement:
    """omega(x) x^{i root} sum_j coeffs[j] log(x)^j."""

    root: complex
    coeffs: np.ndarray
    cutoff: CutoffSpec = DEFAULT_CUTOFF

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex, ndmin=2)
        if c.ndim != 2:
            raise ValueError("coeffs must have shape (k + 1, dim)")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "root", complex(self.root))

    @property
    def dim(self) -> int:
        return self.coeffs.shape[1]

    @property
    def log_degree(self) -> int:
        nz = np.nonzero(np.any(self.coeffs != 0, axis=1))[0]
        return int(nz[-1]) if nz.size else 0

    def phi(self, t) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        return _phi_derivatives(self.coeffs, t, 0)[0]

    def evaluate(self, x) -> np.ndarray:
        """Values at points x > 0, shape (len(x), dim)."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        t = np.log(x)
        return (self.cutoff.value(x) * np.exp(1j * self.root * t))[:, None] * self.phi(t)

    def with_cutoff(self, cutoff: CutoffSpec) -> "LogPowerElement":
        return LogPowerElement(self.root, self.coeffs, cutoff)


@dataclass(frozen=True)
class IndicialImage:
    """A u split as x^{-1} x^{i s0} [singular polynomial] omega + remainder.

    ``singular_part`` holds the polynomial coefficients (a LogPowerElement to
    be read with an extra factor 1/x); ``remainder`` evaluates the terms
    carrying derivatives of omega, which vanish off the cutoff bridge.
    """

    singular_part: LogPowerElement
    remainder: Callable[[np.ndarray], np.ndarray]
    full: Callable[[np.ndarray], np.ndarray]

    def singular_norm(self) -> float:
        return float(np.max(np.abs(self.singular_part.coeffs), initial=0.0))


def _image_terms(p: SelfAdjointPencil, u: LogPowerElement, x: np.ndarray, lmin: int) -> np.ndarray:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    t = np.log(x)
    mu = p.mu
    taylor = p.taylor(u.root, mu)
    om = u.cutoff.t_derivatives(x, mu)
    phis = _phi_derivatives(u.coeffs, t, mu)
    acc = np.zeros((x.size, u.dim), dtype=complex)
    for k in range(mu + 1):
        inner = np.zeros((x.size, u.dim), dtype=complex)
        for l in range(lmin, k + 1):
            inner += comb(k, l) * om[:, l, None] * phis[k - l]
        acc += (-1j) ** k * inner @ taylor[k].T
    return (np.exp(1j * u.root * t) / x)[:, None] * acc


def _singular_coeffs(p: SelfAdjointPencil, root: complex, coeffs: np.ndarray) -> np.ndarray:
    """Coefficients of p(root - i d/dt) phi as a polynomial in t."""
    K = coeffs.shape[0] - 1
    taylor = p.taylor(root, p.mu)
    out = np.zeros_like(coeffs, dtype=complex)
    for m in range(K + 1):
        for k in range(min(p.mu, K - m) + 1):
            out[m] += (-1j) ** k * (factorial(m + k) // factorial(m)) * (taylor[k] @ coeffs[m + k])
    return out


def apply_indicial_operator(p: SelfAdjointPencil, u: LogPowerElement) -> IndicialImage:
    """Split A u into its x^{-1} singular polynomial and the cutoff remainder."""
    if u.dim != p.dim:
        raise ValueError(f"element has dim {u.dim}, pencil has dim {p.dim}")
    sing = LogPowerElement(u.root, _singular_coeffs(p, u.root, u.coeffs), u.cutoff)
    return IndicialImage(
        singular_part=sing,
        remainder=lambda x: _image_terms(p, u, x, 1),
        full=lambda x: _image_terms(p, u, x, 0),
    )


def annihilation_matrix(p: SelfAdjointPencil, root: complex, K: int) -> np.ndarray:
    """Matrix of (e_0, ..., e_K) -> coefficients of p(root - i d/dt) sum e_j t^j."""
    n = p.dim
    taylor = p.taylor(root, p.mu)
    m = np.zeros(((K + 1) * n, (K + 1) * n), dtype=complex)
    for row in range(K + 1):
        for k in range(min(p.mu, K - row) + 1):
            col = row + k
            m[row * n:(row + 1) * n, col * n:(col + 1) * n] = (
                (-1j) ** k * (factorial(col) // factorial(row)) * taylor[k])
    return m


def reduced_echelon(rows: np.ndarray, pivot_tol: float = 1e-8) -> np.ndarray:
    """Reduced row echelon form of a full-row-rank matrix (partial pivoting)."""
    r = np.array(rows, dtype=complex)
    nrows, ncols = r.shape
    scale = max(1.0, float(np.max(np.abs(r), initial=0.0)))
    lead = 0
    for col in range(ncols):
        if lead == nrows:
            break
        piv = lead + int(np.argmax(np.abs(r[lead:, col])))
        if abs(r[piv, col]) <= pivot_tol * scale:
            continue
        r[[lead, piv]] = r[[piv, lead]]
        r[lead] /= r[lead, col]
        for i in range(nrows):
            if i != lead:
                r[i] -= r[i, col] * r[lead]
        r[lead, col] = 1.0
        r[np.arange(nrows) != lead, col] = 0.0
        lead += 1
    return r


@dataclass
class SingularSpaceBasis:
    root: IndicialRoot
    elements: list[LogPowerElement] = field(default_factory=list)

    @property
    def dim(self) -> int:
        return len(self.elements)


def singular_space_basis(p: SelfAdjointPencil, root: IndicialRoot,
                         cutoff: CutoffSpec = DEFAULT_CUTOFF,
                         rank_tol: float = KERNEL_RANK_TOL) -> SingularSpaceBasis:
    """Basis of the cutoff log-power sections at ``root`` annihilated by p(root - i d/dt).

    Log degrees up to alg_mult - 1 are searched; coefficient tuples
    (e_0, ..., e_K) are returned in reduced echelon form.
    """
    s0 = root.sigma0
    sv = np.linalg.svd(evaluate(p, s0), compute_uv=False)
    if sv[-1] > ROOT_CHECK_TOL * max(1.0, sv[0]):
        raise NotARoot(f"p({s0}) is invertible (smallest singular value {sv[-1]:.3e})")
    K = root.alg_mult - 1
    m = annihilation_matrix(p, s0, K)
    _, s, vh = np.linalg.svd(m)
    rank = int(np.count_nonzero(s > rank_tol * max(1.0, s[0])))
    null = vh[rank:].conj()
    elements = []
    if null.shape[0]:
        for row in reduced_echelon(null):
            elements.append(LogPowerElement(s0, row.reshape(K + 1, p.dim), cutoff))
    return SingularSpaceBasis(root, elements)


def strip_decomposition(p: SelfAdjointPencil, root_tol: float = DEFAULT_ROOT_TOL,
                        cutoff: CutoffSpec = DEFAULT_CUTOFF) -> list[SingularSpaceBasis]:
    """Singular-space bases for every root with |Im| < 1/2, ordered by (Re, Im)."""
    out = []
    for r in indicial_roots(p, root_tol):
        if abs(abs(r.sigma0.imag) - 0.5) <= root_tol:
            raise BoundaryRoot(f"root {r.sigma0} lies on the strip boundary |Im| = 1/2")
        if abs(r.sigma0.imag) < 0.5:
            out.append(singular_space_basis(p, r, cutoff))
    return out
