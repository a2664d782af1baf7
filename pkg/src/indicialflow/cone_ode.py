"""First-order cone operators on (0, 1] and their deficiency indices.

The operator is A = a1 D_x + x^{-1} a0 with D_x = -i d/dx, constant
Hermitian coefficients, and a boundary condition u(1) in L. The equation
(A - lam) u = 0 reads

    u' = (x^{-1} B + C) u,   B = -i a1^{-1} a0,   C = i lam a1^{-1},

a regular singular system at 0. Its fundamental matrix is P(x) x^B with
an entire series P, computed by Sylvester recursions. Solutions that are
square integrable near 0 are P(x) x^B c with c in the spectral subspace
of B for Re rho > -1/2. They are matched at x0 = 0.1 to a numerical
integration up to x = 1, where the adjoint boundary condition is imposed.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from scipy.integrate import solve_ivp

from .adjoint_pairing import Verdict, gram
from .errors import (BoundaryRoot, ConstructionError, IndicialError, InvalidLeadingCoefficient,
                     LagrangianObstruction, NumericalFailure, ResonantRoots)
from .numerics import as_hermitian, hermitian_eigen, hermitian_signature, kernel_basis
from .pencil import DEFAULT_ROOT_TOL, SelfAdjointPencil, normalize_strip
from .spectral_flow import spectral_flow

__all__ = [
    "ConeRealization",
    "DeficiencyReport",
    "lagrangian_boundary",
    "deficiency_indices",
    "verify_null_cobordism",
    "conjugate_realization",
    "admissible_subspace",
    "frobenius_series",
]

MATCH_POINT = 0.1
RESONANCE_TOL = 1e-6
BOUNDARY_TOL = 1e-8
ISOTROPY_TOL = 1e-8
MAX_SERIES_TERMS = 400


def _invertible(a1: np.ndarray, tol: float = 1e-10) -> bool:
    s = np.linalg.svd(a1, compute_uv=False)
    return bool(s[-1] > tol * max(1.0, s[0]))


def lagrangian_boundary(a1) -> np.ndarray:
    """Orthonormal basis (columns) of a maximal isotropic subspace of <a1 ., .>.

    Positive and negative eigenvectors, each sorted by ascending |eigenvalue|,
    are paired as v+/sqrt(l+) + v-/sqrt(|l-|), which is exactly isotropic.
    """
    a1 = as_hermitian(a1)
    if not _invertible(a1):
        raise InvalidLeadingCoefficient("a1 is singular")
    w, v = hermitian_eigen(a1)
    pos = [i for i in np.argsort(np.abs(w)) if w[i] > 0]
    neg = [i for i in np.argsort(np.abs(w)) if w[i] < 0]
    if len(pos) != len(neg):
        raise LagrangianObstruction(len(pos) - len(neg))
    cols = [v[:, i] / np.sqrt(w[i]) + v[:, j] / np.sqrt(-w[j]) for i, j in zip(pos, neg)]
    basis = np.array(cols, dtype=complex).T.reshape(a1.shape[0], len(cols))
    return basis / np.linalg.norm(basis, axis=0)


@dataclass(frozen=True)
class ConeRealization:
    """First-order pencil a1 sigma + a0 with a boundary subspace L at x = 1."""

    pencil: SelfAdjointPencil
    boundary_subspace: np.ndarray

    def __post_init__(self):
        p = self.pencil
        if p.mu != 1:
            raise ConstructionError("cone realizations are first order (mu = 1)")
        if not _invertible(p.leading):
            raise InvalidLeadingCoefficient("a1 is singular")
        b = np.array(self.boundary_subspace, dtype=complex).reshape(p.dim, -1)
        if b.shape[1]:
            q, r = np.linalg.qr(b)
            if np.min(np.abs(np.diag(r))) <= 1e-10 * max(1.0, np.max(np.abs(r))):
                raise ConstructionError("boundary vectors are linearly dependent")
            b = q
            form = b.conj().T @ p.leading @ b
            if np.max(np.abs(form)) > ISOTROPY_TOL * np.linalg.norm(p.leading, 2):
                raise ConstructionError("boundary subspace is not isotropic; A would not be symmetric")
        b.setflags(write=False)
        object.__setattr__(self, "boundary_subspace", b)

    @classmethod
    def with_lagrangian(cls, pencil: SelfAdjointPencil) -> "ConeRealization":
        return cls(pencil, lagrangian_boundary(pencil.leading))

    @property
    def a1(self) -> np.ndarray:
        return self.pencil.coeffs[1]

    @property
    def a0(self) -> np.ndarray:
        return self.pencil.coeffs[0]

    @property
    def dim(self) -> int:
        return self.pencil.dim

    @property
    def lagrangian(self) -> bool:
        return 2 * self.boundary_subspace.shape[1] == self.dim

    def adjoint_boundary(self) -> np.ndarray:
        """Orthonormal basis of the normal space to L^{a1-perp} = {w : l^H a1 w = 0}."""
        if self.boundary_subspace.shape[1] == 0:
            return np.zeros((self.dim, 0), dtype=complex)
        q, _ = np.linalg.qr(self.a1 @ self.boundary_subspace)
        return q


def conjugate_realization(c: ConeRealization) -> ConeRealization:
    """(a1, a0, L) -> (-conj a1, conj a0, conj L); exchanges n+ and n-."""
    p = SelfAdjointPencil([c.a0.conj(), -c.a1.conj()])
    return ConeRealization(p, c.boundary_subspace.conj())


@dataclass
class DeficiencyReport:
    n_plus: int
    n_minus: int
    frobenius_exponents: list[complex]
    shooting_residuals: dict = field(default_factory=dict)
    singular_values: dict = field(default_factory=dict)
    series_terms: dict = field(default_factory=dict)


def _system(c: ConeRealization, lam: complex):
    inv = np.linalg.inv(c.a1)
    return -1j * inv @ c.a0, 1j * lam * inv


def _check_resonance(rho: np.ndarray):
    for i, ri in enumerate(rho):
        for j, rj in enumerate(rho):
            d = ri - rj
            m = round(d.real)
            if m >= 1 and abs(d - m) <= RESONANCE_TOL:
                raise ResonantRoots(f"exponents {ri:.6g} and {rj:.6g} differ by the integer {m}")


def admissible_subspace(b: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the invariant subspace of B for Re rho > -1/2."""
    rho = np.linalg.eigvals(b)
    if np.any(np.abs(rho.real + 0.5) <= BOUNDARY_TOL):
        raise BoundaryRoot("an exponent has real part -1/2; square integrability is borderline")
    return _ordered_schur(b)[0]


def _ordered_schur(b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # B W = W T11 with W orthonormal and the eigenvalues of T11 the admissible exponents
    t, z, sdim = scipy.linalg.schur(b.astype(complex), output="complex", sort=lambda r: r.real > -0.5)
    return z[:, :sdim], t[:sdim, :sdim]


def frobenius_series(b: np.ndarray, cmat: np.ndarray, x: float, tol: float) -> tuple[np.ndarray, int]:
    """P(x) = sum_m P_m x^m with (m - B) P_m + P_m B = C P_{m-1}, P_0 = I.

    Terms are added until ||P_m|| x^m < tol; returns (P(x), terms used).
    """
    n = b.shape[0]
    pm = np.eye(n, dtype=complex)
    total = pm.copy()
    for m in range(1, MAX_SERIES_TERMS):
        pm = scipy.linalg.solve_sylvester(m * np.eye(n) - b, b, cmat @ pm)
        term = pm * x ** m
        total += term
        if np.linalg.norm(term, 2) < tol and np.linalg.norm(pm, 2) * x ** (m + 1) < tol:
            return total, m + 1
    raise NumericalFailure("Frobenius series did not converge")


def _solutions(c: ConeRealization, lam: complex, ode_tol: float):
    b, cmat = _system(c, lam)
    rho = np.linalg.eigvals(b)
    _check_resonance(rho)
    admissible_subspace(b)
    w, t11 = _ordered_schur(b)
    # x^B W = W x^T11 avoids forming x^B on the inadmissible modes, whose
    # size would swamp the small admissible ones
    xb = w @ scipy.linalg.expm(t11 * np.log(MATCH_POINT))
    # modes with large exponents are tiny at x0 and grow towards 1, so the
    # series must be resolved relative to the smallest of them
    sv = np.linalg.svd(xb, compute_uv=False)
    spread = sv[-1] / sv[0] if sv.size else 1.0
    p0, terms = frobenius_series(b, cmat, MATCH_POINT, ode_tol * spread)
    u0 = p0 @ xb
    n, s = u0.shape
    if s == 0:
        return rho, np.zeros((n, 0), dtype=complex), np.zeros(0), terms

    def rhs(x, y):
        return ((b / x + cmat) @ y.reshape(n, s)).ravel()

    sol = solve_ivp(rhs, (MATCH_POINT, 1.0), u0.ravel(), method="DOP853",
                    rtol=max(ode_tol * 1e-2, 1e-13), atol=ode_tol * 1e-3)
    if not sol.success:
        raise NumericalFailure(f"ODE integration failed: {sol.message}")
    shot = sol.y[:, -1].reshape(n, s)
    p1, _ = frobenius_series(b, cmat, 1.0, ode_tol * 1e-3)
    direct = p1 @ w  # x^B = I at x = 1
    resid = np.linalg.norm(shot - direct, axis=0) / np.maximum(1.0, np.linalg.norm(direct, axis=0))
    return rho, shot, resid, terms


def deficiency_indices(c: ConeRealization, ode_tol: float = 1e-10,
                       rank_tol: float = 1e-8) -> DeficiencyReport:
    """n+- = dim of L^2 solutions of (A -+ i) u = 0 satisfying the adjoint condition at 1."""
    normal = c.adjoint_boundary()
    counts, resids, svals, terms, exps = {}, {}, {}, {}, []
    for key, lam in (("+", 1j), ("-", -1j)):
        rho, vals, resid, nterms = _solutions(c, lam, ode_tol)
        exps = list(rho)
        if vals.shape[1]:
            vals = vals / np.linalg.norm(vals, axis=0)
        constraint = normal.conj().T @ vals
        if constraint.shape[0] == 0 or vals.shape[1] == 0:
            counts[key] = vals.shape[1]
            svals[key] = np.zeros(0)
        else:
            counts[key] = kernel_basis(constraint, rank_tol).shape[1]
            svals[key] = np.linalg.svd(constraint, compute_uv=False)
        resids[key] = resid
        terms[key] = nterms
    return DeficiencyReport(counts["+"], counts["-"], exps, resids, svals, terms)


def verify_null_cobordism(c: ConeRealization | SelfAdjointPencil, ode_tol: float = 1e-10,
                          quad_tol: float = 1e-10, root_tol: float = DEFAULT_ROOT_TOL) -> Verdict:
    """Check n+ = n-, sig(gram) = 0 and SF = 0 for a Lagrangian realization.

    A bare pencil is given the deterministic Lagrangian boundary condition;
    when none exists the verdict is INCONCLUSIVE with the obstruction as cause.
    """
    try:
        if isinstance(c, SelfAdjointPencil):
            c = ConeRealization.with_lagrangian(c)
        elif not c.lagrangian:
            lagrangian_boundary(c.a1)
            return Verdict("INCONCLUSIVE", cause="boundary subspace is isotropic but not maximal")
    except LagrangianObstruction as exc:
        return Verdict("INCONCLUSIVE", cause=f"LagrangianObstruction: {exc}",
                       extra={"obstruction_signature": exc.signature})
    except IndicialError as exc:
        return Verdict("INCONCLUSIVE", cause=f"{type(exc).__name__}: {exc}")
    try:
        rep = deficiency_indices(c, ode_tol)
        t, pn = normalize_strip(c.pencil, root_tol)
        g = gram(pn, tol=quad_tol, root_tol=root_tol)
        sf = spectral_flow(c.pencil, root_tol)
    except IndicialError as exc:
        return Verdict("INCONCLUSIVE", cause=f"{type(exc).__name__}: {exc}")
    sig = g.signature.value
    ok = rep.n_plus == rep.n_minus and sig == 0 and sf == 0 and g.signature.n_zero == 0
    extra = {"n_plus": rep.n_plus, "n_minus": rep.n_minus,
             "max_shooting_residual": float(max((np.max(r, initial=0.0) for r in rep.shooting_residuals.values()),
                                                default=0.0))}
    return Verdict("PASS" if ok else "FAIL", sig, sf, t, g.matrix, g.signature, [],
                   None if ok else "null-cobordism chain broken", extra)


def leading_signature(a1) -> int:
    return hermitian_signature(a1).value
