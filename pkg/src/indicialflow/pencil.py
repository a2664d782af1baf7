"""Selfadjoint matrix pencils p(sigma) = sum_j a_j sigma^j.

A pencil with Hermitian coefficients satisfies p(conj(s))^H = p(s), so it
is Hermitian on the real axis and its roots (the zeros of det p) come in
conjugate pairs.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import comb, factorial
from typing import Sequence

import numpy as np
import scipy.linalg

from .errors import DegeneratePencil, InvalidScale, SingularPoint
from .numerics import as_hermitian, kernel_basis

__all__ = [
    "SelfAdjointPencil",
    "IndicialRoot",
    "DiracData",
    "EllipticityReport",
    "evaluate",
    "evaluate_resolvent_point",
    "indicial_roots",
    "det_interpolation_roots",
    "scale",
    "normalize_strip",
    "dirac_block",
    "dirac_operator",
    "dirac_resolvent",
    "verify_parameter_ellipticity",
    "DEFAULT_ROOT_TOL",
]

DEFAULT_ROOT_TOL = 1e-8
STRIP_SAFETY = 0.9


class SelfAdjointPencil:
    """Matrix polynomial with Hermitian coefficients a_0, ..., a_mu.

    Coefficients are validated against the Hermiticity gate and stored
    exactly Hermitian. Instances are immutable.
    """

    def __init__(self, coeffs: Sequence):
        mats = [as_hermitian(a) for a in coeffs]
        if len(mats) < 2:
            raise ValueError("a pencil needs at least a_0 and a_1 (mu >= 1)")
        n = mats[0].shape[0]
        if any(a.shape != (n, n) for a in mats):
            raise ValueError("all coefficients must have the same square shape")
        arr = np.stack(mats)
        arr.setflags(write=False)
        self._coeffs = arr

    @property
    def coeffs(self) -> np.ndarray:
        """Array of shape (mu + 1, dim, dim); ``coeffs[j]`` is a_j."""
        return self._coeffs

    @property
    def mu(self) -> int:
        return self._coeffs.shape[0] - 1

    @property
    def dim(self) -> int:
        return self._coeffs.shape[1]

    @property
    def leading(self) -> np.ndarray:
        return self._coeffs[-1]

    def __call__(self, sigma) -> np.ndarray:
        return evaluate(self, sigma)

    def taylor(self, sigma0, order: int | None = None) -> np.ndarray:
        """Coefficients p^(k)(sigma0) / k! for k = 0..order (default mu)."""
        order = self.mu if order is None else order
        out = np.zeros((order + 1, self.dim, self.dim), dtype=complex)
        for k in range(min(order, self.mu) + 1):
            for j in range(k, self.mu + 1):
                out[k] += comb(j, k) * sigma0 ** (j - k) * self._coeffs[j]
        return out

    def derivative(self, sigma, k: int = 1) -> np.ndarray:
        """k-th sigma-derivative of p at ``sigma``."""
        if k > self.mu:
            return np.zeros((self.dim, self.dim), dtype=complex)
        return factorial(k) * self.taylor(sigma, k)[k]

    def leading_invertible(self, tol: float = 1e-10) -> bool:
        s = np.linalg.svd(self.leading, compute_uv=False)
        return bool(s[-1] > tol * max(1.0, s[0]))

    def __eq__(self, other):
        if not isinstance(other, SelfAdjointPencil):
            return NotImplemented
        return self._coeffs.shape == other._coeffs.shape and bool(np.array_equal(self._coeffs, other._coeffs))

    def __hash__(self):
        return hash(self._coeffs.tobytes())

    def __repr__(self):
        return f"SelfAdjointPencil(mu={self.mu}, dim={self.dim})"


@dataclass(frozen=True)
class IndicialRoot:
    sigma0: complex
    alg_mult: int
    is_real: bool
    in_strip: bool


@dataclass(frozen=True)
class DiracData:
    """A map D : C^cols -> C^rows, stored as a rows x cols matrix."""

    D: np.ndarray

    def __post_init__(self):
        d = np.array(self.D, dtype=complex, ndmin=2)
        if d.ndim != 2 or not np.all(np.isfinite(d)):
            raise ValueError("D must be a finite 2-d matrix")
        d.setflags(write=False)
        object.__setattr__(self, "D", d)

    @property
    def rows(self) -> int:
        return self.D.shape[0]

    @property
    def cols(self) -> int:
        return self.D.shape[1]

    def kernel_dims(self, rank_tol: float = 1e-9) -> tuple[int, int]:
        """(dim ker D, dim ker D^H)."""
        return (kernel_basis(self.D, rank_tol).shape[1],
                kernel_basis(self.D.conj().T, rank_tol).shape[1])

    def index(self, rank_tol: float = 1e-9) -> int:
        k, kstar = self.kernel_dims(rank_tol)
        return k - kstar


def evaluate(p: SelfAdjointPencil, sigma) -> np.ndarray:
    """Horner evaluation of p at a complex point."""
    a = p.coeffs
    out = a[-1].astype(complex)
    for j in range(p.mu - 1, -1, -1):
        out = out * sigma + a[j]
    return out


def evaluate_resolvent_point(p: SelfAdjointPencil, sigma: float, lam: float) -> np.ndarray:
    """p(sigma) + i * lam * I."""
    return evaluate(p, sigma) + 1j * lam * np.eye(p.dim)


def _is_degenerate(p: SelfAdjointPencil, tol: float = 1e-12) -> bool:
    # det p vanishes identically iff p(z) is singular at mu*n + 1 generic points
    m = p.mu * p.dim + 1
    zs = 1.3 * np.exp(1j * (2 * np.pi * np.arange(m) / m + 0.3183))
    for z in zs:
        s = np.linalg.svd(evaluate(p, z), compute_uv=False)
        if s[-1] > tol * max(1.0, s[0]):
            return False
    return True


def _cluster(values: np.ndarray, root_tol: float) -> list[IndicialRoot]:
    """Single-linkage clustering of root approximations into IndicialRoots."""
    values = np.asarray(values, dtype=complex)
    m = len(values)
    parent = list(range(m))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(m):
        for j in range(i + 1, m):
            if abs(values[i] - values[j]) <= root_tol:
                parent[find(i)] = find(j)
    groups: dict[int, list[complex]] = {}
    for i in range(m):
        groups.setdefault(find(i), []).append(values[i])

    roots = []
    for members in groups.values():
        # the mean of a perturbed multiple eigenvalue is far more accurate
        # than its individual members
        s0 = complex(np.mean(members))
        is_real = abs(s0.imag) <= root_tol
        if is_real:
            s0 = complex(s0.real, 0.0)
        roots.append(IndicialRoot(s0, len(members), is_real, abs(s0.imag) <= 0.5 + root_tol))
    roots.sort(key=lambda r: (r.sigma0.real, r.sigma0.imag))
    return roots


def _companion_eigenvalues(p: SelfAdjointPencil) -> np.ndarray:
    n, mu = p.dim, p.mu
    size = n * mu
    c = np.zeros((size, size), dtype=complex)
    d = np.eye(size, dtype=complex)
    if mu > 1:
        c[: size - n, n:] = np.eye(size - n)
    for j in range(mu):
        c[size - n:, j * n:(j + 1) * n] = -p.coeffs[j]
    d[size - n:, size - n:] = p.leading
    return scipy.linalg.eigvals(c, d)


def det_interpolation_roots(p: SelfAdjointPencil, rel_trim: float = 1e-10) -> np.ndarray:
    """Zeros of det p from interpolation at Chebyshev nodes.

    det p has degree at most dim * mu; it is sampled at that many plus one
    Chebyshev points, the trailing negligible Chebyshev coefficients are
    trimmed, and the roots come from the colleague (scalar companion)
    matrix. Returns the raw, unclustered root approximations.
    """
    deg = p.dim * p.mu
    # unit interval: wider intervals lose digits on roots far off the axis
    r = 1.0
    k = np.arange(deg + 1)
    t = np.cos((2 * k + 1) * np.pi / (2 * (deg + 1)))
    vals = np.array([np.linalg.det(evaluate(p, r * x)) for x in t])
    c = np.polynomial.chebyshev.chebfit(t, vals, deg)
    big = np.max(np.abs(c))
    if big == 0:
        raise DegeneratePencil("det p vanishes identically")
    top = int(np.max(np.nonzero(np.abs(c) > rel_trim * big)[0]))
    c = c[: top + 1]
    if top == 0:
        return np.array([], dtype=complex)
    return _polish(p, r * np.polynomial.chebyshev.chebroots(c))


def _polish(p: SelfAdjointPencil, approx: np.ndarray, iters: int = 60) -> np.ndarray:
    """Newton refinement of det p roots, using (det p)'/det p = tr(p^-1 p')."""
    approx = np.asarray(approx, dtype=complex)
    out = approx.copy()
    for i, z0 in enumerate(approx):
        others = np.delete(approx, i)
        reach = 0.5 * np.min(np.abs(others - z0)) if len(others) else np.inf
        z = z0
        for _ in range(iters):
            m = evaluate(p, z)
            try:
                logd = np.trace(np.linalg.solve(m, p.derivative(z)))
            except np.linalg.LinAlgError:
                break
            if logd == 0 or not np.isfinite(logd):
                break
            step = 1.0 / logd
            z = z - step
            if abs(step) <= 1e-15 * max(1.0, abs(z)):
                break
        # Newton may wander to a neighbouring root; keep the raw value then
        if np.isfinite(z) and abs(z - z0) < reach:
            out[i] = z
    return out


def indicial_roots(p: SelfAdjointPencil, root_tol: float = DEFAULT_ROOT_TOL,
                   method: str = "auto") -> list[IndicialRoot]:
    """Roots of det p(sigma), clustered within ``root_tol`` with multiplicities.

    ``method`` is ``"linearization"`` (block companion pencil, needs an
    invertible leading coefficient), ``"interpolation"`` (determinant
    interpolation) or ``"auto"`` (linearization when possible).
    """
    if _is_degenerate(p):
        raise DegeneratePencil("det p(sigma) vanishes identically")
    if method == "auto":
        method = "linearization" if p.leading_invertible() else "interpolation"
    if method == "linearization":
        if not p.leading_invertible():
            raise DegeneratePencil("linearization needs an invertible leading coefficient")
        values = _companion_eigenvalues(p)
    elif method == "interpolation":
        values = det_interpolation_roots(p)
    else:
        raise ValueError(f"unknown method {method!r}")
    return _cluster(values, root_tol)


def scale(p: SelfAdjointPencil, t: float) -> SelfAdjointPencil:
    """The pencil sigma -> p(t sigma), with coefficients a_j t^j."""
    if not t > 0:
        raise InvalidScale(f"scale parameter must be positive, got {t}")
    return SelfAdjointPencil([a * t ** j for j, a in enumerate(p.coeffs)])


def normalize_strip(p: SelfAdjointPencil, root_tol: float = DEFAULT_ROOT_TOL) -> tuple[float, SelfAdjointPencil]:
    """Rescale so that no root has 0 < |Im| <= 1/2.

    t = min(1, 0.9 * 2 * min |Im sigma0| over non-real roots); t = 1 when all
    roots are real (or there are none).
    """
    roots = indicial_roots(p, root_tol)
    im = [abs(r.sigma0.imag) for r in roots if not r.is_real]
    if not im:
        return 1.0, p
    t = min(1.0, STRIP_SAFETY * 2.0 * min(im))
    return t, (p if t == 1.0 else scale(p, t))


def dirac_block(d: DiracData) -> SelfAdjointPencil:
    """First-order pencil [[sigma, D^H], [D, -sigma]] on C^cols + C^rows."""
    a, b = d.cols, d.rows
    a1 = np.diag(np.concatenate([np.ones(a), -np.ones(b)])).astype(complex)
    a0 = np.zeros((a + b, a + b), dtype=complex)
    a0[:a, a:] = d.D.conj().T
    a0[a:, :a] = d.D
    return SelfAdjointPencil([a0, a1])


def dirac_operator(d: DiracData, z: complex) -> np.ndarray:
    """[[z, D^H], [D, -conj(z)]], i.e. the Dirac block at Re z plus i Im z."""
    a = d.cols
    m = np.asarray(dirac_block(d).coeffs[0]).copy()
    idx = np.arange(m.shape[0])
    m[idx[:a], idx[:a]] = z
    m[idx[a:], idx[a:]] = -np.conj(z)
    return m


def dirac_resolvent(d: DiracData, z: complex) -> np.ndarray:
    """Inverse of the Dirac operator at z != 0 through its normal square.

    Uses (conj(z) P1 - z P2 + D0) (D0^2 + |z|^2)^{-1}, where D0 is the
    off-diagonal part and P1, P2 project onto the two summands.
    """
    if z == 0:
        raise SingularPoint("the Dirac operator is not invertible at z = 0")
    a = d.cols
    d0 = dirac_block(d).coeffs[0]
    n = d0.shape[0]
    gram = d0 @ d0 + abs(z) ** 2 * np.eye(n)
    inv = scipy.linalg.solve(gram, np.eye(n), assume_a="pos")
    diag = np.concatenate([np.full(a, np.conj(z)), np.full(n - a, -z)])
    return diag[:, None] * inv + d0 @ inv


@dataclass
class EllipticityReport:
    """Sampled parameter-ellipticity diagnostics on |(lambda, sigma)| >= R."""

    radii: np.ndarray
    resolvent_profile: np.ndarray
    derivative_profiles: np.ndarray
    singular_points: list = field(default_factory=list)
    resolvent_growth: bool = False
    derivative_growth: list = field(default_factory=list)

    @property
    def resolvent_sup(self) -> float:
        return float(np.nanmax(self.resolvent_profile))

    @property
    def derivative_sups(self) -> list[float]:
        return [float(np.nanmax(row)) for row in self.derivative_profiles]

    @property
    def bounded(self) -> bool:
        return not self.resolvent_growth and not any(self.derivative_growth)


def _grows(profile: np.ndarray, radii: np.ndarray, ratio: float = 2.0) -> bool:
    last = radii >= radii[-1] / 10.0
    seg = profile[last]
    seg = seg[np.isfinite(seg)]
    if len(seg) < 2:
        return False
    monotone = bool(np.all(np.diff(seg) >= -1e-12 * np.abs(seg[1:])))
    return monotone and seg[-1] >= ratio * seg[0]


def verify_parameter_ellipticity(p: SelfAdjointPencil, R: float = 1.0, grid: int = 25,
                                 decades: float = 3.0, angles: int = 24) -> EllipticityReport:
    """Sample the weighted resolvent bounds of p(sigma) + i lambda.

    For radii log-spaced on [R, R 10^decades] and ``angles`` directions,
    records the sup over directions of
    (1 + lambda^2 + sigma^(2 mu))^(1/2) ||(p + i lambda)^-1|| and of
    (1 + lambda^2 + sigma^(2 mu))^(k / 2 mu) ||p^(k) (p + i lambda)^-1||.
    A profile is flagged as growing when it is monotone over the last
    decade and at least doubles there. Singular sample points are listed,
    not fatal.
    """
    if R < 1:
        raise ValueError("R must be at least 1")
    mu = p.mu
    radii = R * np.logspace(0.0, decades, grid)
    thetas = 2 * np.pi * np.arange(angles) / angles
    res = np.full(grid, np.nan)
    der = np.full((mu, grid), np.nan)
    singular = []
    for i, r in enumerate(radii):
        for th in thetas:
            sigma, lam = r * np.cos(th), r * np.sin(th)
            m = evaluate_resolvent_point(p, sigma, lam)
            s = np.linalg.svd(m, compute_uv=False)
            if s[-1] <= 1e-14 * max(1.0, s[0]):
                singular.append((float(lam), float(sigma)))
                continue
            inv = np.linalg.inv(m)
            weight = 1.0 + lam ** 2 + sigma ** (2 * mu)
            res[i] = np.fmax(res[i], np.sqrt(weight) / s[-1])
            for k in range(1, mu + 1):
                q = weight ** (k / (2 * mu)) * np.linalg.norm(p.derivative(sigma, k) @ inv, 2)
                der[k - 1, i] = np.fmax(der[k - 1, i], q)
    return EllipticityReport(
        radii=radii,
        resolvent_profile=res,
        derivative_profiles=der,
        singular_points=singular,
        resolvent_growth=_grows(res, radii),
        derivative_growth=[_grows(row, radii) for row in der],
    )
