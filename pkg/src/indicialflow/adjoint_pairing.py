"""The Green bracket on singular functions and its Gram matrix.

For members u, v of the maximal domain,

    [u, v] = (1/i) (<A u, v> - <u, A v>),   <f, g> = int g^H f dx,

and since A u has no singular part, both inner products only see the
cutoff bridge where derivatives of omega live. The Gram matrix of the
strip basis is Hermitian, nondegenerate, and its signature is compared
with the spectral flow of the pencil.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cutoff import DEFAULT_CUTOFF, CutoffSpec
from .errors import IndicialError, NotInMaxDomain, QuadratureFailure
from .io import encode_matrix
from .numerics import SignatureTriple, adaptive_quadrature, gauss_composite, hermitian_signature
from .pencil import DEFAULT_ROOT_TOL, SelfAdjointPencil, normalize_strip
from .singular_functions import LogPowerElement, apply_indicial_operator, strip_decomposition
from .spectral_flow import DegenerateCrossing, choose_window, sf_crossing_form, sf_endpoint, sf_partition

__all__ = [
    "GramForm",
    "Verdict",
    "pair",
    "gram",
    "gram_signature",
    "verify_signature_equals_sf",
    "GRAM_ZERO_TOL",
]

GRAM_ZERO_TOL = 1e-6
MEMBER_TOL = 1e-6
MAX_PANELS = 4096


def _check_member(p: SelfAdjointPencil, u: LogPowerElement) -> np.ndarray:
    img = apply_indicial_operator(p, u)
    size = max(1.0, float(np.max(np.abs(u.coeffs), initial=0.0)))
    if img.singular_norm() > MEMBER_TOL * size:
        raise NotInMaxDomain(f"A u keeps a singular part of size {img.singular_norm():.3e}")
    return img


def _support(elements) -> tuple[float, float]:
    return (min(e.cutoff.plateau_end for e in elements), max(e.cutoff.support_end for e in elements))


def pair(p: SelfAdjointPencil, u: LogPowerElement, v: LogPowerElement, tol: float = 1e-10) -> complex:
    """[u, v] by adaptive quadrature over the cutoff bridge."""
    au, av = _check_member(p, u), _check_member(p, v)

    def integrand(x):
        uu, vv = u.evaluate(x), v.evaluate(x)
        return np.sum(vv.conj() * au.full(x), axis=1) - np.sum(av.full(x).conj() * uu, axis=1)

    lo, hi = _support([u, v])
    return complex(adaptive_quadrature(integrand, lo, hi, tol=tol) / 1j)


def gram_signature(matrix: np.ndarray, zero_tol: float = GRAM_ZERO_TOL) -> SignatureTriple:
    """Inertia with threshold zero_tol * ||G||_2."""
    if matrix.size == 0:
        return SignatureTriple(0, 0, 0)
    thr = zero_tol * max(np.linalg.norm(matrix, 2), np.finfo(float).tiny)
    w = np.linalg.eigvalsh(matrix)
    n_plus, n_minus = int(np.sum(w > thr)), int(np.sum(w < -thr))
    return SignatureTriple(n_plus, n_minus, len(w) - n_plus - n_minus)


@dataclass
class GramForm:
    basis: list[LogPowerElement]
    matrix: np.ndarray
    raw_asymmetry: float
    signature: SignatureTriple
    panels: int = 0

    @property
    def roots(self) -> list[complex]:
        return [e.root for e in self.basis]


def _gram_matrix(elements, images, lo, hi, panels):
    x, w = gauss_composite(lo, hi, panels)
    u = np.stack([e.evaluate(x) for e in elements])  # (m, npts, n)
    r = np.stack([img.full(x) for img in images])
    m1 = np.einsum("ipk,p,jpk->ij", u.conj(), w, r)  # <A b_j, b_i>
    m2 = np.einsum("ipk,p,jpk->ij", r.conj(), w, u)  # <b_j, A b_i>
    return (m1 - m2) / 1j


def gram(p: SelfAdjointPencil, basis: list[LogPowerElement] | None = None,
         cutoff: CutoffSpec = DEFAULT_CUTOFF, tol: float = 1e-10, real_only: bool = False,
         root_tol: float = DEFAULT_ROOT_TOL, zero_tol: float = GRAM_ZERO_TOL) -> GramForm:
    """Gram matrix G[i, j] = [b_j, b_i] of the strip basis (or of ``basis``).

    Composite Gauss rules on the bridge are doubled until successive
    matrices agree to ``tol`` relative to max(1, max |G|).
    """
    if basis is None:
        basis = [e for b in strip_decomposition(p, root_tol, cutoff)
                 if not real_only or b.root.is_real for e in b.elements]
    if not basis:
        return GramForm([], np.zeros((0, 0), dtype=complex), 0.0, SignatureTriple(0, 0, 0))
    images = [_check_member(p, e) for e in basis]
    lo, hi = _support(basis)
    panels = 8
    g = _gram_matrix(basis, images, lo, hi, panels)
    while True:
        panels *= 2
        if panels > MAX_PANELS:
            raise QuadratureFailure("Gram entries did not stabilize")
        g_new = _gram_matrix(basis, images, lo, hi, panels)
        done = np.max(np.abs(g_new - g)) <= tol * max(1.0, np.max(np.abs(g_new)))
        g = g_new
        if done:
            break
    asym = float(np.max(np.abs(g - g.conj().T)))
    g = 0.5 * (g + g.conj().T)
    return GramForm(basis, g, asym, gram_signature(g, zero_tol), panels)


@dataclass
class Verdict:
    """Outcome of comparing sig(Gram) with the spectral flow."""

    status: str
    sig: int | None = None
    sf: int | None = None
    scale: float = 1.0
    gram: np.ndarray | None = None
    signature: SignatureTriple | None = None
    crossings: list = field(default_factory=list)
    cause: str | None = None
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == "PASS"

    def to_dict(self) -> dict:
        out = {
            "sig": self.sig,
            "sf": self.sf,
            "pass": self.passed,
            "status": self.status,
            "gram": encode_matrix(self.gram) if self.gram is not None and self.gram.size else [],
            "crossings": [{"sigma_c": c.sigma_c, "kernel_dim": c.kernel_dim,
                           "crossing_signature": c.crossing_signature} for c in self.crossings],
            "scale": self.scale,
        }
        if self.signature is not None:
            out["inertia"] = list(self.signature)
        if self.cause:
            out["cause"] = self.cause
        out.update(self.extra)
        return out


def verify_signature_equals_sf(p: SelfAdjointPencil, cutoff: CutoffSpec = DEFAULT_CUTOFF,
                               quad_tol: float = 1e-10, root_tol: float = DEFAULT_ROOT_TOL,
                               zero_tol: float = 1e-9) -> Verdict:
    """Normalize the strip, then compare sig(gram) and SF as integers.

    PASS needs equality and a nondegenerate Gram; upstream errors give
    INCONCLUSIVE with the cause attached.
    """
    try:
        t, pn = normalize_strip(p, root_tol)
        g = gram(pn, cutoff=cutoff, tol=quad_tol, root_tol=root_tol)
        T = choose_window(pn, root_tol, zero_tol)
        sf = sf_endpoint(pn, T, zero_tol)
        try:
            crossings = sf_crossing_form(pn, T, root_tol, zero_tol).crossings
        except DegenerateCrossing:
            crossings = sf_partition(pn, T, root_tol=root_tol, zero_tol=zero_tol).crossings
    except IndicialError as exc:
        return Verdict("INCONCLUSIVE", cause=f"{type(exc).__name__}: {exc}")
    sig = g.signature.value
    ok = sig == sf and g.signature.n_zero == 0
    cause = None
    if not ok:
        cause = "degenerate Gram" if g.signature.n_zero else "signature differs from spectral flow"
    return Verdict("PASS" if ok else "FAIL", sig, sf, t, g.matrix, g.signature, crossings, cause)
