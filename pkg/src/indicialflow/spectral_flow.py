"""Spectral flow of the Hermitian path sigma -> p(sigma) over the real line.

Three independent computations are offered:

* :func:`sf_endpoint` -- half the signature jump between p(-T) and p(T);
  exact for a path of Hermitian matrices with invertible endpoints.
* :func:`sf_partition` -- Phillips-style counting: the window [-T, T] is
  cut into pieces, each carrying a window delta that no eigenvalue crosses
  inside the piece (certified by Weyl's inequality), and the flow is the sum
  of changes of the eigenvalue count in [-delta, 0).
* :func:`sf_crossing_form` -- the sum over real roots of the signature of
  the compressed derivative on the kernel; needs regular crossings.

Convention: an eigenvalue moving from negative to positive as sigma
increases contributes +1.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateCrossing, WindowError
from .numerics import DEFAULT_ZERO_TOL, hermitian_eigen, hermitian_signature
from .pencil import DEFAULT_ROOT_TOL, SelfAdjointPencil, evaluate, indicial_roots

__all__ = [
    "Crossing",
    "SpectralFlowReport",
    "choose_window",
    "sf_endpoint",
    "sf_partition",
    "sf_crossing_form",
    "spectral_flow",
    "sf_all_methods",
    "eigenvalue_curves",
]

WINDOW_DOUBLINGS = 10
KERNEL_TOL = 1e-8


@dataclass(frozen=True)
class Crossing:
    sigma_c: float
    kernel_dim: int
    crossing_signature: int


@dataclass
class SpectralFlowReport:
    value: int
    interval: tuple[float, float]
    margins: tuple[float, float]
    method: str
    crossings: list[Crossing] = field(default_factory=list)


def _margin(p: SelfAdjointPencil, sigma: float) -> float:
    """Smallest |eigenvalue| of p(sigma) relative to max(1, largest)."""
    w, _ = hermitian_eigen(evaluate(p, sigma))
    return float(np.min(np.abs(w)) / max(1.0, np.max(np.abs(w))))


def choose_window(p: SelfAdjointPencil, root_tol: float = DEFAULT_ROOT_TOL,
                  zero_tol: float = DEFAULT_ZERO_TOL) -> float:
    """T = 1 + 2 max(|Re| + |Im|) over all roots, doubled until p(+-T) is safely invertible."""
    roots = indicial_roots(p, root_tol)
    T = 1.0 + 2.0 * max((abs(r.sigma0.real) + abs(r.sigma0.imag) for r in roots), default=0.0)
    for _ in range(WINDOW_DOUBLINGS + 1):
        if min(_margin(p, T), _margin(p, -T)) >= 10 * zero_tol:
            return T
        T *= 2.0
    raise WindowError("no invertible window endpoints found")


def _check_endpoints(p, T, zero_tol):
    margins = (_margin(p, -T), _margin(p, T))
    if min(margins) < 10 * zero_tol:
        raise WindowError(f"p(+-{T}) is not invertible with margin {10 * zero_tol:g}: {margins}")
    return margins


def sf_endpoint(p: SelfAdjointPencil, T: float, zero_tol: float = DEFAULT_ZERO_TOL) -> int:
    """(sig p(T) - sig p(-T)) / 2."""
    _check_endpoints(p, T, zero_tol)
    jump = hermitian_signature(evaluate(p, T), zero_tol).value - hermitian_signature(evaluate(p, -T), zero_tol).value
    return jump // 2


def _lipschitz(p: SelfAdjointPencil, radius: float) -> float:
    # bound for ||p'(s)|| on |s| <= radius
    norms = [np.linalg.norm(a, 2) for a in p.coeffs]
    return float(sum(j * norms[j] * radius ** (j - 1) for j in range(1, p.mu + 1)))


def _window(w: np.ndarray, rho: float, margin: float) -> float | None:
    """Smallest delta > 0 with both +-delta farther than rho + margin from every w."""
    mags = np.concatenate([[0.0], np.sort(np.abs(w))])
    candidates = list(0.5 * (mags[1:] + mags[:-1]))
    candidates.append(mags[-1] + rho + 2 * margin + 1.0)
    for delta in sorted(candidates):
        if delta <= 0:
            continue
        if np.min(np.abs(np.abs(w) - delta)) > rho + margin:
            return float(delta)
    return None


def _count(p, sigma, delta):
    w, _ = hermitian_eigen(evaluate(p, sigma))
    return int(np.count_nonzero((w >= -delta) & (w < 0)))


def _kernel_dim(p, sigma):
    w, _ = hermitian_eigen(evaluate(p, sigma))
    return int(np.count_nonzero(np.abs(w) <= KERNEL_TOL * max(1.0, np.max(np.abs(w)))))


def _distinct(values, tol):
    out = []
    for v in sorted(values):
        if not out or v - out[-1] > tol:
            out.append(v)
    return out


def sf_partition(p: SelfAdjointPencil, T: float, gap_tol: float = 1e-9,
                 root_tol: float = DEFAULT_ROOT_TOL, zero_tol: float = DEFAULT_ZERO_TOL,
                 floor: float = 1e-6) -> SpectralFlowReport:
    """Spectral flow from locally certified counting windows.

    The grid is seeded with -T, T and the midpoints between consecutive
    distinct real parts of roots, so each piece holds at most one
    candidate crossing. Pieces whose endpoints are too close to a singular
    p are bisected; below ``floor`` this raises DegenerateCrossing.
    """
    margins = _check_endpoints(p, T, zero_tol)
    roots = indicial_roots(p, root_tol)
    real_parts = _distinct([r.sigma0.real for r in roots if -T < r.sigma0.real < T], root_tol)
    real_roots = [r.sigma0.real for r in roots if r.is_real and -T < r.sigma0.real < T]
    grid = [-T] + [0.5 * (a + b) for a, b in zip(real_parts, real_parts[1:])] + [T]

    def endpoint_ok(s):
        return _margin(p, s) >= 10 * zero_tol

    def nudge(s, lo, hi):
        for frac in (0.0, 1e-3, -1e-3, 1e-2, -1e-2, 0.1, -0.1):
            t = s + frac * (hi - lo)
            if lo < t < hi and endpoint_ok(t):
                return t
        return None

    fixed = [grid[0]]
    for k in range(1, len(grid) - 1):
        s = nudge(grid[k], fixed[-1], grid[k + 1])
        if s is None:
            raise DegenerateCrossing(f"no invertible grid point near {grid[k]}")
        fixed.append(s)
    fixed.append(grid[-1])

    pieces: list[tuple[float, float, int]] = []
    stack = [(fixed[i], fixed[i + 1]) for i in range(len(fixed) - 1)][::-1]
    while stack:
        lo, hi = stack.pop()
        h = hi - lo
        mid = 0.5 * (lo + hi)
        w, _ = hermitian_eigen(evaluate(p, mid))
        rho = 0.5 * h * _lipschitz(p, max(abs(lo), abs(hi)))
        delta = _window(w, rho, gap_tol * max(1.0, np.max(np.abs(w))))
        if delta is not None:
            pieces.append((lo, hi, _count(p, lo, delta) - _count(p, hi, delta)))
            continue
        if h < floor:
            raise DegenerateCrossing(f"no certified window on [{lo}, {hi}]")
        split = nudge(lo + 0.5 * h, lo, hi)
        if split is None:
            raise DegenerateCrossing(f"cannot split [{lo}, {hi}] at an invertible point")
        stack.append((split, hi))
        stack.append((lo, split))

    crossings = []
    for lo, hi, contrib in pieces:
        inside = [s for s in real_roots if lo < s < hi]
        if inside:
            crossings.append(Crossing(inside[0], _kernel_dim(p, inside[0]), contrib))
            crossings.extend(Crossing(s, _kernel_dim(p, s), 0) for s in inside[1:])
        elif contrib:
            crossings.append(Crossing(0.5 * (lo + hi), 0, contrib))
    value = sum(c for _, _, c in pieces)
    return SpectralFlowReport(value, (-T, T), margins, "partition", crossings)


def sf_crossing_form(p: SelfAdjointPencil, T: float, root_tol: float = DEFAULT_ROOT_TOL,
                     zero_tol: float = DEFAULT_ZERO_TOL) -> SpectralFlowReport:
    """Sum over real roots of sig(K^H p'(sigma_c) K), K spanning ker p(sigma_c)."""
    margins = _check_endpoints(p, T, zero_tol)
    crossings = []
    for r in indicial_roots(p, root_tol):
        if not r.is_real or not -T < r.sigma0.real < T:
            continue
        sc = r.sigma0.real
        w, v = hermitian_eigen(evaluate(p, sc))
        k = v[:, np.abs(w) <= KERNEL_TOL * max(1.0, np.max(np.abs(w)))]
        dp = p.derivative(sc)
        q = k.conj().T @ dp @ k
        qw = np.linalg.eigvalsh(0.5 * (q + q.conj().T)) if k.shape[1] else np.zeros(0)
        if k.shape[1] != r.alg_mult or np.min(np.abs(qw), initial=np.inf) <= KERNEL_TOL * max(1.0, np.linalg.norm(dp, 2)):
            raise DegenerateCrossing(
                f"crossing at {sc:.6g} is not regular (kernel dim {k.shape[1]}, multiplicity {r.alg_mult})")
        crossings.append(Crossing(sc, k.shape[1], int(np.sum(qw > 0) - np.sum(qw < 0))))
    return SpectralFlowReport(sum(c.crossing_signature for c in crossings), (-T, T), margins,
                              "crossing_form", crossings)


def spectral_flow(p: SelfAdjointPencil, root_tol: float = DEFAULT_ROOT_TOL,
                  zero_tol: float = DEFAULT_ZERO_TOL) -> int:
    """SF of p over the real line, via the endpoint signatures."""
    return sf_endpoint(p, choose_window(p, root_tol, zero_tol), zero_tol)


def sf_all_methods(p: SelfAdjointPencil, root_tol: float = DEFAULT_ROOT_TOL,
                   zero_tol: float = DEFAULT_ZERO_TOL) -> dict:
    """Run every method; failures of partition or crossing form are reported, not raised."""
    T = choose_window(p, root_tol, zero_tol)
    out = {"T": T, "endpoint": sf_endpoint(p, T, zero_tol)}
    for name, fn in (("partition", sf_partition), ("crossing_form", sf_crossing_form)):
        try:
            out[name] = fn(p, T, root_tol=root_tol, zero_tol=zero_tol)
        except DegenerateCrossing as exc:
            out[name] = None
            out[name + "_error"] = str(exc)
    values = [out["endpoint"]] + [out[k].value for k in ("partition", "crossing_form") if out[k] is not None]
    out["agree"] = len(set(values)) == 1
    return out


def eigenvalue_curves(p: SelfAdjointPencil, T: float, samples: int) -> tuple[np.ndarray, np.ndarray]:
    """Ascending eigenvalues of p at ``samples`` equally spaced points of [-T, T]."""
    if samples < 2:
        raise ValueError("need at least two samples")
    sigmas = np.linspace(-T, T, samples)
    return sigmas, np.array([hermitian_eigen(evaluate(p, s))[0] for s in sigmas])
