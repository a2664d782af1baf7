"""Smooth cutoff functions and their derivatives in t = log x.

The cutoff is omega(x) = 1 on [0, a], 0 on [b, inf), with the bridge
s = (x - a) / (b - a) and omega = E(1 - s) / (E(s) + E(1 - s)), where
E(s) = exp(-1/s) for s > 0 and 0 otherwise.

Derivatives are obtained from truncated Taylor series ("jets") evaluated
in closed form, so no numerical differentiation is involved.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np

__all__ = ["CutoffSpec", "DEFAULT_CUTOFF", "jet_mul", "jet_recip", "jet_exp"]

# below this s the factor exp(-1/s) is smaller than any double we care about
_S_FLOOR = 1.0 / 700.0


def jet_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Cauchy product of truncated series stored along the last axis."""
    K = a.shape[-1]
    out = np.zeros(np.broadcast_shapes(a.shape, b.shape), dtype=np.result_type(a, b))
    for k in range(K):
        out[..., k] = np.sum(a[..., : k + 1] * b[..., k::-1], axis=-1)
    return out


def jet_recip(a: np.ndarray) -> np.ndarray:
    """Series of 1/a; requires a[..., 0] != 0."""
    K = a.shape[-1]
    out = np.zeros_like(a)
    out[..., 0] = 1.0 / a[..., 0]
    for k in range(1, K):
        out[..., k] = -np.sum(a[..., 1 : k + 1] * out[..., k - 1 :: -1][..., :k], axis=-1) / a[..., 0]
    return out


def jet_exp(a: np.ndarray) -> np.ndarray:
    """Series of exp(a)."""
    K = a.shape[-1]
    out = np.zeros_like(a)
    out[..., 0] = np.exp(a[..., 0])
    i = np.arange(1, K)
    for k in range(1, K):
        out[..., k] = np.sum(i[:k] * a[..., 1 : k + 1] * out[..., k - 1 :: -1][..., :k], axis=-1) / k
    return out


def _bump_jet(s: np.ndarray) -> np.ndarray:
    """Jet of E(s) = exp(-1/s), zeroed where the value is negligible."""
    out = np.zeros_like(s)
    live = s[:, 0] > _S_FLOOR
    if np.any(live):
        out[live] = jet_exp(-jet_recip(s[live]))
    return out


@dataclass(frozen=True)
class CutoffSpec:
    """omega = 1 on [0, plateau_end], 0 beyond support_end, smooth in between."""

    plateau_end: float = 0.25
    support_end: float = 0.5

    def __post_init__(self):
        if not 0 < self.plateau_end < self.support_end:
            raise ValueError("need 0 < plateau_end < support_end")

    @property
    def bridge(self) -> tuple[float, float]:
        return (self.plateau_end, self.support_end)

    def log_jet(self, x, order: int) -> np.ndarray:
        """Taylor coefficients of Omega(t0 + d) = omega(x e^d) in d, up to d^order.

        Returns an array of shape (len(x), order + 1); the l-th t-derivative
        of Omega is l! times column l.
        """
        x = np.atleast_1d(np.asarray(x, dtype=float))
        a, b = self.plateau_end, self.support_end
        h = b - a
        K = order + 1
        out = np.zeros((x.size, K))
        out[x <= a, 0] = 1.0
        mid = (x > a) & (x < b)
        if np.any(mid):
            xm = x[mid]
            # x e^d = x (1 + d + d^2/2 + ...)
            s = np.outer(xm / h, [1.0 / factorial(i) for i in range(K)])
            s[:, 0] -= a / h
            e0 = _bump_jet(s)
            one_minus = -s
            one_minus[:, 0] += 1.0
            e1 = _bump_jet(one_minus)
            out[mid] = jet_mul(e1, jet_recip(e0 + e1))
        return out

    def t_derivatives(self, x, order: int) -> np.ndarray:
        """Omega^(l)(log x) for l = 0..order, shape (len(x), order + 1)."""
        jet = self.log_jet(x, order)
        return jet * np.array([factorial(l) for l in range(order + 1)])

    def value(self, x) -> np.ndarray:
        return self.log_jet(x, 0)[:, 0]

    def derivative(self, x) -> np.ndarray:
        """d omega / dx = Omega'(log x) / x."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return self.log_jet(x, 1)[:, 1] / x


DEFAULT_CUTOFF = CutoffSpec()
