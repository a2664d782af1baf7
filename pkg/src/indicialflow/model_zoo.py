"""Generators of test pencils: circle symbols, Dirac data and random pencils.

Random objects use numpy's PCG64 generator seeded explicitly, with complex
Gaussian entries. Fixture files store the numbers themselves, so results
never depend on reproducing a PRNG stream elsewhere.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import ConstructionError, NotHermitian
from .cone_ode import ConeRealization
from .io import dump_json, load_json, pencil_from_dict, pencil_to_dict
from .numerics import as_hermitian
from .pencil import DiracData, SelfAdjointPencil, dirac_block

__all__ = [
    "CircleSymbol",
    "circle_pencil",
    "circle_dirac",
    "random_pencil",
    "random_dirac",
    "write_fixture",
    "read_fixture",
    "random_inertia_matrix",
    "random_cone",
    "GENERATOR",
]

GENERATOR = "numpy.PCG64"
LEADING_FLOOR = 0.1


@dataclass(frozen=True)
class CircleSymbol:
    """Constant-coefficient family on the circle, diagonalized by Fourier modes.

    ``coeffs[j][m]`` is the matrix multiplying k**m in a_j(k), so on the
    mode e^{ik theta} the coefficient a_j acts as sum_m coeffs[j][m] k**m.
    Modes |k| <= N are kept.
    """

    coeffs: tuple
    N: int

    def __post_init__(self):
        if self.N < 0:
            raise ConstructionError("truncation N must be nonnegative")
        if len(self.coeffs) < 2:
            raise ConstructionError("need at least a_0 and a_1")
        mats = tuple(tuple(np.array(c, dtype=complex, ndmin=2) for c in cj) for cj in self.coeffs)
        shapes = {m.shape for cj in mats for m in cj}
        if len(shapes) != 1 or any(len(cj) == 0 for cj in mats):
            raise ConstructionError("all symbol matrices must share one square shape")
        object.__setattr__(self, "coeffs", mats)

    @property
    def block_dim(self) -> int:
        return self.coeffs[0][0].shape[0]

    @property
    def modes(self) -> range:
        return range(-self.N, self.N + 1)

    def order(self, j: int) -> int:
        """Polynomial degree in k of a_j."""
        return len(self.coeffs[j]) - 1

    def mode_block(self, k: int) -> list[np.ndarray]:
        """Coefficients a_0(k), ..., a_mu(k) of the pencil on mode k."""
        out = []
        for j, cj in enumerate(self.coeffs):
            m = sum(c * float(k) ** i for i, c in enumerate(cj))
            try:
                out.append(as_hermitian(m))
            except NotHermitian as exc:
                raise ConstructionError(f"block a_{j}({k}) is not Hermitian") from exc
        return out


def circle_pencil(sym: CircleSymbol) -> SelfAdjointPencil:
    """Direct sum over modes -N..N of the per-mode pencils."""
    blocks = [sym.mode_block(k) for k in sym.modes]
    mu = len(sym.coeffs) - 1
    return SelfAdjointPencil([scipy.linalg.block_diag(*[b[j] for b in blocks]) for j in range(mu + 1)])


def circle_dirac(c: complex = 0.0, N: int = 8) -> CircleSymbol:
    """Dirac family of D = -i d/dtheta + c on the circle.

    On mode k, D acts as k + c and the block is [[sigma, conj(k+c)], [k+c, -sigma]].
    """
    c = complex(c)
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    shift = np.array([[0, c.conjugate()], [c, 0]])
    return CircleSymbol(((shift, x), (np.diag([1.0, -1.0]).astype(complex),)), N)


def _hermitian_gaussian(rng: np.random.Generator, n: int) -> np.ndarray:
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return 0.5 * (g + g.conj().T)


def random_pencil(dim: int, mu: int, seed: int) -> SelfAdjointPencil:
    """Random Hermitian pencil with min |eig(a_mu)| >= 0.1."""
    if dim < 1 or mu < 1:
        raise ValueError("dim and mu must be at least 1")
    rng = np.random.default_rng(seed)
    coeffs = [_hermitian_gaussian(rng, dim) for _ in range(mu)]
    while True:
        lead = _hermitian_gaussian(rng, dim)
        if np.min(np.abs(np.linalg.eigvalsh(lead))) >= LEADING_FLOOR:
            break
    return SelfAdjointPencil(coeffs + [lead])


def random_dirac(a: int, b: int, seed: int, rank: int | None = None) -> DiracData:
    """Random a x b complex matrix D : C^b -> C^a; full rank unless ``rank`` is given."""
    if a < 1 or b < 1:
        raise ValueError("a and b must be at least 1")
    rng = np.random.default_rng(seed)
    if rank is None:
        d = rng.standard_normal((a, b)) + 1j * rng.standard_normal((a, b))
    else:
        if not 0 <= rank <= min(a, b):
            raise ValueError("rank must lie in [0, min(a, b)]")
        left = rng.standard_normal((a, rank)) + 1j * rng.standard_normal((a, rank))
        right = rng.standard_normal((rank, b)) + 1j * rng.standard_normal((rank, b))
        d = left @ right
    return DiracData(d)


def random_inertia_matrix(n_plus: int, n_minus: int, seed: int) -> np.ndarray:
    """Random Hermitian matrix with the given inertia; |eigenvalues| in [0.5, 1.5]."""
    rng = np.random.default_rng(seed)
    n = n_plus + n_minus
    q, _ = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    mags = 0.5 + rng.random(n)
    w = np.concatenate([mags[:n_plus], -mags[n_plus:]])
    return as_hermitian((q * w) @ q.conj().T)


def random_cone(seed: int) -> ConeRealization:
    """Seeded first-order cone realization with its Lagrangian boundary condition.

    Cycles through Dirac blocks of square D, the 2x2 family
    a1 = diag(1, -1), a0 = [[0, conj d], [d, 0]], and general pencils whose
    leading coefficient has zero signature.
    """
    rng = np.random.default_rng(seed)
    kind = seed % 3
    if kind == 0:
        n = 1 + (seed // 3) % 3
        p = dirac_block(random_dirac(n, n, seed))
    elif kind == 1:
        d = complex(rng.standard_normal(), rng.standard_normal())
        p = SelfAdjointPencil([np.array([[0, d.conjugate()], [d, 0]]), np.diag([1.0, -1.0])])
    else:
        half = 1 + (seed // 3) % 2
        a1 = random_inertia_matrix(half, half, seed)
        p = SelfAdjointPencil([_hermitian_gaussian(rng, 2 * half), a1])
    return ConeRealization.with_lagrangian(p)


def write_fixture(path, p: SelfAdjointPencil, seed: int | None, expected_sf: int,
                  expected_ind: int | None = None) -> dict:
    """Pencil JSON plus seed, expected SF and (for Dirac blocks) expected index."""
    record = pencil_to_dict(p)
    record.update({"seed": seed, "generator": GENERATOR, "expected_sf": int(expected_sf),
                   "expected_ind": None if expected_ind is None else int(expected_ind)})
    dump_json(record, path)
    return record


def read_fixture(path) -> tuple[SelfAdjointPencil, dict]:
    record = load_json(path)
    meta = {k: record.get(k) for k in ("seed", "generator", "expected_sf", "expected_ind")}
    return pencil_from_dict(record), meta

