import numpy as np
import pytest

from conftest import scalar, suite_pencil
from indicialflow.adjoint_pairing import gram, gram_signature, pair, verify_signature_equals_sf
from indicialflow.cutoff import CutoffSpec
from indicialflow.errors import NotInMaxDomain
from indicialflow.pencil import DiracData, dirac_block, indicial_roots, normalize_strip, scale
from indicialflow.singular_functions import LogPowerElement, strip_decomposition
from indicialflow.spectral_flow import spectral_flow


def test_linear_scalar_gram():
    g = gram(scalar(0, 1))
    np.testing.assert_allclose(g.matrix, [[1]], atol=1e-10)
    assert tuple(g.signature) == (1, 0, 0)


def test_double_root_gram_is_hyperbolic():
    g = gram(scalar(0, 0, 1))
    np.testing.assert_allclose(g.matrix, [[0, -1j], [1j, 0]], atol=1e-10)
    assert g.signature.value == 0 and g.signature.n_zero == 0


def test_two_real_roots():
    g = gram(scalar(-1, 0, 1))
    np.testing.assert_allclose(g.matrix, np.diag([-2, 2]), atol=1e-10)


def test_dirac_zero_gram():
    g = gram(dirac_block(DiracData(np.zeros((1, 1)))))
    np.testing.assert_allclose(g.matrix, np.diag([1, -1]), atol=1e-10)


def test_empty_strip():
    g = gram(dirac_block(DiracData([[1.0]])))
    assert g.matrix.shape == (0, 0) and g.signature.value == 0


def test_real_only_filter():
    # roots at 0 (real) and +-0.2i (complex, inside the strip)
    p = scalar(0, 0.04, 0, 1)
    assert gram(p).matrix.shape == (3, 3)
    assert gram(p, real_only=True).matrix.shape == (1, 1)


@pytest.mark.parametrize("seed", range(60))
def test_gram_hermitian_and_nondegenerate(seed):
    _, p = normalize_strip(suite_pencil(seed))
    g = gram(p)
    if not g.matrix.size:
        return
    assert g.raw_asymmetry <= 1e-8 * max(1.0, np.max(np.abs(g.matrix)))
    assert g.signature.n_zero == 0


@pytest.mark.parametrize("seed", range(60))
def test_simple_real_root_gives_crossing_form(seed):
    p = suite_pencil(seed)
    for b in strip_decomposition(p):
        r = b.root
        if not r.is_real or r.alg_mult != 1:
            continue
        (u,) = b.elements
        e = u.coeffs[0]
        expected = e.conj() @ p.derivative(r.sigma0) @ e
        assert abs(pair(p, u, u) - expected) <= 1e-8 * max(1.0, abs(expected))


@pytest.mark.parametrize("seed", range(0, 60, 3))
def test_distinct_roots_are_orthogonal(seed):
    _, p = normalize_strip(suite_pencil(seed))
    bases = strip_decomposition(p)
    g = gram(p)
    n = max(1.0, np.max(np.abs(g.matrix), initial=0.0))
    idx = np.concatenate([[k] * b.dim for k, b in enumerate(bases)]).astype(int) if bases else []
    for i in range(len(idx)):
        for j in range(len(idx)):
            ri, rj = bases[idx[i]].root.sigma0, bases[idx[j]].root.sigma0
            # [u, v] can only be nonzero when root_u = conj(root_v)
            if abs(ri - np.conj(rj)) > 1e-6:
                assert abs(g.matrix[i, j]) <= 1e-8 * n


def test_pair_matches_gram_entries():
    p = scalar(0, 0, 1)
    g = gram(p)
    b = g.basis
    for i in range(2):
        for j in range(2):
            assert abs(pair(p, b[j], b[i]) - g.matrix[i, j]) <= 1e-9


def test_non_member_rejected():
    with pytest.raises(NotInMaxDomain):
        pair(scalar(0, 1), LogPowerElement(0, [[0], [1]]), LogPowerElement(0, [[1], [0]]))
    with pytest.raises(NotInMaxDomain):
        gram(scalar(0, 1), basis=[LogPowerElement(0.3, [[1]])])


def test_scaled_dirac_gram():
    p = scale(dirac_block(DiracData(np.zeros((1, 1)))), 0.25)
    np.testing.assert_allclose(gram(p).matrix, 0.25 * np.diag([1, -1]), atol=1e-10)


@pytest.mark.parametrize("t", [0.2, 3.0])
@pytest.mark.parametrize("seed", range(0, 40, 4))
def test_signature_is_scale_invariant(seed, t):
    p = suite_pencil(seed)
    a, b = verify_signature_equals_sf(p), verify_signature_equals_sf(scale(p, t))
    assert a.passed and b.passed and a.sig == b.sig


@pytest.mark.parametrize("seed", range(0, 60, 6))
def test_cutoff_independence(seed):
    _, p = normalize_strip(suite_pencil(seed))
    g1 = gram(p).matrix
    g2 = gram(p, cutoff=CutoffSpec(0.1, 0.9)).matrix
    if g1.size:
        assert np.max(np.abs(g1 - g2)) <= 1e-8 * max(1.0, np.max(np.abs(g1)))


@pytest.mark.parametrize("seed", range(40))
def test_signature_equals_flow(seed):
    v = verify_signature_equals_sf(suite_pencil(seed))
    assert v.passed, v.to_dict()
    assert v.sig == v.sf == spectral_flow(suite_pencil(seed))


def test_verdict_reports_inconclusive_cause():
    v = verify_signature_equals_sf(scalar(0.25, 0, 1), root_tol=1.0)
    assert v.status == "INCONCLUSIVE" and v.cause
    assert v.to_dict()["pass"] is False


def test_verdict_dict_fields():
    d = verify_signature_equals_sf(dirac_block(DiracData([[1.0, 0.0]]))).to_dict()
    assert d["sig"] == d["sf"] == 1 and d["pass"] and d["status"] == "PASS"
    assert d["inertia"][0] - d["inertia"][1] == 1 and d["inertia"][2] == 0


def test_gram_signature_tolerance():
    assert tuple(gram_signature(np.diag([1.0, 1e-9, -1.0]))) == (1, 1, 1)
