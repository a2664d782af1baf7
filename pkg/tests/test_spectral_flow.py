import csv

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import block_diag

from conftest import scalar, suite_pencil
from indicialflow.errors import DegenerateCrossing, WindowError
from indicialflow.model_zoo import circle_dirac, circle_pencil, random_pencil
from indicialflow.pencil import DiracData, SelfAdjointPencil, dirac_block, scale
from indicialflow.spectral_flow import (
    choose_window,
    eigenvalue_curves,
    sf_all_methods,
    sf_crossing_form,
    sf_endpoint,
    sf_partition,
    spectral_flow,
)
from indicialflow.cli import emit_curves


def direct_sum(p, q):
    mu = max(p.mu, q.mu)
    pad = lambda r, j: r.coeffs[j] if j <= r.mu else np.zeros((r.dim, r.dim))
    return SelfAdjointPencil([block_diag(pad(p, j), pad(q, j)) for j in range(mu + 1)])


def negate(p):
    return SelfAdjointPencil([-a for a in p.coeffs])


def test_linear_scalar():
    p = scalar(0, 1)
    assert choose_window(p) == 1.0
    res = sf_all_methods(p)
    assert res["endpoint"] == 1 and res["agree"]
    assert [(c.sigma_c, c.crossing_signature) for c in res["crossing_form"].crossings] == [(0.0, 1)]


def test_quadratic_with_two_real_roots():
    p = scalar(-1, 0, 1)
    res = sf_all_methods(p)
    assert res["T"] == 3.0 and res["endpoint"] == 0 and res["agree"]
    cr = res["crossing_form"].crossings
    np.testing.assert_allclose([c.sigma_c for c in cr], [-1, 1], atol=1e-12)
    assert [c.crossing_signature for c in cr] == [-1, 1]


def test_dirac_examples():
    assert spectral_flow(dirac_block(DiracData([[1.0, 0.0]]))) == 1
    res = sf_all_methods(dirac_block(DiracData(np.zeros((1, 1)))))
    assert res["endpoint"] == 0 and res["agree"]
    assert res["crossing_form"].crossings[0].kernel_dim == 2
    res = sf_all_methods(dirac_block(DiracData([[1.0]])))
    assert res["T"] == 3.0 and res["endpoint"] == 0 and res["crossing_form"].crossings == []


def test_double_root_needs_partition():
    p = scalar(0, 0, 1)
    assert sf_partition(p, choose_window(p)).value == 0
    with pytest.raises(DegenerateCrossing):
        sf_crossing_form(p, choose_window(p))
    res = sf_all_methods(p)
    assert res["crossing_form"] is None and "crossing_form_error" in res and res["agree"]


def test_window_error_on_singular_endpoint():
    with pytest.raises(WindowError):
        sf_endpoint(scalar(-1, 0, 1), 1.0)


@pytest.mark.parametrize("seed", range(120))
def test_methods_agree(seed):
    res = sf_all_methods(suite_pencil(seed))
    assert res["agree"], res


@pytest.mark.parametrize("seed", range(60))
def test_leading_coefficient_law(seed):
    p = suite_pencil(seed)
    w = np.linalg.eigvalsh(p.leading)
    expected = int(np.sum(w > 0) - np.sum(w < 0)) if p.mu % 2 else 0
    assert spectral_flow(p) == expected


@pytest.mark.parametrize("seed", range(40))
def test_crossings_sum_to_value(seed):
    p = suite_pencil(seed)
    T = choose_window(p)
    for method in (sf_partition, sf_crossing_form):
        try:
            rep = method(p, T)
        except DegenerateCrossing:
            continue
        assert sum(c.crossing_signature for c in rep.crossings) == rep.value
        assert rep.interval == (-T, T)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.integers(0, 10_000))
def test_direct_sum_is_additive(s1, s2):
    p, q = suite_pencil(s1), suite_pencil(s2)
    assert spectral_flow(direct_sum(p, q)) == spectral_flow(p) + spectral_flow(q)


@pytest.mark.parametrize("seed", range(30))
def test_negation_flips_sign(seed):
    p = suite_pencil(seed)
    assert spectral_flow(negate(p)) == -spectral_flow(p)


@pytest.mark.parametrize("t", [0.01, 0.3, 7.0, 100.0])
@pytest.mark.parametrize("seed", range(15))
def test_scale_invariance(seed, t):
    p = suite_pencil(seed)
    assert sf_all_methods(scale(p, t))["endpoint"] == spectral_flow(p)


@pytest.mark.parametrize("N", [0, 1, 4, 8, 16])
@pytest.mark.parametrize("c", [0.0, 0.3, 1.7])
def test_circle_dirac_families_have_zero_flow(N, c):
    res = sf_all_methods(circle_pencil(circle_dirac(c, N)))
    assert res["endpoint"] == 0 and res["agree"]


def test_window_covers_all_real_roots():
    p = random_pencil(4, 3, 11)
    T = choose_window(p)
    res = sf_partition(p, T)
    assert all(-T < c.sigma_c < T for c in res.crossings)


def test_eigenvalue_curves_shape_and_order():
    p = random_pencil(3, 2, 2)
    s, e = eigenvalue_curves(p, 2.0, 11)
    assert s.shape == (11,) and e.shape == (11, 3)
    assert s[0] == -2.0 and s[-1] == 2.0
    assert np.all(np.diff(e, axis=1) >= 0)
    with pytest.raises(ValueError):
        eigenvalue_curves(p, 2.0, 1)


def test_curve_csv(tmp_path):
    path = tmp_path / "curves.csv"
    emit_curves(scalar(0, 1), 1.0, 3, path)
    rows = list(csv.reader(open(path)))
    assert rows[0] == ["sigma", "lambda_1"]
    assert [[float(v) for v in r] for r in rows[1:]] == [[-1, -1], [0, 0], [1, 1]]


def test_dirac_curves_never_cross():
    s, e = eigenvalue_curves(dirac_block(DiracData([[1.0]])), 3.0, 25)
    r = np.sqrt(s ** 2 + 1)
    np.testing.assert_allclose(e, np.column_stack([-r, r]), atol=1e-13)
