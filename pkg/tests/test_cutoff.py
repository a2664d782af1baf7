import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import cutoff_mp
from indicialflow.cutoff import CutoffSpec, jet_exp, jet_mul, jet_recip

CUTOFFS = [CutoffSpec(), CutoffSpec(0.2, 0.8), CutoffSpec(0.05, 0.1)]


def test_plateau_and_tail():
    c = CutoffSpec()
    np.testing.assert_array_equal(c.value([0.01, 0.25, 0.5, 3.0]), [1, 1, 0, 0])
    np.testing.assert_array_equal(c.derivative([0.1, 0.6]), [0, 0])


def test_midpoint_is_one_half():
    assert abs(CutoffSpec().value(0.375)[0] - 0.5) <= 1e-15


def test_invalid_bridge():
    for a, b in ((0, 1), (0.5, 0.5), (0.6, 0.2), (-1, 1)):
        with pytest.raises(ValueError):
            CutoffSpec(a, b)


@pytest.mark.parametrize("c", CUTOFFS)
def test_values_match_mpmath(c):
    a, b = c.bridge
    xs = np.linspace(a, b, 41)[1:-1]
    ref = np.array([float(cutoff_mp(mp.mpf(x), a, b)) for x in xs])
    np.testing.assert_allclose(c.value(xs), ref, rtol=0, atol=1e-14)


@pytest.mark.parametrize("c", CUTOFFS)
@pytest.mark.parametrize("frac", [0.1, 0.37, 0.5, 0.81])
def test_log_derivatives_match_mpmath(c, frac):
    a, b = c.bridge
    x = a + frac * (b - a)
    order = 4
    with mp.workdps(40):
        ref = [float(mp.diff(lambda t: cutoff_mp(mp.exp(t), a, b), mp.log(x), k)) for k in range(order + 1)]
    ours = c.t_derivatives(x, order)[0]
    scale = max(1.0, max(abs(r) for r in ref))
    np.testing.assert_allclose(ours, ref, rtol=0, atol=1e-9 * scale)


@pytest.mark.parametrize("c", CUTOFFS)
def test_x_derivative_matches_finite_difference(c):
    a, b = c.bridge
    xs = np.linspace(a, b, 13)[1:-1]
    h = 1e-6 * (b - a)
    fd = (c.value(xs + h) - c.value(xs - h)) / (2 * h)
    np.testing.assert_allclose(c.derivative(xs), fd, atol=1e-6 / (b - a))


@settings(max_examples=100, deadline=None)
@given(st.floats(1e-6, 10.0))
def test_values_in_unit_interval_and_monotone(x):
    c = CutoffSpec()
    v = c.value([x, x * 1.01])
    assert 0.0 <= v[0] <= 1.0
    assert v[1] <= v[0] + 1e-15


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-2, 2), min_size=4, max_size=4),
       st.lists(st.floats(-2, 2), min_size=4, max_size=4))
def test_jet_algebra(a, b):
    a, b = np.array([a]), np.array([b])
    # truncated polynomial product
    full = np.convolve(a[0], b[0])[:4]
    np.testing.assert_allclose(jet_mul(a, b)[0], full, atol=1e-12)
    a[0, 0] = 1.5 + abs(a[0, 0])
    np.testing.assert_allclose(jet_mul(a, jet_recip(a))[0], [1, 0, 0, 0], atol=1e-10)
    # exp(a) exp(-a) = 1
    np.testing.assert_allclose(jet_mul(jet_exp(a), jet_exp(-a))[0], [1, 0, 0, 0], atol=1e-9 * np.exp(4 * np.max(np.abs(a))))
