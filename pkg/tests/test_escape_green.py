import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from critorbit.errors import NotActive, OutsideDomain
from critorbit.escape_green import (bottcher_value, escape_rate, escape_rates, escape_value, green,
                                    robin_constant, robin_from_evaluator)
from critorbit.poly_core import TPoly

cplx = st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False)


def test_power_map_green():
    c = np.array([0, 0, 1], dtype=complex)
    for z in (1.5, 3j, -7 + 2j):
        assert escape_value(c, z).g == pytest.approx(math.log(abs(z)), abs=1e-12)
    assert escape_value(c, 0.5).g == 0.0


@given(cplx, cplx)
@settings(max_examples=80, deadline=None)
def test_functional_equation(t, z):
    c = np.array([t, 0, 1], dtype=complex)
    g1 = escape_value(c, z).g
    g2 = escape_value(c, z * z + t).g
    assert g2 == pytest.approx(2 * g1, abs=1e-9)


def test_error_bound_reported(quad):
    ev = green(quad, 0.3, 2.0)
    assert ev.escaped and 0 <= ev.err < 1e-12


def test_vectorized_matches_scalar(quad, T):
    ts = np.array([0.1, -1.9, 0.3 + 0.6j, 2j, -0.75 + 0.05j])
    vec = escape_rates(quad, T, ts)
    ref = [escape_rate(quad, T, t).g for t in ts]
    assert np.allclose(vec, ref, atol=1e-12)


def test_robin_quadratic(quad, T):
    assert abs(robin_constant(quad, T, 1).gamma) < 1e-9
    assert abs(robin_constant(quad, TPoly([]), 0.5).gamma) < 1e-9


def test_robin_odd_cubic(odd_cubic):
    # G_t(t) = G_t(-2t^3)/3 = log|t| + log(2)/3 + o(1)
    est = robin_constant(odd_cubic, odd_cubic.marked[0], 1)
    assert est.gamma == pytest.approx(math.log(2) / 3, abs=1e-6)


def test_robin_needs_active():
    with pytest.raises(NotActive):
        robin_from_evaluator(lambda t: 0.0, 0)


def test_bottcher_pointwise_vs_series(quad):
    from critorbit.bottcher_series import bottcher_series

    tb = bottcher_series(quad, 12)
    for t, z in ((0.1, 10), (1.0, 6 + 2j), (-0.5j, -8)):
        assert abs(bottcher_value(quad, t, z) - tb.evaluate(t, z)) < 1e-9
    assert bottcher_value(quad, 0.1, 10).real == pytest.approx(10.005024, abs=1e-6)


def test_bottcher_conjugacy(odd_cubic):
    t, z = 0.4 - 0.3j, 5 + 1j
    phi = bottcher_value(odd_cubic, t, z)
    fz = odd_cubic.f(t, z)
    assert abs(bottcher_value(odd_cubic, t, fz) - phi ** 3) < 1e-9 * abs(phi) ** 3


def test_bottcher_outside_domain(quad):
    with pytest.raises(OutsideDomain):
        bottcher_value(quad, 0.1, 0.0)
