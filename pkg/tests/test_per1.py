import math

import numpy as np
import pytest

from critorbit.errors import DegenerateLift, WindowContainsOrigin
from critorbit.param_plane import Window, field_l1_distance
from critorbit.per1 import (Per1Family, centered_conjugate, per1_centered_green, per1_green,
                            per1_homogeneous, per1_measures, per1_pcf_search, per1_robin,
                            predicted_robin, symbolic_identities)

rng = np.random.default_rng(7)


def _annulus(n, lo=0.3, hi=3.0):
    r = np.exp(rng.uniform(math.log(lo), math.log(hi), n))
    return r * np.exp(2j * np.pi * rng.random(n))


def test_identities_hold():
    assert all(symbolic_identities().values())


def test_map_shape():
    fam = Per1Family(6)
    s = 0.7 + 0.4j
    h = 1e-6
    assert fam.f(s, 0) == 0
    assert abs((fam.f(s, h) - fam.f(s, -h)) / (2 * h) - 6) < 1e-6
    for c in (s, 1 / s):
        assert abs(fam.f(s, c + h) - fam.f(s, c - h)) < 1e-9


@pytest.mark.parametrize("lam", [6, 2, 3 + 4j])
def test_robin_prediction(lam):
    fam = Per1Family(lam)
    assert per1_robin(fam, "+").gamma == pytest.approx(predicted_robin(lam), abs=1e-9)
    assert predicted_robin(6) == pytest.approx(math.log(2) / 6)


@pytest.mark.parametrize("lam", [6, 3 + 4j])
def test_inversion_symmetry(lam):
    fam = Per1Family(lam)
    for s in _annulus(30):
        assert abs(per1_green(fam, s, "-").g - per1_green(fam, 1 / s, "+").g) < 1e-10


def test_centered_conjugate_cross_check():
    fam = Per1Family(3 + 4j)
    for s in _annulus(20, 0.5, 2.5):
        a = per1_green(fam, s).g
        b = per1_centered_green(fam, s).g
        assert abs(a - b) < 1e-9
    P, alpha, beta = centered_conjugate(fam, 1.3)
    assert P[3] == pytest.approx(1) and P[2] == 0


def test_homogeneous_laws():
    fam = Per1Family(6)
    for s in _annulus(10, 0.5, 2.5):
        assert per1_homogeneous(fam, s, 1) == pytest.approx(per1_green(fam, s).g, abs=1e-9)
        alpha = complex(*rng.normal(size=2))
        for sign in "+-":
            diff = per1_homogeneous(fam, alpha * s, alpha, sign) - per1_homogeneous(fam, s, 1, sign)
            assert diff == pytest.approx(math.log(abs(alpha)), abs=1e-9)
    with pytest.raises(DegenerateLift):
        per1_homogeneous(fam, 0, 1)


def test_minus_lift_is_shifted_green():
    fam = Per1Family(2)
    s = 1.7 - 0.4j
    h = per1_homogeneous(fam, s, 1, "-")
    assert h == pytest.approx(per1_green(fam, s, "-").g + math.log(abs(s)), abs=1e-9)


def test_measures_small_grid():
    fam = Per1Family(6)
    w = Window(-2, 2, -2, 2, 256, 256)
    mp, mm, (a, b) = per1_measures(fam, w)
    assert 0.8 < a < 1.01 and 0.8 < b < 1.01
    assert field_l1_distance(mp, mm) > 1.0
    with pytest.raises(WindowContainsOrigin):
        per1_measures(fam, w, exclude_radius=0)


def test_pcf_search_lambda_6():
    rs = per1_pcf_search(Per1Family(6))
    phi = (1 + 5 ** 0.5) / 2
    vals = rs.values
    for target in (-phi, phi, -1 / phi, 2 ** 0.5, -(2 ** -0.5)):
        assert np.min(np.abs(vals - target)) < 1e-9
    fam = Per1Family(6)
    s0 = vals[np.argmin(np.abs(vals + phi))]
    assert abs(fam.f(s0, s0) - 1 / s0) < 1e-9
    assert abs(fam.f(s0, 1 / s0) - s0) < 1e-9


def test_pcf_search_slice():
    rs = per1_pcf_search(Per1Family(0), slice_nmax=3)
    assert len(rs) >= 5
