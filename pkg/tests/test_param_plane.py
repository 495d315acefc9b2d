import math
import warnings

import numpy as np
import pytest

from critorbit.errors import WindowMismatch
from critorbit.param_plane import (ScalarField, Window, bif_measure, bounded_fraction,
                                   connectedness_locus, field_l1_distance, laplacian_mass,
                                   read_pgm, reflect, render_green, to_gray16, write_csv,
                                   write_pgm, write_sidecar)
from critorbit.poly_core import TPoly


def test_window_validation():
    with pytest.raises(ValueError):
        Window(0, 1, 0, 1, 10, 20)
    with pytest.raises(ValueError):
        Window(1, 0, 0, 1, 10, 10)
    w = Window.parse("-2,2,-1,1", 400)
    assert (w.nx, w.ny) == (400, 200)
    assert w.grid().shape == (200, 400)
    assert w.grid()[0, 0] == complex(w.re_axis[0], w.im_axis[0])
    assert w.pixel_of(complex(w.re_axis[7], w.im_axis[3])) == (3, 7)


def test_laplacian_of_harmonic_is_zero():
    w = Window(1, 3, -1, 1, 64, 64)
    g = w.grid()
    v = np.log(np.abs(g))
    assert np.abs(laplacian_mass(v)).max() < 1e-5
    q = (g.real ** 2 + g.imag ** 2)  # Δ = 4
    mass = laplacian_mass(q)[1:-1, 1:-1]
    assert np.allclose(mass, 4 * w.h ** 2 / (2 * math.pi))


def test_quadratic_mass_small_grid(quad, T):
    w = Window(-2.5, 1.5, -2, 2, 256, 256)
    _, m0 = bif_measure(render_green(quad, TPoly([]), w))
    _, m1 = bif_measure(render_green(quad, T, w))
    assert m0 == pytest.approx(0.5, abs=0.01)
    assert m1 == pytest.approx(1.0, abs=0.01)


def test_support_near_locus(quad, T):
    w = Window(-2.5, 1.5, -2, 2, 256, 256)
    g = render_green(quad, T, w)
    mass, _ = bif_measure(g)
    v = np.abs(mass.values)
    assert v[g.values > 0.2].max() <= 1e-3 * v.max()


def test_border_warning(quad, T):
    w = Window(-0.5, 0.5, -0.5, 0.5, 16, 16)
    with pytest.warns(RuntimeWarning):
        bif_measure(render_green(quad, T, w))


def test_supersample_close(quad, T):
    w = Window(-2.5, 1.5, -2, 2, 64, 64)
    a = render_green(quad, T, w).values
    b = render_green(quad, T, w, supersample=True).values
    far = a > 0.5
    assert np.allclose(a[far], b[far], rtol=0.02)


def test_locus_and_fraction(cubic_i):
    w = Window(-1.2, 1.2, -1.2, 1.2, 48, 48)
    loc = connectedness_locus(cubic_i, w, 128)
    frac = bounded_fraction(cubic_i, w, 128)
    assert set(np.unique(frac.values)) <= {0.0, 0.5, 1.0}
    assert np.all(loc.values <= frac.values)


def test_reflection_and_distance(odd_cubic):
    w = Window(-2, 2, -2, 2, 128, 128)
    m1, _ = bif_measure(render_green(odd_cubic, odd_cubic.marked[0], w))
    m2, _ = bif_measure(render_green(odd_cubic, odd_cubic.marked[1], w))
    assert field_l1_distance(m1, reflect(m2)) < 1e-6
    other = ScalarField(Window(-2, 2, -2, 2, 64, 64), np.zeros((64, 64)), "mass-density")
    with pytest.raises(WindowMismatch):
        field_l1_distance(m1, other)


def test_pgm_roundtrip(tmp_path, quad, T):
    w = Window(-2.5, 1.5, -1, 1, 40, 20)
    fld = render_green(quad, T, w)
    path = tmp_path / "g.pgm"
    write_pgm(fld, path, "hello\nworld")
    data = path.read_bytes()
    assert data.startswith(b"P5\n# hello\n# world\n40 20\n65535\n")
    img = read_pgm(path)
    assert img.shape == (20, 40)
    assert np.array_equal(img, to_gray16(fld))
    # top row of the image is im_max
    assert np.array_equal(img[0], to_gray16(fld)[0])
    assert img[-1, 0] == round(fld.values[0, 0] / fld.values.max() * 65535)


def test_csv_and_sidecar(tmp_path, quad, T):
    w = Window(-2, 2, -2, 2, 4, 4)
    fld = render_green(quad, T, w)
    write_csv(fld, tmp_path / "f.csv", "c")
    lines = (tmp_path / "f.csv").read_text().splitlines()
    assert lines[:2] == ["# c", "re,im,value"] and len(lines) == 18
    write_sidecar(fld, tmp_path / "f.json", config_hash="x")
    assert '"config_hash": "x"' in (tmp_path / "f.json").read_text()


def test_degenerate_raster(quad, T):
    w = Window(-2, 2, -2, 2, 2, 2)
    assert render_green(quad, T, w).values.shape == (2, 2)
