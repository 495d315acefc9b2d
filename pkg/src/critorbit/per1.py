"""The cubic family with a marked fixed point of multiplier λ at z = 0.

f_s(z) = λz - (λ/2)(s + 1/s)z² + (λ/3)z³ has critical points c₊ = s and
c₋ = 1/s, and f_s = f_(1/s).  Escape rates are computed on the non-monic map
directly; the centered monic conjugate is available as a cross-check.
"""
from __future__ import annotations

import cmath
import functools
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Polynomial

from . import _kernels
from .errors import DegenerateLift, WindowContainsOrigin
from .escape_green import SCALAR_CAP, RASTER_CAP, EscapeValue, escape_value, robin_from_evaluator
from .param_plane import ScalarField, Window, laplacian_mass
from .preperiodic import CLUSTER_TOL, Root, RootSet, _cluster, all_drivers, find_pcf, orbit_verdict
from .poly_core import load_fixture

# Calibration of the μ₊/μ₋ separation test: one run at λ = 6 on {|Re s|, |Im s| ≤ 2}
# at 1024² gave a normalized L1 distance of 2.06; the acceptance threshold keeps
# a wide margin below that while staying far above the 0.05 reflection noise.
L1_SEPARATION_THRESHOLD = 1.0
DEFAULT_EXCLUDE_RADIUS = 0.4
MIN_EXCLUDE_RADIUS = 1e-3
HOMOGENEOUS_STEPS = 60


@functools.lru_cache(maxsize=None)
def symbolic_identities() -> dict:
    """Identities of the family checked with λ and s as symbols."""
    import sympy

    lam, s, z = sympy.symbols("lambda s z")
    f = lam * z - lam / 2 * (s + 1 / s) * z**2 + lam / 3 * z**3
    fp = sympy.diff(f, z)
    checks = {
        "critical_plus": sympy.simplify(fp.subs(z, s)) == 0,
        "critical_minus": sympy.simplify(fp.subs(z, 1 / s)) == 0,
        "fixed_origin": sympy.simplify(f.subs(z, 0)) == 0,
        "multiplier": sympy.simplify(fp.subs(z, 0) - lam) == 0,
        "inversion": sympy.simplify(f - f.subs(s, 1 / s)) == 0,
    }
    # leading term of f_s^n(s) in s: (λ/3)^(1+3+...+3^(n-2)) (-λ/6)^(3^(n-1)) s^(3^n)
    orbit = s
    for n in (1, 2):
        orbit = sympy.expand(f.subs(z, orbit))
        top = sympy.Poly(sympy.expand(orbit * s ** (3**n)), s)
        lead = top.LC()
        predicted = (lam / 3) ** sum(3**j for j in range(n - 1)) * (-lam / 6) ** (3 ** (n - 1))
        checks[f"leading_n{n}"] = (top.degree() == 2 * 3**n) and sympy.simplify(lead - predicted) == 0
    return checks


@dataclass(frozen=True)
class Per1Family:
    lam: complex

    def __post_init__(self):
        object.__setattr__(self, "lam", complex(self.lam))
        bad = [k for k, ok in symbolic_identities().items() if not ok]
        if bad:
            raise AssertionError(f"family identities failed: {bad}")

    def coeffs(self, s: complex) -> np.ndarray:
        return _kernels.per1_coeffs(self.lam, complex(s))

    def critical_point(self, s: complex, sign: int = 1) -> complex:
        s = complex(s)
        return s if sign > 0 else 1.0 / s

    def f(self, s: complex, z: complex) -> complex:
        return complex(_kernels.horner_value(self.coeffs(s), complex(z)))

    def _need_nonzero(self):
        if self.lam == 0:
            raise ValueError("λ = 0 is only available through the polynomial slice")


def _sign(sign) -> int:
    if sign in ("+", 1, 1.0, "plus"):
        return 1
    if sign in ("-", -1, -1.0, "minus"):
        return -1
    raise ValueError(f"sign must be '+' or '-', got {sign!r}")


def per1_green(fam: Per1Family, s: complex, sign="+", cap: int = SCALAR_CAP) -> EscapeValue:
    """Escape rate of c₊ = s (sign '+') or c₋ = 1/s (sign '-') under f_s."""
    fam._need_nonzero()
    s = complex(s)
    if s == 0:
        raise ValueError("s must be nonzero")
    return escape_value(fam.coeffs(s), fam.critical_point(s, _sign(sign)), cap)


def centered_conjugate(fam: Per1Family, s: complex):
    """Monic centered P with f_s(αu + β) = αP(u) + β; returns (P coeffs, α, β)."""
    c = fam.coeffs(s)
    a3, b = c[3], c[2]
    beta = -b / (3 * a3)
    alpha = 1.0 / cmath.sqrt(a3)
    comp = Polynomial(c)(Polynomial([beta, alpha])).coef.astype(np.complex128)
    comp[0] -= beta
    P = comp / alpha
    P[2] = 0.0  # centered by construction; drop rounding residue
    return P, alpha, beta


def per1_centered_green(fam: Per1Family, s: complex, sign="+", cap: int = SCALAR_CAP) -> EscapeValue:
    """Cross-check of per1_green through the centered monic conjugate."""
    P, alpha, beta = centered_conjugate(fam, s)
    z = fam.critical_point(s, _sign(sign))
    return escape_value(P, (z - beta) / alpha, cap)


def per1_robin(fam: Per1Family, sign="+", radii=(1e4,), n: int = 16):
    """Constant term of G±(s) - log|s| at infinity from ring averages."""
    return robin_from_evaluator(lambda s: per1_green(fam, s, sign).g, 1, radii, n)


def predicted_robin(lam: complex) -> float:
    lam = abs(complex(lam))
    return math.log(lam / 3) / 6 + math.log(lam / 6) / 3


def per1_green_field(fam: Per1Family, w: Window, sign="+", cap: int = RASTER_CAP,
                     exclude_radius: float = DEFAULT_EXCLUDE_RADIUS) -> ScalarField:
    fam._need_nonzero()
    vals = _kernels.per1_escape_grid(fam.lam, w.re_axis, w.im_axis, float(_sign(sign)), int(cap))
    g = w.grid()
    vals[np.abs(g) < exclude_radius] = np.nan
    return ScalarField(w, vals, "green", {"cap": int(cap), "exclude_radius": exclude_radius,
                                          "sign": "+" if _sign(sign) > 0 else "-"})


def per1_measures(fam: Per1Family, w: Window, cap: int = RASTER_CAP,
                  exclude_radius: float = DEFAULT_EXCLUDE_RADIUS):
    """Discrete μ₊, μ₋ on a window; pixels with |s| < exclude_radius are masked.

    Returns ``(mu_plus, mu_minus, (mass_plus, mass_minus))``.  Cells touching
    the mask carry NaN and are left out of the masses.
    """
    near = np.abs(w.grid()) < MIN_EXCLUDE_RADIUS + w.h
    if exclude_radius < MIN_EXCLUDE_RADIUS and near.any():
        raise WindowContainsOrigin(f"window reaches s = 0; use exclude_radius >= {MIN_EXCLUDE_RADIUS}")
    out, masses = [], []
    for sign in ("+", "-"):
        fld = per1_green_field(fam, w, sign, cap, exclude_radius)
        mass = laplacian_mass(fld.values)
        out.append(ScalarField(w, mass, "mass-density", dict(fld.meta)))
        masses.append(float(np.nansum(mass)))
    return out[0], out[1], tuple(masses)


def _homogeneous_step(lam, s, t, z, w):
    r = s / t + t / s
    return (lam * z * w * w - 0.5 * lam * r * z * z * w + lam / 3.0 * z ** 3, w ** 3)


def per1_homogeneous(fam: Per1Family, s: complex, t: complex, sign="+",
                     steps: int = HOMOGENEOUS_STEPS) -> float:
    """H±(s, t) = lim 3^-n log‖F^n‖ for the homogeneous lift, started at (s, t) or (t, s).

    Iterates are renormalized every step and the logarithms of the norms
    accumulated with weight 3^-n, so no overflow occurs.
    """
    s, t = complex(s), complex(t)
    if s == 0 or t == 0:
        raise DegenerateLift("the lift needs s·t ≠ 0")
    z, w = (s, t) if _sign(sign) > 0 else (t, s)
    norm = math.hypot(abs(z), abs(w))
    acc = math.log(norm)
    z, w = z / norm, w / norm
    weight = 1.0
    lam = fam.lam
    for _ in range(steps):
        z, w = _homogeneous_step(lam, s, t, z, w)
        weight /= 3.0
        norm = math.hypot(abs(z), abs(w))
        acc += weight * math.log(norm)
        z, w = z / norm, w / norm
    return acc


def _local_minima(r: np.ndarray, threshold: float) -> list:
    pad = np.pad(r, 1, constant_values=np.inf)
    core = pad[1:-1, 1:-1]
    is_min = np.ones_like(core, dtype=bool)
    for dy in (-1, 0, 1):
        for dx in (-1, 0, 1):
            if dy == 0 and dx == 0:
                continue
            is_min &= core <= pad[1 + dy:1 + dy + core.shape[0], 1 + dx:1 + dx + core.shape[1]]
    is_min &= core < threshold
    return list(zip(*np.nonzero(is_min)))


def _return_pairs(c: np.ndarray, z: complex, depth: int, threshold: float) -> list:
    """Pairs (j, k) with a relative close return below ``threshold``, earliest k first."""
    orbit = [z]
    for _ in range(depth):
        z = complex(_kernels.horner_value(c, z))
        orbit.append(z)
    pairs = []
    for k in range(1, depth + 1):
        for j in range(k):
            if abs(orbit[k] - orbit[j]) / (1.0 + abs(orbit[j])) < threshold:
                pairs.append((j, k))
    return pairs


def per1_pcf_search(fam: Per1Family, w: Window | None = None, grid=None, refine: bool = True,
                    depth: int = 8, threshold: float = 0.25, tol: float = 1e-9,
                    slice_nmax: int = 5, max_pairs: int = 4) -> RootSet:
    """Parameters s where both critical points are numerically preperiodic.

    For λ ≠ 0 a close-return residual is scanned over the window, its local
    minima are Newton-refined on the c₊ return equation, and every survivor
    is certified by the orbit verdict for both c₊ and c₋.  For λ = 0 the
    search runs on the polynomial slice z³ - 3t²z + t + 2t³ (c₁ = t is fixed)
    and returns slice parameters t.
    """
    if fam.lam == 0:
        slice_fam = load_fixture("per1_0.json")
        return find_pcf(slice_fam, all_drivers(1, slice_nmax))
    if w is None:
        w = Window(-2.0, 2.0, -0.5, 0.5, 800, 200)
    if grid is not None:
        nx, ny = (grid, max(2, int(round(grid * (w.im_max - w.im_min) / (w.re_max - w.re_min))))) \
            if isinstance(grid, int) else grid
        w = Window(w.re_min, w.re_max, w.im_min, w.im_max, nx, ny)
    lam = fam.lam
    res = _kernels.per1_return_grid(lam, w.re_axis, w.im_axis, depth)
    found = []
    for iy, ix in _local_minima(res, threshold):
        s_pix = complex(w.re_axis[ix], w.im_axis[iy])
        if not refine:
            tries = [s_pix]
        else:
            pairs = _return_pairs(fam.coeffs(s_pix), s_pix, depth, threshold)[:max_pairs]
            tries = (complex(_kernels.per1_orbit_newton(lam, s_pix, j, k, 50)) for j, k in pairs)
        for s in tries:
            if not (np.isfinite(s) and s != 0 and w.contains(s)):
                continue
            c = fam.coeffs(s)
            vp = orbit_verdict(c, s, tol)
            vm = orbit_verdict(c, 1.0 / s, tol)
            if vp.status == "preperiodic" and vm.status == "preperiodic":
                found.append((s, vp, vm))
                break
    roots = []
    if found:
        vals = np.array([f[0] for f in found])
        labels = _cluster(vals, CLUSTER_TOL)
        for lab in np.unique(labels):
            i = int(np.nonzero(labels == lab)[0][0])
            v, vp, vm = found[i]
            c = fam.coeffs(v)
            resid = max(_return_residual(c, v, depth), _return_residual(c, 1.0 / v, depth))
            roots.append((Root(complex(v), 1, resid),
                          f"s={v:.15g}: c+ preperiod {vp.preperiod} period {vp.period}, "
                          f"c- preperiod {vm.preperiod} period {vm.period}"))
    roots.sort(key=lambda r: (round(r[0].value.real, 12), round(r[0].value.imag, 12)))
    return RootSet(tuple(r for r, _ in roots), f"per1 lambda={lam:g} grid {w.nx}x{w.ny}",
                   tuple(line for _, line in roots))


def _return_residual(c, z, depth):
    return float(_kernels.close_return(c, complex(z), depth))
