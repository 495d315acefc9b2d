"""Escape rates, critical escape maxima, Robin constants and Böttcher values."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _kernels
from .errors import NotActive, OutsideDomain
from .poly_core import Family, TPoly, numeric_critical_points

SCALAR_CAP = 2048
RASTER_CAP = 512
ROBIN_RADII = (1e3, 1e4, 1e5)
RING_SIZE = 16
DOMAIN_MARGIN = 1e-6


@dataclass(frozen=True)
class EscapeValue:
    g: float
    err: float
    iterations_used: int
    escaped: bool


@dataclass(frozen=True)
class RobinEstimate:
    gamma: float
    q: Fraction
    samples: tuple  # ((radius, ring mean), ...)
    spread: float


def coeff_array(p: TPoly) -> np.ndarray:
    c = p.coeffs
    return c if len(c) else np.zeros(1, dtype=np.complex128)


def escape_value(coeffs, z0: complex, cap: int = SCALAR_CAP) -> EscapeValue:
    """Escape rate of ``z0`` under the polynomial with ascending coefficients ``coeffs``."""
    if cap < 1:
        raise ValueError("cap must be >= 1")
    g, err, n, esc = _kernels.escape(np.asarray(coeffs, dtype=np.complex128), complex(z0), int(cap))
    return EscapeValue(float(g), float(err), int(n), bool(esc))


def escape_rate(fam: Family, a: TPoly, t: complex, cap: int = SCALAR_CAP) -> EscapeValue:
    t = complex(t)
    return escape_value(fam.f.coeffs_at(t), complex(a(t)), cap)


def escape_rates(fam: Family, a: TPoly, ts, cap: int = SCALAR_CAP) -> np.ndarray:
    """Vectorized ``escape_rate(...).g`` over an array of parameters."""
    ts = np.asarray(ts, dtype=np.complex128)
    flat = _kernels.family_escape_points(fam.matrix, coeff_array(a), ts.ravel(), int(cap))
    return flat.reshape(ts.shape)


def green(fam: Family, t: complex, z: complex, cap: int = SCALAR_CAP) -> EscapeValue:
    """G_t(z) for a free dynamical point z."""
    return escape_value(fam.f.coeffs_at(complex(t)), complex(z), cap)


def max_critical_escape(fam: Family, t: complex, cap: int = SCALAR_CAP) -> float:
    c = fam.f.coeffs_at(complex(t))
    return max(escape_value(c, z, cap).g for z in numeric_critical_points(fam, t))


def ring_points(radius: float, n: int = RING_SIZE) -> np.ndarray:
    """``n`` equally spaced points on |t| = radius, offset by half a step from the real axis."""
    return radius * np.exp(2j * np.pi * (np.arange(n) + 0.5) / n)


def ring_average(func, radii=ROBIN_RADII, n: int = RING_SIZE):
    """Mean of ``func`` over each ring; returns ``(ring means, last ring values)``.

    Averaging over ``n`` equally spaced arguments cancels every term ``t^-k``
    with ``0 < k < n`` in an expansion of a harmonic function at infinity,
    which is what makes small rings usable for constant-term extraction.
    """
    means, last = [], None
    for r in radii:
        vals = np.array([func(t) for t in ring_points(r, n)], dtype=float)
        means.append((float(r), float(vals.mean())))
        last = vals
    return means, last


def robin_from_evaluator(g_eval, q, radii=ROBIN_RADII, n: int = RING_SIZE) -> RobinEstimate:
    """Constant term of ``g_eval(t) - q log|t|`` at infinity from ring averages."""
    q = Fraction(q)
    if q <= 0:
        raise NotActive(f"growth exponent must be positive, got {q}")
    qf = float(q)
    means, last = ring_average(lambda t: g_eval(t) - qf * math.log(abs(t)), radii, n)
    gamma = float(np.mean([m for _, m in means]))
    return RobinEstimate(gamma, q, tuple(means), float(last.max() - last.min()))


def robin_constant(fam: Family, a: TPoly, q, radii=ROBIN_RADII, n: int = RING_SIZE,
                   cap: int = SCALAR_CAP) -> RobinEstimate:
    return robin_from_evaluator(lambda t: escape_rate(fam, a, t, cap).g, q, radii, n)


def _normalized_step(c: np.ndarray, z: complex) -> complex:
    """f(z) / z^d for monic f, evaluated in w = 1/z to stay finite."""
    w = 1.0 / z
    d = len(c) - 1
    # F(w) = sum_j c_j w^(d-j), Horner from the constant coefficient
    acc = c[0]
    for j in range(1, d + 1):
        acc = acc * w + c[j]
    return acc


def bottcher_value(fam: Family, t: complex, z: complex, cap: int = SCALAR_CAP,
                   margin: float = DOMAIN_MARGIN) -> complex:
    """φ_t(z) as the orbit product z·Π (f(z_n)/z_n^d)^(1/d^(n+1)), principal branches."""
    t, z = complex(t), complex(z)
    c = fam.f.coeffs_at(t)
    g = escape_value(c, z, cap).g
    if not g > max_critical_escape(fam, t, cap) + margin:
        raise OutsideDomain(f"G_t(z) = {g:.3g} does not exceed the critical escape rate")
    d = fam.d
    phi = z
    zn = z
    for n in range(cap):
        F = _normalized_step(c, zn)
        phi *= cmath.exp(cmath.log(F) / d ** (n + 1))
        if abs(F - 1.0) < 1e-18:
            break
        zn = zn ** d * F
        if not cmath.isfinite(zn):
            break
    return phi
