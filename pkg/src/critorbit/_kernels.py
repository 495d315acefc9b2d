"""Compiled inner loops: escape iteration, raster fills and Aberth sweeps.

Polynomials are passed as ascending complex coefficient arrays.  Everything
here is a pure function of its arguments; raster kernels parallelize over
rows and write each pixel exactly once, so results do not depend on the
thread count.
"""
import math
import os

import numba
import numpy as np
from numba import njit, prange

if "NUMBA_THREADING_LAYER" not in os.environ:
    # an outdated system TBB makes numba warn on every import; prefer OpenMP
    try:
        from numba.np.ufunc import omppool  # noqa: F401
        numba.config.THREADING_LAYER = "omp"
    except ImportError:
        pass

# Natural-log magnitude budget for an iterate before the next map application
# (keeps |z|^d well inside double range).
_LOG_BUDGET = 600.0
_EXTRA_STEPS = 200


@njit(cache=True)
def horner(c, z):
    p = c[len(c) - 1]
    dp = 0j
    for j in range(len(c) - 2, -1, -1):
        dp = dp * z + p
        p = p * z + c[j]
    return p, dp


@njit(cache=True)
def horner_value(c, z):
    p = c[len(c) - 1]
    for j in range(len(c) - 2, -1, -1):
        p = p * z + c[j]
    return p


@njit(cache=True)
def escape(c, z, cap):
    """Escape rate of ``z`` under the polynomial ``c``.

    Returns ``(g, err, iterations, escaped)``.  Non-monic maps are handled by
    adding ``log|lead| / (d - 1)``, which is the escape rate offset of the
    monic conjugate.
    """
    d = len(c) - 1
    lead = abs(c[d])
    rest = 0.0
    for j in range(d):
        rest += abs(c[j])
    crel = rest / lead
    radius = max(1.0, (1.0 + rest) / lead)
    log_lead = math.log(lead) / (d - 1)
    n = 0
    while n < cap and abs(z) <= radius:
        z = horner_value(c, z)
        n += 1
    if not (abs(z) > radius):
        return 0.0, 0.0, cap, False
    budget = _LOG_BUDGET / d
    k = 0
    while math.log(abs(z)) < budget and k < _EXTRA_STEPS:
        z = horner_value(c, z)
        n += 1
        k += 1
    az = abs(z)
    scale = float(d) ** (-n)
    g = (math.log(az) + log_lead) * scale
    if crel <= 0.5 * az:
        err = 2.0 * crel / az * scale
    else:
        err = (math.log(2.0) + math.log(1.0 + crel / radius)) * scale
    if g <= 0.0:
        # only possible for absurd coefficient scales; keep the invariant
        g = err if err > 0.0 else 1e-300
    return g, err, n, True


@njit(cache=True)
def _tpoly_vals(T, t):
    out = np.empty(T.shape[0], dtype=np.complex128)
    for j in range(T.shape[0]):
        out[j] = horner_value(T[j], t)
    return out


@njit(parallel=True, cache=True)
def family_escape_grid(T, A, re_axis, im_axis, cap):
    """Escape rate of the marked point ``A(t)`` over a pixel grid.

    ``T[j]`` holds the t-coefficients of the z^j coefficient.  Output is
    indexed ``[iy, ix]`` with ``iy = 0`` at ``im_axis[0]``.
    """
    ny = im_axis.shape[0]
    nx = re_axis.shape[0]
    out = np.zeros((ny, nx))
    for iy in prange(ny):
        for ix in range(nx):
            t = complex(re_axis[ix], im_axis[iy])
            c = _tpoly_vals(T, t)
            z0 = horner_value(A, t)
            g, err, n, esc = escape(c, z0, cap)
            out[iy, ix] = g
    return out


@njit(cache=True)
def family_escape_points(T, A, ts, cap):
    out = np.zeros(ts.shape[0])
    for i in range(ts.shape[0]):
        c = _tpoly_vals(T, ts[i])
        g, err, n, esc = escape(c, horner_value(A, ts[i]), cap)
        out[i] = g
    return out


@njit(cache=True)
def per1_coeffs(lam, s):
    c = np.empty(4, dtype=np.complex128)
    c[0] = 0j
    c[1] = lam
    c[2] = -0.5 * lam * (s + 1.0 / s)
    c[3] = lam / 3.0
    return c


@njit(parallel=True, cache=True)
def per1_escape_grid(lam, re_axis, im_axis, sign, cap):
    """G+ (sign > 0) or G- (sign < 0) over a grid; s = 0 pixels are NaN."""
    ny = im_axis.shape[0]
    nx = re_axis.shape[0]
    out = np.zeros((ny, nx))
    for iy in prange(ny):
        for ix in range(nx):
            s = complex(re_axis[ix], im_axis[iy])
            if s == 0:
                out[iy, ix] = np.nan
                continue
            c = per1_coeffs(lam, s)
            z0 = s if sign > 0 else 1.0 / s
            g, err, n, esc = escape(c, z0, cap)
            out[iy, ix] = g
    return out


@njit(cache=True)
def close_return(c, z, depth):
    """Smallest relative near-return |z_{m+p} - z_m| / (1 + |z_m|) for m + p <= depth."""
    orbit = np.empty(depth + 1, dtype=np.complex128)
    orbit[0] = z
    for k in range(1, depth + 1):
        z = horner_value(c, z)
        if not (abs(z) < 1e8):
            return np.inf
        orbit[k] = z
    best = np.inf
    for m in range(depth):
        for k in range(m + 1, depth + 1):
            r = abs(orbit[k] - orbit[m]) / (1.0 + abs(orbit[m]))
            if r < best:
                best = r
    return best


@njit(parallel=True, cache=True)
def per1_return_grid(lam, re_axis, im_axis, depth):
    """Max over both critical points of the close-return residual."""
    ny = im_axis.shape[0]
    nx = re_axis.shape[0]
    out = np.full((ny, nx), np.inf)
    for iy in prange(ny):
        for ix in range(nx):
            s = complex(re_axis[ix], im_axis[iy])
            if s == 0:
                continue
            c = per1_coeffs(lam, s)
            r1 = close_return(c, s, depth)
            r2 = close_return(c, 1.0 / s, depth)
            out[iy, ix] = max(r1, r2)
    return out


@njit(cache=True)
def newton_ratio(c, z):
    """p(z) / p'(z), evaluated through the reversed polynomial when |z| > 1."""
    n = len(c) - 1
    if abs(z) <= 1.0:
        p, dp = horner(c, z)
        if dp == 0:
            if p == 0:
                return 0j
            return p / 1e-300
        return p / dp
    w = 1.0 / z
    # reversed polynomial q(w) = sum c_j w^(n-j)
    q = c[0]
    dq = 0j
    for j in range(1, n + 1):
        dq = dq * w + q
        q = q * w + c[j]
    den = n * q - w * dq
    if den == 0:
        if q == 0:
            return 0j
        return z * q / 1e-300
    return z * q / den


@njit(cache=True)
def _aberth_step(z, ratios, active, tol):
    n = z.shape[0]
    new = z.copy()
    moved = 0.0
    for i in range(n):
        if not active[i]:
            continue
        r = ratios[i]
        s = 0j
        for j in range(n):
            if j != i:
                diff = z[i] - z[j]
                if diff != 0:
                    s += 1.0 / diff
        den = 1.0 - r * s
        w = r / den if den != 0 else r
        new[i] = z[i] - w
        step = abs(w)
        if step > moved:
            moved = step
        if step <= tol * (1.0 + abs(z[i])):
            active[i] = False
    return new, moved


@njit(cache=True)
def aberth(c, z, maxiter, tol):
    """Simultaneous Aberth-Ehrlich iteration with Jacobi (all-at-once) updates."""
    n = z.shape[0]
    active = np.ones(n, dtype=np.bool_)
    ratios = np.zeros(n, dtype=np.complex128)
    it = 0
    for it in range(maxiter):
        for i in range(n):
            if active[i]:
                ratios[i] = newton_ratio(c, z[i])
                if ratios[i] == 0:
                    active[i] = False
        z, moved = _aberth_step(z, ratios, active, tol)
        if not active.any():
            break
    return z, active, it + 1


@njit(cache=True)
def _orbit_ratio(T, dT, A, dA, d, n, m, t):
    """Newton ratio of t -> f_t^n(a(t)) - f_t^m(a(t)) by forward differentiation."""
    nz = T.shape[0]
    c = np.empty(nz, dtype=np.complex128)
    dc = np.empty(nz, dtype=np.complex128)
    for j in range(nz):
        c[j] = horner_value(T[j], t)
        dc[j] = horner_value(dT[j], t)
    z = horner_value(A, t)
    dz = horner_value(dA, t)
    # m < 0 selects the equation f^n(a) = 0
    zm = z if m == 0 else 0j
    dzm = dz if m == 0 else 0j
    for k in range(1, n + 1):
        if abs(z) > 1e30:
            # far outside: the log-derivative multiplies by d per step
            ld = dz / z
            return 1.0 / (ld * float(d) ** (n - k + 1))
        fz = c[nz - 1]
        fzz = 0j
        ft = dc[nz - 1]
        for j in range(nz - 2, -1, -1):
            fzz = fzz * z + fz
            fz = fz * z + c[j]
            ft = ft * z + dc[j]
        dz = fzz * dz + ft
        z = fz
        if k == m:
            zm = z
            dzm = dz
    p = z - zm
    dp = dz - dzm
    if dp == 0:
        return 0j if p == 0 else p / 1e-300
    return p / dp


@njit(cache=True)
def aberth_orbit(T, dT, A, dA, d, n, m, z, maxiter, tol):
    """Aberth iteration for the roots of f^n(a) - f^m(a) without expanding it."""
    npts = z.shape[0]
    active = np.ones(npts, dtype=np.bool_)
    ratios = np.zeros(npts, dtype=np.complex128)
    it = 0
    for it in range(maxiter):
        for i in range(npts):
            if active[i]:
                ratios[i] = _orbit_ratio(T, dT, A, dA, d, n, m, z[i])
                if ratios[i] == 0:
                    active[i] = False
        z, moved = _aberth_step(z, ratios, active, tol)
        if not active.any():
            break
    return z, active, it + 1


@njit(cache=True)
def orbit_residual(T, A, n, m, t):
    nz = T.shape[0]
    c = np.empty(nz, dtype=np.complex128)
    for j in range(nz):
        c[j] = horner_value(T[j], t)
    z = horner_value(A, t)
    zm = z if m == 0 else 0j
    scale = 1.0
    for k in range(1, n + 1):
        z = horner_value(c, z)
        if abs(z) > scale:
            scale = abs(z)
        if k == m:
            zm = z
    return abs(z - zm), scale


@njit(cache=True)
def orbit_newton(T, dT, A, dA, d, n, m, t, mult, steps):
    """Newton polish of a root of f^n(a) - f^m(a) with known multiplicity."""
    for _ in range(steps):
        r = _orbit_ratio(T, dT, A, dA, d, n, m, t)
        step = mult * r
        if not (abs(step) < 1.0):
            break
        t = t - step
        if abs(step) <= 1e-16 * (1.0 + abs(t)):
            break
    return t


@njit(cache=True)
def aberth_orbit_mult(T, dT, A, dA, d, n, m, z, mult, maxiter, tol):
    """Aberth iteration on f^n(a) - f^m(a) for distinct roots of known multiplicity.

    Each approximation z_i stands for a root of multiplicity mult[i]; the
    correction is mult_i / (g'/g - Σ_j mult_j / (z_i - z_j)).
    """
    npts = z.shape[0]
    active = np.ones(npts, dtype=np.bool_)
    it = 0
    for it in range(maxiter):
        new = z.copy()
        for i in range(npts):
            if not active[i]:
                continue
            r = _orbit_ratio(T, dT, A, dA, d, n, m, z[i])
            if r == 0:
                active[i] = False
                continue
            s = 0j
            for j in range(npts):
                if j != i:
                    diff = z[i] - z[j]
                    if diff != 0:
                        s += mult[j] / diff
            den = 1.0 - r * s
            w = mult[i] * r / den if den != 0 else mult[i] * r
            new[i] = z[i] - w
            if abs(w) <= tol * (1.0 + abs(z[i])):
                active[i] = False
        z = new
        if not active.any():
            break
    return z, active, it + 1


@njit(cache=True)
def per1_orbit_newton(lam, s, j, k, steps):
    """Newton on s for f_s^k(s) = f_s^j(s), differentiating the orbit in s."""
    for _ in range(steps):
        c = per1_coeffs(lam, s)
        ds_c2 = -0.5 * lam * (1.0 - 1.0 / (s * s))
        z = s
        dz = 1.0 + 0j
        zj = z
        dzj = dz
        for n in range(1, k + 1):
            fz, fzz = horner(c, z)
            dz = fzz * dz + ds_c2 * z * z
            z = fz
            if n == j:
                zj = z
                dzj = dz
        g = z - zj
        dg = dz - dzj
        if dg == 0:
            break
        step = g / dg
        if not (abs(step) < 0.1):
            break
        s = s - step
        if abs(step) <= 1e-16 * (1.0 + abs(s)):
            break
    return s
