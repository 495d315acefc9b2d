"""Preperiodic parameter equations, their roots, and numerical preperiodicity verdicts."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import gmpy2
import numpy as np
from sklearn.cluster import DBSCAN

from . import _kernels
from .errors import ConvergenceFailure, DegreeCapExceeded, Inconclusive, ZeroPolynomial
from .escape_green import coeff_array
from .poly_core import (DEFAULT_DEGREE_CAP, Family, TPoly, classify_marked_point, float_roots,
                        iterates, projected_degree)

MAX_SOLVE_DEGREE = 4096
POLISH_BITS = 160
POLISH_MAX_DEGREE = 1024
CLUSTER_TOL = 1e-7
PREPERIODIC_TOL = 1e-8


@dataclass(frozen=True)
class Root:
    value: complex
    multiplicity: int
    residual: float


@dataclass(frozen=True)
class RootSet:
    roots: tuple
    source: str
    log: tuple = field(default=(), compare=False)

    @property
    def degree(self) -> int:
        return sum(r.multiplicity for r in self.roots)

    @property
    def values(self) -> np.ndarray:
        return np.array([r.value for r in self.roots], dtype=np.complex128)

    def __len__(self):
        return len(self.roots)

    def to_csv(self, path=None, comment: str = "") -> str:
        lines = [f"# {comment}"] if comment else []
        lines.append("re,im,multiplicity,residual,source")
        src = self.source.replace(",", ";")
        for r in self.roots:
            lines.append(f"{r.value.real:.17g},{r.value.imag:.17g},{r.multiplicity},"
                         f"{r.residual:.3e},{src}")
        text = "\n".join(lines) + "\n"
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text)
        return text


def preperiodic_equation(fam: Family, a: TPoly, n: int, m: int,
                         cap: int = DEFAULT_DEGREE_CAP) -> TPoly:
    """f^n(a(t)) - f^m(a(t)) as a t-polynomial."""
    if not n > m >= 0:
        raise ValueError("need n > m >= 0")
    its = iterates(fam, a, n, cap)
    return its[n] - its[m]


def _cluster(points: np.ndarray, tol: float) -> np.ndarray:
    """Connected-component labels at distance ``tol``."""
    if len(points) == 0:
        return np.zeros(0, dtype=int)
    X = np.column_stack([points.real, points.imag])
    return DBSCAN(eps=tol, min_samples=1).fit(X).labels_


def _residual(c: np.ndarray, r: complex) -> float:
    return float(abs(_kernels.horner_value(c, complex(r))))


def _backward_error(c, z):
    """|p(z)| / Σ|c_j||z|^j for mpc coefficients and points (object arrays)."""
    az = np.array([abs(x) for x in z], dtype=object)
    num = np.zeros(len(z), dtype=object)
    den = np.zeros(len(z), dtype=object)
    for cj in reversed(c):
        num = num * z + cj
        den = den * az + abs(cj)
    return np.array([float(abs(n) / d) if d else 0.0 for n, d in zip(num, den)])


def _polish(c, z0: np.ndarray, sweeps: int = 40):
    """Aberth sweeps in POLISH_BITS precision for a square-free polynomial.

    Expanded preperiodic equations have integer coefficients beyond 2^53 and
    roots clustered near the tip of the locus; double precision roots of such
    factors can be far off, so they are corrected against the exact
    coefficients ``c`` (ascending mpc).
    """
    n = len(z0)
    dc = [cj * j for j, cj in enumerate(c)][1:]
    z = np.array([gmpy2.mpc(complex(v)) for v in z0], dtype=object)
    eps = gmpy2.mpfr(2) ** (-(POLISH_BITS - 20))
    for _ in range(sweeps):
        p = np.zeros(n, dtype=object)
        for cj in reversed(c):
            p = p * z + cj
        dp = np.zeros(n, dtype=object)
        for cj in reversed(dc):
            dp = dp * z + cj
        step = np.empty(n, dtype=object)
        for i in range(n):
            ratio = p[i] / dp[i] if dp[i] != 0 else gmpy2.mpc(0)
            others = np.concatenate([z[:i], z[i + 1:]])
            s = sum(1 / (z[i] - others)) if len(others) else 0
            step[i] = ratio / (1 - ratio * s)
        z = z - step
        if max(abs(w) / (1 + abs(v)) for w, v in zip(step, z)) < eps:
            break
    return np.array([complex(v) for v in z], dtype=np.complex128), _backward_error(c, z)


def _sympy_factors(p: TPoly):
    """Square-free decomposition [(exact mpc coefficients ascending, multiplicity)] of an exact p."""
    import sympy

    t = sympy.Symbol("t")
    coeffs = [sympy.Rational(int(r.numerator), int(r.denominator))
              + sympy.I * sympy.Rational(int(i.numerator), int(i.denominator))
              for r, i in reversed(p.exact_coeffs())]
    gaussian = any(i != 0 for _, i in p.exact_coeffs())
    poly = sympy.Poly(coeffs, t, domain="QQ_I" if gaussian else "QQ")
    out = []
    for fac, mult in poly.sqf_list()[1]:
        c = [gmpy2.mpc(gmpy2.mpfr(gmpy2.mpq(int(sympy.re(x).p), int(sympy.re(x).q))),
                       gmpy2.mpfr(gmpy2.mpq(int(sympy.im(x).p), int(sympy.im(x).q))))
             for x in reversed(fac.all_coeffs())]
        out.append((c, int(mult)))
    return out


def solve_roots(p: TPoly, cluster_tol: float = CLUSTER_TOL) -> RootSet:
    """All roots of p with multiplicities.

    Exact polynomials are first split square-free so that repeated roots are
    found as simple roots of a factor, and each factor's roots are polished
    in extended precision against its exact coefficients (up to degree
    1024).  Floating input is solved directly and roots closer than
    ``cluster_tol`` are merged.  The residual is the relative backward error
    |p(r)| / Σ|p_j||r|^j.
    """
    if p.is_zero():
        raise ZeroPolynomial("the equation holds identically (persistent relation)")
    deg = p.degree
    if deg > MAX_SOLVE_DEGREE:
        raise DegreeCapExceeded(f"degree {deg} exceeds solver limit {MAX_SOLVE_DEGREE}")
    vals, mults, resid = [], [], []
    if p.exact:
        with gmpy2.context(gmpy2.get_context(), precision=POLISH_BITS):
            for c, mult in _sympy_factors(p):
                cf = np.array([complex(x) for x in c], dtype=np.complex128)
                polish = len(c) - 1 <= POLISH_MAX_DEGREE
                try:
                    rts = float_roots(cf, strict=not polish)
                except Exception as exc:
                    raise ConvergenceFailure(str(exc)) from exc
                if len(rts) and polish:
                    rts, back = _polish(c, rts)
                else:
                    back = [_relative_residual(cf, r) for r in rts]
                vals.extend(rts)
                mults.extend([mult] * len(rts))
                resid.extend(back)
    else:
        full = p.coeffs
        try:
            rts = float_roots(full)
        except Exception as exc:
            raise ConvergenceFailure(str(exc)) from exc
        labels = _cluster(rts, cluster_tol)
        for lab in np.unique(labels):
            grp = rts[labels == lab]
            vals.append(grp.mean())
            mults.append(len(grp))
            resid.append(_relative_residual(full, grp.mean()))
    roots = [Root(complex(v), int(k), float(r)) for v, k, r in zip(vals, mults, resid)]
    roots.sort(key=lambda r: (round(r.value.real, 12), round(r.value.imag, 12)))
    return RootSet(tuple(roots), "p(t)=0")


def _relative_residual(c: np.ndarray, r: complex) -> float:
    den = _kernels.horner_value(np.abs(c).astype(np.complex128), abs(r)).real
    return _residual(c, r) / den if den else 0.0


def residual_bound(p: TPoly, r: complex) -> float:
    return 1e-9 * (1.0 + abs(p.leading()) * max(1.0, abs(r)) ** p.degree)


def equation_label(n: int, m: int) -> str:
    return f"f^{n}(a)=f^{m}(a)"


def _orbit_arrays(fam: Family, a: TPoly):
    T = fam.matrix
    dT = np.zeros_like(T)
    if T.shape[1] > 1:
        dT[:, :-1] = T[:, 1:] * np.arange(1, T.shape[1])
    return T, dT, coeff_array(a), coeff_array(a.derivative())


def solve_preperiodic(fam: Family, a: TPoly, n: int, m: int, refine: bool = True,
                      maxiter: int = 500) -> RootSet:
    """Roots of f^n(a) = f^m(a) with multiplicities.

    The expanded equation supplies multiplicities and starting values; with
    ``refine`` the distinct roots are then corrected together by a
    multiplicity-aware Aberth iteration that evaluates the orbit directly.
    Expanded high-degree equations are badly conditioned in their
    coefficients, the orbit evaluation is not.
    """
    p = preperiodic_equation(fam, a, n, m)
    rs = solve_roots(p)
    roots = rs.roots
    if refine and roots:
        T, dT, A, dA = _orbit_arrays(fam, a)
        z0 = rs.values
        mult = np.array([r.multiplicity for r in roots], dtype=np.float64)
        z, active, _ = _kernels.aberth_orbit_mult(T, dT, A, dA, fam.d, n, m, z0, mult, maxiter, 1e-15)
        if not np.all(np.isfinite(z)):
            raise ConvergenceFailure("orbit Aberth iteration diverged")
        roots = tuple(Root(complex(v), r.multiplicity, _orbit_residual(T, A, n, m, v))
                      for v, r in zip(z, roots))
    return RootSet(roots, equation_label(n, m))


def _seed_radius(fam: Family, a: TPoly, n: int, m) -> float:
    """1.5 x the largest root modulus of a low-degree member of the same tower."""
    k = n
    while k > 1 and projected_degree(fam, a, k) > 64:
        k -= 1
    try:
        if m is None:
            p = iterates(fam, a, k)[k]
        else:
            p = preperiodic_equation(fam, a, k, min(m, k - 1))
        rs = solve_roots(p.to_float())
        return 1.5 * max(1.0, float(np.abs(rs.values).max()))
    except ZeroPolynomial:
        return 2.0


def _orbit_residual(T, A, n, m, r) -> float:
    """|f^n(a) - f^m(a)| at r relative to the orbit size (m = -1: target 0)."""
    res, scale = _kernels.orbit_residual(T, A, n, m, complex(r))
    return float(res / max(scale, 1.0))


def orbit_roots(fam: Family, a: TPoly, n: int, m: int | None = None, maxiter: int = 2000,
                tol: float = 1e-14) -> RootSet:
    """Roots of f^n(a) = f^m(a), or of f^n(a) = 0 when ``m`` is None.

    Aberth iteration runs on the orbit itself, so the equation is never
    expanded and degrees whose coefficients overflow double precision are
    reachable.  Roots are reported as simple.
    """
    if m is not None and not n > m >= 0:
        raise ValueError("need n > m >= 0")
    D = projected_degree(fam, a, n)
    if D > 2 * MAX_SOLVE_DEGREE:
        raise DegreeCapExceeded(f"degree {D} too large")
    T, dT, A, dA = _orbit_arrays(fam, a)
    r0 = _seed_radius(fam, a, n, m)
    mk = -1 if m is None else m
    z0 = r0 * np.exp(2j * np.pi * (np.arange(D) + 0.25) / D)
    z, active, its = _kernels.aberth_orbit(T, dT, A, dA, fam.d, n, mk, z0.astype(np.complex128),
                                           maxiter, tol)
    if not np.all(np.isfinite(z)):
        raise ConvergenceFailure("orbit Aberth iteration diverged")
    roots = []
    for r in z:
        roots.append(Root(complex(r), 1, _orbit_residual(T, A, n, mk, r)))
    label = f"f^{n}(a)=0" if m is None else equation_label(n, m)
    return RootSet(tuple(roots), label, (f"sweeps={its}", f"stalled={int(active.sum())}"))


@dataclass(frozen=True)
class Verdict:
    status: str  # "preperiodic", "escaping" or "undecided"
    preperiod: int | None = None
    period: int | None = None
    iterations: int = 0

    def __eq__(self, other):
        if isinstance(other, str):
            return self.status == other
        return NotImplemented if not isinstance(other, Verdict) else (
            (self.status, self.preperiod, self.period) == (other.status, other.preperiod, other.period))

    __hash__ = None


def orbit_verdict(c: np.ndarray, z: complex, tol: float = PREPERIODIC_TOL,
                  orbit_cap: int = 200, period_cap: int = 12, radius: float | None = None) -> Verdict:
    """Classify the orbit of z under the polynomial with ascending coefficients c.

    A close return |z_k - z_(k-p)| <= tol·scale counts only when it is abrupt
    (the previous pair was not already close, which excludes geometric
    convergence to an attracting cycle) and persists for one more period.
    """
    c = np.asarray(c, dtype=np.complex128)
    if radius is None:
        lead = abs(c[-1])
        radius = max(1.0, (1.0 + float(np.abs(c[:-1]).sum())) / lead)
    loose = math.sqrt(tol)
    orbit = [complex(z)]
    scale = 1.0 + abs(z)
    for k in range(1, orbit_cap + 1):
        z = complex(_kernels.horner_value(c, z))
        if not abs(z) <= radius:
            return Verdict("escaping", iterations=k)
        orbit.append(z)
        scale = max(scale, 1.0 + abs(z))
        for p in range(1, min(period_cap, k) + 1):
            if abs(orbit[k] - orbit[k - p]) > tol * scale:
                continue
            if k - p > 0 and abs(orbit[k - 1] - orbit[k - 1 - p]) <= loose * scale:
                continue
            # stability over one further period
            w = z
            tail = orbit[-p:] if p else []
            ok = True
            for j in range(p):
                w = complex(_kernels.horner_value(c, w))
                if abs(w - tail[j]) > loose * scale:
                    ok = False
                    break
            if ok:
                return Verdict("preperiodic", k - p, p, k)
    return Verdict("undecided", iterations=orbit_cap)


def is_preperiodic_at(fam: Family, a: TPoly, t0: complex, tol: float = PREPERIODIC_TOL,
                      caps: tuple = (200, 12)) -> Verdict:
    """Numerical verdict for the marked orbit of ``a`` at the parameter t0."""
    t0 = complex(t0)
    return orbit_verdict(fam.f.coeffs_at(t0), complex(a(t0)), tol, caps[0], caps[1])


def all_drivers(a_index: int, n_max: int) -> list:
    return [(a_index, n, m) for n in range(1, n_max + 1) for m in range(n)]


def merge_rootsets(sets, tol: float = CLUSTER_TOL, source: str = "") -> RootSet:
    """Union of root sets with 1e-7 clustering; provenance is joined per cluster."""
    items = [(r, s.source) for s in sets for r in s.roots]
    if not items:
        return RootSet((), source)
    vals = np.array([r.value for r, _ in items])
    labels = _cluster(vals, tol)
    out = []
    for lab in np.unique(labels):
        idx = np.nonzero(labels == lab)[0]
        best = min(idx, key=lambda i: items[i][0].residual)
        r = items[best][0]
        srcs = sorted({items[i][1] for i in idx})
        out.append((Root(r.value, r.multiplicity, r.residual), "|".join(srcs)))
    out.sort(key=lambda x: (round(x[0].value.real, 12), round(x[0].value.imag, 12)))
    return RootSet(tuple(r for r, _ in out), source or "merged", tuple(s for _, s in out))


def find_pcf(fam: Family, driver, tol: float = PREPERIODIC_TOL, caps: tuple = (200, 12)) -> RootSet:
    """Roots of the driver equations whose every critical orbit is numerically preperiodic.

    ``driver`` is a list of ``(a_index, n, m)``.  Marked points that are
    passive (persistently preperiodic) need no check.  The log lists one line
    per candidate root with the verdict of each marked point.
    """
    passive = []
    for a in fam.marked:
        try:
            passive.append(not classify_marked_point(fam, a, 8).active)
        except Inconclusive:
            passive.append(False)
    candidates = []
    for ai, n, m in driver:
        try:
            candidates.append(RootSet(solve_preperiodic(fam, fam.marked[ai], n, m).roots,
                                      f"c{ai + 1}:" + equation_label(n, m)))
        except ZeroPolynomial:
            continue
    merged = merge_rootsets(candidates)
    keep, log = [], []
    for root, src in zip(merged.roots, merged.log):
        verdicts = []
        for j, a in enumerate(fam.marked):
            verdicts.append("passive" if passive[j] else is_preperiodic_at(fam, a, root.value, tol, caps).status)
        ok = all(v in ("passive", "preperiodic") for v in verdicts)
        log.append(f"t={root.value:.12g} from {src}: " + ", ".join(
            f"c{j + 1} {v}" for j, v in enumerate(verdicts)) + (" -> PCF" if ok else ""))
        if ok:
            keep.append(root)
    return RootSet(tuple(keep), "pcf[" + ",".join(f"c{ai + 1}:{n},{m}" for ai, n, m in driver) + "]",
                   tuple(log))
