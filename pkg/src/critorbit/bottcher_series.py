"""Laurent expansion of the Böttcher coordinate at infinity.

Writing φ_t(z) = z·U(1/z) with U(w) = 1 + Σ g_s(t) w^(s+1) and
f_t(z) = z^d·F(1/z), the conjugacy φ∘f = φ^d becomes the power-series identity

    F(w) · U(w^d / F(w)) = U(w)^d.

The coefficient of w^(s+1) on the right is d·g_s plus terms in g_1..g_(s-1);
on the left g_s only enters at order d(s+1).  So the g_s are solved one at a
time and are polynomials in t whenever the family is.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import DegreeCapExceeded, TruncationInsufficient
from .poly_core import DEFAULT_DEGREE_CAP, BiPoly, Family, TPoly, iterate_symbolic

DEFAULT_S_MAX = 12

# truncated series helpers: a series is a list of TPoly, index = power of w


def _zero():
    return TPoly([])


def _smul(a, b, n):
    out = [_zero() for _ in range(n + 1)]
    for i, x in enumerate(a[: n + 1]):
        if x.is_zero():
            continue
        for j, y in enumerate(b[: n + 1 - i]):
            if not y.is_zero():
                out[i + j] = out[i + j] + x * y
    return out


def _spow(a, k, n):
    out = [TPoly([1])] + [_zero() for _ in range(n)]
    for _ in range(k):
        out = _smul(out, a, n)
    return out


def _sinv(a, n):
    """Inverse of a series with constant term 1."""
    inv = [TPoly([1])] + [_zero() for _ in range(n)]
    for k in range(1, n + 1):
        acc = _zero()
        for j in range(1, k + 1):
            if j < len(a) and not a[j].is_zero():
                acc = acc + a[j] * inv[k - j]
        inv[k] = -acc
    return inv


def _f_series(fam: Family, n):
    """F(w) = f(z)/z^d as a series in w = 1/z."""
    d = fam.d
    zc = fam.f.zcoeffs
    return [zc[d - j] if j <= d else _zero() for j in range(n + 1)]


@dataclass(frozen=True)
class TruncatedBottcher:
    d: int
    S_max: int
    g: tuple  # g[s-1] is the coefficient of z^-s

    @property
    def exact(self) -> bool:
        return all(x.exact for x in self.g)

    def u_series(self):
        """U(w) = 1 + Σ g_s w^(s+1), known exactly through w^(S_max+1)."""
        return [TPoly([1]), _zero()] + list(self.g)

    def evaluate(self, t: complex, z: complex) -> complex:
        w = 1.0 / complex(z)
        acc = 0j
        for gs in reversed(self.g):
            acc = (acc + gs(complex(t))) * w
        return complex(z) + acc

    def degree_bound_holds(self, m: int) -> bool:
        return all(gs.degree <= m * (s + 1) for s, gs in enumerate(self.g, start=1))

    def to_json(self) -> dict:
        return {"d": self.d, "S_max": self.S_max, "g": [gs.to_json() for gs in self.g]}

    def dumps(self) -> str:
        return json.dumps(self.to_json())

    @classmethod
    def from_json(cls, doc) -> "TruncatedBottcher":
        return cls(int(doc.get("d", 0)), int(doc["S_max"]),
                   tuple(TPoly.from_json(c) for c in doc["g"]))


def bottcher_series(fam: Family, S_max: int = DEFAULT_S_MAX,
                    cap: int = DEFAULT_DEGREE_CAP) -> TruncatedBottcher:
    if S_max < 1:
        raise ValueError("S_max must be >= 1")
    d = fam.d
    N = S_max + 1
    F = _f_series(fam, N)
    # G = w^d / F and its powers, which carry the g_r on the left-hand side
    Finv = _sinv(F, N)
    G = [_zero()] * d + Finv[: N + 1 - d] if d <= N else [_zero()] * (N + 1)
    G = (G + [_zero()] * (N + 1))[: N + 1]
    Gpow = {1: G}
    g = []
    for s in range(1, S_max + 1):
        order = s + 1
        U = [TPoly([1]), _zero()] + g + [_zero()]
        rhs = _spow(U, d, order)[order]
        lhs_inner = [TPoly([1])] + [_zero() for _ in range(order)]
        for r, gr in enumerate(g, start=1):
            if d * (r + 1) > order:
                break
            if r + 1 not in Gpow:
                Gpow[r + 1] = _smul(Gpow[r], G, N)
            for j in range(order + 1):
                lhs_inner[j] = lhs_inner[j] + gr * Gpow[r + 1][j]
        lhs = _smul(F, lhs_inner, order)[order]
        gs = (lhs - rhs).div_scalar(d)
        if gs.degree > cap:
            raise DegreeCapExceeded(f"g_{s} has degree {gs.degree} > {cap}")
        g.append(gs)
    return TruncatedBottcher(d, S_max, tuple(g))


@dataclass(frozen=True)
class PowerSplit:
    k: int
    P: BiPoly
    b: tuple  # b[s-1] is the coefficient of z^-s in φ^k

    def degree_bound_holds(self, m: int) -> bool:
        return all(bs.degree <= m * (s + self.k) for s, bs in enumerate(self.b, start=1))


def power_split(tb: TruncatedBottcher, k: int) -> PowerSplit:
    """φ^k = P(z) + Σ b_s z^-s with the tail known for s ≤ S_max + 1 - k."""
    if k < 1:
        raise ValueError("k must be >= 1")
    n_known = tb.S_max + 1  # U is exact through this power of w
    if k > n_known:
        raise TruncationInsufficient(f"P^{k} needs S_max >= {k - 1}, have {tb.S_max}")
    Uk = _spow(tb.u_series(), k, n_known)
    # z^k U^k: coefficient of z^(k-j) is Uk[j]
    P = BiPoly([Uk[k - i] for i in range(k + 1)])
    b = tuple(Uk[k + s] for s in range(1, n_known - k + 1))
    return PowerSplit(k, P, b)


@dataclass(frozen=True)
class RelationCheck:
    verdicts: tuple  # verdicts[n] for n = 0..n_max
    first_hold: int | None  # least n from which the identity holds through n_max


def _scalar_tpoly(x):
    x = complex(x)
    if x.real.is_integer() and x.imag.is_integer():
        return TPoly([(int(x.real), int(x.imag))])
    return TPoly([x])


def verify_poly_relation(fam: Family, a1: TPoly, a2: TPoly, k1: int, k2: int, zeta,
                         n_max: int, rtol: float = 1e-8) -> RelationCheck:
    """Check P^k2(f^n(a2)) = ζ^(d^n) P^k1(f^n(a1)) as t-polynomials for n = 0..n_max."""
    m1, m2 = a1.degree, a2.degree
    if k1 * m1 != k2 * m2:
        raise ValueError(f"k1*m1 = {k1 * m1} differs from k2*m2 = {k2 * m2}")
    tb = bottcher_series(fam, max(k1, k2, 1))
    P1, P2 = power_split(tb, k1).P, power_split(tb, k2).P
    zt = zeta if isinstance(zeta, TPoly) else _scalar_tpoly(zeta)
    d = fam.d
    verdicts = []
    x1, x2 = a1, a2
    for n in range(n_max + 1):
        if n:
            x1 = iterate_symbolic(fam, x1, 1)
            x2 = iterate_symbolic(fam, x2, 1)
        for x, m in ((x1, m1), (x2, m2)):
            if x.effective_degree() != m * d ** n:
                raise ValueError(f"iterate degree {x.effective_degree()} != {m}*{d}^{n}; "
                                 "replace the marked points by later iterates")
        lhs = P2.compose_t(x2)
        rhs = (zt ** (d ** n)) * P1.compose_t(x1)
        ok = lhs == rhs if lhs.exact and rhs.exact else lhs.close(rhs, rtol)
        verdicts.append(bool(ok))
    first = None
    for n in range(n_max, -1, -1):
        if not verdicts[n]:
            break
        first = n
    return RelationCheck(tuple(verdicts), first)


def series_decay(fam: Family, tb: TruncatedBottcher, t: complex, radii, arg: float = 0.7):
    """Slope of log|series - pointwise φ| against log|z| along a ray."""
    from .escape_green import bottcher_value

    xs, ys = [], []
    for r in radii:
        z = r * np.exp(1j * arg)
        diff = abs(tb.evaluate(t, z) - bottcher_value(fam, t, z))
        xs.append(np.log(r))
        ys.append(np.log(diff))
    slope = float(np.polyfit(xs, ys, 1)[0])
    return slope, np.array(ys)
