"""Critical-orbit relations: commuting symmetries, iterate roots and the ζ invariant.

A relation has the shape f^n(c_j) = h(f^m(c_i)) with h commuting with some
iterate f^k.  Affine h = u z + v are found by coefficient matching, shared
iterates f = g^{∘e} by top-down matching, and the asymptotic ratio ζ of the
Böttcher images of two marked points is estimated on large parameter rings.

Marked points are numbered from 1 (c₁ = ``fam.marked[0]``).
"""
from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import NoIntegerRootDegree, NotInDomain, OutsideDomain
from .escape_green import bottcher_value
from .poly_core import BiPoly, Family, TPoly, iterate_symbolic

MAX_UNIT_ORDER = 64
ZETA_RADII = (1e3, 1e4)
ZETA_RING = 16
ROOT_OF_UNITY_TOL = 1e-5

# units with Gaussian-rational values, by order
_EXACT_UNITS = {1: 1, 2: -1, 4: (0, 1)}


def _unit(r: int, p: int = 1) -> complex:
    return cmath.exp(2j * math.pi * p / r)


def _divisors(n: int, cap: int):
    return [r for r in range(2, min(n, cap) + 1) if n % r == 0]


@dataclass(frozen=True)
class SymmetryCandidate:
    h: BiPoly
    k: int
    kind: str  # "affine" or "shared-iterate"
    unit: tuple | None = field(default=None, compare=False)  # (r, p): u = e^(2πi p/r)

    def __post_init__(self):
        if self.kind not in ("affine", "shared-iterate"):
            raise ValueError(f"unknown candidate kind {self.kind!r}")
        if self.k < 1:
            raise ValueError("k must be >= 1")

    def inverse(self) -> "SymmetryCandidate":
        """h⁻¹ for an affine candidate."""
        if self.kind != "affine":
            raise ValueError("only affine candidates are invertible here")
        v, u = self.h.zcoeffs[0] if self.h.zdegree >= 0 else TPoly([]), self.h.zcoeffs[1]
        if u.degree != 0:
            raise ValueError("u must be constant")
        uc = u.coeffs[0]
        unit = None
        if self.unit is not None:
            r, p = self.unit
            unit = (r, (-p) % r)
        if u.exact:
            inv = _exact_inverse(u)
            h = BiPoly([-(v * inv), inv])
        else:
            h = BiPoly([-(v.to_float() * (1 / uc)), TPoly([1 / uc])])
        return SymmetryCandidate(h, self.k, "affine", unit)

    def to_json(self) -> dict:
        doc = {"kind": self.kind, "k": self.k, "zcoeffs": self.h.to_json()}
        if self.unit is not None:
            doc["unit"] = list(self.unit)
        return doc

    def dumps(self) -> str:
        return json.dumps(self.to_json())

    @classmethod
    def from_json(cls, doc: dict, fam: Family) -> "SymmetryCandidate":
        """Load and re-verify against ``fam``; a failing candidate raises ValueError."""
        unit = tuple(doc["unit"]) if doc.get("unit") is not None else None
        cand = cls(BiPoly.from_json(doc["zcoeffs"]), int(doc["k"]), doc["kind"], unit)
        if not verify_candidate(fam, cand):
            raise ValueError("candidate does not commute with the stated iterate")
        return cand


def _exact_inverse(u: TPoly) -> TPoly:
    (re, im), = u.exact_coeffs()
    re, im = Fraction(int(re.numerator), int(re.denominator)), Fraction(int(im.numerator), int(im.denominator))
    n2 = re * re + im * im
    return TPoly([(re / n2, -im / n2)])


# exact verification ---------------------------------------------------------


def verify_candidate(fam: Family, cand: SymmetryCandidate, k: int | None = None) -> bool:
    """Exact check of h∘f^k = f^k∘h (k defaults to the candidate's own).

    For a rotation h = uz (u a primitive r-th root of unity, possibly outside
    Q(i) and so stored in floating point) F(uz) = u F(z) is decided from the
    exact coefficients of F = f^k: it holds iff r divides j - 1 for every j
    with F_j ≠ 0.  Other candidates are composed exactly.
    """
    return _commutes(fam.f.iterate(cand.k if k is None else k), cand)


def _is_rotation(cand: SymmetryCandidate) -> bool:
    h = cand.h
    if cand.kind != "affine" or cand.unit is None or h.zdegree != 1 or not h.zcoeffs[0].is_zero():
        return False
    r, p = cand.unit
    u = h.zcoeffs[1]
    return u.degree == 0 and math.gcd(r, p) == 1 and abs(u.coeffs[0] - _unit(r, p)) <= 1e-12


def _commutes(F: BiPoly, cand: SymmetryCandidate) -> bool:
    if F.exact and _is_rotation(cand):
        r = cand.unit[0]
        return all(c.is_zero() or (j - 1) % r == 0 for j, c in enumerate(F.zcoeffs))
    if cand.h.exact and F.exact:
        return F.compose(cand.h) == cand.h.compose(F)
    return False


def find_affine_symmetry(fam: Family, k_max: int = 3, tdeg_max: int = 8) -> list[SymmetryCandidate]:
    """Nontrivial h = u z + v commuting with some f^k, k ≤ k_max.

    Matching the two top coefficients of h∘F = F∘h for the monic centered
    F = f^k gives u^(d^k - 1) = 1 and v = 0, so u runs over one primitive
    root of each order r ≤ 64 dividing d^k - 1.  Each order is reported once,
    at its least k, and only after exact verification.  The identity is not
    reported.  ``tdeg_max`` bounds deg_t u, v and is met trivially.
    """
    found = []
    seen = set()
    for k in range(1, k_max + 1):
        F = None
        for r in _divisors(fam.d ** k - 1, MAX_UNIT_ORDER):
            if r in seen:
                continue
            u = TPoly([_EXACT_UNITS[r]]) if r in _EXACT_UNITS else TPoly([_unit(r)])
            cand = SymmetryCandidate(BiPoly([TPoly([]), u]), k, "affine", (r, 1))
            F = fam.f.iterate(k) if F is None else F
            if _commutes(F, cand):
                found.append(cand)
                seen.add(r)
    return found


def functional_root(fam: Family, e: int) -> SymmetryCandidate | None:
    """Monic centered g with g^{∘e} = f, or None when matching fails.

    Each lower coefficient of g enters the coefficient of z^(d-i) of g^{∘e}
    linearly with a constant factor, and nothing below it does, so the
    coefficients are solved from the top down; the result is then checked
    exactly against f.
    """
    if e < 2:
        raise ValueError("e must be >= 2")
    f = fam.f
    d = f.zdegree
    r = round(d ** (1.0 / e))
    for cand_r in (r - 1, r, r + 1):
        if cand_r >= 2 and cand_r ** e == d:
            r = cand_r
            break
    else:
        raise NoIntegerRootDegree(f"{d} is not an {e}-th power")
    lead = f.zcoeffs[d]
    if not (lead.degree == 0 and lead == 1):
        return None
    one, zero = TPoly([1]), TPoly([])
    b = [zero] * (r - 1)
    for i in range(2, r + 1):
        j = r - i

        def coeff(bj):
            trial = list(b)
            trial[j] = bj
            comp = BiPoly(trial + [zero, one]).iterate(e)
            zc = comp.zcoeffs
            return zc[d - i] if d - i < len(zc) else zero

        res0 = coeff(zero)
        slope = coeff(one) - res0
        if slope.degree != 0:
            return None
        target = f.zcoeffs[d - i] if d - i < len(f.zcoeffs) else zero
        sc = slope.exact_coeffs()[0] if slope.exact else slope.coeffs[0]
        if slope.exact:
            re, im = (Fraction(int(x.numerator), int(x.denominator)) for x in sc)
            n2 = re * re + im * im
            b[j] = (target - res0) * TPoly([(re / n2, -im / n2)])
        else:
            b[j] = (target - res0).to_float() * TPoly([1 / sc])
    g = BiPoly(b + [zero, one])
    comp = g.iterate(e)
    if not (comp == f if comp.exact and f.exact else comp.close(f)):
        return None
    return SymmetryCandidate(g, 1, "shared-iterate")


def check_orbit_relation(fam: Family, h: SymmetryCandidate, i: int, j: int, n: int, m: int,
                         rtol: float = 1e-8) -> bool:
    """f^n(c_j) = h(f^m(c_i)) as t-polynomials (1-based marked-point indices)."""
    ci, cj = fam.marked[i - 1], fam.marked[j - 1]
    lhs = iterate_symbolic(fam, cj, n)
    rhs = h.h.compose_t(iterate_symbolic(fam, ci, m))
    if lhs.exact and rhs.exact:
        return lhs == rhs
    return lhs.close(rhs, rtol)


# ζ invariant ---------------------------------------------------------------


@dataclass(frozen=True)
class ZetaEstimate:
    zeta: complex
    k1: int
    k2: int
    m1: int
    m2: int
    modulus_dev: float
    root_of_unity_order: int | None

    def to_json(self) -> dict:
        return {"zeta": [self.zeta.real, self.zeta.imag], "k1": self.k1, "k2": self.k2,
                "m1": self.m1, "m2": self.m2, "modulus_dev": self.modulus_dev,
                "root_of_unity_order": self.root_of_unity_order}


def _ring_ratio(fam: Family, a: TPoly, m: int, radius: float) -> complex:
    vals = []
    for j in range(ZETA_RING):
        t = radius * cmath.exp(2j * math.pi * (j + 0.5) / ZETA_RING)
        try:
            phi = bottcher_value(fam, t, a(t))
        except OutsideDomain as exc:
            raise NotInDomain(f"a(t) is outside the Böttcher domain at t = {t:.3g}") from exc
        vals.append(cmath.exp(cmath.log(phi) - m * cmath.log(t)))
    vals.sort(key=abs)
    trimmed = vals[1:-1]  # drop the smallest and largest modulus
    return sum(trimmed) / len(trimmed)


def _leading_ratio(fam: Family, a: TPoly, m: int) -> complex:
    """Richardson step on two rings, assuming an O(1/|t|) remainder."""
    r1, r2 = ZETA_RADII
    v1, v2 = _ring_ratio(fam, a, m, r1), _ring_ratio(fam, a, m, r2)
    q = r2 / r1
    return (q * v2 - v1) / (q - 1)


def root_of_unity_order(z: complex, max_order: int = MAX_UNIT_ORDER,
                        tol: float = ROOT_OF_UNITY_TOL) -> int | None:
    for r in range(1, max_order + 1):
        if abs(z ** r - 1) <= tol:
            return r
    return None


def estimate_zeta(fam: Family, a1: TPoly, a2: TPoly) -> ZetaEstimate:
    m1, m2 = a1.effective_degree(), a2.effective_degree()
    if m1 < 1 or m2 < 1:
        raise ValueError("marked points must have positive t-degree")
    lcm = m1 * m2 // math.gcd(m1, m2)
    k1, k2 = lcm // m1, lcm // m2
    z1 = _leading_ratio(fam, a1, m1)
    z2 = _leading_ratio(fam, a2, m2)
    zeta = z2 ** k2 / z1 ** k1
    return ZetaEstimate(complex(zeta), k1, k2, m1, m2, abs(abs(zeta) - 1.0),
                        root_of_unity_order(zeta))


def composition_closure(fam: Family, cand: SymmetryCandidate) -> bool:
    """A symmetry of f^k also commutes with f^(2k)."""
    return verify_candidate(fam, cand, 2 * cand.k)


__all__ = ["SymmetryCandidate", "ZetaEstimate", "find_affine_symmetry", "functional_root",
           "check_orbit_relation", "estimate_zeta", "verify_candidate", "composition_closure",
           "root_of_unity_order"]
