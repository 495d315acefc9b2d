"""Bivariate polynomial arithmetic, symbolic orbits and the activity classifier.

A :class:`TPoly` is a polynomial in the parameter ``t``; a :class:`BiPoly` is a
polynomial in ``z`` whose coefficients are ``TPoly``.  Both come in two
flavours chosen from the inputs: exact Gaussian-rational coefficients (held as
``gmpy2.mpq`` real/imaginary arrays) and IEEE double complex.  Any operation
mixing the two falls back to floating point.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Integral, Rational
from pathlib import Path
from typing import Iterable, Sequence

import gmpy2
import numpy as np

from . import _kernels
from .errors import DegreeCapExceeded, Inconclusive, RootFindFailure

DEFAULT_DEGREE_CAP = 16384
FLOAT_RTOL = 1e-9

_ZERO = gmpy2.mpq(0)


def _exact_part(x):
    """Convert a real scalar to mpq, or return None when it is not exact."""
    if isinstance(x, bool):
        return gmpy2.mpq(int(x))
    if isinstance(x, (Integral, Rational)) or type(x).__name__ == "mpq":
        return gmpy2.mpq(x)
    if isinstance(x, str):
        try:
            return gmpy2.mpq(Fraction(x.strip()))
        except (ValueError, ZeroDivisionError):
            return None
    return None


def exact_scalar(x):
    """Return ``(re, im)`` as mpq when ``x`` is Gaussian rational, else None."""
    if isinstance(x, (list, tuple)) and len(x) == 2:
        re, im = _exact_part(x[0]), _exact_part(x[1])
        return None if re is None or im is None else (re, im)
    re = _exact_part(x)
    return None if re is None else (re, _ZERO)


def float_scalar(x) -> complex:
    if isinstance(x, (list, tuple)) and len(x) == 2:
        return complex(float(Fraction(x[0]) if isinstance(x[0], str) else x[0]),
                       float(Fraction(x[1]) if isinstance(x[1], str) else x[1]))
    if isinstance(x, str):
        return complex(float(Fraction(x)))
    return complex(x)


def _obj(values) -> np.ndarray:
    out = np.empty(len(values), dtype=object)
    out[:] = list(values)
    return out


def _conv(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if len(a) == 0 or len(b) == 0:
        return np.empty(0, dtype=a.dtype)
    return np.convolve(a, b)


def _padd(a: np.ndarray, b: np.ndarray, sign=1) -> np.ndarray:
    n = max(len(a), len(b))
    if a.dtype == object:
        out = _obj([_ZERO] * n)
    else:
        out = np.zeros(n, dtype=a.dtype)
    out[: len(a)] += a
    if sign > 0:
        out[: len(b)] += b
    else:
        out[: len(b)] -= b
    return out


def _fmt_coeff(c: complex) -> str:
    if c.imag == 0:
        return f"{c.real:g}"
    if c.real == 0:
        return f"{c.imag:g}i"
    return f"({c.real:g}{c.imag:+g}i)"


class TPoly:
    """Dense polynomial in ``t``; ``degree`` is -1 for the zero polynomial."""

    __slots__ = ("_re", "_im", "_c")
    __hash__ = None

    def __init__(self, coeffs: Iterable = ()):
        coeffs = list(coeffs)
        exact = [exact_scalar(c) for c in coeffs]
        if all(e is not None for e in exact):
            self._set_exact(_obj([e[0] for e in exact]), _obj([e[1] for e in exact]))
        else:
            self._set_float(np.array([float_scalar(c) for c in coeffs], dtype=np.complex128))

    # construction helpers -------------------------------------------------
    @classmethod
    def _exact(cls, re, im) -> "TPoly":
        p = cls.__new__(cls)
        p._set_exact(re, im)
        return p

    @classmethod
    def _float(cls, c) -> "TPoly":
        p = cls.__new__(cls)
        p._set_float(np.asarray(c, dtype=np.complex128))
        return p

    def _set_exact(self, re, im):
        n = max(len(re), len(im))
        if len(re) < n:
            re = _padd(re, _obj([_ZERO] * n))
        if len(im) < n:
            im = _padd(im, _obj([_ZERO] * n))
        while n and re[n - 1] == 0 and im[n - 1] == 0:
            n -= 1
        self._re, self._im, self._c = re[:n], im[:n], None

    def _set_float(self, c):
        n = len(c)
        while n and c[n - 1] == 0:
            n -= 1
        self._re = self._im = None
        self._c = c[:n].copy()

    @classmethod
    def const(cls, x) -> "TPoly":
        if isinstance(x, TPoly):
            return x
        return cls([x])

    @classmethod
    def monomial(cls, k: int, coeff=1) -> "TPoly":
        return cls([0] * k + [coeff])

    # basic properties -----------------------------------------------------
    @property
    def exact(self) -> bool:
        return self._c is None

    @property
    def degree(self) -> int:
        return (len(self._re) if self.exact else len(self._c)) - 1

    def __len__(self):
        return self.degree + 1

    @property
    def coeffs(self) -> np.ndarray:
        """Ascending complex coefficients (a copy)."""
        if self.exact:
            return np.array([complex(float(r), float(i)) for r, i in zip(self._re, self._im)],
                            dtype=np.complex128)
        return self._c.copy()

    def exact_coeffs(self) -> list[tuple]:
        if not self.exact:
            raise TypeError("not an exact polynomial")
        return list(zip(self._re, self._im))

    def is_zero(self) -> bool:
        return self.degree < 0

    def leading(self) -> complex:
        return complex(self.coeffs[-1]) if self.degree >= 0 else 0j

    def scale(self) -> float:
        c = self.coeffs
        return float(np.max(np.abs(c))) if len(c) else 0.0

    def effective_degree(self, rtol: float = FLOAT_RTOL) -> int:
        """Degree after discarding float noise (exact polynomials: the true degree)."""
        if self.exact:
            return self.degree
        c = np.abs(self._c)
        if not len(c):
            return -1
        thresh = rtol * (1.0 + c.max())
        idx = np.nonzero(c > thresh)[0]
        return int(idx[-1]) if len(idx) else -1

    def to_float(self) -> "TPoly":
        return self if not self.exact else TPoly._float(self.coeffs)

    # arithmetic -----------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, TPoly):
            return other
        if isinstance(other, BiPoly):
            return NotImplemented
        return TPoly.const(other)

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.exact and other.exact:
            return TPoly._exact(_padd(self._re, other._re), _padd(self._im, other._im))
        return TPoly._float(_padd(self.coeffs, other.coeffs))

    __radd__ = __add__

    def __neg__(self):
        if self.exact:
            return TPoly._exact(-self._re, -self._im)
        return TPoly._float(-self._c)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.is_zero() or other.is_zero():
            return TPoly([])
        if self.exact and other.exact:
            a_im = any(x != 0 for x in self._im)
            b_im = any(x != 0 for x in other._im)
            re = _conv(self._re, other._re)
            im = _obj([_ZERO] * len(re))
            if a_im and b_im:
                re = re - _conv(self._im, other._im)
            if a_im:
                im = im + _conv(self._im, other._re)
            if b_im:
                im = im + _conv(self._re, other._im)
            return TPoly._exact(re, im)
        return TPoly._float(np.convolve(self.coeffs, other.coeffs))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        out, base = TPoly([1]), self
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    def div_scalar(self, x) -> "TPoly":
        e = exact_scalar(x)
        if self.exact and e is not None:
            re, im = e
            den = re * re + im * im
            inv = (re / den, -im / den)
            return self * TPoly([inv])
        return TPoly._float(self.coeffs / float_scalar(x))

    def derivative(self) -> "TPoly":
        if self.degree < 1:
            return TPoly([])
        if self.exact:
            k = _obj([gmpy2.mpq(i) for i in range(1, self.degree + 1)])
            return TPoly._exact(self._re[1:] * k, self._im[1:] * k)
        return TPoly._float(self._c[1:] * np.arange(1, self.degree + 1))

    # evaluation / comparison ----------------------------------------------
    def __call__(self, t):
        c = self.coeffs
        if not len(c):
            return np.zeros_like(np.asarray(t, dtype=np.complex128)) if np.ndim(t) else 0j
        return np.polyval(c[::-1], t)

    def close(self, other, rtol: float = FLOAT_RTOL) -> bool:
        other = self._coerce(other)
        a, b = self.coeffs, other.coeffs
        n = max(len(a), len(b))
        a = np.pad(a, (0, n - len(a)))
        b = np.pad(b, (0, n - len(b)))
        if not n:
            return True
        scale = 1.0 + max(np.abs(a).max(), np.abs(b).max())
        return bool(np.all(np.abs(a - b) <= rtol * scale))

    def __eq__(self, other):
        if not isinstance(other, (TPoly, int, float, complex, Fraction)) and type(other).__name__ != "mpq":
            return NotImplemented
        other = self._coerce(other)
        if self.exact and other.exact:
            return (len(self._re) == len(other._re)
                    and all(x == y for x, y in zip(self._re, other._re))
                    and all(x == y for x, y in zip(self._im, other._im)))
        return self.close(other)

    # serialization --------------------------------------------------------
    def to_json(self) -> list:
        if self.exact:
            return [[_q2s(r), _q2s(i)] for r, i in zip(self._re, self._im)]
        return [[c.real, c.imag] for c in self._c]

    @classmethod
    def from_json(cls, data) -> "TPoly":
        return cls([tuple(x) if isinstance(x, list) else x for x in data])

    def __repr__(self):
        if self.is_zero():
            return "TPoly(0)"
        terms = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mono = "" if k == 0 else ("t" if k == 1 else f"t^{k}")
            terms.append(_fmt_coeff(c) + ("*" + mono if mono else ""))
        return "TPoly(" + " + ".join(terms) + ")"


def _q2s(q) -> str:
    q = gmpy2.mpq(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


class BiPoly:
    """Polynomial in ``z`` with :class:`TPoly` coefficients, ``zcoeffs[j]`` of ``z^j``."""

    __slots__ = ("zcoeffs",)
    __hash__ = None

    def __init__(self, zcoeffs: Sequence):
        zc = [c if isinstance(c, TPoly) else TPoly.const(c) for c in zcoeffs]
        while zc and zc[-1].is_zero():
            zc.pop()
        self.zcoeffs = tuple(zc)

    @classmethod
    def from_expr(cls, expr: str) -> "BiPoly":
        """Parse a sympy expression in ``z`` and ``t`` (``I`` is the imaginary unit)."""
        import sympy

        t, z = sympy.symbols("t z")
        poly = sympy.Poly(sympy.sympify(expr, locals={"t": t, "z": z}), z, t)
        dz = poly.degree(z)
        rows = [[0] * (max(poly.degree(t), 0) + 1) for _ in range(max(dz, 0) + 1)]
        for (i, j), c in poly.terms():
            rows[i][j] = _sympy_scalar(c)
        return cls([TPoly(r) for r in rows])

    @property
    def zdegree(self) -> int:
        return len(self.zcoeffs) - 1

    @property
    def exact(self) -> bool:
        return all(c.exact for c in self.zcoeffs)

    @property
    def tdegree(self) -> int:
        return max((c.degree for c in self.zcoeffs), default=-1)

    def is_monic_centered(self) -> bool:
        d = self.zdegree
        if d < 1:
            return False
        lead = self.zcoeffs[d]
        if not (lead.degree == 0 and lead == 1):
            return False
        return d < 2 or self.zcoeffs[d - 1].is_zero()

    def coeffs_at(self, t) -> np.ndarray:
        """Ascending z-coefficients of f_t."""
        return np.array([c(t) for c in self.zcoeffs], dtype=np.complex128)

    def __call__(self, t, z):
        return _kernels.horner_value(self.coeffs_at(complex(t)), complex(z))

    def coefficient_matrix(self) -> np.ndarray:
        T = max(self.tdegree, 0) + 1
        out = np.zeros((self.zdegree + 1, T), dtype=np.complex128)
        for j, c in enumerate(self.zcoeffs):
            cc = c.coeffs
            out[j, : len(cc)] = cc
        return out

    def compose_t(self, x: TPoly) -> TPoly:
        """The t-polynomial f_t(x(t))."""
        acc = TPoly([])
        for c in reversed(self.zcoeffs):
            acc = acc * x + c
        return acc

    def _coerce(self, other):
        if isinstance(other, BiPoly):
            return other
        return BiPoly([TPoly.const(other)])

    def __add__(self, other):
        other = self._coerce(other)
        n = max(len(self.zcoeffs), len(other.zcoeffs))
        zero = TPoly([])
        return BiPoly([(self.zcoeffs[j] if j < len(self.zcoeffs) else zero)
                       + (other.zcoeffs[j] if j < len(other.zcoeffs) else zero)
                       for j in range(n)])

    __radd__ = __add__

    def __neg__(self):
        return BiPoly([-c for c in self.zcoeffs])

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if not self.zcoeffs or not other.zcoeffs:
            return BiPoly([])
        out = [TPoly([]) for _ in range(len(self.zcoeffs) + len(other.zcoeffs) - 1)]
        for i, a in enumerate(self.zcoeffs):
            if a.is_zero():
                continue
            for j, b in enumerate(other.zcoeffs):
                if not b.is_zero():
                    out[i + j] = out[i + j] + a * b
        return BiPoly(out)

    __rmul__ = __mul__

    def compose(self, inner: "BiPoly") -> "BiPoly":
        """``self ∘ inner`` as a BiPoly."""
        acc = BiPoly([])
        for c in reversed(self.zcoeffs):
            acc = acc * inner + BiPoly([c])
        return acc

    def iterate(self, k: int) -> "BiPoly":
        out = Z
        for _ in range(k):
            out = self.compose(out)
        return out

    def derivative_z(self) -> "BiPoly":
        return BiPoly([c * j for j, c in enumerate(self.zcoeffs)][1:])

    def to_float(self) -> "BiPoly":
        return BiPoly([c.to_float() for c in self.zcoeffs])

    def close(self, other: "BiPoly", rtol: float = FLOAT_RTOL) -> bool:
        n = max(len(self.zcoeffs), len(other.zcoeffs))
        zero = TPoly([])
        return all((self.zcoeffs[j] if j < len(self.zcoeffs) else zero).close(
            other.zcoeffs[j] if j < len(other.zcoeffs) else zero, rtol) for j in range(n))

    def __eq__(self, other):
        if not isinstance(other, BiPoly):
            return NotImplemented
        if self.exact and other.exact:
            return len(self.zcoeffs) == len(other.zcoeffs) and all(
                a == b for a, b in zip(self.zcoeffs, other.zcoeffs))
        return self.close(other)

    def to_json(self) -> list:
        return [c.to_json() for c in self.zcoeffs]

    @classmethod
    def from_json(cls, data) -> "BiPoly":
        return cls([TPoly.from_json(c) for c in data])

    def __repr__(self):
        terms = []
        for j, c in enumerate(self.zcoeffs):
            if c.is_zero():
                continue
            mono = "" if j == 0 else ("z" if j == 1 else f"z^{j}")
            terms.append(f"[{c!r}]" + ("*" + mono if mono else ""))
        return "BiPoly(" + " + ".join(reversed(terms)) + ")"


Z = BiPoly([TPoly([]), TPoly([1])])


def _sympy_scalar(c):
    import sympy

    re, im = sympy.re(c), sympy.im(c)
    if re.is_Rational and im.is_Rational:
        return (Fraction(int(re.p), int(re.q)), Fraction(int(im.p), int(im.q)))
    return complex(c)


def tpoly_from_expr(expr: str) -> TPoly:
    f = BiPoly.from_expr(expr)
    if f.zdegree > 0:
        raise ValueError(f"marked point must not depend on z: {expr}")
    return f.zcoeffs[0] if f.zcoeffs else TPoly([])


@dataclass(frozen=True)
class Family:
    """A monic centered family f_t with marked points a_i(t)."""

    f: BiPoly
    marked: tuple
    label: str = ""
    critical: bool = False
    constant: bool = False
    _matrix: np.ndarray = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "marked", tuple(
            m if isinstance(m, TPoly) else TPoly.const(m) for m in self.marked))
        if self.f.zdegree < 2:
            raise ValueError("family degree must be at least 2")
        if not self.f.is_monic_centered():
            raise ValueError("family must be monic and centered in z")
        if not self.marked:
            raise ValueError("at least one marked point is required")
        if self.f.tdegree < 1 and not self.constant:
            raise ValueError("family is constant in t; pass constant=True")
        object.__setattr__(self, "_matrix", self.f.coefficient_matrix())

    @property
    def d(self) -> int:
        return self.f.zdegree

    @property
    def exact(self) -> bool:
        return self.f.exact and all(m.exact for m in self.marked)

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    def coeff_degree_bound(self) -> int:
        """max_j deg_t b_j(t) over the non-leading coefficients."""
        return max((c.degree for c in self.f.zcoeffs[:-1]), default=-1)

    @classmethod
    def from_expr(cls, expr: str, marked: Sequence[str] = ("t",), label: str = "", **kw) -> "Family":
        f = BiPoly.from_expr(expr)
        return cls(f, tuple(tpoly_from_expr(m) for m in marked), label or expr, **kw)

    @classmethod
    def from_json(cls, doc: dict) -> "Family":
        f = BiPoly.from_json(doc["zcoeffs"])
        if "d" in doc and int(doc["d"]) != f.zdegree:
            raise ValueError(f"declared degree {doc['d']} does not match zcoeffs ({f.zdegree})")
        return cls(f, tuple(TPoly.from_json(m) for m in doc["marked"]),
                   doc.get("label", ""), bool(doc.get("critical", False)),
                   bool(doc.get("constant", False)))

    @classmethod
    def load(cls, path) -> "Family":
        return cls.from_json(json.loads(Path(path).read_text()))

    def to_json(self) -> dict:
        return {"d": self.d, "zcoeffs": self.f.to_json(),
                "marked": [m.to_json() for m in self.marked], "label": self.label,
                "critical": self.critical, "constant": self.constant}


def eval(f: BiPoly, t: complex, z: complex) -> complex:  # noqa: A001 - public name
    return f(t, z)


def _degree_bound(fam: Family, deg: int) -> int:
    if deg < 0:
        return max((c.degree for c in fam.f.zcoeffs[:1]), default=-1)
    return max(c.degree + j * deg for j, c in enumerate(fam.f.zcoeffs) if not c.is_zero())


def iterate_symbolic(fam: Family, a: TPoly, n: int, cap: int = DEFAULT_DEGREE_CAP) -> TPoly:
    """The exact t-polynomial f_t^n(a(t))."""
    if n < 0:
        raise ValueError("n must be non-negative")
    bound = a.degree
    for _ in range(n):
        bound = _degree_bound(fam, bound)
        if bound > cap:
            raise DegreeCapExceeded(f"projected degree {bound} exceeds cap {cap}")
    x = a
    for _ in range(n):
        x = fam.f.compose_t(x)
    return x


def iterates(fam: Family, a: TPoly, n: int, cap: int = DEFAULT_DEGREE_CAP) -> list[TPoly]:
    """[f^0(a), ..., f^n(a)]."""
    out = [a]
    bound = a.degree
    for _ in range(n):
        bound = _degree_bound(fam, bound)
        if bound > cap:
            raise DegreeCapExceeded(f"projected degree {bound} exceeds cap {cap}")
        out.append(fam.f.compose_t(out[-1]))
    return out


@dataclass(frozen=True)
class ActivityReport:
    status: str  # "active" or "passive-preperiodic"
    q: Fraction | None = None
    n0: int | None = None
    m0: int | None = None
    witness: tuple | None = None
    degrees: tuple = ()

    @property
    def active(self) -> bool:
        return self.status == "active"


def classify_marked_point(fam: Family, a: TPoly, n_max: int = 12,
                          cap: int = DEFAULT_DEGREE_CAP) -> ActivityReport:
    """Decide activity of ``a`` from degree growth or an exact orbit coincidence."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    bmax = fam.coeff_degree_bound()
    orbit = [a]
    degs = [a.effective_degree()]
    for n in range(n_max + 1):
        x = orbit[n]
        deg = degs[n]
        if deg > bmax:
            # degree law: deg f^{n0+k}(a) = m0 d^k; confirm two more steps
            for k in (1, 2):
                try:
                    y = iterate_symbolic(fam, orbit[-1], 1, cap) if len(orbit) <= n + k else orbit[n + k]
                except DegreeCapExceeded:
                    break
                if len(orbit) <= n + k:
                    orbit.append(y)
                    degs.append(y.effective_degree())
                if degs[n + k] != deg * fam.d ** k:
                    raise Inconclusive("degree law violated", degs)
            return ActivityReport("active", Fraction(deg, fam.d ** n), n, deg, None, tuple(degs))
        for m in range(n):
            if x == orbit[m]:
                return ActivityReport("passive-preperiodic", None, None, None, (n, m), tuple(degs))
        if n == n_max:
            break
        try:
            y = iterate_symbolic(fam, x, 1, cap)
        except DegreeCapExceeded as exc:
            raise Inconclusive(str(exc), degs) from exc
        orbit.append(y)
        degs.append(y.effective_degree())
    raise Inconclusive(f"no decision within n_max={n_max}", degs)


def fujiwara_radius(c: np.ndarray) -> float:
    """Fujiwara's bound on root moduli of the ascending polynomial ``c``."""
    n = len(c) - 1
    lead = abs(c[n])
    vals = [abs(c[n - k] / lead) ** (1.0 / k) for k in range(1, n + 1) if c[n - k] != 0]
    if not vals:
        return 0.0
    vals[-1] = vals[-1] if abs(c[0]) == 0 else (abs(c[0]) / (2 * lead)) ** (1.0 / n)
    return 2.0 * max(vals)


def float_roots(c: np.ndarray, maxiter: int = 2000, tol: float = 1e-15,
                strict: bool = True) -> np.ndarray:
    """All roots of the ascending complex polynomial ``c`` (Aberth iteration).

    With ``strict=False`` stalled roots are returned as they stand, for
    callers that polish them further.
    """
    c = np.asarray(c, dtype=np.complex128)
    if not np.all(np.isfinite(c)):
        raise ValueError("coefficients must be finite")
    n = len(c) - 1
    while n > 0 and c[n] == 0:
        n -= 1
    c = c[: n + 1]
    if n < 1:
        return np.zeros(0, dtype=np.complex128)
    # zero roots split off exactly
    k = 0
    while c[k] == 0:
        k += 1
    core = c[k:]
    m = len(core) - 1
    zeros = np.zeros(k, dtype=np.complex128)
    if m == 0:
        return zeros
    if m == 1:
        return np.concatenate([zeros, [-core[0] / core[1]]])
    r = max(fujiwara_radius(core), 1e-12)
    ang = 2 * np.pi * np.arange(m) / m + 0.4
    z0 = r * np.exp(1j * ang)
    z, active, its = _kernels.aberth(core, z0.astype(np.complex128), maxiter, tol)
    if not np.all(np.isfinite(z)):
        raise RootFindFailure("Aberth iteration diverged")
    if strict and active.any():
        # stalled roots are acceptable only with a small backward error
        absc = np.abs(core)
        for i in np.nonzero(active)[0]:
            zi = z[i]
            back = abs(_kernels.horner_value(core, zi)) / max(
                _kernels.horner_value(absc.astype(np.complex128), abs(zi)).real, 1e-300)
            if back > 1e-8:
                raise RootFindFailure(f"Aberth iteration failed to converge in {maxiter} sweeps")
    return np.concatenate([zeros, z])


def numeric_critical_points(fam: Family, t: complex) -> np.ndarray:
    """The d-1 roots of the z-derivative of f_t, with multiplicity."""
    c = fam.f.coeffs_at(complex(t))
    dc = c[1:] * np.arange(1, len(c))
    roots = float_roots(dc)
    scale = 1.0 + float(np.max(np.abs(dc)))
    for r in roots:
        if abs(_kernels.horner_value(dc, r)) > 1e-9 * scale * max(1.0, abs(r)) ** (len(dc) - 1):
            raise RootFindFailure(f"critical point residual too large at {r}")
    return roots


def projected_degree(fam: Family, a: TPoly, n: int) -> int:
    bound = a.degree
    for _ in range(n):
        bound = _degree_bound(fam, bound)
    return bound


def log_degree_growth(degs: Sequence[int], d: int) -> list[float]:
    return [math.log(max(x, 1)) / (k + 1) for k, x in enumerate(degs)]


def fixture_path(name: str) -> Path:
    """Path of a bundled family fixture (e.g. ``"quad.json"``)."""
    return Path(__file__).parent / "fixtures" / name


def load_fixture(name: str) -> Family:
    return Family.load(fixture_path(name))
