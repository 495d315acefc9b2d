"""Archimedean potential-theory diagnostics for finite parameter sets.

Given a Green's function G of a compact set with G(s) = q log|s| + q γ + o(1),
the mass-normalized Ĝ = G/q defines the homogeneous function
H(s, t) = Ĝ(s/t) + log|t| and the Arakelov-Green kernel

    g(x, y) = -log|x̃ ∧ ỹ| + H(x̃) + H(ỹ) - γ,

which integrates to zero against the equilibrium measure twice.  Only the
archimedean place is treated; every report is a single-place diagnostic.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .errors import DiagonalPole, OriginUndefined, ProbeInsideSet
from .escape_green import escape_rate, escape_rates, robin_constant
from .param_plane import ScalarField
from .poly_core import Family, TPoly, classify_marked_point

MC_SAMPLES = 100_000
MC_SEED = 20240601


@dataclass(frozen=True)
class GreenSpec:
    evaluator: Callable  # t -> G(t) (not normalized)
    q: Fraction
    gamma: float  # Robin constant of Ĝ = G/q
    vector_evaluator: Callable | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "q", Fraction(self.q))
        if self.q <= 0:
            raise ValueError("mass q must be positive")
        if not math.isfinite(self.gamma):
            raise ValueError("gamma must be finite")

    def ghat(self, t: complex) -> float:
        return float(self.evaluator(complex(t))) / float(self.q)

    def ghat_many(self, ts) -> np.ndarray:
        ts = np.asarray(ts, dtype=np.complex128)
        if self.vector_evaluator is not None:
            return np.asarray(self.vector_evaluator(ts), dtype=float) / float(self.q)
        return np.array([self.ghat(t) for t in ts.ravel()]).reshape(ts.shape)

    @classmethod
    def from_family(cls, fam: Family, a: TPoly, cap: int = 2048) -> "GreenSpec":
        """Green's function t ↦ G_t(a(t)) with q from degree growth and γ from ring averages."""
        rep = classify_marked_point(fam, a)
        if not rep.active:
            raise ValueError("marked point is passive; its Green's function vanishes")
        rob = robin_constant(fam, a, rep.q, cap=cap)
        return cls(lambda t: escape_rate(fam, a, t, cap).g, rep.q, rob.gamma / float(rep.q),
                   lambda ts: escape_rates(fam, a, ts, cap))


@dataclass(frozen=True)
class EnergyReport:
    set_size: int
    energy: float
    potential_probes: tuple = ()  # ((w, empirical, predicted), ...)

    @property
    def max_discrepancy(self) -> float:
        if not self.potential_probes:
            return 0.0
        return max(abs(e - p) for _, e, p in self.potential_probes)

    def to_json(self) -> dict:
        return {"place": "archimedean", "set_size": self.set_size, "energy": self.energy,
                "potential_probes": [{"re": w.real, "im": w.imag, "empirical": e, "predicted": p}
                                     for w, e, p in self.potential_probes],
                "max_discrepancy": self.max_discrepancy}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


def homogeneous_H(spec: GreenSpec, s: complex, t: complex) -> float:
    s, t = complex(s), complex(t)
    if t == 0:
        if s == 0:
            raise OriginUndefined("H is undefined at (0, 0)")
        return math.log(abs(s)) + spec.gamma
    return spec.ghat(s / t) + math.log(abs(t))


def arakelov_green(spec: GreenSpec, x, y) -> float:
    """g(x, y) for points or explicit lifts ``(x0, x1)`` (a point x lifts to (x, 1))."""
    xt = tuple(complex(v) for v in x) if isinstance(x, (tuple, list)) else (complex(x), 1 + 0j)
    yt = tuple(complex(v) for v in y) if isinstance(y, (tuple, list)) else (complex(y), 1 + 0j)
    wedge = xt[0] * yt[1] - xt[1] * yt[0]
    if wedge == 0:
        raise DiagonalPole("g has a pole on the diagonal")
    return (-math.log(abs(wedge)) + homogeneous_H(spec, *xt) + homogeneous_H(spec, *yt)
            - spec.gamma)


def _points(S) -> np.ndarray:
    if hasattr(S, "values") and not isinstance(S, np.ndarray):
        return np.asarray(S.values, dtype=np.complex128)
    return np.asarray(S, dtype=np.complex128).ravel()


def _offdiag_log_sum(pts: np.ndarray, block: int = 512) -> float:
    """Σ_{i≠j} log|s_i - s_j| summed block by block in a fixed order."""
    total = 0.0
    n = len(pts)
    for i0 in range(0, n, block):
        rows = pts[i0:i0 + block]
        diff = np.abs(rows[:, None] - pts[None, :])
        for r in range(len(rows)):
            diff[r, i0 + r] = 1.0
        if np.any(diff == 0):
            raise DiagonalPole("repeated point in the set")
        total += float(np.log(diff).sum(axis=1).sum())
    return total


def set_energy(spec: GreenSpec, S) -> EnergyReport:
    """(1/2)(1/N²) Σ_{i≠j} g(s_i, s_j); zero for a single point."""
    pts = _points(S)
    n = len(pts)
    if n < 2:
        return EnergyReport(n, 0.0)
    gh = spec.ghat_many(pts)
    # Σ_{i≠j} (Ĝ_i + Ĝ_j - γ) = 2(N-1)ΣĜ - N(N-1)γ
    pair_const = 2.0 * (n - 1) * float(gh.sum()) - n * (n - 1) * spec.gamma
    energy = 0.5 * (pair_const - _offdiag_log_sum(pts)) / n**2
    return EnergyReport(n, energy)


def potential_discrepancy(spec: GreenSpec, S, probes) -> EnergyReport:
    """Empirical log-potential of S against Ĝ(w) - γ at each probe outside the set."""
    pts = _points(S)
    rows = []
    for w in probes:
        w = complex(w)
        gw = spec.ghat(w)
        if not gw > 0:
            raise ProbeInsideSet(f"probe {w} lies in the set (Green value {gw})")
        emp = float(np.log(np.abs(w - pts)).mean())
        rows.append((w, emp, gw - spec.gamma))
    return EnergyReport(len(pts), float("nan"), tuple(rows))


def mc_normalization(spec: GreenSpec, mass: ScalarField, n: int = MC_SAMPLES,
                     seed: int = MC_SEED) -> float:
    """Monte-Carlo estimate of ∬ g dμ dμ with μ the (clipped, normalized) raster mass.

    Pairs are drawn independently from the cell masses and jittered uniformly
    inside their pixels.
    """
    if mass.kind != "mass-density":
        raise ValueError("need a mass-density field")
    p = np.clip(np.nan_to_num(mass.values), 0.0, None).ravel()
    p = p / p.sum()
    rng = np.random.default_rng(seed)
    w = mass.window
    grid = w.grid().ravel()

    def draw():
        idx = rng.choice(len(p), size=n, p=p)
        jitter = (rng.random(n) - 0.5 + 1j * (rng.random(n) - 0.5)) * w.h
        return grid[idx] + jitter

    x, y = draw(), draw()
    gx, gy = spec.ghat_many(x), spec.ghat_many(y)
    vals = -np.log(np.abs(x - y)) + gx + gy - spec.gamma
    return float(vals.mean())
