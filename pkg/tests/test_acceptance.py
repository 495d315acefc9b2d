"""Acceptance checks, one per criterion; each prints a PASS/FAIL line."""
import cmath
import math
import time

import numpy as np
import pytest

from critorbit.bottcher_series import (bottcher_series, power_split, series_decay,
                                       verify_poly_relation)
from critorbit.equidist import GreenSpec, potential_discrepancy
from critorbit.param_plane import Window, bif_measure, field_l1_distance, reflect, render_green
from critorbit.per1 import (L1_SEPARATION_THRESHOLD, Per1Family, per1_green, per1_homogeneous,
                            per1_measures, per1_pcf_search, per1_robin)
from critorbit.poly_core import Family, TPoly, load_fixture
from critorbit.preperiodic import (all_drivers, find_pcf, is_preperiodic_at, orbit_roots,
                                   preperiodic_equation, solve_roots)
from critorbit.relations import (check_orbit_relation, estimate_zeta, find_affine_symmetry,
                                 functional_root)


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\nACCEPTANCE {number:2d} {'PASS' if ok else 'FAIL'}: {detail}")
        assert ok, detail
    return emit


def test_criterion_01_golden_pcf(report):
    fam = Per1Family(6)
    t0 = time.perf_counter()
    rs = per1_pcf_search(fam, Window(-2, 2, -0.5, 0.5, 800, 200))
    dt = time.perf_counter() - t0
    target = -(1 + 5 ** 0.5) / 2
    vals = rs.values
    s0 = vals[np.argmin(np.abs(vals - target))] if len(vals) else complex("nan")
    e1, e2 = abs(fam.f(s0, s0) - 1 / s0), abs(fam.f(s0, 1 / s0) - s0)
    ok = abs(s0 - target) < 1e-6 and e1 < 1e-9 and e2 < 1e-9 and dt <= 60
    report(1, ok, f"s0={s0.real:.12f} |f(s0)-1/s0|={e1:.1e} |f(1/s0)-s0|={e2:.1e} in {dt:.1f}s")


def test_criterion_02_robin(report):
    g6 = per1_robin(Per1Family(6), "+", radii=(1e4,)).gamma
    g2 = per1_robin(Per1Family(2), "+", radii=(1e4,)).gamma
    p6 = math.log(2) / 6
    p2 = math.log(2 / 3) / 6 + math.log(1 / 3) / 3
    ok = abs(g6 - p6) <= 1e-3 and abs(g2 - p2) <= 1e-3
    report(2, ok, f"lambda=6 {g6:.7f} vs {p6:.7f}; lambda=2 {g2:.7f} vs {p2:.7f}")


def test_criterion_03_inversion(report):
    rng = np.random.default_rng(11)
    worst = 0.0
    for lam in (6, 3 + 4j):
        fam = Per1Family(lam)
        r = np.exp(rng.uniform(math.log(0.25), math.log(4), 100))
        for s in r * np.exp(2j * np.pi * rng.random(100)):
            worst = max(worst, abs(per1_green(fam, s, "-").g - per1_green(fam, 1 / s, "+").g))
    report(3, worst <= 1e-10, f"max |G-(s) - G+(1/s)| = {worst:.1e} over 200 samples")


def test_criterion_04_currents(report):
    w = Window(-2, 2, -2, 2, 1024, 1024)
    mp, mm, _ = per1_measures(Per1Family(6), w)
    sep = field_l1_distance(mp, mm)
    oc = load_fixture("odd_cubic.json")
    m1, _ = bif_measure(render_green(oc, oc.marked[0], w))
    m2, _ = bif_measure(render_green(oc, oc.marked[1], w))
    refl = field_l1_distance(m1, reflect(m2))
    ok = sep > L1_SEPARATION_THRESHOLD >= 0.1 and refl <= 0.05
    report(4, ok, f"Per1(6) L1 {sep:.3f} > {L1_SEPARATION_THRESHOLD}; odd cubic reflected L1 {refl:.1e}")


def test_criterion_05_mass(report):
    quad = load_fixture("quad.json")
    t0 = time.perf_counter()
    rows = {}
    for label, a, target in (("a=0", TPoly([]), 0.5), ("a=t", TPoly([0, 1]), 1.0)):
        masses = []
        for n in (512, 1024, 2048):
            _, m = bif_measure(render_green(quad, a, Window(-2.5, 1.5, -2, 2, n, n)))
            masses.append(m)
        errs = [abs(m - target) for m in masses]
        rows[label] = (masses, abs(masses[-1] - target) <= 0.02 and errs[0] >= errs[1] >= errs[2])
    dt = time.perf_counter() - t0
    ok = all(v[1] for v in rows.values()) and dt <= 120
    detail = "; ".join(f"{k} " + "/".join(f"{m:.7f}" for m in v[0]) for k, v in rows.items())
    report(5, ok, f"{detail} at 512/1024/2048 in {dt:.0f}s")


def test_criterion_06_preperiodic(report):
    quad = load_fixture("quad.json")
    rs = solve_roots(preperiodic_equation(quad, TPoly([]), 3, 1))
    got = sorted((round(r.value.real, 9) + 0.0, r.multiplicity) for r in rs.roots)
    ok = got == [(-1.0, 2), (0.0, 2)] and max(r.residual for r in rs.roots) <= 1e-10
    nested = True
    for n in range(1, 7):
        for m in range(n):
            small = solve_roots(preperiodic_equation(quad, TPoly([]), n, m))
            big = solve_roots(preperiodic_equation(quad, TPoly([]), n + 1, m + 1)).values
            nested &= all(np.min(np.abs(big - r.value)) < 1e-7 for r in small.roots)
    report(6, ok and nested, f"(3,1) roots {got}; nesting for n <= 6: {nested}")


def test_criterion_07_equidistribution(report):
    quad = load_fixture("quad.json")
    a = TPoly([0, 1])
    spec = GreenSpec.from_family(quad, a)
    t0 = time.perf_counter()
    disc = {}
    for n in (8, 9, 10, 11):
        rep = potential_discrepancy(spec, orbit_roots(quad, a, n), [2.0])
        disc[n] = rep.max_discrepancy
    dt = time.perf_counter() - t0
    floor = 1e-12  # below this the comparison is pure rounding
    mono = all(max(disc[n + 1], floor) <= 1.2 * max(disc[n], floor) for n in (8, 9, 10))
    ok = disc[10] <= 0.02 and mono and dt <= 120
    report(7, ok, "discrepancy at w=2 " + ", ".join(f"n={n}: {v:.1e}" for n, v in disc.items())
           + f" in {dt:.0f}s")


def test_criterion_08_bottcher(report):
    quad = load_fixture("quad.json")
    tb = bottcher_series(quad, 8)
    degs_ok = tb.exact and all(g.degree <= s + 1 for s, g in enumerate(tb.g, start=1))
    g1_ok = tb.g[0] == TPoly([0, (1, 2)]) * TPoly([1]) or tb.g[0].close(TPoly([0, 0.5]), 0)
    b_ok = power_split(tb, 3).degree_bound_holds(1)
    slope, _ = series_decay(quad, tb, 1.0, [3, 4, 5, 6])
    slope_ok = abs(slope + 9) <= 0.9
    report(8, degs_ok and g1_ok and b_ok and slope_ok,
           f"deg g_s <= s+1: {degs_ok}; g1 = t/2: {g1_ok}; deg b_s <= s+3: {b_ok}; slope {slope:.2f}")


def test_criterion_09_zeta(report):
    oc = load_fixture("odd_cubic.json")
    a1, a2 = TPoly([0, 0, 0, -2]), TPoly([0, 0, 0, 2])
    z = estimate_zeta(oc, a1, a2)
    minus = verify_poly_relation(oc, a1, a2, 1, 1, -1, 3).verdicts
    plus = verify_poly_relation(oc, a1, a2, 1, 1, 1, 3).verdicts
    ok = (abs(z.zeta + 1) < 1e-6 and z.modulus_dev <= 1e-6 and z.root_of_unity_order == 2
          and all(minus) and not any(plus))
    report(9, ok, f"zeta={z.zeta:.9f} dev={z.modulus_dev:.1e} order {z.root_of_unity_order}; "
                  f"zeta=-1 holds {minus}; zeta=+1 holds {plus}")


def test_criterion_10_symmetry(report):
    oc = load_fixture("odd_cubic.json")
    qs = load_fixture("quintic_sym.json")
    q4 = load_fixture("quartic_iterate.json")
    s_oc = find_affine_symmetry(oc)
    s_qs = find_affine_symmetry(qs)
    g = functional_root(q4, 2)
    ok_oc = [(c.k, c.unit) for c in s_oc] == [(1, (2, 1))] and s_oc[0].h.exact
    ok_qs = [(c.k, c.unit) for c in s_qs] == [(2, (3, 1))]
    ok_g = g is not None and g.h == Family.from_expr("z**2 - t**2").f and g.h.compose(g.h) == q4.f
    empty = [len(find_affine_symmetry(load_fixture(n))) for n in ("quad.json", "cubic_i.json")]
    ok = ok_oc and ok_qs and ok_g and empty == [0, 0]
    report(10, ok, f"-z at k=1: {ok_oc}; zeta3 z at k=2: {ok_qs}; g = z^2-t^2: {ok_g}; "
                   f"nontrivial for z^2+t, z^3-3t^2z+i: {empty}")


def test_criterion_11_harvest(report):
    t0 = time.perf_counter()
    pcf = find_pcf(load_fixture("per1_0.json"), all_drivers(1, 5))
    ci = load_fixture("cubic_i.json")
    # roots of the c1 = t equations with the c2 = -t orbit escaping, and the mirror
    seen = {}
    for drive, other in ((0, 1), (1, 0)):
        found = []
        for _, n, m in all_drivers(drive, 4):
            rs = solve_roots(preperiodic_equation(ci, ci.marked[drive], n, m))
            for r in rs.roots:
                if is_preperiodic_at(ci, ci.marked[other], r.value) == "escaping":
                    found.append(r.value)
        seen[drive] = np.array(found)
    dt = time.perf_counter() - t0
    # witness: t0 = i, where the critical point -i is fixed and +i escapes
    f = ci.f
    fixed = abs(f(1j, -1j) + 1j) < 1e-12
    escapes = is_preperiodic_at(ci, ci.marked[0], 1j) == "escaping"
    has_i = np.min(np.abs(seen[1] - 1j)) < 1e-9
    has_mirror = np.min(np.abs(seen[0] + 1j)) < 1e-9
    ok = len(pcf) >= 30 and len(seen[0]) >= 1 and fixed and escapes and has_i and has_mirror
    report(11, ok, f"{len(pcf)} PCF parameters on the Per1(0) slice; {len(seen[0])} roots of the "
                   f"c1 equations with c2 escaping; t0=i witness {fixed and escapes and has_i} "
                   f"(mirror t0=-i {has_mirror}) in {dt:.0f}s")


def test_criterion_12_lift(report):
    rng = np.random.default_rng(12)
    fam = Per1Family(6)
    worst_scale = worst_g = 0.0
    for _ in range(40):
        s = cmath.rect(math.exp(rng.uniform(-1, 1)), rng.uniform(0, 2 * math.pi))
        t = complex(*rng.normal(size=2))
        a = complex(*rng.normal(size=2))
        for sign in "+-":
            d = per1_homogeneous(fam, a * s, a * t, sign) - per1_homogeneous(fam, s, t, sign)
            worst_scale = max(worst_scale, abs(d - math.log(abs(a))))
        worst_g = max(worst_g, abs(per1_homogeneous(fam, s, 1) - per1_green(fam, s).g))
    ok = worst_scale <= 1e-9 and worst_g <= 1e-9
    report(12, ok, f"scaling error {worst_scale:.1e}; |H+(s,1) - G+(s)| {worst_g:.1e}")
