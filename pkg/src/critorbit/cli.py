"""Command-line frontend: render, solve, relate, per1, equidist.

Every subcommand accepts ``--config file.json`` whose keys are the flag names
(dashes or underscores); explicit flags win over the file and unknown keys are
rejected.  Outputs embed the library version and a hash of the resolved
configuration (thread count and output path excluded).

Exit codes: 0 success, 2 configuration error, 3 computation error.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import CritOrbitError

EXIT_OK, EXIT_CONFIG, EXIT_COMPUTE = 0, 2, 3
_UNHASHED = {"threads", "out", "config", "command"}


class ConfigError(ValueError):
    pass


def parse_complex(text) -> complex:
    if isinstance(text, (int, float, complex)):
        return complex(text)
    s = str(text).strip().replace(" ", "").replace("i", "j")
    try:
        return complex(s)
    except ValueError:
        raise ConfigError(f"not a complex number: {text!r}") from None


def parse_window(text: str, res: int):
    from .param_plane import Window

    parts = [p for p in str(text).split(",") if p]
    try:
        vals = [float(p) for p in parts]
    except ValueError:
        raise ConfigError(f"bad window {text!r}") from None
    if len(vals) == 1:
        w = abs(vals[0])
        vals = [-w, w, -w, w]
    if len(vals) != 4:
        raise ConfigError("window is 're_min,re_max,im_min,im_max' or a half-width")
    try:
        return Window.parse(",".join(repr(v) for v in vals), res)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def resolve_family(name: str):
    from .poly_core import Family, fixture_path

    p = Path(name)
    if not p.exists():
        p = fixture_path(name)
    if not p.exists():
        raise ConfigError(f"no fixture {name!r}")
    return Family.load(p)


def config_hash(cfg: dict) -> str:
    doc = {k: v for k, v in sorted(cfg.items()) if k not in _UNHASHED}
    return hashlib.sha256(json.dumps(doc, sort_keys=True, default=str).encode()).hexdigest()[:16]


def _stamp(cfg: dict) -> str:
    return f"critorbit {__version__} config {config_hash(cfg)}"


def _echo(cfg: dict) -> dict:
    return {"version": __version__, "config_hash": config_hash(cfg),
            "config": {k: v for k, v in sorted(cfg.items()) if k not in _UNHASHED}}


def _positive(cfg: dict, *keys):
    for k in keys:
        v = cfg.get(k)
        if v is None:
            continue
        if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
            raise ConfigError(f"{k} must be positive and finite, got {v!r}")


# subcommands -----------------------------------------------------------------


def cmd_render(cfg: dict) -> int:
    from .param_plane import (bif_measure, bounded_fraction, connectedness_locus, render_green,
                              write_pgm, write_sidecar)

    _positive(cfg, "res", "cap")
    if cfg["res"] < 2:
        raise ConfigError("res must be at least 2")
    fam = resolve_family(cfg["fixture"])
    w = parse_window(cfg["window"], int(cfg["res"]))
    kind, cap = cfg["kind"], int(cfg["cap"])
    if kind == "locus":
        fld = connectedness_locus(fam, w, cap)
    elif kind == "fraction":
        fld = bounded_fraction(fam, w, cap)
    else:
        idx = int(cfg["marked"])
        if not 0 <= idx < len(fam.marked):
            raise ConfigError(f"marked index {idx} out of range")
        fld = render_green(fam, fam.marked[idx], w, cap)
        if kind == "mass":
            fld, _ = bif_measure(fld, check_border=False)
    out = Path(cfg["out"] or f"render_{kind}")
    pgm = out.with_suffix(".pgm")
    write_pgm(fld, pgm, _stamp(cfg))
    write_sidecar(fld, out.with_suffix(".json"), **_echo(cfg), fixture=fam.label)
    print(pgm)
    return EXIT_OK


def cmd_solve(cfg: dict) -> int:
    from .preperiodic import all_drivers, find_pcf

    _positive(cfg, "nmax")
    fam = resolve_family(cfg["fixture"])
    idx = [int(x) for x in str(cfg["driver"]).split(",") if x != ""]
    if any(not 0 <= i < len(fam.marked) for i in idx):
        raise ConfigError("driver index out of range")
    driver = [d for i in idx for d in all_drivers(i, int(cfg["nmax"]))]
    rs = find_pcf(fam, driver)
    text = rs.to_csv(None, _stamp(cfg))
    _write_text(cfg, text)
    return EXIT_OK


def cmd_relate(cfg: dict) -> int:
    from .relations import check_orbit_relation, find_affine_symmetry, functional_root
    from .errors import NoIntegerRootDegree

    _positive(cfg, "kmax")
    if cfg["nmax"] < 0:
        raise ConfigError("nmax must be >= 0")
    fam = resolve_family(cfg["fixture"])
    cands = list(find_affine_symmetry(fam, int(cfg["kmax"]), int(cfg["tdeg_max"])))
    for e in range(2, 5):
        try:
            g = functional_root(fam, e)
        except NoIntegerRootDegree:
            continue
        if g is not None:
            cands.append(g)
    nmax, k = int(cfg["nmax"]), len(fam.marked)
    out = []
    for c in cands:
        rel = [{"i": i, "j": j, "n": n, "m": m}
               for i in range(1, k + 1) for j in range(1, k + 1)
               for n in range(nmax + 1) for m in range(nmax + 1)
               if check_orbit_relation(fam, c, i, j, n, m)]
        out.append({**c.to_json(), "h": repr(c.h), "relations": rel})
    doc = {**_echo(cfg), "fixture": fam.label, "symmetries": out}
    _write_text(cfg, json.dumps(doc, indent=2) + "\n")
    return EXIT_OK


def cmd_per1(cfg: dict) -> int:
    from .per1 import (Per1Family, per1_measures, per1_pcf_search, per1_robin, predicted_robin)
    from .param_plane import field_l1_distance, write_pgm

    lam = parse_complex(cfg["lambda"])
    fam = Per1Family(lam)
    if cfg["pcf_search"]:
        kw = {}
        if cfg.get("window"):
            kw["w"] = parse_window(cfg["window"], int(cfg["res"]))
        rs = per1_pcf_search(fam, **kw)
        _write_text(cfg, rs.to_csv(None, _stamp(cfg)))
        return EXIT_OK
    if lam == 0:
        raise ConfigError("λ = 0 supports --pcf-search only")
    doc = {**_echo(cfg), "lambda": [lam.real, lam.imag],
           "robin_plus": per1_robin(fam, "+").gamma, "robin_minus": per1_robin(fam, "-").gamma,
           "robin_predicted": predicted_robin(lam)}
    if cfg.get("window"):
        w = parse_window(cfg["window"], int(cfg["res"]))
        mp, mm, (a, b) = per1_measures(fam, w, int(cfg["cap"]), float(cfg["exclude_radius"]))
        doc.update(mass_plus=a, mass_minus=b, l1_distance=field_l1_distance(mp, mm))
        if cfg["out"]:
            base = Path(cfg["out"])
            write_pgm(mp, base.with_name(base.stem + "_plus.pgm"), _stamp(cfg))
            write_pgm(mm, base.with_name(base.stem + "_minus.pgm"), _stamp(cfg))
            cfg = {**cfg, "out": str(base.with_suffix(".json"))}
    _write_text(cfg, json.dumps(doc, indent=2) + "\n")
    return EXIT_OK


def cmd_equidist(cfg: dict) -> int:
    from .equidist import GreenSpec, potential_discrepancy, set_energy
    from .poly_core import tpoly_from_expr
    from .preperiodic import orbit_roots

    _positive(cfg, "n")
    fam = resolve_family(cfg["fixture"])
    a = tpoly_from_expr(cfg["point"]) if cfg.get("point") else fam.marked[int(cfg["marked"])]
    spec = GreenSpec.from_family(fam, a)
    m = cfg.get("m")
    rs = orbit_roots(fam, a, int(cfg["n"]), None if m is None else int(m))
    probes = [parse_complex(p) for p in str(cfg["probes"]).split(",") if p]
    rep = potential_discrepancy(spec, rs, probes)
    doc = {**_echo(cfg), **rep.to_json(), "energy": set_energy(spec, rs).energy,
           "q": str(spec.q), "gamma": spec.gamma}
    _write_text(cfg, json.dumps(doc, indent=2) + "\n")
    return EXIT_OK


def _write_text(cfg: dict, text: str):
    out = cfg.get("out")
    if out == "-" or out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)
        print(out)


# parser ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="critorbit", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"critorbit {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="JSON file with flag values")
        sp.add_argument("--threads", type=int, help="worker threads for raster kernels")
        sp.add_argument("--out", help="output path ('-' for stdout where text)")
        sp.add_argument("--seed", type=int, default=0)
        return sp

    r = common(sub.add_parser("render", help="parameter-plane raster to 16-bit PGM"))
    r.add_argument("--fixture")
    r.add_argument("--window", default="-2,2,-2,2")
    r.add_argument("--res", type=int, default=512)
    r.add_argument("--cap", type=int, default=512)
    r.add_argument("--kind", choices=["fraction", "locus", "green", "mass"], default="fraction")
    r.add_argument("--marked", type=int, default=0)
    r.set_defaults(func=cmd_render)

    s = common(sub.add_parser("solve", help="numerically PCF parameters from driver equations"))
    s.add_argument("--fixture")
    s.add_argument("--driver", default="0", help="comma-separated marked indices (from 0)")
    s.add_argument("--nmax", type=int, default=4)
    s.set_defaults(func=cmd_solve)

    rl = common(sub.add_parser("relate", help="symmetries and critical-orbit relations"))
    rl.add_argument("--fixture")
    rl.add_argument("--kmax", type=int, default=3)
    rl.add_argument("--tdeg-max", type=int, default=8)
    rl.add_argument("--nmax", type=int, default=2)
    rl.set_defaults(func=cmd_relate)

    pr = common(sub.add_parser("per1", help="cubics with a fixed point of given multiplier"))
    pr.add_argument("--lambda", dest="lambda")
    pr.add_argument("--pcf-search", action="store_true")
    pr.add_argument("--window")
    pr.add_argument("--res", type=int, default=800)
    pr.add_argument("--cap", type=int, default=512)
    pr.add_argument("--exclude-radius", type=float, default=0.4)
    pr.set_defaults(func=cmd_per1)

    e = common(sub.add_parser("equidist", help="potential discrepancy of a preperiodic set"))
    e.add_argument("--fixture")
    e.add_argument("--marked", type=int, default=0)
    e.add_argument("--point", help="marked point as an expression in t (overrides --marked)")
    e.add_argument("--n", type=int, default=10)
    e.add_argument("--m", type=int, help="solve f^n(a) = f^m(a); default f^n(a) = 0")
    e.add_argument("--probes", default="2")
    e.set_defaults(func=cmd_equidist)
    return p


def _subparser(parser, name):
    for act in parser._subparsers._group_actions:
        return act.choices[name]


def resolve_config(parser, argv) -> dict:
    args = parser.parse_args(argv)
    if not args.config:
        return vars(args)
    try:
        doc = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    sp = _subparser(parser, args.command)
    known = {a.dest for a in sp._actions} - {"help", "config"}
    norm = {k.replace("-", "_"): v for k, v in doc.items()}
    unknown = sorted(set(norm) - known)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    sp.set_defaults(**norm)
    return vars(parser.parse_args(argv))


_REQUIRED = {"render": ("fixture",), "solve": ("fixture",), "relate": ("fixture",),
             "equidist": ("fixture",), "per1": ("lambda",)}
_VALUE_FLAGS = ("--window", "--lambda", "--probes", "--point")


def _join_values(argv):
    """Let values such as ``--window -2,2,-1,1`` start with a minus sign."""
    argv = list(sys.argv[1:] if argv is None else argv)
    out, i = [], 0
    while i < len(argv):
        if argv[i] in _VALUE_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{argv[i]}={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    try:
        cfg = resolve_config(parser, _join_values(argv))
        missing = [k for k in _REQUIRED[cfg["command"]] if cfg.get(k) in (None, "")]
        if missing:
            raise ConfigError("missing " + ", ".join("--" + k for k in missing))
        if cfg.get("threads") is not None:
            import numba

            from . import _kernels  # noqa: F401 - pins the threading layer first
            if cfg["threads"] < 1:
                raise ConfigError("threads must be >= 1")
            numba.set_num_threads(min(cfg["threads"], numba.config.NUMBA_NUM_THREADS))
        np.random.seed(cfg.get("seed") or 0)
        func = cfg.pop("func")
        return func(cfg)
    except SystemExit as exc:  # argparse reports its own usage errors
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    except ConfigError as exc:
        print(f"critorbit: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CritOrbitError as exc:
        print(f"critorbit: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
