"""Command-line runner: ``cantorlab <command> [--config FILE] [--out DIR] ...``.

Every command validates the whole configuration first, computes all tables in
memory and only then writes files, so a failing run leaves nothing behind.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import config as C
from .dimension import pressure_dimension
from .errors import BudgetExceeded, CantorLabError, ConfigError
from .limit_geometry import (
    check_affine_relation,
    eigenvalue_ratio_report,
    equispaced_grid,
    h_prime_one_profile,
    residual_sequence,
)
from .marstrand import count_overlaps, delta_rectangles, integral_estimate, as_arrays
from .report import Series, Table, svg_plot, version_lines
from .scale_space import (
    RelativeScale,
    calibrate_c5,
    default_tail,
    empirical_recurrence_map,
    pair_dimension,
)
from .subcantor import extract_subcantor
from .sum_image import LinearProjection, Sum, dimension_scan, j_r_grid
from .symbolic import greedy_tail
from .system import derivative_bounds_on_cylinder

EXIT_CONFIG = 2
EXIT_BUDGET = 3
EXIT_ERROR = 4
DIM_DEPTH = 10


@dataclass
class Output:
    tables: list = field(default_factory=list)
    svgs: dict = field(default_factory=dict)
    files: dict = field(default_factory=dict)


def _fit_slope(xs, ys):
    return float(np.polyfit(np.asarray(xs), np.asarray(ys), 1)[0])


# -- commands ---------------------------------------------------------------------


def cmd_dim(cfg, systems, opts) -> Output:
    base = ("experiments", "dim")
    names = [opts.system] if opts.system else cfg.get(base + ("systems",), [])
    if opts.system and opts.system not in systems:
        raise cfg.error(f"unknown system {opts.system!r}", base + ("systems",))
    if not opts.system:
        for i in range(len(names)):
            C.system_ref(cfg, systems, base + ("systems", i))
    depths = opts.depths or cfg.get(base + ("depths",), [2, 4, 6, 8])
    depths = [C.positive_int(cfg, base + ("depths", i), d) for i, d in enumerate(depths)]
    cols = ["system", "depth", "d_lower", "d_upper", "width", "residual"] + (["wall_time"] if opts.timing else [])
    table = Table("dim", cols, meta={"bisection_bracket": "[0,2] widened by doubling", "bisection_xtol": 1e-13})
    series = []
    for name in names:
        lo, hi = [], []
        for n in depths:
            t0 = time.perf_counter()
            br = pressure_dimension(systems[name], n, opts.budget)
            extra = [time.perf_counter() - t0] if opts.timing else []
            table.add(name, n, br.d_lower, br.d_upper, br.width, br.residual, *extra)
            lo.append(br.d_lower)
            hi.append(br.d_upper)
        series += [Series(f"{name} lower", depths, lo), Series(f"{name} upper", depths, hi)]
    out = Output([table])
    if opts.svg:
        out.svgs["dim.svg"] = svg_plot("Dimension brackets", "depth", "dimension", series)
    return out


def cmd_limitgeom(cfg, systems, opts) -> Output:
    base = ("experiments", "limitgeom")
    name = opts.system or cfg.get(base + ("system",))
    if name not in systems:
        raise cfg.error(f"unknown system {name!r}", base + ("system",))
    system = systems[name]
    symbol = cfg.get(base + ("tail_symbol",), system.spec.alphabet[0])
    if symbol not in system.spec.alphabet:
        raise cfg.error(f"symbol {symbol!r} not in the alphabet", base + ("tail_symbol",))
    depths = [C.positive_int(cfg, base + ("depths", i), d) for i, d in enumerate(cfg.get(base + ("depths",), [4, 6, 8]))]
    step = C.positive_int(cfg, base + ("step",), cfg.get(base + ("step",), 2))
    rel_n = cfg.get(base + ("relation_n",), 2)
    rel_depth = C.positive_int(cfg, base + ("relation_depth",), cfg.get(base + ("relation_depth",), 10))
    hp = cfg.get(base + ("h_prime_one",), {}) or {}
    words = [tuple(w) for w in cfg.get(base + ("periodic_words",), [])]
    for i, w in enumerate(words):
        if not system.spec.is_cyclic(w):
            raise cfg.error(f"word {list(w)} is not cyclically admissible", base + ("periodic_words", i))
    tail0 = tuple(hp.get("tail0", ())) or None
    tail1 = tuple(hp.get("tail1", ())) or None
    hp_depth = int(hp.get("depth", 12))
    for key, t in (("tail0", tail0), ("tail1", tail1)):
        if t is not None and (not system.spec.is_admissible(t) or len(t) < hp_depth + 3):
            raise cfg.error(f"tail must be admissible with at least {hp_depth + 3} symbols", base + ("h_prime_one", key))

    tail = greedy_tail(system.spec, symbol, max(depths) + step + 1)
    res = residual_sequence(system, tail, depths, step)
    conv = Table("limitgeom_convergence", ["n", "residual", "ratio"], meta={"system": name, "tail_symbol": symbol, "step": step, "grid_points": 101})
    for i, n in enumerate(depths):
        nxt = depths.index(n + step) if n + step in depths else None
        conv.add(n, res[i], res[nxt] / res[i] if nxt is not None and res[i] > 0 else None)
    rel_tail = greedy_tail(system.spec, symbol, rel_depth + rel_n + 1)
    rep = check_affine_relation(system, rel_tail, rel_n, equispaced_grid(system, symbol, 50), rel_depth)
    rel = Table("limitgeom_relation", ["n", "depth", "residual", "truncation_residual_sum", "within"], meta={"system": name})
    rel.add(rep.n, rep.depth, rep.residual, sum(rep.truncation_residuals), rep.within_truncation)
    out = Output([conv, rel])
    if tail0 and tail1:
        points = int(hp.get("points", 50))
        grid = equispaced_grid(system, tail0[-1], points)
        prof = h_prime_one_profile(system, tail0, tail1, grid, hp_depth)
        check = h_prime_one_profile(system, tail0, tail1, grid, hp_depth + 2)
        h1 = Table("limitgeom_h1", ["x", "value", "value_deeper"],
                   meta={"system": name, "depth": hp_depth, "max_abs": prof.max_abs, "max_abs_deeper": check.max_abs})
        for x, v, w in zip(prof.grid, prof.values, check.values):
            h1.add(x, v, w)
        out.tables.append(h1)
        if opts.svg:
            out.svgs["limitgeom_h1.svg"] = svg_plot("D log D of the transfer map", "x", "value", [Series(f"depth {hp_depth}", list(prof.grid), list(prof.values))])
    if len(words) >= 2:
        ratios = Table("limitgeom_ratios", ["word_i", "word_j", "mu_i", "mu_j", "ratio", "denominator_for_1e-12", "convergents"],
                       meta={"system": name, "max_denominator": 10**6})
        for e in eigenvalue_ratio_report(system, words):
            conv_s = " ".join(f"{p}/{q}" for p, q in e.convergents)
            ratios.add(".".join(map(str, e.words[0])), ".".join(map(str, e.words[1])), e.eigenvalues[0], e.eigenvalues[1], e.ratio, e.denominator_for_tol, conv_s)
        out.tables.append(ratios)
    if opts.svg:
        out.svgs["limitgeom_convergence.svg"] = svg_plot("Limit geometry convergence", "n", "log10 residual",
                                                         [Series(name, depths, [math.log10(r) if r > 0 else float("nan") for r in res])])
    return out


def _pair(cfg, systems, base, override):
    if override:
        names = override.split(",")
        if len(names) != 2:
            raise cfg.error("--pair needs two comma-separated names", base + ("pair",))
    else:
        names = cfg.get(base + ("pair",))
        if not isinstance(names, list) or len(names) != 2:
            raise cfg.error("pair must list two systems", base + ("pair",))
    for i, n in enumerate(names):
        if n not in systems:
            raise cfg.error(f"unknown system {n!r}", base + ("pair", i))
    return names, (systems[names[0]], systems[names[1]])


def cmd_marstrand(cfg, systems, opts) -> Output:
    base = ("experiments", "marstrand")
    names, pair = _pair(cfg, systems, base, opts.pair)
    rhos = C.resolve_scales(cfg, base + ("rhos",), cfg.get(base + ("rhos",), {"base": 3, "from": 2, "to": 6}))
    R = C._number(cfg, base + ("R",), cfg.get(base + ("R",), 4.0), positive=True)
    c0 = C._number(cfg, base + ("c0",), cfg.get(base + ("c0",), 2.0), positive=True)
    s_values = [C._number(cfg, base + ("s_values", i), s) for i, s in enumerate(cfg.get(base + ("s_values",), [1.0]))]
    D = pair_dimension(pair, DIM_DEPTH)
    integ = Table("marstrand_integral", ["rho", "rectangles", "integral"], meta={"pair": "+".join(names), "R": R, "c0": c0, "d_plus_d2": D})
    counts = Table("marstrand_counts", ["rho", "s", "N"], meta={"pair": "+".join(names), "c0": c0})
    xs, ys = [], []
    for rho in rhos:
        rects = as_arrays(delta_rectangles(pair, rho, c0, budget=opts.budget))
        val = integral_estimate(rects, R)
        integ.add(rho, len(rects), val)
        xs.append(math.log(rho))
        ys.append(math.log(val))
        for s in s_values:
            counts.add(rho, s, count_overlaps(rects, s))
    slope = _fit_slope(xs, ys) if len(xs) >= 2 else float("nan")
    integ.meta["fitted_slope"] = slope
    integ.meta["reference_exponent"] = -D
    out = Output([integ, counts])
    if opts.svg:
        out.svgs["marstrand_integral.svg"] = svg_plot("Integral of N over [-R, R]", "log rho", "log integral", [Series("integral", xs, ys)])
    return out


def cmd_sumscan(cfg, systems, opts) -> Output:
    base = ("experiments", "sumscan")
    names, pair = _pair(cfg, systems, base, opts.pair)
    family = cfg.get(base + ("map",), "sum")
    if family not in ("sum", "linear_projection"):
        raise cfg.error(f"unknown map family {family!r}", base + ("map",))
    R = C._number(cfg, base + ("R",), cfg.get(base + ("R",), 4.0), positive=True)
    points = C.positive_int(cfg, base + ("s_points",), cfg.get(base + ("s_points",), 50))
    deltas = C.resolve_scales(cfg, base + ("deltas",), cfg.get(base + ("deltas",), {"base": 2, "from": 6, "to": 14}))
    tol = C._number(cfg, base + ("tol",), cfg.get(base + ("tol",), 0.1), positive=True)
    fit = C.positive_int(cfg, base + ("fit_scales",), cfg.get(base + ("fit_scales",), 5))
    if len(deltas) < 3:
        raise cfg.error("need at least three scales", base + ("deltas",))
    b1 = pressure_dimension(pair[0], DIM_DEPTH, opts.budget)
    b2 = pressure_dimension(pair[1], DIM_DEPTH, opts.budget)
    target = min(1.0, b1.midpoint + b2.midpoint)
    maker = Sum if family == "sum" else LinearProjection
    rows = dimension_scan(maker, j_r_grid(R, points), pair, deltas, target, tol, fit, opts.budget, opts.threads)
    cols = ["s", "slope", "residual", "flagged"] + [f"N_{d:.12g}" for d in deltas]
    within = sum(not r.flagged for r in rows) / len(rows)
    table = Table("sumscan", cols, meta={
        "pair": "+".join(names), "map": family, "R": R, "target": target, "tol": tol, "fit_scales": fit,
        "d_bracket": f"[{b1.d_lower:.12g} {b1.d_upper:.12g}]", "d2_bracket": f"[{b2.d_lower:.12g} {b2.d_upper:.12g}]",
        "fraction_within_tol": within,
    })
    for r in rows:
        table.add(r.s, r.slope, r.residual, r.flagged, *[n for _, n in r.counts])
    out = Output([table])
    if opts.svg:
        out.svgs["sumscan.svg"] = svg_plot("Box dimension of the image", "s", "fitted slope",
                                           [Series("slope", [r.s for r in rows], [r.slope for r in rows]),
                                            Series("target", [rows[0].s, rows[-1].s], [target, target])])
    return out


def cmd_extract(cfg, systems, opts) -> Output:
    base = ("experiments", "extract")
    name = opts.system or cfg.get(base + ("system",))
    if name not in systems:
        raise cfg.error(f"unknown system {name!r}", base + ("system",))
    a = opts.a if opts.a is not None else C._number(cfg, base + ("a",), cfg.get(base + ("a",)))
    b = opts.b if opts.b is not None else C._number(cfg, base + ("b",), cfg.get(base + ("b",)))
    if not 0 <= a < b:
        raise cfg.error("need 0 <= a < b", base + ("a",))
    system = systems[name]
    res = extract_subcantor(system, a, b, opts.budget)
    summary = Table("extract", ["n", "c_marker", "d_marker", "kept", "pivot", "c_hat", "kept_sum", "pivot_sum", "sum_a", "sum_lower",
                                "bracket_depth", "d_lower", "d_upper"],
                    meta={"system": name, "a": a, "b": b, "c_hat_safety": 0.9, "c_hat_note": "empirical distortion estimate at the block depth"})
    summary.add(res.n, res.markers[0], res.markers[1], len(res.kept), ".".join(map(str, res.pivot)), res.c_hat, res.kept_sum,
                res.pivot_sum, res.sum_a, res.sum_lower, res.bracket.depth, res.bracket.d_lower, res.bracket.d_upper)
    kept = Table("extract_kept", ["block", "lambda_inf", "Lambda_sup"], meta={"system": name})
    for y in res.kept:
        lo, hi = derivative_bounds_on_cylinder(system, y + (res.markers[0],))
        kept.add(".".join(map(str, y)), lo, hi)
    out_name = f"{name}_sub"
    return Output([summary, kept], files={"extract_system.yaml": C.dump_systems({out_name: res.system})})


def cmd_recurrence(cfg, systems, opts) -> Output:
    base = ("experiments", "recurrence")
    names, pair = _pair(cfg, systems, base, opts.pair)
    rho = C._number(cfg, base + ("rho",), cfg.get(base + ("rho",), 2.0**-5), positive=True)
    if not rho < 1:
        raise cfg.error("rho must be < 1", base + ("rho",))
    m = C.positive_int(cfg, base + ("m",), cfg.get(base + ("m",), 3))
    if m < 3:
        raise cfg.error("m must be >= 3", base + ("m",))
    R = C._number(cfg, base + ("R",), cfg.get(base + ("R",), 4.0), positive=True)
    c0 = C._number(cfg, base + ("c0",), cfg.get(base + ("c0",), 2.0), positive=True)
    points = C.positive_int(cfg, base + ("s_points",), cfg.get(base + ("s_points",), 9))
    s_grid = j_r_grid(R, points)
    D = pair_dimension(pair, DIM_DEPTH)
    c5 = cfg.get(base + ("c5",))
    if c5 is None:
        factor = C._number(cfg, base + ("c5_factor",), cfg.get(base + ("c5_factor",), 4.0), positive=True)
        tails = [(default_tail(pair[0], a), default_tail(pair[1], a2)) for a in pair[0].spec.alphabet for a2 in pair[1].spec.alphabet]
        c5 = calibrate_c5(pair, tails, rho, s_grid, m, factor, c0, D, opts.budget)
        c5_kind = f"empirical ({factor:g} x observed max over the s-grid)"
    else:
        c5 = C._number(cfg, base + ("c5",), c5, positive=True)
        c5_kind = "configured"
    rep = empirical_recurrence_map(pair, rho, s_grid, m, c5, R, c0, dims=D, budget=opts.budget)
    table = Table("recurrence", ["symbol", "symbol2", "s", "good", "fraction"],
                  meta={"pair": "+".join(names), "rho": rho, "m": m, "R": R, "c0": c0, "c5": c5, "c5_kind": c5_kind, "d_plus_d2": D})
    for row in rep.rows:
        table.add(row.symbol, row.symbol2, row.s, row.good, row.fraction)
    for (a, a2), frac in rep.tail_fraction.items():
        table.meta[f"mean_fraction[{a},{a2}]"] = frac
    return Output([table])


COMMAND_FUNCS = {
    "dim": cmd_dim,
    "limitgeom": cmd_limitgeom,
    "marstrand": cmd_marstrand,
    "sumscan": cmd_sumscan,
    "extract": cmd_extract,
    "recurrence": cmd_recurrence,
}


# -- entry point ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cantorlab", description="Experiments on regular Cantor sets.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML experiment config (built-in defaults if omitted)")
    common.add_argument("--out", default="cantorlab_out", help="output directory")
    common.add_argument("--svg", action="store_true", help="also write SVG line plots")
    common.add_argument("--budget", type=int, default=None, help="max enumerated words per call")
    common.add_argument("--threads", type=int, default=1, help="parallelism hint")
    common.add_argument("--timing", action="store_true", help="add wall-time columns (breaks byte-identical reruns)")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in C.COMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name in ("dim", "limitgeom", "extract"):
            p.add_argument("--system", help="system name (overrides the config)")
        if name in ("marstrand", "sumscan", "recurrence"):
            p.add_argument("--pair", help="two system names, comma separated")
        if name == "dim":
            p.add_argument("--depths", type=lambda s: [int(x) for x in s.split(",")], help="comma-separated depths")
        if name == "extract":
            p.add_argument("--a", type=float)
            p.add_argument("--b", type=float)
    return parser


def run(command: str, opts) -> int:
    try:
        cfg = C.load_config_file(opts.config) if opts.config else C.load_config()
        if opts.budget is not None and opts.budget <= 0:
            raise ConfigError("--budget must be positive")
        if opts.threads <= 0:
            raise ConfigError("--threads must be positive")
        opts.budget = C.check_budget(cfg, opts.budget if opts.budget is not None else cfg.get(("budget",)))
        systems = C.build_systems(cfg)
        for attr in ("system", "pair", "depths", "a", "b"):
            if not hasattr(opts, attr):
                setattr(opts, attr, None)
        out = COMMAND_FUNCS[command](cfg, systems, opts)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        if exc.partial is not None:
            print(f"partial result: {exc.partial!r}"[:2000], file=sys.stderr)
        return EXIT_BUDGET
    except CantorLabError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR

    overrides = {k: getattr(opts, k) for k in ("system", "pair", "depths", "a", "b") if getattr(opts, k) is not None}
    header = {"command": command, "config_hash": cfg.digest(), "config_source": os.path.basename(cfg.source),
              **{f"version_{k}": v for k, v in version_lines().items()}, "budget": opts.budget}
    for k, v in sorted(overrides.items()):
        header[f"override_{k}"] = v if not isinstance(v, list) else " ".join(map(str, v))
    os.makedirs(opts.out, exist_ok=True)
    for table in out.tables:
        with open(os.path.join(opts.out, f"{table.name}.csv"), "w", encoding="utf-8", newline="") as fh:
            fh.write(table.to_csv(header))
    for fname, text in {**out.svgs, **out.files}.items():
        with open(os.path.join(opts.out, fname), "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    opts = parser.parse_args(argv)
    return run(opts.command, opts)


if __name__ == "__main__":
    sys.exit(main())
