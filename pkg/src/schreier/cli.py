"""Command-line surface: generators, pipeline stages, verifiers and the
local-statistics checks, wired through flat files.

Every subcommand is a pure function of its input files, flags and seed, and
always prints one machine-readable JSON report to stdout. The exit code is 0
iff every verification in the run passed. SCHREIER_WORK_BUDGET caps
canonicalization work; SCHREIER_NUMBA=0 forces the pure-Python kernels."""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import coloring as col
from . import decorate as dec
from . import graph as gr
from . import localstats as ls
from . import orientation as ori


def _emit(report: dict) -> None:
    print(json.dumps(report, sort_keys=True))


def _fail(report: dict, message: str) -> int:
    report["ok"] = False
    report["error"] = message
    _emit(report)
    return 1


def cmd_gen(args) -> int:
    report = {"command": "gen", "kind": args.kind, "seed": args.seed, "out": args.out}
    try:
        if args.kind == "conf-reg":
            spec = gr.GraphSpec("configuration_model_regular", args.seed,
                                {"degree": args.deg, "n": args.n})
        elif args.kind == "bipartite-reg":
            spec = gr.GraphSpec("bipartite_regular", args.seed,
                                {"d": args.deg, "n_per_side": args.n_per_side})
        elif args.kind == "chord-cycle":
            spec = gr.GraphSpec("sparse_chord_cycle", args.seed,
                                {"cycle_len": args.cycle_len, "chord_gap": args.chord_gap})
        else:
            spec = gr.GraphSpec("even_tree_window", args.seed,
                                {"depth": args.depth, "half_degree_cap": args.half_cap})
        g = gr.generate(spec)
        if args.kind == "tree-window":
            with open(args.out, "w") as fh:
                fh.write(ori.window_to_json(ori.TreeWindow.from_tree(g)))
        else:
            gr.write_edge_list(g, args.out)
    except (ValueError, OSError) as ex:
        return _fail(report, str(ex))
    report.update(ok=True, n=g.n, m=g.m)
    _emit(report)
    return 0


def cmd_orient(args) -> int:
    report = {"command": "orient", "mode": args.mode, "in": args.infile, "out": args.out}
    try:
        g = gr.read_edge_list(args.infile)
        if args.mode == "euler":
            o = ori.eulerian_orientation(g)
        else:
            if args.seed is None:
                return _fail(report, "canonical mode needs --seed")
            report["seed"] = args.seed
            o = ori.canonical_random_orientation(g, args.seed)
        ori.write_orientation(o, args.out)
    except (ValueError, OSError) as ex:
        return _fail(report, str(ex))
    ok, bad = ori.is_balanced(g, o)
    report.update(ok=ok, balanced=ok, n=g.n, m=g.m)
    if not ok:
        report["violation_vertex"] = bad
    _emit(report)
    return 0 if ok else 1


def cmd_decorate(args) -> int:
    report = {"command": "decorate", "in": args.infile, "out": args.out, "seed": args.seed}
    try:
        g = gr.read_edge_list(args.infile)
        d = dec.schreier_decorate(g, seed=args.seed)
        with open(args.out, "w") as fh:
            fh.write(dec.to_decoration_json(d))
    except (ValueError, OSError, RuntimeError) as ex:
        return _fail(report, str(ex))
    ok, why = dec.verify_decoration(d)
    report.update(ok=ok, n=g.n, m=g.m, d=d.d)
    if not ok:
        report["violation"] = why
    _emit(report)
    return 0 if ok else 1


def cmd_color(args) -> int:
    report = {"command": "color", "mode": args.mode, "in": args.infile, "out": args.out}
    try:
        g = gr.read_edge_list(args.infile)
        b = col.bipartition(g)
        if args.verify:
            with open(args.verify) as fh:
                coloring = col.from_coloring_text(g.m, fh.read())
            ok, conflict = col.verify_proper(b, coloring)
            report.update(ok=ok, mode="verify", **col.density_report(coloring, g.n))
            if conflict:
                report["conflict"] = list(conflict)
            _emit(report)
            return 0 if ok else 1
        if not args.out:
            return _fail(report, "coloring modes need --out")
        if args.mode == "konig":
            coloring = col.konig_color(b, seed=args.seed)
            report["stage_reports"] = []
        elif args.mode == "budgeted":
            d = args.d if args.d is not None else int(g.degrees().max())
            coloring = col.budgeted_color(b, d)
            report["stage_reports"] = []
        elif args.mode == "purple":
            if args.r is None:
                return _fail(report, "purple mode needs --r")
            coloring = col.purple_eliminate(b, args.r)
            report["stage_reports"] = [{"stage": "purple", "r": args.r}]
        else:
            if not args.r_schedule:
                return _fail(report, "almost-proper mode needs --r-schedule")
            schedule = [int(x) for x in args.r_schedule.split(",")]
            coloring, rep = col.almost_proper_color(b, schedule, d=args.d)
            report["stage_reports"] = rep["stage_reports"]
            report["target_density"] = rep["target_density"]
        with open(args.out, "w") as fh:
            fh.write(col.to_coloring_text(coloring))
    except (ValueError, OSError, RuntimeError) as ex:
        return _fail(report, str(ex))
    ok, conflict = col.verify_proper(b, coloring)
    report.update(ok=ok, **col.density_report(coloring, g.n))
    if conflict:
        report["conflict"] = list(conflict)
    _emit(report)
    return 0 if ok else 1


def cmd_stats(args) -> int:
    report = {"command": "stats", "radius": args.radius, "in": args.infile}
    try:
        decoration = None
        orientation = None
        if args.decoration:
            with open(args.decoration) as fh:
                decoration = dec.from_decoration_json(fh.read())
            g = decoration.base
            orientation = decoration.orientation
        else:
            g = gr.read_edge_list(args.infile)
            if args.orientation:
                orientation = ori.read_orientation(g, args.orientation)
                report["orientation"] = args.orientation
        sample = None
        if args.samples:
            if args.seed is None:
                return _fail(report, "sampled mode needs --seed")
            sample = (args.samples, args.seed)
            report["samples"] = args.samples
            report["seed"] = args.seed
        nd = ls.neighborhood_distribution(
            g, args.radius,
            orientation=orientation,
            coloring=decoration.coloring if decoration else None,
            sample=sample)
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(ls.dump_distribution(nd))
            report["out"] = args.out
        report["support"] = len(nd.counts)
        ok = True
        if args.shift_check is not None:
            if decoration is None:
                return _fail(report, "--shift-check needs --decoration")
            tv = ls.generator_shift_check(decoration, args.shift_check, args.radius)
            report["shift_tv"] = tv
            ok = tv == 0.0
        else:
            tv, inv_rep = ls.involution_invariance_check(g, args.radius, sample=sample)
            report["involution_tv"] = tv
            report["involution_mode"] = inv_rep["mode"]
            if sample is None:
                ok = tv == 0.0
    except (ValueError, OSError, ls.WorkBudgetExceeded) as ex:
        return _fail(report, str(ex))
    report["ok"] = ok
    _emit(report)
    return 0 if ok else 1


def cmd_orientation_law(args) -> int:
    report = {"command": "orientation-law", "window": args.window, "root": args.root,
              "samples": args.samples, "seed": args.seed}
    try:
        with open(args.window) as fh:
            w = ori.window_from_json(fh.read())
        law = ori.tree_orientation_law(w)
        mass_sum = float(sum(law.values()))
        internal = sorted(w.internal)
        root2 = args.root2
        if root2 is None:
            others = [v for v in internal if v != args.root]
            root2 = others[0] if others else args.root
        tv12, tv_oracle = ori.root_invariance_test(w, args.root, root2,
                                                   args.samples, args.seed)
    except (ValueError, OSError) as ex:
        return _fail(report, str(ex))
    ok = abs(mass_sum - 1.0) <= 1e-12
    report.update(ok=ok, root2=root2, outcomes=len(law), oracle_mass_sum=mass_sum,
                  tv_between_roots=tv12, tv_against_oracle=tv_oracle)
    _emit(report)
    return 0 if ok else 1


def cmd_sparse_label(args) -> int:
    from . import labeling as lab
    report = {"command": "sparse-label", "in": args.infile, "r": args.r}
    try:
        g = gr.read_edge_list(args.infile)
        sl = lab.sparse_labeling(g, args.r)
        ok, pair = lab.verify_sparse(g, sl)
        if args.out:
            with open(args.out, "w") as fh:
                fh.write("\n".join(str(int(x)) for x in sl.labels) + "\n")
            report["out"] = args.out
    except (ValueError, OSError) as ex:
        return _fail(report, str(ex))
    report.update(ok=ok, k=sl.k)
    if pair:
        report["violating_pair"] = list(pair)
    _emit(report)
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="schreier",
                                description="Schreier decorations of even-degree multigraphs")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a graph instance")
    g.add_argument("--kind", required=True,
                   choices=["conf-reg", "bipartite-reg", "tree-window", "chord-cycle"])
    g.add_argument("--deg", type=int, help="degree (conf-reg) or d (bipartite-reg)")
    g.add_argument("--n", type=int, help="vertex count (conf-reg)")
    g.add_argument("--n-per-side", type=int, help="side size (bipartite-reg)")
    g.add_argument("--depth", type=int, default=3, help="tree-window depth")
    g.add_argument("--half-cap", type=int, default=2, help="tree-window max half-degree")
    g.add_argument("--cycle-len", type=int, help="chord-cycle length")
    g.add_argument("--chord-gap", type=int, help="chord-cycle degree-3 spacing")
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen)

    o = sub.add_parser("orient", help="orient an even-degree graph")
    o.add_argument("--in", dest="infile", required=True)
    o.add_argument("--mode", choices=["euler", "canonical"], default="euler")
    o.add_argument("--seed", type=int)
    o.add_argument("--out", required=True)
    o.set_defaults(func=cmd_orient)

    d = sub.add_parser("decorate", help="Schreier-decorate a 2d-regular graph")
    d.add_argument("--in", dest="infile", required=True)
    d.add_argument("--seed", type=int, required=True)
    d.add_argument("--out", required=True)
    d.set_defaults(func=cmd_decorate)

    c = sub.add_parser("color", help="edge-color a bipartite graph")
    c.add_argument("--in", dest="infile", required=True)
    c.add_argument("--mode", choices=["konig", "budgeted", "almost-proper", "purple"],
                   default="konig")
    c.add_argument("--d", type=int, help="palette parameter d")
    c.add_argument("--r", type=int, help="sparsity radius (purple)")
    c.add_argument("--r-schedule", help="comma-separated radii r_2,...,r_d (almost-proper)")
    c.add_argument("--seed", type=int, help="Kőnig insertion order seed")
    c.add_argument("--verify", help="verify this coloring file instead of coloring")
    c.add_argument("--out")
    c.set_defaults(func=cmd_color)

    s = sub.add_parser("stats", help="neighborhood statistics and invariance checks")
    s.add_argument("--in", dest="infile")
    s.add_argument("--radius", type=int, required=True)
    s.add_argument("--samples", type=int)
    s.add_argument("--seed", type=int)
    s.add_argument("--decoration", help="decoration JSON; marks the balls")
    s.add_argument("--orientation", help="orientation file; marks the balls")
    s.add_argument("--shift-check", type=int, help="generator color for the shift check")
    s.add_argument("--out", help="distribution dump path")
    s.set_defaults(func=cmd_stats)

    l = sub.add_parser("orientation-law", help="tree-window law vs sampler")
    l.add_argument("--window", required=True)
    l.add_argument("--root", type=int, required=True)
    l.add_argument("--root2", type=int)
    l.add_argument("--samples", type=int, default=100_000)
    l.add_argument("--seed", type=int, required=True)
    l.set_defaults(func=cmd_orientation_law)

    sl = sub.add_parser("sparse-label", help="debug: r-sparse vertex labeling")
    sl.add_argument("--in", dest="infile", required=True)
    sl.add_argument("--r", type=int, required=True)
    sl.add_argument("--out")
    sl.set_defaults(func=cmd_sparse_label)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "infile", None) is None and args.command == "stats" \
            and not getattr(args, "decoration", None):
        print(json.dumps({"command": "stats", "ok": False,
                          "error": "stats needs --in or --decoration"}, sort_keys=True))
        return 1
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
