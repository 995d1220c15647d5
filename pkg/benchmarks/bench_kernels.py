#!/usr/bin/env python3
"""Benchmark the hot kernels with numba enabled against the pure-Python
fallback (SCHREIER_NUMBA=0).

Run without arguments to get the comparison table; each mode runs in its own
subprocess because the kernel mode is fixed at import time.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import json
import os
import subprocess
import sys
import time


def workloads():
    import numpy as np

    from schreier import coloring as col
    from schreier import graph as gr
    from schreier import orientation as ori

    g = gr.generate(gr.GraphSpec("configuration_model_regular", 11,
                                 {"degree": 8, "n": 2000}))

    def bench_euler():
        ori.eulerian_orientation(g)

    cover, _ = col.double_cover(g, ori.eulerian_orientation(g))

    def bench_konig():
        col.konig_color(cover)

    tree = gr.generate(gr.GraphSpec("even_tree_window", 5,
                                    {"depth": 3, "half_degree_cap": 2}))
    w = ori.TreeWindow.from_tree(tree)

    def bench_tree_sampler():
        ori.sample_tree_orientations(w, 0, 100_000, seed=3)

    def bench_bfs():
        for v in range(0, g.n, 4):
            gr.ball(g, v, 3)

    return {
        "euler_orientation(8-reg, n=2000)": bench_euler,
        "konig_color(4-reg cover, n=4000)": bench_konig,
        "tree_sampler(1e5 draws)": bench_tree_sampler,
        "bfs_balls(r=3, 500 roots)": bench_bfs,
    }


def run_mode(repeat: int) -> None:
    from schreier import _kernels

    results = {"numba": _kernels.NUMBA_ENABLED, "timings": {}}
    for name, fn in workloads().items():
        fn()  # warm-up / JIT compile
        best = min(_timed(fn) for _ in range(repeat))
        results["timings"][name] = best
    print(json.dumps(results))


def _timed(fn) -> float:
    t0 = time.perf_counter()
    fn()
    return time.perf_counter() - t0


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--mode", choices=["numba", "python"], help=argparse.SUPPRESS)
    args = ap.parse_args()
    if args.mode:
        run_mode(args.repeat)
        return 0

    out = {}
    for mode, flag in (("numba", "1"), ("python", "0")):
        env = dict(os.environ, SCHREIER_NUMBA=flag)
        proc = subprocess.run([sys.executable, __file__, "--mode", mode,
                               "--repeat", str(args.repeat)],
                              capture_output=True, text=True, env=env)
        if proc.returncode != 0:
            print(proc.stderr, file=sys.stderr)
            return 1
        out[mode] = json.loads(proc.stdout.splitlines()[-1])

    print(f"{'kernel':<36} {'numba':>10} {'python':>10} {'speedup':>9}")
    for name in out["numba"]["timings"]:
        tn = out["numba"]["timings"][name]
        tp = out["python"]["timings"][name]
        print(f"{name:<36} {tn * 1e3:>8.1f}ms {tp * 1e3:>8.1f}ms {tp / tn:>8.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
