"""Time the compiled BFS kernel against the pure-Python search.

    python benchmarks/bench_kernels.py --pairs 200 --bound 12

Both kernels must return identical distances; the script exits 1 otherwise.
Set LINKSYMP_NO_NUMBA=1 to confirm the fallback path alone.
"""

import argparse
import random
import sys
import time

from linksymp import _accel
from linksymp.chain_graph import TreeGraph, twist_multidegree


def workload(n, d, bound, pairs, seed):
    T = TreeGraph.chain(n)
    moves = [twist_multidegree(T, v) for v in T.vertices]
    rng = random.Random(seed)

    def point():
        w = [rng.randint(-bound, bound) for _ in range(n - 1)]
        return tuple(w) + (d - sum(w),)

    return moves, [(point(), point()) for _ in range(pairs)]


def timed(fn, moves, jobs, cap):
    t0 = time.perf_counter()
    out = [fn(s, t, moves, cap) for s, t in jobs]
    return time.perf_counter() - t0, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--chain", type=int, default=4, help="number of components")
    ap.add_argument("--pairs", type=int, default=100)
    ap.add_argument("--bound", type=int, default=8)
    ap.add_argument("--cap", type=int, default=5 * 10**6)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    moves, jobs = workload(args.chain, 0, args.bound, args.pairs, args.seed)
    print(f"numba enabled: {_accel.numba_enabled()}")
    if _accel.numba_enabled():
        _accel.bfs_distance(*jobs[0], moves, args.cap)  # compile outside the timer
    t_fast, fast = timed(_accel.bfs_distance, moves, jobs, args.cap)
    t_py, slow = timed(_accel.bfs_distance_python, moves, jobs, args.cap)
    print(f"{len(jobs)} pairs on a {args.chain}-chain, entries within +-{args.bound}")
    print(f"  dispatch  {t_fast:8.3f} s")
    print(f"  python    {t_py:8.3f} s")
    if t_fast > 0:
        print(f"  speedup   {t_py / t_fast:8.1f}x")
    mism = [j for j, a, b in zip(jobs, fast, slow) if a != b]
    if mism:
        print(f"MISMATCH on {len(mism)} pairs, first {mism[0]}")
        return 1
    print(f"  max distance {max(fast)}; kernels agree")
    return 0


if __name__ == "__main__":
    sys.exit(main())
