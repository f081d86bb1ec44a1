"""Compare the numba kernels with their numpy twins.

    python benchmarks/bench_search.py --q 5 7 8 --repeat 3

Each kernel is timed on the same inputs along both paths (numba warmed up
first) and the outputs are checked for equality.
"""

from __future__ import annotations

import argparse
import random
import time

import numpy as np

from wilson_triality import kernels
from wilson_triality._jit import NUMBA_AVAILABLE
from wilson_triality.gf import factorize
from wilson_triality.maps import group_for


def best_of(fn, repeat: int) -> tuple[float, object]:
    best, out = float("inf"), None
    for _ in range(repeat):
        start = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - start)
    return best, out


def same(x, y) -> bool:
    if isinstance(x, tuple):
        return all(same(a, b) for a, b in zip(x, y))
    return np.array_equal(x, y)


def cases(q: int):
    (p, n), = factorize(q).items()
    G = group_for(p, n)
    F = G.ctx
    tables = (F.exp, F.log, F.one_plus, F.neg_table)
    a_values = np.arange(F.order, dtype=np.int64)
    rng = random.Random(q)
    mats = np.array([G.random_element(rng) for _ in range(2000)], dtype=np.int64)
    perms = np.stack([G.line_permutation(G.random_element(rng)) for _ in range(3)])
    yield ("scan", lambda: kernels._scan_eq4_numba(a_values, *tables, F.frob_q_table),
           lambda: kernels._scan_eq4_numpy(a_values, *tables, F.frob_q_table))
    yield ("orders", lambda: kernels._mat_orders_numba(mats, *tables, G.Q + 1),
           lambda: kernels._mat_orders_numpy(mats, *tables, G.Q + 1))
    # the two paths visit the orbit in different orders; compare the point sets
    yield ("orbit", lambda: np.sort(kernels._orbit_tree_numba(perms, 0)[0]),
           lambda: np.sort(kernels._orbit_tree_numpy(perms, 0)[0]))


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--q", type=int, nargs="+", default=[3, 5, 7, 8])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if not NUMBA_AVAILABLE:
        raise SystemExit("numba is not importable (or WILSON_TRIALITY_DISABLE_NUMBA is set)")
    print(f"{'q':>4} {'kernel':<8} {'numba s':>10} {'numpy s':>10} {'speed-up':>9}  equal")
    for q in args.q:
        for name, fast, slow in cases(q):
            fast()  # compile
            t_fast, out_fast = best_of(fast, args.repeat)
            t_slow, out_slow = best_of(slow, args.repeat)
            ratio = t_slow / t_fast if t_fast > 0 else float("inf")
            print(f"{q:>4} {name:<8} {t_fast:>10.4f} {t_slow:>10.4f} {ratio:>8.1f}x  {same(out_fast, out_slow)}")


if __name__ == "__main__":
    main()
