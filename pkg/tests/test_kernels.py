"""The numba and numpy kernels must agree exactly."""

import os
import random
import subprocess
import sys

import numpy as np
import pytest

from wilson_triality import kernels
from wilson_triality._jit import NUMBA_AVAILABLE
from wilson_triality.maps import group_for

needs_numba = pytest.mark.skipif(not NUMBA_AVAILABLE, reason="numba not importable")


def _tables(F):
    return F.exp, F.log, F.one_plus, F.neg_table


@needs_numba
@pytest.mark.parametrize("p,n", [(3, 1), (2, 2), (5, 1), (2, 3)])
def test_scan_paths_agree(p, n):
    F = group_for(p, n).ctx
    a = np.arange(F.order, dtype=np.int64)
    fast = kernels._scan_eq4_numba(a, *_tables(F), F.frob_q_table)
    slow = kernels._scan_eq4_numpy(a, *_tables(F), F.frob_q_table)
    assert np.array_equal(fast, slow)


@needs_numba
@pytest.mark.parametrize("p,n", [(3, 1), (2, 2), (7, 1)])
def test_order_paths_agree(p, n):
    G = group_for(p, n)
    F = G.ctx
    r = random.Random(3)
    mats = np.array([G.random_element(r) for _ in range(200)], dtype=np.int64)
    fast = kernels._mat_orders_numba(mats, *_tables(F), G.Q + 1)
    slow = kernels._mat_orders_numpy(mats, *_tables(F), G.Q + 1)
    assert np.array_equal(fast, slow)
    # the bound is honoured on both paths
    tight = kernels._mat_orders_numba(mats, *_tables(F), 2)
    assert np.array_equal(tight, kernels._mat_orders_numpy(mats, *_tables(F), 2))
    assert (tight[:, 0] == -1).any()


@needs_numba
def test_orbit_tree_paths_agree():
    rng = np.random.default_rng(11)
    for _ in range(20):
        n = int(rng.integers(5, 60))
        gens = np.stack([rng.permutation(n) for _ in range(int(rng.integers(1, 4)))])
        base = int(rng.integers(0, n))
        o1, p1, l1 = kernels._orbit_tree_numba(gens, base)
        o2, p2, l2 = kernels._orbit_tree_numpy(gens, base)
        assert set(o1.tolist()) == set(o2.tolist())
        for parent, label in ((p1, l1), (p2, l2)):
            for y in o1.tolist():
                if y != base:
                    assert gens[label[y], parent[y]] == y


def test_scalar_orders_match_repeated_multiplication(g27):
    r = random.Random(5)
    for _ in range(30):
        g = g27.random_element(r)
        k, x = 1, g
        while not g27.is_identity(x):
            x = g27.mul(x, g)
            k += 1
        assert g27.element_order(g) == k


def test_numpy_fallback_is_selected_by_env():
    code = (
        "from wilson_triality import _jit, search;"
        "r, s = search.run_search(search.SearchParams(3, 1));"
        "print(_jit.use_numba(), r.count_minus, r.count_plus)"
    )
    env = dict(os.environ, WILSON_TRIALITY_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.split() == ["False", "0", "24"]
