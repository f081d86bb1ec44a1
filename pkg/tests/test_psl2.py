import itertools
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wilson_triality.gf import build_field
from wilson_triality.perm import closure
from wilson_triality.psl2 import PSL2

SMALL = [(2, 2), (3, 1), (5, 1), (7, 1), (2, 3), (3, 2)]


def _group(p, d, cache={}):
    if (p, d) not in cache:
        cache[p, d] = PSL2(build_field(p, d))
    return cache[p, d]


def _all_elements(G):
    F = G.ctx
    out = set()
    for m in itertools.product(range(G.Q), repeat=4):
        if G.det(m) == 1:
            out.add(G.canon(m))
    return out


@pytest.mark.parametrize("p,d", [(2, 2), (3, 1), (5, 1), (7, 1)])
def test_order_formula_by_enumeration(p, d):
    G = _group(p, d)
    assert len(_all_elements(G)) == G.order


@pytest.mark.parametrize("p,d", SMALL)
def test_action_is_faithful_homomorphism(p, d):
    G = _group(p, d)
    rng = random.Random(p * 10 + d)
    for _ in range(20):
        g, h = G.random_element(rng), G.random_element(rng)
        pg, ph = G.line_permutation(g), G.line_permutation(h)
        # points map by x -> (a x + b) / (c x + d); the product acts h after g
        assert np.array_equal(G.line_permutation(G.mul(h, g)), ph[pg])
        assert [G.act(g, x) for x in range(G.Q + 1)] == pg.tolist()
        assert sorted(pg.tolist()) == list(range(G.Q + 1))
        if not G.is_identity(g):
            assert not np.array_equal(pg, np.arange(G.Q + 1))


@given(st.data())
@settings(max_examples=40, deadline=None)
def test_group_laws(data):
    G = _group(*data.draw(st.sampled_from(SMALL)))
    rng = random.Random(data.draw(st.integers(0, 10**6)))
    x, y, z = (G.random_element(rng) for _ in range(3))
    assert G.mul(G.mul(x, y), z) == G.mul(x, G.mul(y, z))
    assert G.mul(x, G.inv(x)) == G.identity
    assert G.canon(G.negate(x)) == x
    k = G.element_order(x)
    assert G.power(x, k) == G.identity
    assert all(G.power(x, j) != G.identity for j in range(1, k))
    assert G.power(x, -1) == G.inv(x)
    assert G.parse(G.format(x)) == x


def test_proj_rejects_bad_determinant(g27):
    with pytest.raises(ValueError):
        g27.proj((1, 1, 1, 1))
    with pytest.raises(ValueError):
        g27.proj((1, 0, 0))


@pytest.mark.parametrize("p,d", [(2, 3), (3, 1), (5, 1)])
def test_group_order_against_closure(p, d):
    G = _group(p, d)
    rng = random.Random(d)
    for _ in range(6):
        gens = [G.random_element(rng) for _ in range(rng.choice([1, 2]))]
        perms = [G.line_permutation(g) for g in gens]
        assert G.group_order(gens) == len(closure(perms, G.Q + 1))


def test_full_group_detection():
    rng = random.Random(0)
    for p, d in [(2, 3), (3, 3), (2, 6)]:
        G = _group(p, d)
        full = [G.is_full([G.random_element(rng), G.random_element(rng)], seed=s) for s in range(5)]
        assert any(full)
    G = _group(3, 3)
    # the subfield group PSL(2, 3) is a proper subgroup
    sub = [G.proj((1, 1, 0, 1)), G.proj((0, 1, G.minus_one, 0))]
    assert not G.is_full(sub)
    assert G.group_order(sub) == 12


def test_twist_is_an_automorphism(g27):
    rng = random.Random(1)
    G = g27
    for k in range(3):
        for _ in range(20):
            x, y = G.random_element(rng), G.random_element(rng)
            assert G.twist(G.mul(x, y), k) == G.mul(G.twist(x, k), G.twist(y, k))
    x = G.random_element(rng)
    assert G.twist(G.twist(G.twist(x, 1), 1), 1) == x


def _brute_conjugator(G, src, dst):
    """Search all of PGL(2, F) for X with X src_i X^-1 = dst_i."""
    F = G.ctx
    for m in itertools.product(range(G.Q), repeat=4):
        if G.det(m) == 0 or G.canon(m) != m:
            continue
        if all(G.conj(m, s) == d for s, d in zip(src, dst)):
            return m
    return None


def test_intertwiner_matches_brute_force_small():
    G = _group(2, 2)
    rng = random.Random(9)
    for _ in range(8):
        src = [G.random_element(rng) for _ in range(2)]
        if rng.random() < 0.5:
            x = G.random_pgl(rng)
            dst = [G.conj(x, s) for s in src]
        else:
            dst = [G.random_element(rng) for _ in range(2)]
        found = G.intertwiner(src, dst)
        brute = _brute_conjugator(G, src, dst)
        assert (found is None) == (brute is None)
        if found is not None:
            assert [G.conj(found.matrix, s) for s in src] == dst


def test_intertwiner_reports_pgl_witness():
    G = _group(3, 3)
    F = G.ctx
    rng = random.Random(4)
    nonsquare = next(x for x in range(1, G.Q) if not F.is_square(x))
    x = (nonsquare, 0, 0, 1)  # in PGL, not PSL
    src = [G.random_element(rng) for _ in range(2)]
    dst = [G.conj(x, s) for s in src]
    w = G.intertwiner(src, dst)
    assert w is not None and [G.conj(w.matrix, s) for s in src] == dst
    assert w.in_psl == G.ctx.is_square(G.det(w.matrix))


def test_vectorised_helpers(g27):
    rng = random.Random(8)
    xs = np.array([g27.random_element(rng) for _ in range(50)])
    ys = np.array([g27.random_element(rng) for _ in range(50)])
    prod = g27.mul_many(xs, ys)
    assert [tuple(r) for r in prod.tolist()] == [g27.mul(tuple(x), tuple(y)) for x, y in zip(xs.tolist(), ys.tolist())]
    keys = g27.keys(prod)
    assert np.array_equal(g27.from_keys(keys), prod)
    order = np.argsort(keys)
    as_tuples = [tuple(prod[i]) for i in order]
    assert as_tuples == sorted(as_tuples)
