"""Hot loops, each with a numba body and a pure-numpy twin.

Field elements are integer codes (see :mod:`wilson_triality.gf`). Every
kernel takes the field tables explicitly:

``exp``
    powers of a primitive element, length ``2*(Q-1)`` so sums of two logs
    need no reduction;
``log``
    discrete logs, ``log[0] == -1``;
``one_plus``
    ``one_plus[x]`` is the code of ``1 + x``;
``neg``
    additive inverses;
``frob``
    the map ``x -> x^q``.

The public entry points (``scan_eq4``, ``mat_orders``, ``orbit_tree``)
dispatch on :func:`wilson_triality._jit.use_numba`; both paths return
identical results and are cross-checked in the test-suite.
"""

from __future__ import annotations

import numpy as np

from ._jit import njit, use_numba

# ---------------------------------------------------------------------------
# scalar field ops for numba
# ---------------------------------------------------------------------------


@njit(cache=True)
def _mul(x, y, exp, log):
    if x == 0 or y == 0:
        return 0
    return exp[log[x] + log[y]]


@njit(cache=True)
def _add(x, y, exp, log, one_plus, m):
    if x == 0:
        return y
    if y == 0:
        return x
    r = one_plus[exp[log[y] - log[x] + m]]
    if r == 0:
        return 0
    return exp[log[x] + log[r]]


@njit(cache=True)
def _eq4_holds(a, b, c, aq, aq2, aq1, exp, log, one_plus, neg, frob, m):
    bq = frob[b]
    cq = frob[c]
    # a^(q^2) = a^(q+1) + b c^q
    if aq2 != _add(aq1, _mul(b, cq, exp, log), exp, log, one_plus, m):
        return False
    # b^(q^2) = a b^q - b a^q
    rhs = _add(_mul(a, bq, exp, log), neg[_mul(b, aq, exp, log)], exp, log, one_plus, m)
    if frob[bq] != rhs:
        return False
    # c^(q^2) = c a^q - a c^q
    rhs = _add(_mul(c, aq, exp, log), neg[_mul(a, cq, exp, log)], exp, log, one_plus, m)
    return frob[cq] == rhs


@njit(cache=True)
def _scan_eq4_numba(a_values, exp, log, one_plus, neg, frob):
    Q = log.shape[0]
    m = Q - 1
    cap = 1024
    out = np.empty((cap, 3), dtype=np.int64)
    k = 0
    for idx in range(a_values.shape[0]):
        a = a_values[idx]
        cst = neg[one_plus[_mul(a, a, exp, log)]]  # -a^2 - 1
        aq = frob[a]
        aq2 = frob[aq]
        aq1 = _mul(a, aq, exp, log)
        for b in range(1, Q):
            if cst == 0:
                c = 0
            else:
                c = exp[log[cst] - log[b] + m]
            if _eq4_holds(a, b, c, aq, aq2, aq1, exp, log, one_plus, neg, frob, m):
                if k == cap:
                    cap *= 2
                    grown = np.empty((cap, 3), dtype=np.int64)
                    grown[:k] = out[:k]
                    out = grown
                out[k, 0] = a
                out[k, 1] = b
                out[k, 2] = c
                k += 1
        if cst == 0:
            for c in range(Q):
                if _eq4_holds(a, 0, c, aq, aq2, aq1, exp, log, one_plus, neg, frob, m):
                    if k == cap:
                        cap *= 2
                        grown = np.empty((cap, 3), dtype=np.int64)
                        grown[:k] = out[:k]
                        out = grown
                    out[k, 0] = a
                    out[k, 1] = 0
                    out[k, 2] = c
                    k += 1
    return out[:k].copy()


# ---------------------------------------------------------------------------
# vectorised field ops for the numpy path
# ---------------------------------------------------------------------------


def vmul(x, y, exp, log):
    x = np.asarray(x)
    y = np.asarray(y)
    out = exp[(log[x] + log[y]) % exp.shape[0]]
    return np.where((x == 0) | (y == 0), 0, out)


def vadd(x, y, exp, log, one_plus):
    x = np.asarray(x)
    y = np.asarray(y)
    m = log.shape[0] - 1
    r = one_plus[exp[(log[y] - log[x] + m) % exp.shape[0]]]
    s = exp[(log[x] + log[r]) % exp.shape[0]]
    s = np.where(r == 0, 0, s)
    s = np.where(y == 0, x, s)
    return np.where(x == 0, y, s)


def _eq4_mask(a, b, c, aq, aq2, aq1, exp, log, one_plus, neg, frob):
    bq = frob[b]
    cq = frob[c]
    ok = aq2 == vadd(aq1, vmul(b, cq, exp, log), exp, log, one_plus)
    ok &= frob[bq] == vadd(vmul(a, bq, exp, log), neg[vmul(b, aq, exp, log)], exp, log, one_plus)
    ok &= frob[cq] == vadd(vmul(c, aq, exp, log), neg[vmul(a, cq, exp, log)], exp, log, one_plus)
    return ok


def _scan_eq4_numpy(a_values, exp, log, one_plus, neg, frob):
    Q = log.shape[0]
    m = Q - 1
    bs = np.arange(1, Q, dtype=np.int64)
    cs_all = np.arange(Q, dtype=np.int64)
    found = []
    for a in np.asarray(a_values, dtype=np.int64):
        a = int(a)
        cst = int(neg[one_plus[int(vmul(a, a, exp, log))]])
        aq = int(frob[a])
        aq2 = int(frob[aq])
        aq1 = int(vmul(a, aq, exp, log))
        if cst == 0:
            cs = np.zeros_like(bs)
        else:
            cs = exp[log[cst] - log[bs] + m]
        hit = _eq4_mask(a, bs, cs, aq, aq2, aq1, exp, log, one_plus, neg, frob)
        if hit.any():
            found.append(np.stack([np.full(hit.sum(), a), bs[hit], cs[hit]], axis=1))
        if cst == 0:
            zero = np.zeros_like(cs_all)
            hit = _eq4_mask(a, zero, cs_all, aq, aq2, aq1, exp, log, one_plus, neg, frob)
            if hit.any():
                found.append(np.stack([np.full(hit.sum(), a), zero[hit], cs_all[hit]], axis=1))
    if not found:
        return np.empty((0, 3), dtype=np.int64)
    return np.concatenate(found).astype(np.int64)


def scan_eq4(a_values, exp, log, one_plus, neg, frob) -> np.ndarray:
    """All ``(a, b, c)`` with ``a`` in ``a_values`` solving -a^2-bc = 1 and the Frobenius system.

    Rows come out ordered by ``a`` (in the given order), then the ``b != 0``
    branch in increasing ``b``, then the ``b == 0`` branch in increasing ``c``.
    """
    a_values = np.ascontiguousarray(a_values, dtype=np.int64)
    if use_numba():
        return _scan_eq4_numba(a_values, exp, log, one_plus, neg, frob)
    return _scan_eq4_numpy(a_values, exp, log, one_plus, neg, frob)


# ---------------------------------------------------------------------------
# orders of 2x2 matrices in SL(2) and PSL(2)
# ---------------------------------------------------------------------------


@njit(cache=True)
def _mat_orders_numba(mats, exp, log, one_plus, neg, bound):
    m = log.shape[0] - 1
    minus_one = neg[1]
    n = mats.shape[0]
    out = np.empty((n, 2), dtype=np.int64)
    for i in range(n):
        a0 = mats[i, 0]
        b0 = mats[i, 1]
        c0 = mats[i, 2]
        d0 = mats[i, 3]
        a, b, c, d = a0, b0, c0, d0
        k = 1
        while True:
            if b == 0 and c == 0 and a == d and (a == 1 or a == minus_one):
                out[i, 0] = k
                out[i, 1] = k if a == 1 else 2 * k
                break
            if k > bound:
                out[i, 0] = -1
                out[i, 1] = -1
                break
            na = _add(_mul(a, a0, exp, log), _mul(b, c0, exp, log), exp, log, one_plus, m)
            nb = _add(_mul(a, b0, exp, log), _mul(b, d0, exp, log), exp, log, one_plus, m)
            nc = _add(_mul(c, a0, exp, log), _mul(d, c0, exp, log), exp, log, one_plus, m)
            nd = _add(_mul(c, b0, exp, log), _mul(d, d0, exp, log), exp, log, one_plus, m)
            a, b, c, d = na, nb, nc, nd
            k += 1
    return out


def _mat_orders_numpy(mats, exp, log, one_plus, neg, bound):
    mats = np.asarray(mats, dtype=np.int64)
    n = mats.shape[0]
    out = np.full((n, 2), -1, dtype=np.int64)
    if n == 0:
        return out
    minus_one = neg[1]
    base = mats.copy()
    cur = mats.copy()
    live = np.arange(n)
    k = 1
    while live.size and k <= bound + 1:
        a, b, c, d = (cur[:, j] for j in range(4))
        done = (b == 0) & (c == 0) & (a == d) & ((a == 1) | (a == minus_one))
        if done.any():
            idx = live[done]
            out[idx, 0] = k
            out[idx, 1] = np.where(a[done] == 1, k, 2 * k)
            keep = ~done
            live, cur, base = live[keep], cur[keep], base[keep]
            if not live.size:
                break
            a, b, c, d = (cur[:, j] for j in range(4))
        if k > bound:
            break
        a0, b0, c0, d0 = (base[:, j] for j in range(4))
        cur = np.stack(
            [
                vadd(vmul(a, a0, exp, log), vmul(b, c0, exp, log), exp, log, one_plus),
                vadd(vmul(a, b0, exp, log), vmul(b, d0, exp, log), exp, log, one_plus),
                vadd(vmul(c, a0, exp, log), vmul(d, c0, exp, log), exp, log, one_plus),
                vadd(vmul(c, b0, exp, log), vmul(d, d0, exp, log), exp, log, one_plus),
            ],
            axis=1,
        )
        k += 1
    return out


def mat_orders(mats, exp, log, one_plus, neg, bound: int) -> np.ndarray:
    """``(psl_order, sl_order)`` for each row ``(a, b, c, d)`` by repeated multiplication.

    Rows whose order exceeds ``bound`` get ``(-1, -1)``.
    """
    mats = np.ascontiguousarray(np.asarray(mats, dtype=np.int64).reshape(-1, 4))
    if use_numba():
        return _mat_orders_numba(mats, exp, log, one_plus, neg, bound)
    return _mat_orders_numpy(mats, exp, log, one_plus, neg, bound)


# ---------------------------------------------------------------------------
# orbit trees (Schreier vectors) for permutation groups
# ---------------------------------------------------------------------------


@njit(cache=True)
def _orbit_tree_numba(gens, base):
    k, n = gens.shape
    parent = np.full(n, -1, dtype=np.int64)
    label = np.full(n, -1, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    queue[0] = base
    parent[base] = base
    head = 0
    tail = 1
    while head < tail:
        x = queue[head]
        head += 1
        for s in range(k):
            y = gens[s, x]
            if parent[y] == -1:
                parent[y] = x
                label[y] = s
                queue[tail] = y
                tail += 1
    return queue[:tail].copy(), parent, label


def _orbit_tree_numpy(gens, base):
    k, n = gens.shape
    parent = np.full(n, -1, dtype=np.int64)
    label = np.full(n, -1, dtype=np.int64)
    parent[base] = base
    frontier = np.array([base], dtype=np.int64)
    orbit = [frontier]
    while frontier.size:
        fresh = []
        for s in range(k):
            img = gens[s, frontier]
            new = parent[img] == -1
            if not new.any():
                continue
            pts, first = np.unique(img[new], return_index=True)
            parent[pts] = frontier[new][first]
            label[pts] = s
            fresh.append(pts)
        frontier = np.concatenate(fresh) if fresh else np.empty(0, dtype=np.int64)
        if frontier.size:
            orbit.append(frontier)
    return np.concatenate(orbit), parent, label


def orbit_tree(gens: np.ndarray, base: int):
    """Orbit of ``base`` under permutation rows ``gens`` with a Schreier tree.

    Returns ``(orbit, parent, label)``: ``gens[label[y], parent[y]] == y`` for
    every orbit point ``y != base``; points off the orbit have ``parent == -1``.
    """
    gens = np.ascontiguousarray(gens, dtype=np.int64)
    if gens.ndim != 2:
        raise ValueError("gens must be a 2-d array of permutations")
    if gens.shape[0] == 0:
        n = gens.shape[1]
        parent = np.full(n, -1, dtype=np.int64)
        parent[base] = base
        return np.array([base], dtype=np.int64), parent, np.full(n, -1, dtype=np.int64)
    if use_numba():
        return _orbit_tree_numba(gens, int(base))
    return _orbit_tree_numpy(gens, int(base))
