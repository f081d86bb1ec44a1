"""Exhaustive search for Class III maps on PSL(2, q^3).

With ``R1 = [[0, 1], [-1, 0]]`` fixed, a candidate ``R0 = [[a, b], [c, -a]]``
has determinant one when ``-a^2 - bc = 1``, and ``R2`` is the entrywise
q-power of ``R0``. Asking the field automorphism ``x -> x^q`` to carry
``R2`` to ``R0 R2`` gives three polynomial conditions on ``(a, b, c)``
(checked in :func:`satisfies_eq4`). Surviving triples that generate the
whole group are bucketed by the order of ``R0 R1``.

Bucketing rule
--------------
A solution lands in the ``minus`` (resp. ``plus``) column when ``R0 R1``
has order exactly ``q^3 - 1`` (resp. ``q^3 + 1``) as a matrix in SL(2, q^3),
i.e. its eigenvalues are primitive roots of that order, and neither ``b``
nor ``c`` vanishes. Solutions that generate the group but fail only the
``b c != 0`` test (possible for even ``q`` only) are counted as
``degenerate``; everything else is tallied in ``other_counts`` keyed by the
PSL order of ``R0 R1``. The coarser count by PSL order alone is kept in
``psl_minus`` / ``psl_plus`` for comparison.
"""

from __future__ import annotations

import os
import random
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from math import gcd
from typing import Iterator

import numpy as np

from .gf import FieldCtx, is_prime
from .kernels import scan_eq4
from .maps import (
    Diagnostics,
    MapTriple,
    MapType,
    WilsonClass,
    _Checker,
    group_for,
    triality_witness_frobenius,
    wilson_class,
)
from .psl2 import PSL2

__all__ = [
    "TABLE1",
    "SearchParams",
    "SearchReport",
    "Solution",
    "build_triple",
    "candidates",
    "exhaustive_oracle",
    "run_search",
    "satisfies_eq4",
    "verify_solution",
]

# q -> (solutions for q^3 - 1, solutions for q^3 + 1)
TABLE1: dict[int, tuple[int, int]] = {
    3: (0, 24),
    4: (12, 12),
    5: (48, 36),
    7: (96, 96),
    8: (162, 108),
    9: (192, 192),
    11: (324, 216),
    13: (432, 576),
    16: (840, 1680),
    17: (1440, 624),
    19: (1020, 1440),
    23: (2952, 2160),
}


@dataclass(frozen=True)
class SearchParams:
    p: int
    n: int
    report_all_orders: bool = False
    worker_count: int = 1
    # None classifies every solution; an integer classifies a seeded sample of that size.
    classify_sample: int | None = None
    seed: int = 0

    def __post_init__(self) -> None:
        if not is_prime(self.p):
            raise ValueError(f"p = {self.p} is not prime")
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.worker_count < 1:
            raise ValueError("worker_count must be positive")

    @property
    def q(self) -> int:
        return self.p**self.n


@dataclass(frozen=True)
class Solution:
    ctx: FieldCtx = field(compare=False, repr=False)
    a: int
    b: int
    c: int
    type: MapType
    order_r0r1: int  # in PSL(2, q^3)
    sl_order_r0r1: int  # of the matrix R0 R1 itself
    column: str  # "minus", "plus", "degenerate" or "other"
    wilson_class: WilsonClass | None = None  # None when not sampled for classification

    @property
    def abc(self) -> tuple[int, int, int]:
        return (self.a, self.b, self.c)

    def record(self) -> dict:
        F = self.ctx
        return {
            "a": list(F.coeffs(self.a)),
            "b": list(F.coeffs(self.b)),
            "c": list(F.coeffs(self.c)),
            "type": list(self.type),
            "order": self.order_r0r1,
            "sl_order": self.sl_order_r0r1,
            "column": self.column,
            "class": self.wilson_class.value if self.wilson_class else None,
        }


@dataclass
class SearchReport:
    q: int
    count_minus: int = 0
    count_plus: int = 0
    degenerate: int = 0
    other_counts: dict[int, int] = field(default_factory=dict)
    psl_minus: int = 0
    psl_plus: int = 0
    eq4_solutions: int = 0
    not_full: int = 0
    class_counts: dict[str, int] = field(default_factory=dict)
    elapsed: float = 0.0

    @property
    def total(self) -> int:
        return self.count_minus + self.count_plus + self.degenerate + sum(self.other_counts.values())

    def matches_table1(self) -> bool | None:
        ref = TABLE1.get(self.q)
        if ref is None:
            return None
        return (self.count_minus, self.count_plus) == ref


# ---------------------------------------------------------------------------
# candidate stream and the defining equations
# ---------------------------------------------------------------------------


def candidates(params: SearchParams) -> Iterator[tuple[int, int, int]]:
    """Every ``(a, b, c)`` with ``-a^2 - bc = 1``, each exactly once, ``a`` outermost."""
    F = group_for(params.p, params.n).ctx
    for a in range(F.order):
        cst = F.sub(F.neg(F.mul(a, a)), 1)
        for b in range(1, F.order):
            yield a, b, F.div(cst, b)
        if cst == 0:
            for c in range(F.order):
                yield a, 0, c


def eq1_holds(F: FieldCtx, a: int, b: int, c: int) -> bool:
    return F.sub(F.neg(F.mul(a, a)), F.mul(b, c)) == 1


def satisfies_eq4(F: FieldCtx, a: int, b: int, c: int) -> bool:
    """The three Frobenius conditions. On success, also asserts ``R0`` and ``R2`` commute."""
    f = F.frobenius_q
    aq, bq, cq = f(a), f(b), f(c)
    ok = (
        f(aq) == F.add(F.mul(a, aq), F.mul(b, cq))
        and f(bq) == F.sub(F.mul(a, bq), F.mul(b, aq))
        and f(cq) == F.sub(F.mul(c, aq), F.mul(a, cq))
    )
    if ok and eq1_holds(F, a, b, c):
        G = PSL2(F) if F.n is None else group_for(F.p, F.n)
        r0 = (a, b, c, F.neg(a))
        r2 = (aq, bq, cq, F.neg(aq))
        assert G.trace(G.mat_mul(r0, r2)) == 0, "commutation failed on an Eq. 4 solution"
    return ok


def build_triple(G: PSL2, a: int, b: int, c: int) -> MapTriple:
    F = G.ctx
    if not eq1_holds(F, a, b, c):
        raise ValueError(f"-a^2 - bc != 1 for (a, b, c) = {(a, b, c)}")
    if not satisfies_eq4(F, a, b, c):
        raise ValueError(f"Frobenius conditions fail for (a, b, c) = {(a, b, c)}")
    r0 = G.proj((a, b, c, F.neg(a)))
    r1 = G.proj((0, 1, F.neg(1), 0))
    r2 = G.twist(r0, F.n)
    return MapTriple(G, r0, r1, r2)


# ---------------------------------------------------------------------------
# the search
# ---------------------------------------------------------------------------


def _column(Q: int, psl: int, sl: int, b: int, c: int) -> str:
    if sl in (Q - 1, Q + 1):
        if b != 0 and c != 0:
            return "minus" if sl == Q - 1 else "plus"
        return "degenerate"
    return "other"


def _search_slice(p: int, n: int, a_values: np.ndarray, seed: int) -> tuple[int, list[tuple[int, ...]]]:
    """Scan one block of ``a`` values; returns the Eq. 4 count and full-generating rows.

    Each row is ``(a, b, c, psl_order, sl_order)``.
    """
    G = group_for(p, n)
    F = G.ctx
    sols = scan_eq4(a_values, F.exp, F.log, F.one_plus, F.neg_table, F.frob_q_table)
    if sols.shape[0] == 0:
        return 0, []
    # R0 R1 = [[-b, a], [a, c]]
    mats = np.stack([F.neg_table[sols[:, 1]], sols[:, 0], sols[:, 0], sols[:, 2]], axis=1)
    orders = G.orders(mats)
    rows = []
    for (a, b, c), (psl, sl) in zip(sols.tolist(), orders.tolist()):
        triple = build_triple(G, a, b, c)
        if G.is_full(triple.as_tuple(), seed=seed):
            rows.append((a, b, c, psl, sl))
    return int(sols.shape[0]), rows


def _partition(Q: int, jobs: int) -> list[np.ndarray]:
    # interleaved so that each block sees a similar mix of a-values
    return [np.arange(i, Q, jobs, dtype=np.int64) for i in range(jobs)]


def _types(G: PSL2, rows: list[tuple[int, ...]]) -> list[MapType]:
    F = G.ctx
    r1 = G.proj((0, 1, F.neg(1), 0))
    mats = []
    for a, b, c, *_ in rows:
        r0 = G.proj((a, b, c, F.neg(a)))
        r2 = G.twist(r0, F.n)
        mats += [G.mul(r0, r1), G.mul(r1, r2), G.mul(G.mul(r0, r2), r1)]
    if not mats:
        return []
    orders = G.orders(mats)[:, 0].reshape(-1, 3)
    return [MapType(*map(int, o)) for o in orders]


def run_search(params: SearchParams) -> tuple[SearchReport, list[Solution]]:
    """Run the search; returns the report and the solutions sorted by ``(a, b, c)``.

    Solutions outside the two Table 1 columns are returned only with
    ``report_all_orders``; they are always counted.
    """
    start = time.perf_counter()
    G = group_for(params.p, params.n)
    F = G.ctx
    Q = F.order
    blocks = _partition(Q, params.worker_count)
    if params.worker_count == 1:
        results = [_search_slice(params.p, params.n, blocks[0], params.seed)]
    else:
        with ProcessPoolExecutor(max_workers=params.worker_count) as pool:
            results = list(
                pool.map(
                    _search_slice,
                    [params.p] * len(blocks),
                    [params.n] * len(blocks),
                    blocks,
                    [params.seed] * len(blocks),
                )
            )
    report = SearchReport(q=params.q)
    rows = []
    for count, part in results:
        report.eq4_solutions += count
        rows += part
    rows.sort()
    report.not_full = report.eq4_solutions - len(rows)

    g = gcd(2, Q - 1)
    other: Counter[int] = Counter()
    kept = []
    for a, b, c, psl, sl in rows:
        col = _column(Q, psl, sl, b, c)
        if col == "minus":
            report.count_minus += 1
        elif col == "plus":
            report.count_plus += 1
        elif col == "degenerate":
            report.degenerate += 1
        else:
            other[psl] += 1
        report.psl_minus += psl == (Q - 1) // g
        report.psl_plus += psl == (Q + 1) // g
        if col in ("minus", "plus") or params.report_all_orders:
            kept.append((a, b, c, psl, sl, col))
    report.other_counts = dict(sorted(other.items()))

    types = _types(G, kept)
    if params.classify_sample is None or params.classify_sample >= len(kept):
        chosen = set(range(len(kept)))
    else:
        chosen = set(random.Random(params.seed).sample(range(len(kept)), params.classify_sample))
    solutions = []
    classes: Counter[str] = Counter()
    for i, ((a, b, c, psl, sl, col), mt) in enumerate(zip(kept, types)):
        cls = None
        if i in chosen:
            cls = wilson_class(build_triple(G, a, b, c)).wilson_class
            classes[cls.value] += 1
        solutions.append(Solution(F, a, b, c, mt, psl, sl, col, cls))
    report.class_counts = dict(sorted(classes.items()))
    report.elapsed = time.perf_counter() - start
    return report, solutions


def default_jobs() -> int:
    value = os.environ.get("WILSON_TRIALITY_JOBS", "").strip()
    return max(1, int(value)) if value else 1


# ---------------------------------------------------------------------------
# verification and the brute-force oracle
# ---------------------------------------------------------------------------


def verify_solution(s: Solution, seed: int = 0) -> Diagnostics:
    """Re-check a solution from scratch; every failed property is named."""
    F = s.ctx
    G = group_for(F.p, F.n)
    check = _Checker()
    a, b, c = s.abc
    e1 = check("-a^2 - bc = 1", eq1_holds(F, a, b, c))
    e4 = check("Frobenius conditions", satisfies_eq4(F, a, b, c))
    if not (e1 and e4):
        return check.result()
    t = build_triple(G, a, b, c)
    check("R0 R2 = R2 R0", G.mul(t.r0, t.r2) == G.mul(t.r2, t.r0))
    check("x -> x^q is a triality witness", triality_witness_frobenius(t))
    check("generates PSL(2, q^3)", G.is_full(t.as_tuple(), seed=seed))
    mt = _types(G, [(a, b, c)])[0]
    check("type is {n,n}_n", mt.p == mt.q == mt.r)
    check("recorded type matches", mt == s.type)
    report = wilson_class(t)
    check("has a triality", report.has_triality)
    check("no duality under any Galois twist", not report.has_duality)
    check("Wilson class III", report.wilson_class is WilsonClass.III)
    return check.result()


def exhaustive_oracle(F: FieldCtx) -> list[tuple[int, int, int]]:
    """All ``(a, b, c)`` in the field cubed satisfying the defining equations, by brute force.

    Uses a multiplication table built from polynomial arithmetic and
    coefficient-wise addition, so it shares nothing with the log tables the
    fast scan relies on.
    """
    Q, p, q = F.order, F.p, F.q
    codes = np.arange(Q)
    digits = np.stack([(codes // p**j) % p for j in range(F.deg)], axis=1)
    place = p ** np.arange(F.deg)
    ADD = (((digits[:, None, :] + digits[None, :, :]) % p) * place).sum(axis=2)
    NEG = (((-digits) % p) * place).sum(axis=1)
    MUL = np.array([[F.mul_poly(x, y) for y in range(Q)] for x in range(Q)], dtype=np.int64)
    FROB = codes.copy()
    for _ in range(q - 1):
        FROB = MUL[FROB, codes]

    A, B, C = (m.ravel() for m in np.meshgrid(codes, codes, codes, indexing="ij"))
    eq1 = ADD[NEG[MUL[A, A]], NEG[MUL[B, C]]] == 1
    A, B, C = A[eq1], B[eq1], C[eq1]
    Aq, Bq, Cq = FROB[A], FROB[B], FROB[C]
    ok = FROB[Aq] == ADD[MUL[A, Aq], MUL[B, Cq]]
    ok &= FROB[Bq] == ADD[MUL[A, Bq], NEG[MUL[B, Aq]]]
    ok &= FROB[Cq] == ADD[MUL[C, Aq], NEG[MUL[A, Cq]]]
    return sorted(zip(A[ok].tolist(), B[ok].tolist(), C[ok].tolist()))
