"""PSL(2, F) for a finite field F, as sign-canonical 2x2 matrices.

A matrix is a 4-tuple of field codes ``(a, b, c, d)`` for ``[[a, b], [c, d]]``.
An element of PSL(2, F) is stored as the one of ``M`` and ``-M`` whose first
nonzero entry (scanning a, b, c, d) has the smaller code, so tuple equality
is group equality and tuple order is a total order on the group.

Points of the projective line PG(1, F) are integers: field codes
``0 .. Q-1`` for finite points and ``Q`` for infinity.
"""

from __future__ import annotations

import random
from math import gcd
from typing import NamedTuple, Sequence

import numpy as np

from . import kernels
from .gf import FieldCtx
from .perm import StabilizerChain

Mat2 = tuple[int, int, int, int]
ProjMat = Mat2


class Intertwiner(NamedTuple):
    """A conjugator ``X`` with ``X src_i X^-1 = dst_i`` in PSL(2, F).

    ``in_psl`` is False when ``det X`` is a non-square, i.e. ``X`` lies in
    PGL(2, F) but not PSL(2, F); the matrix is then scaled so that its first
    nonzero entry is 1.
    """

    matrix: Mat2
    in_psl: bool
    signs: tuple[int, ...]


class PSL2:
    def __init__(self, ctx: FieldCtx):
        self.ctx = ctx
        self.Q = ctx.order
        self.INF = self.Q
        self.minus_one = ctx.neg(1)
        self.identity: ProjMat = (1, 0, 0, 1)
        Q = self.Q
        self.order = Q * (Q * Q - 1) // gcd(2, Q - 1)

    def __repr__(self) -> str:
        return f"PSL2(GF({self.ctx.p}^{self.ctx.deg}))"

    # -- raw matrices ----------------------------------------------------

    def mat_mul(self, x: Mat2, y: Mat2) -> Mat2:
        F = self.ctx
        a, b, c, d = x
        e, f, g, h = y
        return (
            F.add(F.mul(a, e), F.mul(b, g)),
            F.add(F.mul(a, f), F.mul(b, h)),
            F.add(F.mul(c, e), F.mul(d, g)),
            F.add(F.mul(c, f), F.mul(d, h)),
        )

    def det(self, m: Mat2) -> int:
        F = self.ctx
        a, b, c, d = m
        return F.sub(F.mul(a, d), F.mul(b, c))

    def trace(self, m: Mat2) -> int:
        return self.ctx.add(m[0], m[3])

    def scale(self, m: Mat2, s: int) -> Mat2:
        F = self.ctx
        return tuple(F.mul(s, v) for v in m)  # type: ignore[return-value]

    def adjugate(self, m: Mat2) -> Mat2:
        F = self.ctx
        a, b, c, d = m
        return (d, F.neg(b), F.neg(c), a)

    def negate(self, m: Mat2) -> Mat2:
        nt = self.ctx.neg_table
        return (int(nt[m[0]]), int(nt[m[1]]), int(nt[m[2]]), int(nt[m[3]]))

    # -- PSL elements ----------------------------------------------------

    def canon(self, m: Mat2) -> ProjMat:
        """Sign-canonical representative of ``±m``."""
        for v in m:
            if v:
                return m if v <= self.ctx.neg(v) else self.negate(m)
        raise ValueError("zero matrix")

    def proj(self, m: Sequence[int]) -> ProjMat:
        m = tuple(int(v) for v in m)
        if len(m) != 4:
            raise ValueError("a 2x2 matrix needs four entries")
        if self.det(m) != 1:
            raise ValueError(f"determinant of {self.format(m)} is not 1")
        return self.canon(m)

    def mul(self, x: ProjMat, y: ProjMat) -> ProjMat:
        return self.canon(self.mat_mul(x, y))

    def inv(self, x: ProjMat) -> ProjMat:
        return self.canon(self.adjugate(x))

    def power(self, x: ProjMat, k: int) -> ProjMat:
        if k < 0:
            x, k = self.inv(x), -k
        result, base = self.identity, x
        while k:
            if k & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            k >>= 1
        return result

    def is_identity(self, x: ProjMat) -> bool:
        return x == self.identity

    def conj(self, x: Mat2, g: ProjMat) -> ProjMat:
        """``x g x^-1`` for any invertible ``x`` (PGL acts on PSL)."""
        F = self.ctx
        y = self.mat_mul(self.mat_mul(x, g), self.adjugate(x))
        return self.canon(self.scale(y, F.inv(self.det(x))))

    def orders(self, mats: Sequence[Mat2]) -> np.ndarray:
        """``(psl_order, sl_order)`` rows for det-1 matrices, by repeated multiplication."""
        F = self.ctx
        out = kernels.mat_orders(np.asarray(mats, dtype=np.int64).reshape(-1, 4),
                                 F.exp, F.log, F.one_plus, F.neg_table, self.Q + 1)
        if (out < 0).any():
            raise ArithmeticError("element order exceeds Q + 1; is the determinant 1?")
        return out

    def element_order(self, g: ProjMat) -> int:
        return int(self.orders([g])[0, 0])

    def twist(self, g: Mat2, k: int) -> ProjMat:
        """Entrywise ``x -> x^(p^k)``, re-canonicalised."""
        if k % self.ctx.deg == 0:
            return self.canon(g)
        table = self.ctx.frob_table(k)
        return self.canon(tuple(int(table[v]) for v in g))  # type: ignore[arg-type]

    # -- projective line -------------------------------------------------

    def act(self, g: Mat2, pt: int) -> int:
        F = self.ctx
        a, b, c, d = g
        if pt == self.INF:
            return self.INF if c == 0 else F.div(a, c)
        den = F.add(F.mul(c, pt), d)
        if den == 0:
            return self.INF
        return F.div(F.add(F.mul(a, pt), b), den)

    def line_permutation(self, g: Mat2) -> np.ndarray:
        """Images of all ``Q + 1`` points, infinity last."""
        F = self.ctx
        exp, log, one_plus = F.exp, F.log, F.one_plus
        a, b, c, d = g
        x = np.arange(self.Q, dtype=np.int64)
        num = kernels.vadd(kernels.vmul(a, x, exp, log), np.full_like(x, b), exp, log, one_plus)
        den = kernels.vadd(kernels.vmul(c, x, exp, log), np.full_like(x, d), exp, log, one_plus)
        m = self.Q - 1
        quot = exp[(log[num] - log[den] + m) % exp.shape[0]]
        quot = np.where(num == 0, 0, quot)
        img = np.where(den == 0, self.INF, quot)
        return np.append(img, self.act(g, self.INF)).astype(np.int64)

    # -- subgroups -------------------------------------------------------

    def stabilizer_chain(self, gens: Sequence[Mat2], seed: int = 0) -> StabilizerChain:
        perms = [self.line_permutation(g) for g in gens]
        return StabilizerChain.randomized(perms, target=self.order, degree=self.Q + 1, seed=seed)

    def group_order(self, gens: Sequence[Mat2], seed: int = 0) -> int:
        """Order of ``<gens>`` from a stabilizer chain on the projective line.

        The action is faithful, so this is the order in PSL(2, F). A seeded
        random build that reaches |PSL(2, F)| is a proof of equality; otherwise
        the chain is rebuilt deterministically.
        """
        if not gens:
            return 1
        return self.stabilizer_chain(gens, seed).order()

    def is_full(self, gens: Sequence[Mat2], seed: int = 0) -> bool:
        if not gens:
            return self.order == 1
        perms = np.stack([self.line_permutation(g) for g in gens])
        # PSL(2, F) is transitive on the line, so a short orbit settles it
        orbit, _, _ = kernels.orbit_tree(perms, self.INF)
        if orbit.shape[0] != self.Q + 1:
            return False
        chain = StabilizerChain.randomized(list(perms), target=self.order, degree=self.Q + 1, seed=seed)
        return chain.order() == self.order

    # -- intertwiners ----------------------------------------------------

    def _sign_patterns(self, src: Sequence[Mat2], dst: Sequence[Mat2]) -> list[tuple[int, ...]]:
        F = self.ctx
        k = len(src)
        if self.ctx.p == 2:
            candidates = [(1,) * k]
        else:
            candidates = [tuple(1 - 2 * ((mask >> i) & 1) for i in range(k)) for mask in range(2**k)]

        def signed(v: int, s: int) -> int:
            return v if s == 1 else F.neg(v)

        tr_src = [self.trace(m) for m in src]
        tr_dst = [self.trace(m) for m in dst]
        pair_src = {(i, j): self.trace(self.mat_mul(src[i], src[j])) for i in range(k) for j in range(i + 1, k)}
        pair_dst = {(i, j): self.trace(self.mat_mul(dst[i], dst[j])) for i in range(k) for j in range(i + 1, k)}
        keep = []
        for eps in candidates:
            if any(tr_src[i] != signed(tr_dst[i], eps[i]) for i in range(k)):
                continue
            if any(pair_src[i, j] != signed(pair_dst[i, j], eps[i] * eps[j]) for (i, j) in pair_src):
                continue
            keep.append(eps)
        return keep

    def _nullspace(self, rows: list[list[int]]) -> list[list[int]]:
        F = self.ctx
        rows = [list(r) for r in rows]
        ncols = 4
        pivots: list[int] = []
        r = 0
        for col in range(ncols):
            piv = next((i for i in range(r, len(rows)) if rows[i][col]), None)
            if piv is None:
                continue
            rows[r], rows[piv] = rows[piv], rows[r]
            inv = F.inv(rows[r][col])
            rows[r] = [F.mul(inv, v) for v in rows[r]]
            for i in range(len(rows)):
                if i != r and rows[i][col]:
                    f = rows[i][col]
                    rows[i] = [F.sub(v, F.mul(f, w)) for v, w in zip(rows[i], rows[r])]
            pivots.append(col)
            r += 1
            if r == len(rows):
                break
        free = [c for c in range(ncols) if c not in pivots]
        basis = []
        for fc in free:
            v = [0] * ncols
            v[fc] = 1
            for i, pc in enumerate(pivots):
                v[pc] = F.neg(rows[i][fc])
            basis.append(v)
        return basis

    def _equations(self, src: Sequence[Mat2], dst: Sequence[Mat2], eps: Sequence[int]) -> list[list[int]]:
        F = self.ctx
        rows = []
        for A, B, s in zip(src, dst, eps):
            a, b, c, d = A
            e, f, g, h = B if s == 1 else self.negate(B)
            # X A - B X = 0 with X = [[x0, x1], [x2, x3]]
            rows += [
                [F.sub(a, e), c, F.neg(f), 0],
                [b, F.sub(d, e), 0, F.neg(f)],
                [F.neg(g), 0, F.sub(a, h), c],
                [0, F.neg(g), b, F.sub(d, h)],
            ]
        return rows

    def intertwiner_nullspaces(self, src: Sequence[Mat2], dst: Sequence[Mat2]) -> dict[tuple[int, ...], list[list[int]]]:
        """Solution spaces of ``X src_i = eps_i dst_i X`` for each admissible sign pattern."""
        return {eps: self._nullspace(self._equations(src, dst, eps)) for eps in self._sign_patterns(src, dst)}

    def _normalise(self, x: Mat2) -> tuple[Mat2, bool]:
        F = self.ctx
        det = self.det(x)
        if F.is_square(det):
            return self.canon(self.scale(x, F.inv(F.sqrt(det)))), True
        lead = next(v for v in x if v)
        return self.scale(x, F.inv(lead)), False

    def intertwiner(self, src: Sequence[Mat2], dst: Sequence[Mat2], seed: int = 0) -> Intertwiner | None:
        """Find ``X`` in PGL(2, F) conjugating each ``src_i`` to ``dst_i`` in PSL(2, F).

        Solves the linear systems ``X A_i = eps_i B_i X`` for every sign
        pattern ``eps`` compatible with the traces, and returns the first
        invertible solution (PSL-witnesses are preferred).
        """
        if len(src) != len(dst):
            raise ValueError("src and dst must have the same length")
        F = self.ctx
        rng = random.Random(seed)
        outside: Intertwiner | None = None
        for eps, basis in self.intertwiner_nullspaces(src, dst).items():
            if not basis:
                continue
            trials = [tuple(v) for v in basis]
            if len(basis) > 1:
                for _ in range(64):
                    coeffs = [rng.randrange(F.order) for _ in basis]
                    v = [0, 0, 0, 0]
                    for cf, b in zip(coeffs, basis):
                        v = [F.add(x, F.mul(cf, y)) for x, y in zip(v, b)]
                    trials.append(tuple(v))
            for v in trials:
                if any(v) and self.det(v) != 0:
                    x, in_psl = self._normalise(v)
                    found = Intertwiner(x, in_psl, eps)
                    if in_psl:
                        return found
                    outside = outside or found
                    break
        return outside

    # -- random elements -------------------------------------------------

    def random_element(self, rng: random.Random) -> ProjMat:
        F = self.ctx
        Q = self.Q
        a, b, c = rng.randrange(Q), rng.randrange(Q), rng.randrange(Q)
        if a:
            d = F.div(F.add(1, F.mul(b, c)), a)
        else:
            b = rng.randrange(1, Q)
            c = F.neg(F.inv(b))
            d = rng.randrange(Q)
        return self.proj((a, b, c, d))

    def random_involution(self, rng: random.Random) -> ProjMat:
        """Uniform over trace-zero ``[[a, b], [c, -a]]`` with ``b != 0``."""
        F = self.ctx
        a = rng.randrange(self.Q)
        b = rng.randrange(1, self.Q)
        c = F.div(F.neg(F.add(F.mul(a, a), 1)), b)
        return self.proj((a, b, c, F.neg(a)))

    def random_pgl(self, rng: random.Random) -> Mat2:
        while True:
            m = tuple(rng.randrange(self.Q) for _ in range(4))
            if self.det(m) != 0:
                return m  # type: ignore[return-value]

    # -- serialisation ---------------------------------------------------

    def format(self, m: Mat2) -> str:
        return ";".join(self.ctx.format(v) for v in m)

    def parse(self, s: str) -> Mat2:
        parts = s.strip().split(";")
        if len(parts) != 4:
            raise ValueError(f"expected 4 ';'-separated entries, got {len(parts)}")
        return tuple(self.ctx.parse(p) for p in parts)  # type: ignore[return-value]

    # -- vectorised helpers (used by the geometry builder) ---------------

    def mul_many(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        F = self.ctx
        exp, log, one_plus = F.exp, F.log, F.one_plus
        vm, va = kernels.vmul, kernels.vadd
        A = np.asarray(A, dtype=np.int64)
        B = np.asarray(B, dtype=np.int64)
        a, b, c, d = (A[..., i] for i in range(4))
        e, f, g, h = (B[..., i] for i in range(4))
        out = np.stack(
            [
                va(vm(a, e, exp, log), vm(b, g, exp, log), exp, log, one_plus),
                va(vm(a, f, exp, log), vm(b, h, exp, log), exp, log, one_plus),
                va(vm(c, e, exp, log), vm(d, g, exp, log), exp, log, one_plus),
                va(vm(c, f, exp, log), vm(d, h, exp, log), exp, log, one_plus),
            ],
            axis=-1,
        )
        return self.canon_many(out)

    def canon_many(self, M: np.ndarray) -> np.ndarray:
        M = np.asarray(M, dtype=np.int64)
        nt = self.ctx.neg_table
        nz = M != 0
        first = np.argmax(nz, axis=-1)
        lead = np.take_along_axis(M, first[..., None], axis=-1)[..., 0]
        flip = nt[lead] < lead
        return np.where(flip[..., None], nt[M], M)

    def keys(self, M: np.ndarray) -> np.ndarray:
        """Integer keys whose order matches the tuple order of canonical matrices."""
        M = np.asarray(M, dtype=np.int64)
        Q = self.Q
        return ((M[..., 0] * Q + M[..., 1]) * Q + M[..., 2]) * Q + M[..., 3]

    def from_keys(self, keys: np.ndarray) -> np.ndarray:
        keys = np.asarray(keys, dtype=np.int64)
        Q = self.Q
        return np.stack([keys // Q**3, (keys // Q**2) % Q, (keys // Q) % Q, keys % Q], axis=-1)
