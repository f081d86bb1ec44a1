"""Permutation groups: stabilizer chains and brute-force closure.

Permutations are integer numpy arrays with ``perm[x]`` the image of ``x``.
Products compose left to right: ``mul(g, h)`` is "first g, then h", i.e.
``h[g]``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from math import prod
from typing import Iterable, Sequence

import numpy as np

from .kernels import orbit_tree

__all__ = [
    "StabilizerChain",
    "closure",
    "group_order",
    "identity",
    "inverse",
    "is_identity",
    "mul",
]


def identity(n: int) -> np.ndarray:
    return np.arange(n, dtype=np.int64)


def mul(g: np.ndarray, h: np.ndarray) -> np.ndarray:
    return h[g]


def inverse(g: np.ndarray) -> np.ndarray:
    out = np.empty_like(g)
    out[g] = np.arange(g.shape[0], dtype=g.dtype)
    return out


def is_identity(g: np.ndarray) -> bool:
    return bool(np.array_equal(g, np.arange(g.shape[0])))


def perm_order(g: np.ndarray) -> int:
    """Order as the lcm of cycle lengths."""
    from math import lcm

    seen = np.zeros(g.shape[0], dtype=bool)
    order = 1
    for x in range(g.shape[0]):
        if seen[x]:
            continue
        length = 0
        y = x
        while not seen[y]:
            seen[y] = True
            y = int(g[y])
            length += 1
        order = lcm(order, length)
    return order


@dataclass
class _Level:
    base: int
    gens: list[np.ndarray] = field(default_factory=list)
    orbit: np.ndarray | None = None
    parent: np.ndarray | None = None
    label: np.ndarray | None = None
    inv_gens: list[np.ndarray] = field(default_factory=list)

    def rebuild(self, n: int) -> None:
        arr = np.stack(self.gens) if self.gens else np.empty((0, n), dtype=np.int64)
        self.orbit, self.parent, self.label = orbit_tree(arr, self.base)
        self.inv_gens = [inverse(g) for g in self.gens]

    def contains(self, pt: int) -> bool:
        return bool(self.parent[pt] != -1)

    def strip_to_base(self, g: np.ndarray, pt: int) -> np.ndarray:
        """``g * u^-1`` where ``u`` is the transversal element sending base to ``pt``."""
        while pt != self.base:
            s = int(self.label[pt])
            g = self.inv_gens[s][g]
            pt = int(self.parent[pt])
        return g


class StabilizerChain:
    """Base and strong generating set for a permutation group.

    Built deterministically with Schreier-Sims (every Schreier generator is
    sifted), or, when an upper bound on the order is known, by sifting seeded
    random elements until the chain reaches that bound; the random phase can
    only under-count, so it falls back to the deterministic build if the
    bound is not reached.
    """

    def __init__(self, gens: Sequence[np.ndarray], degree: int | None = None):
        gens = [np.asarray(g, dtype=np.int64) for g in gens]
        if degree is None:
            if not gens:
                raise ValueError("degree is required when there are no generators")
            degree = gens[0].shape[0]
        self.degree = degree
        self.gens = [g for g in gens if not is_identity(g)]
        self.levels: list[_Level] = []

    # -- construction ----------------------------------------------------

    @classmethod
    def deterministic(cls, gens: Sequence[np.ndarray], degree: int | None = None) -> "StabilizerChain":
        chain = cls(gens, degree)
        for g in chain.gens:
            chain._add_strong(g)
        i = len(chain.levels) - 1
        while i >= 0:
            grown = chain._check_level(i)
            i = grown if grown is not None else i - 1
        return chain

    @classmethod
    def randomized(
        cls,
        gens: Sequence[np.ndarray],
        target: int,
        degree: int | None = None,
        seed: int = 0,
        patience: int = 40,
    ) -> "StabilizerChain":
        """Chain reaching ``target`` (an upper bound on the order) from random elements.

        Falls back to :meth:`deterministic` if ``patience`` consecutive random
        elements sift to the identity before the bound is met.
        """
        chain = cls(gens, degree)
        if not chain.gens:
            return chain
        rng = random.Random(seed)
        slots = [g.copy() for g in chain.gens]
        while len(slots) < 10:
            slots.append(slots[len(slots) % len(chain.gens)].copy())
        acc = identity(chain.degree)

        def next_random() -> np.ndarray:
            nonlocal acc
            i, j = rng.sample(range(len(slots)), 2)
            if rng.random() < 0.5:
                slots[i] = mul(slots[i], slots[j])
            else:
                slots[i] = mul(slots[j], slots[i])
            acc = mul(acc, slots[i])
            return acc

        for _ in range(50):
            next_random()
        for g in chain.gens:
            chain._add_strong(g)
        quiet = 0
        while chain.order() < target and quiet < patience:
            residue, depth = chain.sift(next_random())
            if is_identity(residue):
                quiet += 1
                continue
            quiet = 0
            chain._add_strong(residue, depth)
        if chain.order() < target:
            return cls.deterministic(gens, degree)
        return chain

    def _new_level(self, g: np.ndarray) -> None:
        moved = np.nonzero(g != np.arange(self.degree))[0]
        self.levels.append(_Level(int(moved[0])))

    def _add_strong(self, g: np.ndarray, depth: int | None = None) -> None:
        # g fixes the first `depth` base points, so it joins every level up to there.
        if depth is None:
            depth = 0
            while depth < len(self.levels) and g[self.levels[depth].base] == self.levels[depth].base:
                depth += 1
        if depth == len(self.levels):
            self._new_level(g)
        for level in self.levels[: depth + 1]:
            level.gens.append(g)
            level.rebuild(self.degree)

    def _check_level(self, i: int) -> int | None:
        """Sift every Schreier generator of level ``i``.

        On the first one that does not sift, add its residue and return the
        level it stopped at; return ``None`` when the level is complete.
        """
        level = self.levels[i]
        ident = identity(self.degree)
        for pt in level.orbit:
            pt = int(pt)
            u_pt = inverse(level.strip_to_base(ident, pt))
            for s in level.gens:
                # u_pt * s * u_{pt^s}^-1 fixes the base point of this level
                h = level.strip_to_base(mul(u_pt, s), int(s[pt]))
                if is_identity(h):
                    continue
                residue, depth = self.sift(h, i + 1)
                if not is_identity(residue):
                    self._add_strong(residue, depth)
                    return depth
        return None

    # -- queries ---------------------------------------------------------

    def sift(self, g: np.ndarray, start: int = 0) -> tuple[np.ndarray, int]:
        """Strip ``g`` through the chain; returns the residue and the level it stopped at."""
        for i in range(start, len(self.levels)):
            level = self.levels[i]
            pt = int(g[level.base])
            if not level.contains(pt):
                return g, i
            g = level.strip_to_base(g, pt)
        return g, len(self.levels)

    def contains(self, g: np.ndarray) -> bool:
        residue, _ = self.sift(np.asarray(g, dtype=np.int64))
        return is_identity(residue)

    @property
    def base(self) -> list[int]:
        return [level.base for level in self.levels]

    def orbit_lengths(self) -> list[int]:
        return [int(level.orbit.shape[0]) for level in self.levels]

    def order(self) -> int:
        return prod(self.orbit_lengths())


def group_order(gens: Sequence[np.ndarray], degree: int | None = None) -> int:
    """Exact order of the group generated by ``gens`` (deterministic Schreier-Sims)."""
    return StabilizerChain.deterministic(gens, degree).order()


def closure(gens: Iterable[np.ndarray], degree: int, bound: int | None = None) -> set[tuple[int, ...]]:
    """All elements of the generated group as tuples, by breadth-first closure.

    Raises ``OverflowError`` once more than ``bound`` elements are found.
    """
    gens = [np.asarray(g, dtype=np.int64) for g in gens]
    e = tuple(range(degree))
    seen = {e}
    frontier = [np.arange(degree, dtype=np.int64)]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = g[x]
                key = tuple(y.tolist())
                if key not in seen:
                    seen.add(key)
                    nxt.append(y)
                    if bound is not None and len(seen) > bound:
                        raise OverflowError(f"closure exceeds {bound} elements")
        frontier = nxt
    return seen
