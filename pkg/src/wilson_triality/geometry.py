"""Rank-four coset geometry of a map and its verification.

For a triple ``(r0, r1, r2)`` generating G the parabolic subgroups are

* ``G0 = <r0, r1>`` (faces),
* ``G1 = <r0, r2>`` (edges, a Klein four-group),
* ``G2 = <r1, r2>`` (vertices),
* ``G3 = <r1, r0 r2>`` (Petrie polygons),

elements of type ``i`` are the left cosets ``g Gi`` and two cosets of
different types are incident when they intersect.

The whole group is enumerated, so construction is gated by an order bound.
Elements of G are indexed by their position in the sorted list of
canonical matrices; a coset is identified by its smallest member.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple, Sequence

import numpy as np

from .maps import MapTriple, triality_witness_frobenius, validate_triple, wilson_class
from .psl2 import PSL2, ProjMat

__all__ = [
    "DEFAULT_BOUND",
    "TYPE_NAMES",
    "CosetGeometry",
    "FirmnessReport",
    "GeometryBoundError",
    "IncidenceGeometry",
    "TrialityAction",
    "build_geometry",
    "chamber_orbits",
    "chambers_bruteforce",
    "chamber_orbit_count",
    "duality_absence",
    "grid_geometry",
    "is_firm",
    "is_geometry",
    "is_geometry_bruteforce",
    "subgroup_closure",
    "triality_action",
]

DEFAULT_BOUND = 300_000
TYPE_NAMES = ("face", "edge", "vertex", "petrie")

Flag = tuple[tuple[int, int], ...]  # sorted ((type, index), ...)


class GeometryBoundError(ValueError):
    pass


# ---------------------------------------------------------------------------
# subgroup enumeration
# ---------------------------------------------------------------------------


def _closure_keys(G: PSL2, gens: Sequence[ProjMat], bound: int) -> np.ndarray:
    ident = np.array([G.identity], dtype=np.int64)
    seen = G.keys(ident)
    if not gens:
        return seen
    gens_arr = np.asarray(gens, dtype=np.int64)
    frontier = ident
    while frontier.shape[0]:
        prods = G.mul_many(frontier[:, None, :], gens_arr[None, :, :]).reshape(-1, 4)
        new = np.setdiff1d(np.unique(G.keys(prods)), seen, assume_unique=True)
        if seen.shape[0] + new.shape[0] > bound:
            raise GeometryBoundError(f"subgroup has more than {bound} elements")
        seen = np.union1d(seen, new)
        frontier = G.from_keys(new)
    return seen


def subgroup_closure(G: PSL2, gens: Sequence[ProjMat], bound: int = DEFAULT_BOUND) -> frozenset[ProjMat]:
    """All elements of ``<gens>``; raises :class:`GeometryBoundError` past ``bound``."""
    keys = _closure_keys(G, gens, bound)
    return frozenset(tuple(int(v) for v in row) for row in G.from_keys(keys))


# ---------------------------------------------------------------------------
# generic typed incidence structures
# ---------------------------------------------------------------------------


class IncidenceGeometry:
    """Typed elements ``(type, index)`` with a symmetric incidence between distinct types."""

    def __init__(self, sizes: Sequence[int], pairs: dict[tuple[int, int], Iterable[tuple[int, int]]]):
        self.sizes = tuple(int(s) for s in sizes)
        self.rank = len(self.sizes)
        self._adj: dict[tuple[int, int], list[set[int]]] = {}
        for i in range(self.rank):
            for j in range(self.rank):
                if i != j:
                    self._adj[i, j] = [set() for _ in range(self.sizes[i])]
        for (i, j), items in pairs.items():
            if i == j:
                raise ValueError("elements of the same type cannot be incident")
            for a, b in items:
                self._adj[i, j][a].add(b)
                self._adj[j, i][b].add(a)
        self._chambers: list[tuple[int, ...]] | None = None

    # -- basic queries ---------------------------------------------------

    def neighbours(self, i: int, a: int, j: int) -> set[int]:
        return self._adj[i, j][a]

    def incident(self, x: tuple[int, int], y: tuple[int, int]) -> bool:
        (i, a), (j, b) = x, y
        return i != j and b in self._adj[i, j][a]

    def incidence_pairs(self, i: int, j: int) -> Iterator[tuple[int, int]]:
        for a, nb in enumerate(self._adj[i, j]):
            for b in sorted(nb):
                yield a, b

    def without_incidence(self, x: tuple[int, int], y: tuple[int, int]) -> "IncidenceGeometry":
        """A copy with the single incidence ``x ~ y`` removed."""
        (i, a), (j, b) = x, y
        pairs = {}
        for s in range(self.rank):
            for t in range(s + 1, self.rank):
                pairs[s, t] = [(u, v) for u, v in self.incidence_pairs(s, t)
                               if not ((s, u, t, v) in ((i, a, j, b), (j, b, i, a)))]
        return IncidenceGeometry(self.sizes, pairs)

    # -- flags and chambers ----------------------------------------------

    def flags(self, types: Sequence[int]) -> Iterator[Flag]:
        """All flags whose type set is exactly ``types``, by clique extension."""
        types = sorted(types)

        def extend(k: int, chosen: list[tuple[int, int]]) -> Iterator[Flag]:
            if k == len(types):
                yield tuple(chosen)
                return
            t = types[k]
            if chosen:
                cands = set.intersection(*(self._adj[i, t][a] for i, a in chosen))
            else:
                cands = range(self.sizes[t])
            for b in sorted(cands):
                chosen.append((t, b))
                yield from extend(k + 1, chosen)
                chosen.pop()

        yield from extend(0, [])

    def chambers(self) -> list[tuple[int, ...]]:
        """Chambers as tuples of indices, position = type."""
        if self._chambers is None:
            self._chambers = [tuple(b for _, b in f) for f in self.flags(range(self.rank))]
        return self._chambers

    def flags_in_chambers(self, flag: Flag) -> int:
        return sum(1 for ch in self.chambers() if all(ch[i] == a for i, a in flag))


def chambers_bruteforce(geo: IncidenceGeometry) -> list[tuple[int, ...]]:
    """Chambers by plain clique search, bypassing any specialised enumeration."""
    return sorted(tuple(b for _, b in f) for f in geo.flags(range(geo.rank)))


def is_geometry(geo: IncidenceGeometry) -> bool:
    """Whether every flag lies in a chamber."""
    chambers = geo.chambers()
    if not chambers:
        return False
    covered = set()
    for ch in chambers:
        for k in range(1, geo.rank):
            for types in itertools.combinations(range(geo.rank), k):
                covered.add(tuple((i, ch[i]) for i in types))
    for k in range(1, geo.rank):
        for types in itertools.combinations(range(geo.rank), k):
            for f in geo.flags(types):
                if f not in covered:
                    return False
    return True


def is_geometry_bruteforce(geo: IncidenceGeometry) -> bool:
    """Same predicate without the chamber list: extend each flag by direct search."""
    for k in range(1, geo.rank):
        for types in itertools.combinations(range(geo.rank), k):
            missing = [t for t in range(geo.rank) if t not in types]
            for f in geo.flags(types):
                pools = [sorted(set.intersection(*(geo.neighbours(i, a, t) for i, a in f)))
                         for t in missing]
                ok = any(
                    all(geo.incident((s, u), (t, v))
                        for (s, u), (t, v) in itertools.combinations(zip(missing, combo), 2))
                    for combo in itertools.product(*pools)
                )
                if not ok:
                    return False
    return True


class FirmnessReport(NamedTuple):
    firm: bool
    witness: Flag | None  # a corank-one flag in fewer than two chambers
    chambers_through_witness: int


def is_firm(geo: IncidenceGeometry) -> FirmnessReport:
    """Firm means every corank-one flag (hence every non-maximal flag) lies in two chambers."""
    for types in itertools.combinations(range(geo.rank), geo.rank - 1):
        counts: dict[Flag, int] = {f: 0 for f in geo.flags(types)}
        for ch in geo.chambers():
            counts[tuple((i, ch[i]) for i in types)] += 1
        for f in sorted(counts):
            if counts[f] < 2:
                return FirmnessReport(False, f, counts[f])
    return FirmnessReport(True, None, 0)


def grid_geometry(m: int = 3) -> IncidenceGeometry:
    """Points and lines of the ``m x m`` grid (a firm rank-two geometry)."""
    points = m * m
    pairs = []
    for r in range(m):
        for c in range(m):
            pt = r * m + c
            pairs.append((pt, r))  # row line
            pairs.append((pt, m + c))  # column line
    return IncidenceGeometry((points, 2 * m), {(0, 1): pairs})


# ---------------------------------------------------------------------------
# the coset geometry
# ---------------------------------------------------------------------------


@dataclass(eq=False)
class CosetGeometry(IncidenceGeometry):
    triple: MapTriple
    elements: np.ndarray  # (|G|, 4) canonical matrices, sorted
    keys: np.ndarray
    subgroups: list[np.ndarray]  # element indices of G0..G3
    coset_of: list[np.ndarray]  # coset_of[i][g] = type-i index of g Gi
    reps: list[np.ndarray]  # reps[i][a] = element index of the smallest member
    _pairs: dict[tuple[int, int], np.ndarray] = field(repr=False)

    def __post_init__(self) -> None:
        IncidenceGeometry.__init__(
            self, [r.shape[0] for r in self.reps], {k: v.tolist() for k, v in self._pairs.items()}
        )

    @property
    def group(self) -> PSL2:
        return self.triple.group

    @property
    def group_order(self) -> int:
        return int(self.elements.shape[0])

    def index(self, mats: np.ndarray) -> np.ndarray:
        """Positions of canonical matrices in :attr:`elements`."""
        k = self.group.keys(mats)
        idx = np.searchsorted(self.keys, k)
        if not np.array_equal(self.keys[np.minimum(idx, self.keys.shape[0] - 1)], k):
            raise KeyError("matrix outside the enumerated group")
        return idx

    def rep(self, i: int, a: int) -> ProjMat:
        return tuple(int(v) for v in self.elements[self.reps[i][a]])

    def coset_members(self, i: int, a: int) -> np.ndarray:
        g = self.elements[self.reps[i][a]]
        return self.index(self.group.mul_many(g[None, :], self.elements[self.subgroups[i]]))

    def incident_by_definition(self, i: int, a: int, j: int, b: int) -> bool:
        """``g Gi`` meets ``h Gj`` iff ``h^-1 g u`` lies in ``Gj`` for some ``u`` in ``Gi``."""
        G = self.group
        g, h = self.rep(i, a), self.rep(j, b)
        hg = G.mul(G.inv(h), g)
        members = set(self.subgroups[j].tolist())
        prods = self.index(G.mul_many(np.array([hg]), self.elements[self.subgroups[i]]))
        return any(int(x) in members for x in prods)

    def left_action(self, g: ProjMat) -> list[np.ndarray]:
        """Per type, the index permutation induced by ``x Gi -> g x Gi``."""
        G = self.group
        out = []
        for i in range(self.rank):
            reps = self.elements[self.reps[i]]
            img = self.index(G.mul_many(np.array([g]), reps))
            out.append(self.coset_of[i][img])
        return out

    def element_counts(self) -> tuple[int, ...]:
        return self.sizes

    def subgroup_orders(self) -> tuple[int, ...]:
        return tuple(int(s.shape[0]) for s in self.subgroups)

    def chambers(self) -> list[tuple[int, ...]]:
        """Chambers grown from incident face/Petrie pairs through their common neighbours."""
        if self._chambers is None:
            out = []
            for f, pp in self.incidence_pairs(0, 3):
                edges = self.neighbours(0, f, 1) & self.neighbours(3, pp, 1)
                verts = self.neighbours(0, f, 2) & self.neighbours(3, pp, 2)
                for e in sorted(edges):
                    for v in sorted(verts & self.neighbours(1, e, 2)):
                        out.append((f, e, v, pp))
            out.sort()
            self._chambers = out
        return self._chambers

    def edge_list(self) -> Iterator[str]:
        G = self.group
        for i in range(self.rank):
            for j in range(i + 1, self.rank):
                for a, b in self.incidence_pairs(i, j):
                    yield f"{i}:{a}:{G.format(self.rep(i, a))} <-> {j}:{b}:{G.format(self.rep(j, b))}"


def parabolic_generators(t: MapTriple) -> list[list[ProjMat]]:
    G = t.group
    return [[t.r0, t.r1], [t.r0, t.r2], [t.r1, t.r2], [t.r1, G.mul(t.r0, t.r2)]]


def build_geometry(t: MapTriple, bound: int = DEFAULT_BOUND) -> CosetGeometry:
    G = t.group
    if G.order > bound:
        raise GeometryBoundError(
            f"|PSL(2, {G.Q})| = {G.order} exceeds the enumeration bound {bound}"
        )
    diag = validate_triple(t)
    if not diag.ok:
        raise ValueError("invalid triple: " + "; ".join(diag.failures))

    keys = _closure_keys(G, t.as_tuple(), bound)
    elements = G.from_keys(keys)
    N = keys.shape[0]

    def index(mats: np.ndarray) -> np.ndarray:
        return np.searchsorted(keys, G.keys(mats))

    subgroups, coset_of, reps = [], [], []
    for gens in parabolic_generators(t):
        sub = index(G.from_keys(_closure_keys(G, gens, bound)))
        label = np.arange(N, dtype=np.int64)
        for u in sub:
            label = np.minimum(label, index(G.mul_many(elements, elements[u][None, :])))
        rep = np.unique(label)
        subgroups.append(sub)
        reps.append(rep)
        coset_of.append(np.searchsorted(rep, label))

    pairs = {}
    for i in range(4):
        for j in range(i + 1, 4):
            both = np.unique(coset_of[i] * N + coset_of[j])
            pairs[i, j] = np.stack([both // N, both % N], axis=1)
    return CosetGeometry(t, elements, keys, subgroups, coset_of, reps, pairs)


# ---------------------------------------------------------------------------
# orbits, trialities, dualities
# ---------------------------------------------------------------------------


def chamber_orbits(geo: CosetGeometry) -> list[int]:
    """Sizes of the orbits of G on chambers, largest first."""
    chambers = geo.chambers()
    pos = {ch: k for k, ch in enumerate(chambers)}
    t = geo.triple
    actions = [geo.left_action(g) for g in t.as_tuple()]
    parent = list(range(len(chambers)))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for act in actions:
        for k, ch in enumerate(chambers):
            img = tuple(int(act[i][ch[i]]) for i in range(4))
            a, b = find(k), find(pos[img])
            if a != b:
                parent[a] = b
    sizes: dict[int, int] = {}
    for k in range(len(chambers)):
        r = find(k)
        sizes[r] = sizes.get(r, 0) + 1
    return sorted(sizes.values(), reverse=True)


def chamber_orbit_count(geo: CosetGeometry) -> int:
    return len(chamber_orbits(geo))


TRIALITY_TYPE_MAP = (2, 1, 3, 0)  # 0 -> 2 -> 3 -> 0, 1 fixed


class TrialityAction(NamedTuple):
    type_map: tuple[int, ...]
    images: list[np.ndarray]  # images[i][a] = index of the image among type type_map[i]
    order: int
    preserves_incidence: bool


def triality_action(geo: CosetGeometry) -> TrialityAction:
    """The correlation ``g Gi -> tau(g) G_pi(i)`` induced by ``x -> x^q``."""
    t = geo.triple
    if not triality_witness_frobenius(t):
        raise ValueError("x -> x^q is not a triality witness for this triple")
    G = geo.group
    F = G.ctx
    frob = F.frob_table(F.n)
    images = []
    for i in range(4):
        reps = geo.elements[geo.reps[i]]
        twisted = G.canon_many(frob[reps])
        images.append(geo.coset_of[TRIALITY_TYPE_MAP[i]][geo.index(twisted)])
    for i in range(4):
        if np.unique(images[i]).shape[0] != geo.sizes[i]:
            raise AssertionError("triality image is not a bijection")

    def apply(x: tuple[int, int]) -> tuple[int, int]:
        i, a = x
        return TRIALITY_TYPE_MAP[i], int(images[i][a])

    preserves = all(
        geo.incident(apply((i, a)), apply((j, b)))
        for i in range(4)
        for j in range(i + 1, 4)
        for a, b in geo.incidence_pairs(i, j)
    )
    # as one permutation of all elements, types laid out consecutively
    offsets = np.concatenate([[0], np.cumsum(geo.sizes)])
    perm = np.concatenate([offsets[TRIALITY_TYPE_MAP[i]] + images[i] for i in range(4)])
    order, power = 1, perm
    while not np.array_equal(power, np.arange(perm.shape[0])):
        power = perm[power]
        order += 1
    return TrialityAction(TRIALITY_TYPE_MAP, images, order, preserves)


def duality_absence(t: MapTriple) -> bool:
    """No automorphism of G realises D, P or DPD on the triple."""
    return not wilson_class(t).has_duality
