"""Reflexible maps on PSL(2, F) as ordered involution triples.

A map is given by its monodromy triple ``(r0, r1, r2)``: three involutions
with ``r0`` and ``r2`` commuting. Two maps are isomorphic when some
automorphism of PSL(2, F) (an element of PGammaL(2, F): a Galois twist
followed by PGL-conjugation) carries one ordered triple onto the other.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple

from .gf import FieldCtx, build_field
from .psl2 import PSL2, Intertwiner, ProjMat

__all__ = [
    "ClassReport",
    "Diagnostics",
    "MapTriple",
    "MapType",
    "TripleParseError",
    "WilsonClass",
    "WilsonOp",
    "Witness",
    "are_isomorphic",
    "format_triple",
    "map_type",
    "parse_triple",
    "random_valid_triple",
    "triality_witness_frobenius",
    "validate_triple",
    "wilson_class",
    "wilson_image",
]


class Diagnostics(NamedTuple):
    """Outcome of a battery of checks: ``failures`` names every check that failed."""

    checks: tuple[str, ...]
    failures: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.failures

    def __bool__(self) -> bool:
        return self.ok


class _Checker:
    def __init__(self) -> None:
        self.checks: list[str] = []
        self.failures: list[str] = []

    def __call__(self, name: str, passed: bool) -> bool:
        self.checks.append(name)
        if not passed:
            self.failures.append(name)
        return passed

    def result(self) -> Diagnostics:
        return Diagnostics(tuple(self.checks), tuple(self.failures))


@dataclass(frozen=True)
class MapTriple:
    group: PSL2 = field(compare=False, repr=False)
    r0: ProjMat
    r1: ProjMat
    r2: ProjMat

    @property
    def ctx(self) -> FieldCtx:
        return self.group.ctx

    def as_tuple(self) -> tuple[ProjMat, ProjMat, ProjMat]:
        return (self.r0, self.r1, self.r2)

    def twist(self, k: int) -> "MapTriple":
        G = self.group
        return MapTriple(G, G.twist(self.r0, k), G.twist(self.r1, k), G.twist(self.r2, k))

    def conjugate(self, x) -> "MapTriple":
        G = self.group
        return MapTriple(G, G.conj(x, self.r0), G.conj(x, self.r1), G.conj(x, self.r2))


class MapType(NamedTuple):
    p: int
    q: int
    r: int

    def __str__(self) -> str:
        return f"{{{self.p},{self.q}}}_{self.r}"


class WilsonOp(enum.Enum):
    """Wilson's six operators; composite words apply right to left (DP = D after P)."""

    ID = ""
    D = "D"
    P = "P"
    DP = "DP"
    PD = "PD"
    DPD = "DPD"

    def __matmul__(self, other: "WilsonOp") -> "WilsonOp":
        """Composition ``self o other``."""
        word = _reduce_word(self.value + other.value)
        return _WORDS[word]


def _reduce_word(word: str) -> str:
    # D^2 = P^2 = 1 and PDP = DPD.
    changed = True
    while changed:
        changed = False
        for pattern, repl in (("DD", ""), ("PP", ""), ("PDP", "DPD")):
            if pattern in word:
                word = word.replace(pattern, repl, 1)
                changed = True
    return word


_WORDS = {op.value: op for op in WilsonOp}


class WilsonClass(enum.Enum):
    I = "I"
    II = "II"
    III = "III"
    IV = "IV"


class Witness(NamedTuple):
    """An isomorphism ``g -> X (g twisted by p^k) X^-1``."""

    k: int
    conjugator: Intertwiner


@dataclass(frozen=True)
class ClassReport:
    wilson_class: WilsonClass
    triality: Witness | None
    dualities: dict[WilsonOp, Witness | None]

    @property
    def has_triality(self) -> bool:
        return self.triality is not None

    @property
    def has_duality(self) -> bool:
        return any(w is not None for w in self.dualities.values())


# ---------------------------------------------------------------------------


def validate_triple(t: MapTriple, seed: int = 0) -> Diagnostics:
    G = t.group
    check = _Checker()
    for name, r in (("r0", t.r0), ("r1", t.r1), ("r2", t.r2)):
        check(f"{name} is not the identity", not G.is_identity(r))
        check(f"{name} is an involution", G.is_identity(G.mul(r, r)))
    r0r2 = G.mul(t.r0, t.r2)
    check("r0 != r2 (Klein group non-degenerate)", t.r0 != t.r2)
    check("(r0 r2)^2 = 1", G.is_identity(G.mul(r0r2, r0r2)))
    check("<r0, r1, r2> = PSL(2, F)", G.is_full(t.as_tuple(), seed=seed))
    return check.result()


def map_type(t: MapTriple) -> MapType:
    G = t.group
    mats = [G.mul(t.r0, t.r1), G.mul(t.r1, t.r2), G.mul(G.mul(t.r0, t.r2), t.r1)]
    orders = G.orders(mats)[:, 0]
    return MapType(*(int(o) for o in orders))


def _apply_letter(t: MapTriple, letter: str) -> MapTriple:
    G = t.group
    if letter == "D":
        return MapTriple(G, t.r2, t.r1, t.r0)
    if letter == "P":
        return MapTriple(G, G.mul(t.r0, t.r2), t.r1, t.r2)
    raise ValueError(f"unknown Wilson letter {letter!r}")


def wilson_image(t: MapTriple, op: WilsonOp | str) -> MapTriple:
    """Image of ``t`` under a Wilson operator (or any word in D and P)."""
    word = op.value if isinstance(op, WilsonOp) else op
    for letter in reversed(word):
        t = _apply_letter(t, letter)
    return t


def are_isomorphic(t1: MapTriple, t2: MapTriple) -> Witness | None:
    """Smallest Galois exponent ``k`` and a PGL conjugator carrying ``t1`` onto ``t2``."""
    if t1.ctx != t2.ctx:
        raise ValueError("triples over different fields")
    G = t1.group
    for k in range(t1.ctx.deg):
        x = G.intertwiner(t1.twist(k).as_tuple(), t2.as_tuple())
        if x is not None:
            return Witness(k, x)
    return None


def check_witness(t1: MapTriple, t2: MapTriple, w: Witness) -> bool:
    """Direct verification ``X (t1 twisted by k) X^-1 == t2``."""
    return t1.twist(w.k).conjugate(w.conjugator.matrix).as_tuple() == t2.as_tuple()


_DUALITY_OPS = (WilsonOp.D, WilsonOp.P, WilsonOp.DPD)


def wilson_class(t: MapTriple) -> ClassReport:
    dualities = {op: are_isomorphic(t, wilson_image(t, op)) for op in _DUALITY_OPS}
    triality = are_isomorphic(t, wilson_image(t, WilsonOp.DP))
    has_duality = any(w is not None for w in dualities.values())
    if triality is not None:
        cls = WilsonClass.IV if has_duality else WilsonClass.III
    else:
        cls = WilsonClass.II if has_duality else WilsonClass.I
    return ClassReport(cls, triality, dualities)


def triality_witness_frobenius(t: MapTriple) -> bool:
    """Whether ``x -> x^q`` itself sends ``(r0, r1, r2)`` to ``(r2, r1, r0 r2)``."""
    n = t.ctx.n
    if n is None:
        return False
    G = t.group
    tau = t.twist(n)
    return tau.r0 == t.r2 and tau.r2 == G.mul(t.r0, t.r2) and tau.r1 == t.r1


def random_valid_triple(G: PSL2, rng: random.Random, max_tries: int = 10_000) -> MapTriple:
    """A random triple passing :func:`validate_triple`."""
    F = G.ctx
    for _ in range(max_tries):
        r0 = G.random_involution(rng)
        r2 = G.random_involution(rng)
        if r2 == r0 or G.trace(G.mat_mul(r0, r2)) != 0:
            continue
        r1 = G.random_involution(rng)
        t = MapTriple(G, r0, r1, r2)
        if G.is_full(t.as_tuple(), seed=rng.randrange(2**31)):
            return t
    raise RuntimeError(f"no valid triple found in {max_tries} tries over GF({F.order})")


# ---------------------------------------------------------------------------
# triple files: "p n | a;b;c;d | a;b;c;d | a;b;c;d"
# ---------------------------------------------------------------------------


class TripleParseError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@lru_cache(maxsize=None)
def group_for(p: int, n: int) -> PSL2:
    """PSL(2, q^3) for ``q = p^n`` (cached per process)."""
    return PSL2(build_field(p, 3 * n))


def format_triple(t: MapTriple) -> str:
    F = t.ctx
    n = F.n if F.n is not None else F.deg
    G = t.group
    return " | ".join([f"{F.p} {n}"] + [G.format(r) for r in t.as_tuple()])


def parse_triple(line: str, lineno: int | None = None) -> MapTriple:
    fields = [f.strip() for f in line.split("|")]
    if len(fields) != 4:
        raise TripleParseError(f"expected 4 '|'-separated fields, got {len(fields)}", lineno)
    try:
        p, n = (int(v) for v in fields[0].split())
    except ValueError:
        raise TripleParseError(f"bad header {fields[0]!r}; expected 'p n'", lineno) from None
    try:
        G = group_for(p, n)
    except ValueError as exc:
        raise TripleParseError(str(exc), lineno) from None
    mats = []
    for text in fields[1:]:
        try:
            m = G.parse(text)
            mats.append(G.proj(m))
        except ValueError as exc:
            raise TripleParseError(str(exc), lineno) from None
    return MapTriple(G, *mats)
