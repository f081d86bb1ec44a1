"""Finite fields GF(p^m) with table-driven arithmetic.

Elements are represented by integer codes: the element with power-basis
coordinates (c0, c1, ..., c_{m-1}) has code ``c0 + c1*p + ... + c_{m-1}*p^(m-1)``.
The integer order of codes is the canonical total order on the field used
for every canonicalisation in this package (0 first, then 1, ...).

Multiplication goes through exp/log tables of a primitive element; addition
goes through the coordinate digits. Both are exposed as numpy arrays so the
search kernels can run on them directly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Sequence

import numpy as np

__all__ = [
    "FieldCtx",
    "FieldElement",
    "build_field",
    "is_prime",
    "factorize",
    "is_irreducible",
    "poly_mulmod",
    "poly_powmod_x",
]


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def factorize(n: int) -> dict[int, int]:
    """Trial-division factorisation, ``{prime: exponent}``."""
    if n < 1:
        raise ValueError("factorize expects a positive integer")
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


# ---------------------------------------------------------------------------
# Polynomials over GF(p): coefficient lists, constant term first.
# ---------------------------------------------------------------------------


def _trim(f: list[int]) -> list[int]:
    while f and f[-1] == 0:
        f.pop()
    return f


def _poly_sub(f: Sequence[int], g: Sequence[int], p: int) -> list[int]:
    n = max(len(f), len(g))
    out = [((f[i] if i < len(f) else 0) - (g[i] if i < len(g) else 0)) % p for i in range(n)]
    return _trim(out)


def _poly_mod(f: Sequence[int], g: Sequence[int], p: int) -> list[int]:
    f = _trim(list(f))
    g = _trim(list(g))
    if not g:
        raise ZeroDivisionError("polynomial division by zero")
    inv_lead = pow(g[-1], p - 2, p)
    while len(f) >= len(g):
        coef = f[-1] * inv_lead % p
        shift = len(f) - len(g)
        for i, gi in enumerate(g):
            f[shift + i] = (f[shift + i] - coef * gi) % p
        _trim(f)
    return f


def _poly_gcd(f: Sequence[int], g: Sequence[int], p: int) -> list[int]:
    a, b = _trim(list(f)), _trim(list(g))
    while b:
        a, b = b, _poly_mod(a, b, p)
    if a:
        inv = pow(a[-1], p - 2, p)
        a = [x * inv % p for x in a]
    return a


def poly_mulmod(f: Sequence[int], g: Sequence[int], mod: Sequence[int], p: int) -> list[int]:
    """Product of two polynomials reduced modulo ``mod``."""
    prod = [0] * (len(f) + len(g) - 1) if f and g else []
    for i, fi in enumerate(f):
        if fi:
            for j, gj in enumerate(g):
                prod[i + j] = (prod[i + j] + fi * gj) % p
    return _poly_mod(prod, mod, p)


def poly_powmod_x(e: int, mod: Sequence[int], p: int) -> list[int]:
    """``x^e mod mod`` by square and multiply."""
    result = [1]
    base = _poly_mod([0, 1], mod, p)
    while e:
        if e & 1:
            result = poly_mulmod(result, base, mod, p)
        base = poly_mulmod(base, base, mod, p)
        e >>= 1
    return result


def is_irreducible(f: Sequence[int], p: int) -> bool:
    """Irreducibility of a monic ``f`` over GF(p).

    ``f`` of degree d is irreducible iff x^(p^d) = x mod f and f has no
    factor in common with x^(p^e) - x for every proper divisor e of d.
    """
    f = _trim(list(f))
    d = len(f) - 1
    if d < 1:
        return False
    if d == 1:
        return True
    if _poly_sub(poly_powmod_x(p**d, f, p), [0, 1], p):
        return False
    for e in range(1, d):
        if d % e == 0:
            h = _poly_sub(poly_powmod_x(p**e, f, p), [0, 1], p)
            if len(_poly_gcd(f, h, p)) > 1:
                return False
    return True


def _smallest_irreducible(p: int, deg: int) -> list[int]:
    # Candidates ordered by the integer code of (c0, ..., c_{deg-1}).
    for code in range(p**deg):
        low = [(code // p**i) % p for i in range(deg)]
        if deg > 1 and low[0] == 0:
            continue
        f = low + [1]
        if is_irreducible(f, p):
            return f
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


# ---------------------------------------------------------------------------
# Field context
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class FieldCtx:
    """The field GF(p^deg) = GF(p)[t]/(modulus).

    When ``deg`` is a multiple of 3, ``n = deg // 3`` and the field is read
    as GF(q^3) with ``q = p^n``; :meth:`frobenius_q` is then ``x -> x^q``.
    """

    p: int
    deg: int
    modulus: tuple[int, ...]
    exp: np.ndarray = field(repr=False)
    log: np.ndarray = field(repr=False)
    digits: np.ndarray = field(repr=False)
    primitive: int = field(repr=False)

    @property
    def order(self) -> int:
        return self.p**self.deg

    @property
    def n(self) -> int | None:
        return self.deg // 3 if self.deg % 3 == 0 else None

    @property
    def q(self) -> int:
        if self.n is None:
            raise ValueError(f"GF({self.p}^{self.deg}) is not of the form GF(q^3)")
        return self.p**self.n

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FieldCtx):
            return NotImplemented
        return (self.p, self.deg, self.modulus) == (other.p, other.deg, other.modulus)

    def __hash__(self) -> int:
        return hash((self.p, self.deg, self.modulus))

    # -- tables ----------------------------------------------------------

    @cached_property
    def place(self) -> np.ndarray:
        return self.p ** np.arange(self.deg, dtype=np.int64)

    @cached_property
    def neg_table(self) -> np.ndarray:
        return self.encode_digits((-self.digits) % self.p)

    @cached_property
    def one_plus(self) -> np.ndarray:
        """``one_plus[x]`` is the code of ``1 + x``."""
        d = self.digits.copy()
        d[:, 0] = (d[:, 0] + 1) % self.p
        return self.encode_digits(d)

    @cached_property
    def frobenius_matrix(self) -> np.ndarray:
        """GF(p)-matrix of ``x -> x^q`` on coordinate vectors (columns are images of t^j)."""
        q = self.q
        cols = [self.digits[self._pow_poly(self.basis(j), q)] for j in range(self.deg)]
        return np.stack(cols, axis=1)

    @cached_property
    def frob_q_table(self) -> np.ndarray:
        """``x -> x^q`` on codes, from the linear map."""
        images = (self.digits @ self.frobenius_matrix.T) % self.p
        return self.encode_digits(images)

    def frob_table(self, k: int) -> np.ndarray:
        """``x -> x^(p^k)`` on codes (via logs)."""
        m = self.order - 1
        e = pow(self.p, k % self.deg, m) if m > 1 else 0
        out = np.zeros(self.order, dtype=np.int64)
        out[1:] = self.exp[(self.log[1:] * e) % max(m, 1)]
        return out

    def encode_digits(self, d: np.ndarray) -> np.ndarray:
        return (np.asarray(d, dtype=np.int64) @ self.place).astype(np.int64)

    # -- element helpers -------------------------------------------------

    def basis(self, j: int) -> int:
        return self.p**j

    def coeffs(self, x: int) -> tuple[int, ...]:
        return tuple(int(v) for v in self.digits[x])

    def from_coeffs(self, cs: Sequence[int]) -> int:
        cs = list(cs)
        if len(cs) != self.deg:
            raise ValueError(f"expected {self.deg} coefficients, got {len(cs)}")
        return sum((int(c) % self.p) * self.p**i for i, c in enumerate(cs))

    def from_int(self, k: int) -> int:
        """Image of the integer ``k`` in the prime field."""
        return k % self.p

    def element(self, x: int | Sequence[int]) -> "FieldElement":
        if not isinstance(x, (int, np.integer)):
            x = self.from_coeffs(x)
        return FieldElement(self, int(x))

    def enumerate(self) -> Iterator[int]:
        """All element codes in the canonical order."""
        return iter(range(self.order))

    # -- arithmetic on codes ---------------------------------------------

    def add(self, x: int, y: int) -> int:
        if x == 0:
            return y
        if y == 0:
            return x
        return int(self.mul(x, int(self.one_plus[self.div(y, x)])))

    def sub(self, x: int, y: int) -> int:
        return self.add(x, int(self.neg_table[y]))

    def neg(self, x: int) -> int:
        return int(self.neg_table[x])

    def mul(self, x: int, y: int) -> int:
        if x == 0 or y == 0:
            return 0
        return int(self.exp[self.log[x] + self.log[y]])

    def inv(self, x: int) -> int:
        if x == 0:
            raise ZeroDivisionError("inverse of zero in a finite field")
        m = self.order - 1
        return int(self.exp[(m - self.log[x]) % m])

    def div(self, x: int, y: int) -> int:
        return self.mul(x, self.inv(y))

    def pow(self, x: int, k: int) -> int:
        if x == 0:
            if k < 0:
                raise ZeroDivisionError("negative power of zero")
            return 1 if k == 0 else 0
        m = self.order - 1
        return int(self.exp[(int(self.log[x]) * k) % m])

    def frobenius_q(self, x: int) -> int:
        return int(self.frob_q_table[x])

    def frobenius(self, x: int, k: int = 1) -> int:
        """``x^(p^k)``."""
        return self.pow(x, self.p ** (k % self.deg))

    def is_square(self, x: int) -> bool:
        if x == 0 or self.p == 2:
            return True
        return int(self.log[x]) % 2 == 0

    def sqrt(self, x: int) -> int:
        """A square root of ``x`` (the smaller code of the two)."""
        if x == 0:
            return 0
        m = self.order - 1
        if self.p == 2:
            return int(self.exp[(int(self.log[x]) * ((m + 1) // 2)) % m])
        lx = int(self.log[x])
        if lx % 2:
            raise ValueError("not a square")
        r = int(self.exp[lx // 2])
        return min(r, self.neg(r))

    def element_order(self, x: int) -> int:
        """Multiplicative order, descending through the prime divisors of |GF*|."""
        if x == 0:
            raise ValueError("zero has no multiplicative order")
        order = self.order - 1
        for ell in factorize(order):
            while order % ell == 0 and self.pow(x, order // ell) == 1:
                order //= ell
        return order

    # -- reference polynomial arithmetic (independent of the tables) -----

    def _poly(self, x: int) -> list[int]:
        return _trim(list(self.coeffs(x)))

    def _from_poly(self, f: Sequence[int]) -> int:
        return sum((c % self.p) * self.p**i for i, c in enumerate(f))

    def mul_poly(self, x: int, y: int) -> int:
        """Multiplication by polynomial reduction, bypassing the tables."""
        return self._from_poly(poly_mulmod(self._poly(x), self._poly(y), self.modulus, self.p))

    def _pow_poly(self, x: int, k: int) -> int:
        result, base = 1, x
        while k:
            if k & 1:
                result = self.mul_poly(result, base)
            base = self.mul_poly(base, base)
            k >>= 1
        return result

    # -- serialisation ---------------------------------------------------

    def format(self, x: int) -> str:
        return ",".join(str(c) for c in self.coeffs(x))

    def parse(self, s: str) -> int:
        parts = [int(v) for v in s.strip().split(",")]
        if any(not 0 <= v < self.p for v in parts):
            raise ValueError(f"coefficient out of range in {s!r}")
        return self.from_coeffs(parts)

    def __str__(self) -> str:
        n = self.deg // 3 if self.deg % 3 == 0 else self.deg
        mod = ",".join(str(c) for c in self.modulus)
        return f"p={self.p} n={n} modulus={mod}"


def build_field(p: int, deg: int) -> FieldCtx:
    """GF(p^deg) over the smallest monic irreducible modulus.

    Moduli are ordered like element codes: by ``c0 + c1*p + ...`` over the
    non-leading coefficients. For ``(2, 3)`` this gives ``x^3 + x + 1``.
    """
    if not is_prime(p):
        raise ValueError(f"characteristic {p} is not prime")
    if deg < 1:
        raise ValueError("extension degree must be positive")
    modulus = _smallest_irreducible(p, deg)
    Q = p**deg
    m = Q - 1
    place = p ** np.arange(deg, dtype=np.int64)
    digits = (np.arange(Q, dtype=np.int64)[:, None] // place[None, :]) % p

    # Multiplication by a fixed element is GF(p)-linear; iterate that map to
    # list the powers of a candidate generator.
    def powers_of(g: int) -> np.ndarray | None:
        gpoly = [int(v) for v in digits[g]]
        mat = np.zeros((deg, deg), dtype=np.int64)
        for j in range(deg):
            col = poly_mulmod([0] * j + [1], gpoly, modulus, p)
            mat[: len(col), j] = col
        out = np.empty(m, dtype=np.int64)
        v = np.zeros(deg, dtype=np.int64)
        v[0] = 1
        for i in range(m):
            code = int(v @ place)
            if i > 0 and code == 1:
                return None
            out[i] = code
            v = (mat @ v) % p
        return out

    if Q == 2:
        primitive, powers = 1, np.array([1], dtype=np.int64)
    else:
        primitive, powers = 0, None
        for g in range(2, Q):
            powers = powers_of(g)
            if powers is not None:
                primitive = g
                break
    assert powers is not None
    exp = np.concatenate([powers, powers]).astype(np.int64)
    log = np.full(Q, -1, dtype=np.int64)
    log[powers] = np.arange(m, dtype=np.int64)
    for arr in (exp, log, digits):
        arr.setflags(write=False)
    return FieldCtx(p, deg, tuple(modulus), exp, log, digits, primitive)


class FieldElement:
    """An element of a :class:`FieldCtx`, with arithmetic operators.

    Convenience wrapper over the integer-code API for interactive use and
    tests; hot paths work on codes directly.
    """

    __slots__ = ("ctx", "code")

    def __init__(self, ctx: FieldCtx, code: int):
        if not 0 <= code < ctx.order:
            raise ValueError(f"code {code} out of range for GF({ctx.order})")
        self.ctx = ctx
        self.code = code

    @property
    def coeffs(self) -> tuple[int, ...]:
        return self.ctx.coeffs(self.code)

    def _other(self, y: "FieldElement | int") -> int:
        if isinstance(y, FieldElement):
            if y.ctx != self.ctx:
                raise ValueError("elements of different fields")
            return y.code
        return self.ctx.from_int(int(y))

    def __add__(self, y):
        return FieldElement(self.ctx, self.ctx.add(self.code, self._other(y)))

    __radd__ = __add__

    def __sub__(self, y):
        return FieldElement(self.ctx, self.ctx.sub(self.code, self._other(y)))

    def __rsub__(self, y):
        return FieldElement(self.ctx, self.ctx.sub(self._other(y), self.code))

    def __neg__(self):
        return FieldElement(self.ctx, self.ctx.neg(self.code))

    def __mul__(self, y):
        return FieldElement(self.ctx, self.ctx.mul(self.code, self._other(y)))

    __rmul__ = __mul__

    def __truediv__(self, y):
        return FieldElement(self.ctx, self.ctx.div(self.code, self._other(y)))

    def __pow__(self, k: int):
        return FieldElement(self.ctx, self.ctx.pow(self.code, k))

    def inv(self) -> "FieldElement":
        return FieldElement(self.ctx, self.ctx.inv(self.code))

    def frobenius_q(self) -> "FieldElement":
        return FieldElement(self.ctx, self.ctx.frobenius_q(self.code))

    def order(self) -> int:
        return self.ctx.element_order(self.code)

    def __eq__(self, y: object) -> bool:
        if isinstance(y, FieldElement):
            return self.ctx == y.ctx and self.code == y.code
        if isinstance(y, int):
            return self.code == self.ctx.from_int(y)
        return NotImplemented

    def __lt__(self, y: "FieldElement") -> bool:
        return self.code < y.code

    def __hash__(self) -> int:
        return hash((self.ctx, self.code))

    def __bool__(self) -> bool:
        return self.code != 0

    def __repr__(self) -> str:
        return f"FieldElement({self.ctx.format(self.code)})"

    def __str__(self) -> str:
        return self.ctx.format(self.code)
