"""Binary extension-field arithmetic GF(2^m).

Field elements are ``m``-bit integers in the polynomial basis; bit ``t`` is
the coefficient of ``x^t``.  Binary polynomials (:class:`Gf2Poly`) use the
same convention with unbounded width, so ``x^4 + x + 1`` is ``0x13``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

MAX_M = 16


class NotPrimitive(ValueError):
    """Raised when a polynomial does not generate the multiplicative group."""


class FieldConsistencyError(ArithmeticError):
    """Raised when an internal field computation violates an invariant."""


@dataclass(frozen=True, order=True)
class Gf2Poly:
    """Polynomial over GF(2) stored as a coefficient bitmask."""

    bits: int = 0

    def __post_init__(self):
        if self.bits < 0:
            raise ValueError("coefficient mask must be non-negative")

    @property
    def degree(self) -> int:
        """Index of the highest set bit; ``-1`` stands in for the zero polynomial."""
        return self.bits.bit_length() - 1

    def is_zero(self) -> bool:
        return self.bits == 0

    def __add__(self, other: Gf2Poly) -> Gf2Poly:
        return Gf2Poly(self.bits ^ other.bits)

    __sub__ = __add__
    __xor__ = __add__

    def __mul__(self, other: Gf2Poly) -> Gf2Poly:
        return Gf2Poly(clmul(self.bits, other.bits))

    def __divmod__(self, other: Gf2Poly) -> tuple[Gf2Poly, Gf2Poly]:
        return poly_divide(self, other)

    def __floordiv__(self, other: Gf2Poly) -> Gf2Poly:
        return poly_divide(self, other)[0]

    def __mod__(self, other: Gf2Poly) -> Gf2Poly:
        return poly_divide(self, other)[1]

    def __call__(self, x: int) -> int:
        """Evaluate at 0 or 1 (GF(2) points)."""
        if x not in (0, 1):
            raise ValueError("use FieldContext.evaluate for extension-field points")
        return (self.bits & 1) if x == 0 else self.bits.bit_count() & 1

    def exponents(self) -> list[int]:
        """Powers of x with nonzero coefficient, descending."""
        return [t for t in range(self.degree, -1, -1) if (self.bits >> t) & 1]

    def hex(self) -> str:
        return f"0x{self.bits:x}"

    def __str__(self) -> str:
        if self.bits == 0:
            return "0"
        terms = []
        for t in self.exponents():
            terms.append("1" if t == 0 else "x" if t == 1 else f"x^{t}")
        return "+".join(terms)

    def __repr__(self) -> str:
        return f"Gf2Poly({self.hex()}: {self})"

    @classmethod
    def monomial(cls, t: int) -> Gf2Poly:
        return cls(1 << t)

    @classmethod
    def parse(cls, text: str | int | Gf2Poly) -> Gf2Poly:
        """Accept ``0x13``, ``19``, ``x^4+x+1`` or ``x4+x+1`` style input."""
        if isinstance(text, Gf2Poly):
            return text
        if isinstance(text, (int, np.integer)):
            return cls(int(text))
        s = text.strip().replace(" ", "").replace("**", "^")
        if re.fullmatch(r"0[xX][0-9a-fA-F]+", s):
            return cls(int(s, 16))
        if re.fullmatch(r"0[bB][01]+", s):
            return cls(int(s, 2))
        if re.fullmatch(r"\d+", s) and s not in ("0", "1"):
            return cls(int(s))
        bits = 0
        for term in s.split("+"):
            m = re.fullmatch(r"x(?:\^?(\d+))?|([01])", term)
            if m is None:
                raise ValueError(f"cannot parse polynomial term {term!r} in {text!r}")
            if m.group(2) is not None:
                t = None if m.group(2) == "0" else 0
            else:
                t = int(m.group(1)) if m.group(1) else 1
            if t is not None:
                bits ^= 1 << t
        return cls(bits)


def clmul(a: int, b: int) -> int:
    """Carry-less product of two bitmasks."""
    if a.bit_length() < b.bit_length():
        a, b = b, a
    out = 0
    while b:
        low = b & -b
        out ^= a << (low.bit_length() - 1)
        b ^= low
    return out


def poly_divide(a: Gf2Poly, b: Gf2Poly) -> tuple[Gf2Poly, Gf2Poly]:
    """Long division over GF(2): returns ``(q, r)`` with ``a = q*b + r``."""
    if b.bits == 0:
        raise ZeroDivisionError("division by the zero polynomial")
    r = a.bits
    db = b.degree
    q = 0
    while r and r.bit_length() - 1 >= db:
        shift = r.bit_length() - 1 - db
        q ^= 1 << shift
        r ^= b.bits << shift
    return Gf2Poly(q), Gf2Poly(r)


def _mulmod(a: int, b: int, mod: int) -> int:
    deg = mod.bit_length() - 1
    out = 0
    while b:
        if b & 1:
            out ^= a
        b >>= 1
        a <<= 1
        if (a >> deg) & 1:
            a ^= mod
    return out


def _powmod_x(e: int, mod: int) -> int:
    """x^e reduced modulo ``mod``."""
    result, base = 1, 0b10
    if mod.bit_length() - 1 == 1:
        base = 0b10 ^ mod
    while e:
        if e & 1:
            result = _mulmod(result, base, mod)
        base = _mulmod(base, base, mod)
        e >>= 1
    return result


def _prime_factors(n: int) -> list[int]:
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def root_order(poly: Gf2Poly) -> int:
    """Multiplicative order of x modulo ``poly`` (0 when x is not a unit)."""
    mod = poly.bits
    m = poly.degree
    if m < 1 or not (mod & 1):
        return 0
    if m == 1:
        return 1
    v, t = 1, 0
    while True:
        v = _mulmod(v, 0b10, mod)
        t += 1
        if v == 1:
            return t


def is_primitive(poly: Gf2Poly) -> bool:
    """True iff the root of ``poly`` has order ``2^deg - 1``.

    A reducible polynomial has fewer than ``2^deg - 1`` units in its quotient
    ring, so the order test alone implies irreducibility.
    """
    m = poly.degree
    if m < 1:
        return False
    n = (1 << m) - 1
    mod = poly.bits
    if not (mod & 1) and m > 1:
        return False
    if m == 1:
        return mod == 0b11
    if _powmod_x(n, mod) != 1:
        return False
    return all(_powmod_x(n // q, mod) != 1 for q in _prime_factors(n))


def primitive_polynomials(m: int):
    """Yield every primitive polynomial of degree ``m`` in ascending mask order."""
    for bits in range((1 << m) | 1, 1 << (m + 1), 2):
        p = Gf2Poly(bits)
        if is_primitive(p):
            yield p


def smallest_primitive(m: int) -> Gf2Poly:
    return next(primitive_polynomials(m))


@dataclass(frozen=True, eq=False)
class FieldContext:
    """GF(2^m) with log/antilog tables for the root ``alpha`` of ``primitive_poly``."""

    m_tilde: int
    primitive_poly: Gf2Poly
    antilog_table: np.ndarray = field(repr=False)
    log_table: np.ndarray = field(repr=False)

    @property
    def order(self) -> int:
        """Size of the multiplicative group, ``2^m - 1``."""
        return (1 << self.m_tilde) - 1

    @property
    def size(self) -> int:
        return 1 << self.m_tilde

    def alpha_pow(self, e: int) -> int:
        return int(self.antilog_table[e % self.order])

    def log(self, a: int) -> int:
        if a == 0:
            raise ValueError("log of zero")
        return int(self.log_table[a])

    def mul(self, a: int, b: int) -> int:
        return mul(self, a, b)

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("zero has no inverse")
        return int(self.antilog_table[(-int(self.log_table[a])) % self.order])

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            return 1 if e == 0 else 0
        return int(self.antilog_table[(int(self.log_table[a]) * e) % self.order])

    def evaluate(self, poly: Gf2Poly, a: int) -> int:
        """Horner evaluation of a binary polynomial at field element ``a``."""
        acc = 0
        for t in range(poly.degree, -1, -1):
            acc = self.mul(acc, a) ^ ((poly.bits >> t) & 1)
        return acc

    def __eq__(self, other):
        if not isinstance(other, FieldContext):
            return NotImplemented
        return self.m_tilde == other.m_tilde and self.primitive_poly == other.primitive_poly

    def __hash__(self):
        return hash((self.m_tilde, self.primitive_poly.bits))


def make_field(m_tilde: int, primitive_poly: Gf2Poly | str | int | None = None) -> FieldContext:
    """Build GF(2^m_tilde); the default modulus is the smallest primitive polynomial."""
    if not 2 <= m_tilde <= MAX_M:
        raise ValueError(f"extension degree must lie in [2, {MAX_M}], got {m_tilde}")
    if primitive_poly is None:
        poly = smallest_primitive(m_tilde)
    else:
        poly = Gf2Poly.parse(primitive_poly)
        if poly.degree != m_tilde:
            raise ValueError(f"polynomial {poly} has degree {poly.degree}, expected {m_tilde}")
    n = (1 << m_tilde) - 1
    antilog = np.zeros(n, dtype=np.int64)
    log = np.full(n + 1, -1, dtype=np.int64)
    v = 1
    mod = poly.bits
    top = 1 << m_tilde
    for j in range(n):
        if log[v] != -1:
            raise NotPrimitive(f"{poly} ({poly.hex()}) is not primitive: root order {j}")
        antilog[j] = v
        log[v] = j
        v <<= 1
        if v & top:
            v ^= mod
    if v != 1:
        raise NotPrimitive(f"{poly} ({poly.hex()}) is not primitive")
    antilog.flags.writeable = False
    log.flags.writeable = False
    return FieldContext(m_tilde, poly, antilog, log)


def mul(ctx: FieldContext, a: int, b: int) -> int:
    if a == 0 or b == 0:
        return 0
    return int(ctx.antilog_table[(ctx.log_table[a] + ctx.log_table[b]) % ctx.order])


def cyclotomic_coset(ctx: FieldContext | int, e: int) -> frozenset[int]:
    """Orbit of exponent ``e`` under doubling mod ``2^m - 1``.

    ``ctx`` may be a field or just the extension degree.
    """
    m = ctx.m_tilde if isinstance(ctx, FieldContext) else int(ctx)
    n = (1 << m) - 1
    if not 0 <= e < n:
        raise ValueError(f"exponent {e} outside [0, {n})")
    out = {e}
    c = (2 * e) % n
    while c != e:
        out.add(c)
        c = (2 * c) % n
    return frozenset(out)


def coset_representatives(m: int, exponents) -> list[int]:
    """Smallest member of every cyclotomic coset meeting ``exponents``."""
    seen: set[int] = set()
    reps = []
    for e in sorted(exponents):
        if e in seen:
            continue
        cos = cyclotomic_coset(m, e)
        seen |= cos
        reps.append(min(cos))
    return sorted(reps)


def expand_roots(ctx: FieldContext, exponents) -> list[int]:
    """Coefficients (ascending) of prod (x - alpha^e) over GF(2^m)."""
    coeffs = [1]
    for e in sorted(exponents):
        root = ctx.alpha_pow(e)
        # multiply by (x + root)
        nxt = [0] * (len(coeffs) + 1)
        for t, c in enumerate(coeffs):
            nxt[t + 1] ^= c
            nxt[t] ^= mul(ctx, c, root)
        coeffs = nxt
    return coeffs


def minimal_polynomial(ctx: FieldContext, e: int) -> Gf2Poly:
    """Minimal polynomial over GF(2) of ``alpha^e``."""
    coeffs = expand_roots(ctx, cyclotomic_coset(ctx, e))
    bits = 0
    for t, c in enumerate(coeffs):
        if c not in (0, 1):
            raise FieldConsistencyError(
                f"minimal polynomial of alpha^{e} has coefficient {c} outside GF(2)"
            )
        bits |= c << t
    return Gf2Poly(bits)
