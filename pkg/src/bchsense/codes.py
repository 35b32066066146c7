"""Symmetric BCH codes with large minimum distance.

The parity-check polynomial ``h`` has as roots the powers ``alpha^e`` whose
exponent ``e`` has an ``m``-bit binary form with ones circularly separated by
at least ``i`` zeros.  Every remaining nonzero field element is a root of the
generator ``g = (x^n + 1) / h``, which gives a long run of consecutive roots
and the distance bound ``2^(m-1) - 2^l`` with ``l = m - i - 1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import counting
from ._kernels import backend as _kern
from .gf2m import (
    FieldContext,
    FieldConsistencyError,
    Gf2Poly,
    coset_representatives,
    cyclotomic_coset,
    make_field,
    minimal_polynomial,
    poly_divide,
    primitive_polynomials,
)

MAX_K_TILDE = 21


class TooManyCodewords(ValueError):
    pass


@dataclass(frozen=True)
class CodeSpec:
    """A constructed symmetric cyclic code of length ``2^m - 1``."""

    field: FieldContext
    i: int
    l: int
    n_tilde: int
    h: Gf2Poly
    g: Gf2Poly
    k_tilde: int
    dmin_bound: int
    h_exponents: frozenset[int] = field(repr=False)

    @property
    def m_tilde(self) -> int:
        return self.field.m_tilde

    @property
    def even_generator(self) -> Gf2Poly:
        """``(x + 1) g(x)``: generator of the even-weight subcode."""
        return self.g * Gf2Poly(0b11)


@dataclass(frozen=True)
class Codeword:
    bits: int
    n_tilde: int

    @property
    def weight(self) -> int:
        return self.bits.bit_count()

    @property
    def parity(self) -> str:
        return "odd" if self.weight & 1 else "even"

    def rotate(self, t: int = 1) -> Codeword:
        """Cyclic shift by ``t`` positions (multiplication by ``x^t``)."""
        n = self.n_tilde
        t %= n
        full = (1 << n) - 1
        return Codeword(((self.bits << t) | (self.bits >> (n - t))) & full, n)

    def as_poly(self) -> Gf2Poly:
        return Gf2Poly(self.bits)


def gap_for_order(k: int) -> int:
    """Smallest ``i`` with ``2^i >= k``."""
    if k < 1:
        raise ValueError("sparsity order must be positive")
    return (k - 1).bit_length()


def build_h_exponents(fld: FieldContext | int, i: int) -> frozenset[int]:
    """Exponents whose ``m``-bit form has ones circularly ``i``-spaced."""
    m = fld.m_tilde if isinstance(fld, FieldContext) else int(fld)
    if not 1 <= i <= m:
        raise ValueError(f"gap i must satisfy 1 <= i <= m_tilde={m}, got {i}")
    return frozenset(counting.enumerate_spaced_sequences(i, m, circular=True))


def window_h_exponents(m: int, l: int) -> frozenset[int]:
    """Union of cyclotomic cosets lying entirely in ``[0, 2^(m-1) + 2^l - 1]``.

    Independent route to :func:`build_h_exponents` (for ``0 <= l < m - 1``).
    """
    top = (1 << (m - 1)) + (1 << l) - 1
    out: set[int] = set()
    for e in range(top + 1):
        cos = cyclotomic_coset(m, e)
        if max(cos) <= top:
            out |= cos
    return frozenset(out)


def build_code(fld: FieldContext, i: int) -> CodeSpec:
    m = fld.m_tilde
    exps = build_h_exponents(fld, i)
    h = Gf2Poly(1)
    for rep in coset_representatives(m, exps):
        h = h * minimal_polynomial(fld, rep)
    n = fld.order
    xn1 = Gf2Poly((1 << n) | 1)
    g, rem = poly_divide(xn1, h)
    if not rem.is_zero():
        raise FieldConsistencyError(f"h = {h} does not divide x^{n}+1")
    # for i >= m - 1 only weight <= 1 exponents survive, same code as l = 0
    l = max(m - i - 1, 0)
    return CodeSpec(
        field=fld,
        i=i,
        l=l,
        n_tilde=n,
        h=h,
        g=g,
        k_tilde=h.degree,
        dmin_bound=(1 << (m - 1)) - (1 << l),
        h_exponents=exps,
    )


def _generator_rows(gen: Gf2Poly, count: int, n: int) -> np.ndarray:
    """Packed rows ``x^b * gen`` for ``b < count`` as ``(count, words)`` uint64."""
    return pack_masks([gen.bits << b for b in range(count)], n)


def pack_masks(masks, n: int) -> np.ndarray:
    words = max(1, (n + 63) // 64)
    out = np.zeros((len(masks), words), dtype=np.uint64)
    lim = (1 << 64) - 1
    for r, v in enumerate(masks):
        for w in range(words):
            out[r, w] = (v >> (64 * w)) & lim
    return out


def unpack_mask(row: np.ndarray) -> int:
    v = 0
    for w in range(row.shape[0] - 1, -1, -1):
        v = (v << 64) | int(row[w])
    return v


def span_words(rows: np.ndarray) -> np.ndarray:
    """All ``2^r`` XOR combinations of ``rows``; entry ``j`` uses the bits of ``j``."""
    r, words = rows.shape
    out = np.zeros((1 << r, words), dtype=np.uint64)
    for b in range(r):
        half = 1 << b
        np.bitwise_xor(out[:half], rows[b], out=out[half : 2 * half])
    return out


def even_codeword_words(spec: CodeSpec) -> np.ndarray:
    """Even-weight codewords packed as ``(2^(k-1), words)``, message-ascending."""
    _guard(spec)
    rows = _generator_rows(spec.even_generator, spec.k_tilde - 1, spec.n_tilde)
    return span_words(rows)


def enumerate_even_codewords(spec: CodeSpec) -> list[Codeword]:
    words = even_codeword_words(spec)
    return [Codeword(unpack_mask(row), spec.n_tilde) for row in words]


def min_distance(spec: CodeSpec) -> int:
    """Brute-force minimum weight over the nonzero codewords ``m(x) g(x)``."""
    _guard(spec)
    rows = _generator_rows(spec.g, spec.k_tilde, spec.n_tilde)
    return int(_kern.gray_min_weight(rows))


def _guard(spec: CodeSpec) -> None:
    if spec.k_tilde > MAX_K_TILDE:
        raise TooManyCodewords(
            f"k_tilde = {spec.k_tilde} exceeds enumeration limit {MAX_K_TILDE}"
        )


def find_table1_primitive(m_tilde: int, i: int, target_h: Gf2Poly | str) -> Gf2Poly | None:
    """First primitive polynomial of degree ``m_tilde`` whose code has ``h == target_h``."""
    target = Gf2Poly.parse(target_h)
    for prim in primitive_polynomials(m_tilde):
        if build_code(make_field(m_tilde, prim), i).h == target:
            return prim
    return None
