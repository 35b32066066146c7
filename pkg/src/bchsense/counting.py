"""Counting binary sequences whose ones are separated by a minimum run of zeros.

``kappa(a, b)`` counts length-``b`` sequences with at least ``a`` zeros
between consecutive ones; ``tau(a, b)`` applies the same rule around a
circle.  Python integers are unbounded, so counts never overflow.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb

import numpy as np

ENUMERATION_LIMIT = 24


class LengthTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class CountingTable:
    """Precomputed ``kappa[b]`` and ``tau[b]`` for one gap ``a``."""

    a: int
    kappa: tuple[int, ...]
    tau: tuple[int, ...]

    @classmethod
    def build(cls, a: int, b_max: int) -> CountingTable:
        k = tuple(kappa(a, b) for b in range(b_max + 1))
        # tau is undefined at b = 0; store the empty-circle count 1 there
        t = (1,) + tuple(tau(a, b) for b in range(1, b_max + 1))
        return cls(a, k, t)


@lru_cache(maxsize=None)
def _kappa_row(a: int, b_max: int) -> tuple[int, ...]:
    row = [1]
    for b in range(1, b_max + 1):
        if b <= a + 1:
            row.append(b + 1)
        else:
            row.append(row[b - 1] + row[b - a - 1])
    return tuple(row)


def kappa(a: int, b: int) -> int:
    """Linear count via ``kappa_b = kappa_{b-1} + kappa_{b-a-1}``."""
    if a < 0 or b < 0:
        raise ValueError("gap and length must be non-negative")
    # round the cache key up so neighbouring lengths share one row
    return _kappa_row(a, max(64, 1 << max(b, 1).bit_length()))[b] if b > 0 else 1


def enumerate_spaced_sequences(a: int, b: int, circular: bool) -> list[int]:
    """All length-``b`` masks obeying the gap rule, ascending.

    Bit ``t`` of a mask is position ``t`` of the sequence.
    """
    if b > ENUMERATION_LIMIT:
        raise LengthTooLarge(f"enumeration limited to b <= {ENUMERATION_LIMIT}, got {b}")
    if a < 0 or b < 0:
        raise ValueError("gap and length must be non-negative")
    if b == 0:
        return [0]
    if a == 0:
        return list(range(1 << b))
    masks = np.arange(1 << b, dtype=np.int64)
    ok = np.ones(masks.shape, dtype=bool)
    full = (1 << b) - 1
    # no one may sit within distance a (forward) of another one
    for s in range(1, a + 1):
        if circular:
            r = s % b
            shifted = ((masks << r) | (masks >> (b - r))) & full if r else masks
            ok &= ((masks & shifted) == 0) | _single_one(masks)
        else:
            ok &= (masks & (masks << s)) == 0
    return [int(m) for m in masks[ok]]


def _single_one(masks: np.ndarray) -> np.ndarray:
    return (masks & (masks - 1)) == 0


def tau(a: int, b: int) -> int:
    """Circular count; enumeration up to the guard, closed form beyond."""
    if a < 0 or b < 1:
        raise ValueError("need a >= 0 and b >= 1")
    if b <= ENUMERATION_LIMIT:
        return len(enumerate_spaced_sequences(a, b, circular=True))
    return tau_formula(a, b)


def tau_formula(a: int, b: int) -> int:
    """Sum over weights ``w`` of ``b/w * C(b - a*w - 1, w - 1)``.

    Weight-``w`` placements on a cycle of ``b`` cells with gaps ``>= a``:
    fix the gap following each one, count compositions, divide out the
    ``w`` choices of starting one.
    """
    if a < 0 or b < 1:
        raise ValueError("need a >= 0 and b >= 1")
    total = 1 + b
    w = 2
    while w * (a + 1) <= b:
        total += b * comb(b - a * w - 1, w - 1) // w
        w += 1
    return total


def growth_root(a: int, tol: float = 1e-12) -> float:
    """Real root of ``z^(a+1) - z^a - 1`` in ``(1, 2]`` by bisection."""
    if a < 0:
        raise ValueError("gap must be non-negative")

    def f(z):
        return z ** (a + 1) - z**a - 1

    lo, hi = 1.0, 2.0
    if f(hi) == 0:
        return hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if f(mid) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def growth_root_lower_bound(a: int) -> float:
    return ((a + 3) / 2) ** (1 / (a + 1))


def other_root_moduli(a: int) -> np.ndarray:
    """Moduli of the remaining roots of ``z^(a+1) - z^a - 1``, largest first."""
    coeffs = np.zeros(a + 2)
    coeffs[0], coeffs[1], coeffs[-1] = 1.0, -1.0, -1.0
    roots = np.roots(coeffs)
    gamma = growth_root(a)
    rest = roots[np.abs(roots - gamma) > 1e-8]
    return np.sort(np.abs(rest))[::-1]
