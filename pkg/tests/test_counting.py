from math import comb

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bchsense.counting import (
    CountingTable,
    LengthTooLarge,
    enumerate_spaced_sequences,
    growth_root,
    growth_root_lower_bound,
    kappa,
    other_root_moduli,
    tau,
    tau_formula,
)


def spaced_ref(mask, a, b, circular):
    """String-based gap check, independent of the vectorised enumerator."""
    s = "".join("1" if (mask >> t) & 1 else "0" for t in range(b))
    ones = [t for t, ch in enumerate(s) if ch == "1"]
    if len(ones) < 2:
        return True
    gaps = [v - u - 1 for u, v in zip(ones, ones[1:])]
    if circular:
        gaps.append(ones[0] + b - ones[-1] - 1)
    return min(gaps) >= a


@pytest.mark.parametrize("a", range(0, 5))
@pytest.mark.parametrize("b", range(1, 13))
def test_enumeration_against_string_oracle(a, b):
    for circular in (False, True):
        ref = [m for m in range(1 << b) if spaced_ref(m, a, b, circular)]
        assert enumerate_spaced_sequences(a, b, circular) == ref


@pytest.mark.parametrize("a", range(0, 7))
def test_kappa_and_tau_match_enumeration(a):
    for b in range(1, 17):
        assert kappa(a, b) == len(enumerate_spaced_sequences(a, b, circular=False))
        assert tau(a, b) == len(enumerate_spaced_sequences(a, b, circular=True))


def test_known_rows():
    assert [kappa(3, b) for b in range(1, 9)] == [2, 3, 4, 5, 7, 10, 14, 19]
    assert tau(3, 8) == 13
    assert [kappa(1, b) for b in range(1, 8)] == [2, 3, 5, 8, 13, 21, 34]
    # a = 1 circular counts are Lucas numbers
    assert [tau(1, b) for b in range(3, 9)] == [4, 7, 11, 18, 29, 47]
    assert kappa(0, 10) == 1024


@settings(deadline=None, max_examples=60)
@given(st.integers(0, 8), st.integers(1, 20))
def test_tau_formula_equals_enumeration(a, b):
    assert tau_formula(a, b) == len(enumerate_spaced_sequences(a, b, circular=True))


def test_tau_beyond_enumeration_uses_formula():
    assert tau(2, 40) == tau_formula(2, 40)
    with pytest.raises(LengthTooLarge):
        enumerate_spaced_sequences(1, 25, circular=True)


def test_tau_closed_form_by_hand():
    # weight 2 on a cycle of 9 with gaps >= 3: 9 * C(2, 1) / 2
    assert tau_formula(3, 9) == 1 + 9 + 9 * comb(2, 1) // 2


def test_invalid_arguments():
    with pytest.raises(ValueError):
        kappa(-1, 3)
    with pytest.raises(ValueError):
        tau(2, 0)


@pytest.mark.parametrize("a", range(0, 11))
def test_growth_root(a):
    g = growth_root(a)
    assert abs(g ** (a + 1) - g**a - 1) < 1e-10
    assert kappa(a, 201) / kappa(a, 200) == pytest.approx(g, abs=1e-6)
    assert all(r < g for r in other_root_moduli(a))


@pytest.mark.parametrize("a", range(1, 10))
def test_growth_root_exceeds_lower_bound_for_small_gaps(a):
    assert growth_root(a) > growth_root_lower_bound(a)


def test_lower_bound_breaks_down_for_large_gaps():
    # the closed-form lower bound overtakes the true root from a = 10 on
    for a in (10, 12, 20):
        assert growth_root(a) < growth_root_lower_bound(a)


def test_counting_table():
    t = CountingTable.build(3, 8)
    assert t.kappa[1:] == (2, 3, 4, 5, 7, 10, 14, 19)
    assert t.tau[8] == 13


def test_bound_crossing_survives_high_precision():
    a = 10
    with mpmath.workdps(40):
        root = mpmath.findroot(lambda z: z ** (a + 1) - z**a - 1, 1.18)
        bound = (mpmath.mpf(a + 3) / 2) ** (mpmath.mpf(1) / (a + 1))
        assert root < bound
    assert abs(float(root) - growth_root(a)) < 1e-11
