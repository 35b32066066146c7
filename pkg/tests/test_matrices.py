from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bchsense.codes import build_code, enumerate_even_codewords
from bchsense.gf2m import make_field
from bchsense.matrices import (
    DegreeTooLarge,
    DevoreSpec,
    LengthMismatch,
    NotMersenne,
    NotPrime,
    OrderTooLarge,
    SensingMatrix,
    TooLargeForFullGram,
    build_devore,
    build_pm1,
    build_ternary,
    coherence,
    gershgorin_check,
    lcg_pairs,
    mu_embed,
    pm1_matrix,
)


def float_coherence(A):
    A = A / np.linalg.norm(A, axis=0)
    G = np.abs(A.T @ A)
    np.fill_diagonal(G, 0)
    return G.max()


@pytest.mark.parametrize("m", [3, 4, 6])
def test_pm1_columns_are_even_codewords(m):
    spec = build_code(make_field(m), 3)
    M = build_pm1(spec)
    D = M.dense()
    assert D.shape == (spec.n_tilde, 1 << (spec.k_tilde - 1))
    assert set(np.unique(D)) == {-1, 1}
    for j, w in enumerate(enumerate_even_codewords(spec)):
        bits = np.array([(w.bits >> t) & 1 for t in range(spec.n_tilde)])
        assert np.array_equal(D[:, j], 2 * bits - 1)


def test_pns_matrix_is_shifts_of_one_sequence():
    M = pm1_matrix(3, 3)
    D = M.dense()
    assert D.shape == (7, 8)
    assert np.all(D[:, 0] == -1)
    pn = D[:, 1]
    shifts = {tuple(np.roll(pn, t)) for t in range(7)}
    assert shifts == {tuple(D[:, j]) for j in range(1, 8)}
    assert M.orbit_table == ((0, 1), (1, 7))


@pytest.mark.parametrize("m,i", [(4, 3), (5, 2), (6, 3), (6, 2), (8, 3)])
def test_orbits_partition_columns(m, i):
    M = pm1_matrix(m, i)
    M.check_orbits()
    assert sum(mu for _, mu in M.orbit_table) == M.cols
    assert all(M.rows % mu == 0 for _, mu in M.orbit_table)


def test_m4_orbit_sizes():
    M = pm1_matrix(4, 3)
    assert {mu for _, mu in M.orbit_table} <= {1, 3, 5, 15}
    assert M.orbit_table == ((0, 1), (1, 15))


def test_m4_exact_gram():
    M = pm1_matrix(4, 3, "x^4+x+1")
    G = M.gram_int()
    off = G[~np.eye(16, dtype=bool)]
    assert np.all(off == -1)
    assert np.all(np.diag(G) == 15)
    rep = coherence(M)
    assert rep.coherence_exact == Fraction(1, 15)
    assert rep.max_rip_order == 15


@pytest.mark.parametrize("m,i", [(3, 3), (4, 3), (5, 3), (6, 3), (6, 2), (7, 3)])
def test_coherence_matches_float_oracle(m, i):
    M = pm1_matrix(m, i)
    rep = coherence(M)
    assert rep.coherence == pytest.approx(float_coherence(M.dense().astype(float)), abs=1e-12)
    spec = build_code(make_field(m), i)
    bound = Fraction(spec.n_tilde - 2 * spec.dmin_bound, spec.n_tilde)
    assert rep.coherence_exact <= bound


def test_m6_coherence_value():
    # the even subcode is a simplex code, so every pair meets at -1/63
    for prim in ("x^6+x+1", "x^6+x^5+1", "x^6+x^4+x^3+x+1"):
        rep = coherence(pm1_matrix(6, 3, prim))
        assert rep.coherence_exact == Fraction(1, 63)
        assert rep.coherence_exact <= Fraction(1, 9)


def test_sampled_is_lower_bound_and_deterministic():
    M = pm1_matrix(6, 2)
    full = coherence(M)
    s1 = coherence(M, "sampled", count=2000, seed=3)
    s2 = coherence(M, "sampled", count=2000, seed=3)
    assert s1 == s2
    assert s1.coherence <= full.coherence
    assert s1.pairs_checked == 2000


def test_lcg_pairs():
    ii, jj = lcg_pairs(50, 1000, 7)
    assert np.all(ii != jj)
    assert ii.min() >= 0 and ii.max() < 50
    assert np.array_equal(ii, lcg_pairs(50, 1000, 7)[0])
    assert not np.array_equal(ii, lcg_pairs(50, 1000, 8)[0])


def test_full_gram_guard():
    M = build_ternary(3, 3)
    M_big = SensingMatrix("TERN", M.rows, 9000, np.zeros((9000, 1), np.uint64) + 1,
                          np.zeros((9000, 1), np.uint64))
    with pytest.raises(TooLargeForFullGram):
        coherence(M_big)


def test_single_column_matrix():
    M = SensingMatrix.from_dense("PM1", np.ones((5, 1), dtype=np.int8))
    rep = coherence(M)
    assert rep.coherence == 0
    assert rep.delta_k == {}


def test_invalid_matrices():
    with pytest.raises(ValueError):
        SensingMatrix.from_dense("PM1", np.array([[1, 0], [1, 1]]))
    with pytest.raises(ValueError):
        SensingMatrix.from_dense("BIN", np.array([[1, -1], [1, 1]]))
    with pytest.raises(ValueError):
        SensingMatrix.from_dense("XYZ", np.ones((2, 2)))
    with pytest.raises(ValueError):
        SensingMatrix.from_dense("BIN", np.array([[1, 0], [0, 0]]))


def test_gershgorin_m6():
    M = pm1_matrix(6, 3)
    g = gershgorin_check(M, 5, 300, seed=1)
    assert g.passed
    assert g.delta == pytest.approx(4 / 63)
    with pytest.raises(ValueError):
        gershgorin_check(M, 64, 1, 0)


@pytest.mark.parametrize("p,r", [(3, 1), (5, 2), (7, 2), (7, 1)])
def test_devore(p, r):
    M = build_devore(DevoreSpec(p, r))
    D = M.dense().astype(np.int64)
    assert D.shape == (p * p, p ** (r + 1))
    assert np.all(D.sum(axis=0) == p)
    G = D.T @ D
    np.fill_diagonal(G, 0)
    assert G.max() <= r
    # each block of p rows (fixed x) holds exactly one 1 per column
    assert np.all(D.reshape(p, p, -1).sum(axis=1) == 1)


def test_devore_column_polynomial():
    p = 7
    D = build_devore(DevoreSpec(p, 2)).dense()
    c = 3 + 5 * p + 2 * p * p
    for x in range(p):
        y = (3 + 5 * x + 2 * x * x) % p
        assert D[x * p + y, c] == 1


def test_devore_validation():
    with pytest.raises(NotPrime):
        DevoreSpec(9, 2)
    with pytest.raises(DegreeTooLarge):
        DevoreSpec(7, 7)


@given(st.lists(st.booleans(), min_size=1, max_size=30), st.randoms())
def test_mu_embed(s, rnd):
    s = np.array(s, dtype=np.int8)
    x = np.array([rnd.uniform(-1, 1) for _ in range(int(s.sum()))])
    out = mu_embed(s, x)
    assert np.array_equal(out[s == 0], np.zeros(int((s == 0).sum())))
    assert np.array_equal(out[s == 1], x)
    with pytest.raises(LengthMismatch):
        mu_embed(s, np.zeros(x.size + 1))


def test_ternary_small():
    M = build_ternary(2, 2)
    assert (M.rows, M.cols) == (9, 36)
    A = M.normalized()
    assert np.allclose(np.linalg.norm(A, axis=0), 1, atol=1e-12)
    assert coherence(M).coherence < 1


def test_ternary_columns_are_embeddings():
    M = build_ternary(3, 3)
    p = 7
    X = pm1_matrix(3, 2).dense()
    S = build_devore(DevoreSpec(p, 2)).dense()
    nx = X.shape[1]
    D = M.dense()
    for a in (0, 17, 342):
        for b in (0, 3, nx - 1):
            assert np.array_equal(D[:, a * nx + b], mu_embed(S[:, a], X[:, b]))


def test_ternary_validation():
    with pytest.raises(NotMersenne):
        build_ternary(2, 4)
    with pytest.raises(OrderTooLarge):
        build_ternary(7, 3)
