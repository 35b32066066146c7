"""Sampling matrices with entries in {-1, 0, +1} and their coherence analysis.

All matrices are stored unnormalised as two bit planes per column (see
:mod:`bchsense._kernels`); a column's normalised value is ``entry / sqrt(nnz)``.
Inner products are therefore exact integers, and coherence is reported as an
exact rational whenever the normalisation allows it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import isqrt

import numpy as np

from ._kernels import backend as _kern
from .codes import CodeSpec, build_code, even_codeword_words, gap_for_order
from .gf2m import Gf2Poly, make_field

KINDS = ("PM1", "BIN", "TERN")
FULL_GRAM_LIMIT = 8192
MAX_COLUMNS = 1 << 20


class TooLargeForFullGram(ValueError):
    pass


class NotPrime(ValueError):
    pass


class DegreeTooLarge(ValueError):
    pass


class NotMersenne(ValueError):
    pass


class OrderTooLarge(ValueError):
    pass


class MatrixTooLarge(ValueError):
    pass


class LengthMismatch(ValueError):
    pass


def _words(m: int) -> int:
    return max(1, (m + 63) // 64)


def pack_columns(cols_bool: np.ndarray) -> np.ndarray:
    """Pack an ``(n, m)`` boolean array into ``(n, words)`` uint64, little-endian bits."""
    n, m = cols_bool.shape
    W = _words(m)
    padded = np.zeros((n, W * 64), dtype=np.uint8)
    padded[:, :m] = cols_bool
    return np.packbits(padded, axis=1, bitorder="little").view(np.uint64).reshape(n, W)


@dataclass(frozen=True, eq=False)
class SensingMatrix:
    """Column-packed ternary matrix.

    ``plus`` and ``minus`` are ``(cols, words)`` uint64 planes.  ``orbit_table``
    lists ``(representative column, orbit size)`` for matrices whose column
    set is closed under cyclic shifts.
    """

    kind: str
    rows: int
    cols: int
    plus: np.ndarray = field(repr=False)
    minus: np.ndarray = field(repr=False)
    orbit_table: tuple[tuple[int, int], ...] | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown matrix kind {self.kind!r}")
        if self.plus.shape != (self.cols, _words(self.rows)) or self.minus.shape != self.plus.shape:
            raise ValueError("bit planes do not match the declared shape")
        if np.any(self.plus & self.minus):
            raise ValueError("an entry cannot be both +1 and -1")
        nnz = self.nnz
        if self.cols and nnz.min() < 1:
            raise ValueError("every column needs at least one nonzero entry")
        if self.kind == "PM1" and np.any(nnz != self.rows):
            raise ValueError("PM1 matrices have no zero entries")
        if self.kind == "BIN" and np.any(self.minus):
            raise ValueError("BIN matrices have no -1 entries")
        if self.kind == "TERN" and self.cols and np.any(nnz != nnz[0]):
            raise ValueError("TERN matrices have constant column weight")

    @classmethod
    def from_dense(cls, kind: str, entries, orbit_table=None, meta=None) -> SensingMatrix:
        """Build from an ``(rows, cols)`` array of -1/0/+1 values."""
        d = np.asarray(entries)
        if d.ndim != 2:
            raise ValueError("expected a 2-d array")
        if not np.all(np.isin(d, (-1, 0, 1))):
            raise ValueError("entries must lie in {-1, 0, +1}")
        plus = pack_columns((d == 1).T)
        minus = pack_columns((d == -1).T)
        return cls(kind, d.shape[0], d.shape[1], plus, minus,
                   tuple(orbit_table) if orbit_table is not None else None, dict(meta or {}))

    @cached_property
    def nnz(self) -> np.ndarray:
        return (np.bitwise_count(self.plus).sum(axis=1, dtype=np.int64)
                + np.bitwise_count(self.minus).sum(axis=1, dtype=np.int64))

    def dense(self) -> np.ndarray:
        """Unnormalised ``(rows, cols)`` int8 entries."""
        from ._kernels._pykernels import unpack_planes

        return np.ascontiguousarray(unpack_planes(self.plus, self.minus, self.rows).T)

    def columns_dense(self, idx) -> np.ndarray:
        """Unnormalised ``(rows, len(idx))`` int8 entries of selected columns."""
        from ._kernels._pykernels import unpack_planes

        idx = np.asarray(idx, dtype=np.int64)
        return unpack_planes(self.plus[idx], self.minus[idx], self.rows).T

    @cached_property
    def scale(self) -> np.ndarray:
        return 1.0 / np.sqrt(self.nnz.astype(np.float64))

    def normalized(self) -> np.ndarray:
        """Float ``(rows, cols)`` matrix with unit-norm columns."""
        return self.dense().astype(np.float64) * self.scale[None, :]

    def normalized_columns(self, idx) -> np.ndarray:
        idx = np.asarray(idx, dtype=np.int64)
        return self.columns_dense(idx).astype(np.float64) * self.scale[idx][None, :]

    def inner_products(self, ii, jj) -> np.ndarray:
        """Exact unnormalised inner products of column pairs."""
        return _kern.trit_pair_products(self.plus, self.minus, ii, jj)

    def gram_int(self) -> np.ndarray:
        """Exact unnormalised Gram matrix (``cols <= FULL_GRAM_LIMIT``)."""
        if self.cols > FULL_GRAM_LIMIT:
            raise TooLargeForFullGram(f"{self.cols} columns exceed {FULL_GRAM_LIMIT}")
        return _kern.trit_gram(self.plus, self.minus)

    @cached_property
    def orbit_members(self) -> dict[int, list[int]]:
        """Representative -> column indices of its shifts ``0 .. mu-1``.

        Shift ``t`` moves entry ``x`` to row ``x + t`` (mod rows).
        """
        if self.orbit_table is None:
            raise ValueError("matrix has no orbit metadata")
        lookup = {self.plus[j].tobytes() + self.minus[j].tobytes(): j for j in range(self.cols)}
        out = {}
        for rep, mu in self.orbit_table:
            col = self.columns_dense([rep])[:, 0]
            members = []
            for t in range(mu):
                sh = np.roll(col, t)
                key = pack_columns((sh == 1)[None, :]).tobytes() + pack_columns((sh == -1)[None, :]).tobytes()
                if key not in lookup:
                    raise ValueError(f"shift {t} of column {rep} is not a column")
                members.append(lookup[key])
            if np.any(np.roll(col, mu) != col):
                raise ValueError(f"column {rep} does not have period {mu}")
            out[rep] = members
        return out

    def check_orbits(self) -> None:
        """Verify orbit metadata: shifts reproduce columns, sizes divide rows, full cover."""
        members = self.orbit_members
        seen = []
        for rep, mu in self.orbit_table:
            if self.rows % mu:
                raise ValueError(f"orbit size {mu} does not divide {self.rows}")
            seen.extend(members[rep])
        if sorted(seen) != list(range(self.cols)):
            raise ValueError("orbits do not partition the columns")


# ----------------------------------------------------------------------------
# BCH +-1 matrices
# ----------------------------------------------------------------------------


def build_pm1(spec: CodeSpec) -> SensingMatrix:
    """Even-weight codewords as columns with 0 -> -1, message-ascending."""
    words = even_codeword_words(spec)
    n = spec.n_tilde
    W = words.shape[1]
    valid = np.zeros(W, dtype=np.uint64)
    for w in range(W):
        nbits = min(64, n - 64 * w)
        valid[w] = np.uint64((1 << nbits) - 1)
    minus = (~words) & valid
    meta = {
        "mtilde": spec.m_tilde,
        "i": spec.i,
        "primpoly": spec.field.primitive_poly.hex(),
        "parity": "even",
    }
    return SensingMatrix("PM1", n, words.shape[0], np.ascontiguousarray(words),
                         np.ascontiguousarray(minus), _message_orbits(spec), meta)


def _message_orbits(spec: CodeSpec) -> tuple[tuple[int, int], ...]:
    """Cyclic-shift orbits of the even subcode, computed on messages.

    Shifting a codeword multiplies it by ``x`` modulo ``x^n + 1``; on messages
    this is multiplication by ``x`` modulo ``h(x) / (x + 1)``.
    """
    reduced = spec.h // Gf2Poly(0b11)
    mod = reduced.bits
    deg = reduced.degree
    count = 1 << deg
    seen = np.zeros(count, dtype=bool)
    table = []
    for start in range(count):
        if seen[start]:
            continue
        mu = 0
        v = start
        while True:
            seen[v] = True
            mu += 1
            v <<= 1
            if deg >= 0 and (v >> deg) & 1:
                v ^= mod
            if v == start:
                break
        table.append((start, mu))
    return tuple(table)


def pm1_matrix(m_tilde: int, i: int, primitive_poly=None) -> SensingMatrix:
    return build_pm1(build_code(make_field(m_tilde, primitive_poly), i))


# ----------------------------------------------------------------------------
# coherence / RIP analysis
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class AnalysisReport:
    """Coherence of normalised columns and the Gershgorin RIP constants it implies.

    ``coherence_sq`` is always exact.  ``coherence_exact`` is the exact
    rational coherence when the column normalisation permits one.
    """

    coherence: float
    coherence_sq: Fraction
    coherence_exact: Fraction | None
    pair: tuple[int, int]
    inner_product: int
    max_rip_order: int
    mode: str
    pairs_checked: int

    @property
    def delta_k(self) -> dict[int, float | Fraction]:
        c = self.coherence_exact if self.coherence_exact is not None else self.coherence
        return {k: (k - 1) * c for k in range(2, self.max_rip_order + 1)}

    def delta(self, k: int) -> float | Fraction:
        c = self.coherence_exact if self.coherence_exact is not None else self.coherence
        return (k - 1) * c


def _rational_sqrt(q: Fraction) -> Fraction | None:
    a, b = q.numerator, q.denominator
    ra, rb = isqrt(a), isqrt(b)
    if ra * ra == a and rb * rb == b:
        return Fraction(ra, rb)
    return None


def _max_order(csq: Fraction, cols: int) -> int:
    """Largest k <= cols with (k - 1) * coherence < 1."""
    if cols <= 1:
        return max(cols, 1)
    if csq == 0:
        return cols
    # (k-1)^2 * csq < 1
    k1 = isqrt(csq.denominator // csq.numerator + 1)
    while k1 * k1 * csq >= 1:
        k1 -= 1
    while (k1 + 1) * (k1 + 1) * csq < 1:
        k1 += 1
    return min(cols, k1 + 1)


def _report(matrix: SensingMatrix, i: int, j: int, ip: int, mode: str, checked: int) -> AnalysisReport:
    if checked == 0:
        csq = Fraction(0)
    else:
        csq = Fraction(ip * ip, int(matrix.nnz[i]) * int(matrix.nnz[j]))
    exact = _rational_sqrt(csq)
    return AnalysisReport(
        coherence=float(exact) if exact is not None else float(csq) ** 0.5,
        coherence_sq=csq,
        coherence_exact=exact,
        pair=(int(i), int(j)),
        inner_product=int(ip),
        max_rip_order=_max_order(csq, matrix.cols),
        mode=mode,
        pairs_checked=checked,
    )


def lcg_pairs(n: int, count: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Reproducible distinct column pairs from a 64-bit linear congruential stream."""
    if n < 2:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    a, c, mask = 6364136223846793005, 1442695040888963407, (1 << 64) - 1
    state = (seed * 0x9E3779B97F4A7C15 + 1) & mask
    ii = np.empty(count, dtype=np.int64)
    jj = np.empty(count, dtype=np.int64)
    k = 0
    while k < count:
        state = (a * state + c) & mask
        x = (state >> 33) % n
        state = (a * state + c) & mask
        y = (state >> 33) % n
        if x == y:
            continue
        ii[k], jj[k] = x, y
        k += 1
    return ii, jj


def coherence(matrix: SensingMatrix, mode: str = "full", count: int = 100_000,
              seed: int = 0) -> AnalysisReport:
    """Maximum absolute inner product between distinct normalised columns.

    ``mode="sampled"`` checks ``count`` seeded pairs and yields a lower bound.
    """
    n = matrix.cols
    if mode == "full":
        if n > FULL_GRAM_LIMIT:
            raise TooLargeForFullGram(f"{n} columns exceed full-Gram limit {FULL_GRAM_LIMIT}")
        if n < 2:
            return _report(matrix, 0, 0, 0, mode, 0)
        i, j, ip = _kern.trit_max_coherence(matrix.plus, matrix.minus, matrix.nnz)
        return _report(matrix, i, j, ip, mode, n * (n - 1) // 2)
    if mode != "sampled":
        raise ValueError(f"unknown coherence mode {mode!r}")
    ii, jj = lcg_pairs(n, count, seed)
    if ii.size == 0:
        return _report(matrix, 0, 0, 0, mode, 0)
    ips = matrix.inner_products(ii, jj)
    ratio = ips.astype(np.float64) ** 2 / (matrix.nnz[ii] * matrix.nnz[jj])
    best = int(np.argmax(ratio))
    return _report(matrix, ii[best], jj[best], int(ips[best]), mode, int(ii.size))


@dataclass(frozen=True)
class GershgorinReport:
    k: int
    trials: int
    delta: float
    min_eigenvalue: float
    max_eigenvalue: float
    worst_margin: float
    failures: int

    @property
    def passed(self) -> bool:
        return self.failures == 0


def gershgorin_check(matrix: SensingMatrix, k: int, trials: int, seed: int,
                     report: AnalysisReport | None = None, tol: float = 1e-9) -> GershgorinReport:
    """Sample ``k``-column submatrices and test their Gram spectra against ``1 +- delta_k``.

    Failures are counted rather than raised; any failure contradicts the
    coherence bound and points at a construction bug.
    """
    if k > matrix.rows or k > matrix.cols:
        raise ValueError(f"order k={k} exceeds matrix dimensions")
    if report is None:
        report = coherence(matrix, "full" if matrix.cols <= FULL_GRAM_LIMIT else "sampled")
    delta = (k - 1) * report.coherence
    rng = np.random.default_rng(seed)
    lo_all, hi_all, worst, fails = np.inf, -np.inf, np.inf, 0
    for _ in range(trials):
        idx = np.sort(rng.choice(matrix.cols, size=k, replace=False))
        B = matrix.normalized_columns(idx)
        ev = np.linalg.eigvalsh(B.T @ B)
        lo, hi = float(ev[0]), float(ev[-1])
        lo_all, hi_all = min(lo_all, lo), max(hi_all, hi)
        margin = min(lo - (1 - delta), (1 + delta) - hi)
        worst = min(worst, margin)
        if margin < -tol:
            fails += 1
    return GershgorinReport(k, trials, delta, lo_all, hi_all, worst, fails)


# ----------------------------------------------------------------------------
# DeVore binary matrices and the ternary combination
# ----------------------------------------------------------------------------


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class DevoreSpec:
    """Polynomials of degree ``<= r`` over the prime field GF(p)."""

    p: int
    r: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise NotPrime(f"p = {self.p} is not prime")
        if not 0 <= self.r < self.p:
            raise DegreeTooLarge(f"need 0 <= r < p, got r = {self.r}, p = {self.p}")

    @property
    def rows(self) -> int:
        return self.p * self.p

    @property
    def cols(self) -> int:
        return self.p ** (self.r + 1)


def devore_graph_rows(spec: DevoreSpec) -> np.ndarray:
    """``(cols, p)`` array: entry ``[c, x]`` is ``P_c(x)`` for polynomial number ``c``.

    Polynomial ``c`` has coefficient ``c_j`` of ``x^j`` equal to base-``p``
    digit ``j`` of ``c``.
    """
    p, r = spec.p, spec.r
    c = np.arange(spec.cols, dtype=np.int64)
    coeffs = np.stack([(c // p**j) % p for j in range(r + 1)], axis=1)
    x = np.arange(p, dtype=np.int64)
    powers = np.stack([x**j % p for j in range(r + 1)], axis=0)
    return (coeffs @ powers) % p


def build_devore(spec: DevoreSpec) -> SensingMatrix:
    """Row ``x*p + y`` of column ``c`` is 1 iff ``y == P_c(x)``."""
    if spec.cols > MAX_COLUMNS:
        raise MatrixTooLarge(f"p^(r+1) = {spec.cols} exceeds {MAX_COLUMNS}")
    p = spec.p
    vals = devore_graph_rows(spec)
    ones = np.zeros((spec.cols, p * p), dtype=bool)
    rows = np.arange(p)[None, :] * p + vals
    np.put_along_axis(ones, rows, True, axis=1)
    plus = pack_columns(ones)
    return SensingMatrix("BIN", p * p, spec.cols, plus, np.zeros_like(plus),
                         None, {"p": p, "r": spec.r})


def mu_embed(s, x) -> np.ndarray:
    """Scatter ``x`` into the one-positions of binary ``s`` (ascending)."""
    s = np.asarray(s)
    x = np.asarray(x, dtype=np.float64)
    pos = np.flatnonzero(s)
    if pos.size != x.size:
        raise LengthMismatch(f"pattern has {pos.size} ones but x has length {x.size}")
    out = np.zeros(s.shape[0], dtype=np.float64)
    out[pos] = x
    return out


def build_ternary(k: int, m_tilde: int, primitive_poly=None) -> SensingMatrix:
    """Combine a DeVore pattern matrix with the BCH +-1 matrix.

    With ``p = 2^m_tilde - 1`` prime, ``r = floor(p / k)`` and
    ``i = ceil(log2 k)``, column ``a * 2^(k~-1) + b`` scatters BCH column ``b``
    into the support of DeVore column ``a``.
    """
    p = (1 << m_tilde) - 1
    if not is_prime(p):
        raise NotMersenne(f"2^{m_tilde} - 1 = {p} is not prime")
    if not 2 <= k < p:
        raise OrderTooLarge(f"need 2 <= k < p = {p}, got k = {k}")
    r = p // k
    i = gap_for_order(k)
    code = build_code(make_field(m_tilde, primitive_poly), i)
    devore = DevoreSpec(p, r)
    nx = 1 << (code.k_tilde - 1)
    if devore.cols * nx > MAX_COLUMNS:
        raise MatrixTooLarge(f"{devore.cols} * {nx} columns exceed {MAX_COLUMNS}")
    X = build_pm1(code).dense()  # (p, nx)
    vals = devore_graph_rows(devore)  # (ns, p)
    ns = devore.cols
    # the j-th one of DeVore column a sits at row j*p + P_a(j)
    rows = (np.arange(p)[None, :] * p + vals)  # (ns, p)
    plus_parts, minus_parts = [], []
    step = max(1, (1 << 16) // nx)
    for a0 in range(0, ns, step):
        a1 = min(ns, a0 + step)
        entries = np.zeros((a1 - a0, nx, p * p), dtype=np.int8)
        a_idx = np.arange(a1 - a0)[:, None, None]
        b_idx = np.arange(nx)[None, :, None]
        entries[a_idx, b_idx, rows[a0:a1, None, :]] = X.T[None, :, :]
        entries = entries.reshape(-1, p * p)
        plus_parts.append(pack_columns(entries == 1))
        minus_parts.append(pack_columns(entries == -1))
    plus = np.concatenate(plus_parts)
    minus = np.concatenate(minus_parts)
    meta = {"p": p, "r": r, "k": k, "mtilde": m_tilde, "i": i,
            "primpoly": code.field.primitive_poly.hex()}
    return SensingMatrix("TERN", p * p, ns * nx, plus, minus, None, meta)
