"""Matching-pursuit recovery with a dense and a cyclic-orbit FFT correlation path.

For a column ``a`` and its cyclic shifts ``a^(t)[x] = a[x - t]`` the
correlations ``<r, a^(t)>`` form the circular cross-correlation of ``r`` and
``a``.  If ``a`` has period ``mu`` its spectrum lives on the ``mu`` frequencies
that are multiples of ``m / mu``, so after one ``m``-point transform of ``r``
each orbit costs a single ``mu``-point inverse transform.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import ceil, log2

import numpy as np

from .matrices import SensingMatrix


class DimensionMismatch(ValueError):
    pass


class BackendUnavailable(RuntimeError):
    pass


# ----------------------------------------------------------------------------
# arbitrary-length DFT
# ----------------------------------------------------------------------------


def direct_dft(x, inverse: bool = False) -> np.ndarray:
    """O(n^2) DFT; ``inverse`` applies the conjugate kernel and 1/n."""
    x = np.asarray(x, dtype=np.complex128)
    n = x.shape[0]
    k = np.arange(n)
    sign = 1.0 if inverse else -1.0
    W = np.exp(sign * 2j * np.pi * (np.outer(k, k) % n) / n)
    out = W @ x
    return out / n if inverse else out


def bluestein_dft(x, inverse: bool = False) -> np.ndarray:
    """Chirp-z DFT of any length via a power-of-two circular convolution."""
    x = np.asarray(x, dtype=np.complex128)
    n = x.shape[0]
    if n <= 1:
        return x.copy()
    if n & (n - 1) == 0:
        return np.fft.ifft(x) if inverse else np.fft.fft(x)
    sign = 1.0 if inverse else -1.0
    k = np.arange(n)
    # k^2 mod 2n keeps the chirp phase small and exact
    chirp = np.exp(sign * 1j * np.pi * ((k * k) % (2 * n)) / n)
    size = 1 << (2 * n - 1).bit_length()
    a = np.zeros(size, dtype=np.complex128)
    a[:n] = x * chirp
    b = np.zeros(size, dtype=np.complex128)
    b[:n] = np.conj(chirp)
    b[size - n + 1 :] = np.conj(chirp[1:][::-1])
    conv = np.fft.ifft(np.fft.fft(a) * np.fft.fft(b))[:n]
    out = conv * chirp
    return out / n if inverse else out


def fft_mults(n: int) -> int:
    """Multiplication cost ``2 n ceil(log2 n)`` charged to an ``n``-point FFT."""
    return 0 if n <= 1 else 2 * n * ceil(log2(n))


# ----------------------------------------------------------------------------
# correlation engines
# ----------------------------------------------------------------------------


@dataclass
class OrbitSpectrum:
    rep: int
    mu: int
    members: list[int]
    positions: np.ndarray
    conj_spectrum: np.ndarray
    nonzero: np.ndarray
    fallback: bool = False


@dataclass
class CorrelationEngine:
    backend: str
    matrix: SensingMatrix
    normalized: np.ndarray = field(repr=False)
    orbits: list[OrbitSpectrum] = field(default_factory=list, repr=False)

    @property
    def rows(self) -> int:
        return self.matrix.rows

    def correlate(self, r, counter: list[int] | None = None) -> np.ndarray:
        if self.backend == "dft":
            return correlate_dft(self, r, counter)
        return _naive(self.normalized, r, counter)


def naive_engine(matrix: SensingMatrix) -> CorrelationEngine:
    return CorrelationEngine("naive", matrix, matrix.normalized())


def _naive(A: np.ndarray, r, counter) -> np.ndarray:
    r = np.asarray(r, dtype=np.float64)
    if r.shape != (A.shape[0],):
        raise DimensionMismatch(f"residual has shape {r.shape}, expected ({A.shape[0]},)")
    if counter is not None:
        counter[0] += A.shape[0] * A.shape[1]
    return A.T @ r


def correlate_naive(matrix: SensingMatrix | CorrelationEngine, r,
                    counter: list[int] | None = None) -> np.ndarray:
    """``out[j] = <r, a_j>`` over normalised columns; ``counter[0] += n*m``."""
    A = matrix.normalized if isinstance(matrix, CorrelationEngine) else matrix.normalized()
    return _naive(A, r, counter)


def orbit_spectra(matrix: SensingMatrix, tol: float = 1e-9) -> CorrelationEngine:
    """Precompute per-orbit spectra for the DFT correlation path.

    Orbits whose spectrum is not supported on multiples of ``m / mu`` are
    flagged and correlated directly.
    """
    if matrix.orbit_table is None:
        raise BackendUnavailable("matrix carries no orbit metadata")
    m = matrix.rows
    A = matrix.normalized()
    members = matrix.orbit_members
    orbits = []
    covered = 0
    for rep, mu in matrix.orbit_table:
        spec = bluestein_dft(A[:, rep])
        nonzero = np.flatnonzero(np.abs(spec) > tol)
        ok = m % mu == 0 and np.all(nonzero % (m // mu) == 0)
        positions = np.arange(mu) * (m // mu) if ok else np.arange(0)
        orbits.append(OrbitSpectrum(
            rep=rep,
            mu=mu,
            members=members[rep],
            positions=positions,
            conj_spectrum=np.conj(spec[positions]),
            nonzero=nonzero,
            fallback=not ok,
        ))
        covered += mu
    if covered != matrix.cols:
        raise BackendUnavailable("orbit table does not cover every column")
    return CorrelationEngine("dft", matrix, A, orbits)


def correlate_dft(engine: CorrelationEngine, r, counter: list[int] | None = None) -> np.ndarray:
    """Same values as :func:`correlate_naive`, computed orbit by orbit in frequency."""
    if engine.backend != "dft":
        raise BackendUnavailable("engine was not built by orbit_spectra")
    m = engine.rows
    r = np.asarray(r, dtype=np.float64)
    if r.shape != (m,):
        raise DimensionMismatch(f"residual has shape {r.shape}, expected ({m},)")
    R = bluestein_dft(r)
    mults = fft_mults(m)
    out = np.empty(engine.matrix.cols, dtype=np.float64)
    for orb in engine.orbits:
        if orb.fallback:
            cols = orb.members
            out[cols] = engine.normalized[:, cols].T @ r
            mults += orb.mu * m
            continue
        prod = R[orb.positions] * orb.conj_spectrum
        c = bluestein_dft(prod, inverse=True) * (orb.mu / m)
        out[orb.members] = c.real
        mults += orb.mu + fft_mults(orb.mu)
    if counter is not None:
        counter[0] += mults
    return out


def make_engine(matrix: SensingMatrix, backend: str = "naive") -> CorrelationEngine:
    if backend == "naive":
        return naive_engine(matrix)
    if backend == "dft":
        return orbit_spectra(matrix)
    raise ValueError(f"unknown correlation backend {backend!r}")


# ----------------------------------------------------------------------------
# matching pursuit
# ----------------------------------------------------------------------------


@dataclass
class RecoveryResult:
    support: list[int]
    coefficients: np.ndarray
    residual_history: list[float]
    iterations: int
    mult_count: int
    selections: list[int] = field(default_factory=list)

    @property
    def residual(self) -> float:
        return self.residual_history[-1]


def mp_recover(matrix: SensingMatrix | CorrelationEngine, y, k_max: int, tol: float = 1e-10,
               mode: str = "ls_refine", backend: str = "naive") -> RecoveryResult:
    """Greedy recovery of a sparse ``s`` from ``y = A s``.

    Each iteration correlates the residual with every column and picks the
    largest magnitude (ties go to the lowest index).  ``pure_mp`` subtracts
    the projection onto that single column; ``ls_refine`` re-solves least
    squares on the whole selected support so the residual stays orthogonal
    to it.  Stops once the residual norm is ``<= tol`` or after ``k_max``
    iterations.
    """
    if k_max < 1 or tol < 0:
        raise ValueError("need k_max >= 1 and tol >= 0")
    if mode not in ("pure_mp", "ls_refine"):
        raise ValueError(f"unknown mode {mode!r}")
    engine = matrix if isinstance(matrix, CorrelationEngine) else make_engine(matrix, backend)
    A = engine.normalized
    m, n = A.shape
    y = np.asarray(y, dtype=np.float64)
    if y.shape != (m,):
        raise DimensionMismatch(f"samples have shape {y.shape}, expected ({m},)")

    counter = [0]
    coef = np.zeros(n)
    residual = y.copy()
    history = [float(np.linalg.norm(residual))]
    support: list[int] = []
    selections: list[int] = []
    it = 0
    while it < k_max and history[-1] > tol:
        c = engine.correlate(residual, counter)
        j = int(np.argmax(np.abs(c)))
        selections.append(j)
        if j not in support:
            support.append(j)
        if mode == "pure_mp":
            coef[j] += c[j]
            residual = residual - c[j] * A[:, j]
        else:
            sub = A[:, support]
            x, *_ = np.linalg.lstsq(sub, y, rcond=None)
            coef[:] = 0.0
            coef[support] = x
            residual = y - sub @ x
        history.append(float(np.linalg.norm(residual)))
        it += 1
    return RecoveryResult(sorted(support), coef, history, it, counter[0], selections)
