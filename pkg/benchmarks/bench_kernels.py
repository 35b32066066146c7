"""Compiled vs numpy kernels on the workloads the package actually runs.

    python3 benchmarks/bench_kernels.py [--repeat 3]

Each row reports the best wall time over ``--repeat`` runs and checks that
both backends return the same answer.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from bchsense._kernels import available_backends
from bchsense.codes import _generator_rows, build_code
from bchsense.gf2m import make_field
from bchsense.matrices import build_ternary, pm1_matrix
from bchsense.recovery import make_engine


def best_of(fn, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def kernel_cases():
    m8 = pm1_matrix(8, 3)
    tern = build_ternary(3, 3)
    m6 = pm1_matrix(6, 2)
    cases = [
        ("full coherence, PM1 255x4096", "trit_max_coherence", (m8.plus, m8.minus, m8.nnz)),
        ("full coherence, TERN 49x2744", "trit_max_coherence", (tern.plus, tern.minus, tern.nnz)),
        ("integer Gram, PM1 63x1024", "trit_gram", (m6.plus, m6.minus)),
    ]
    rng = np.random.default_rng(0)
    ii = rng.integers(0, m8.cols, 100_000)
    jj = rng.integers(0, m8.cols, 100_000)
    cases.append(("100k pair products, PM1 255x4096", "trit_pair_products", (m8.plus, m8.minus, ii, jj)))
    for m, i in ((8, 3), (7, 2), (9, 3)):
        spec = build_code(make_field(m), i)
        rows = _generator_rows(spec.g, spec.k_tilde, spec.n_tilde)
        cases.append((f"min distance, m~={m} i={i} (2^{spec.k_tilde} words)", "gray_min_weight", (rows,)))
    return cases


def correlation_cases(repeat):
    out = []
    for m, i in ((8, 3), (10, 4)):
        M = pm1_matrix(m, i)
        r = np.random.default_rng(1).standard_normal(M.rows)
        for backend in ("naive", "dft"):
            eng = make_engine(M, backend)
            counter = [0]
            eng.correlate(r, counter)
            t, _ = best_of(lambda: eng.correlate(r), repeat)
            out.append((f"correlate {backend:5s} {M.rows}x{M.cols}", t, counter[0]))
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    backends = available_backends()
    names = sorted(backends)
    print(f"{'workload':44s}" + "".join(f"{n:>12s}" for n in names) + f"{'speedup':>10s}")
    for label, fn_name, call_args in kernel_cases():
        times, results = [], []
        for n in names:
            fn = getattr(backends[n], fn_name)
            t, res = best_of(lambda: fn(*call_args), args.repeat)
            times.append(t)
            results.append(res)
        agree = all(np.array_equal(np.asarray(results[0]), np.asarray(r)) for r in results[1:])
        speed = f"{times[names.index('python')] / times[0]:9.1f}x" if len(names) > 1 else ""
        flag = "" if agree else "  MISMATCH"
        print(f"{label:44s}" + "".join(f"{t * 1e3:10.2f}ms" for t in times) + speed + flag)

    print()
    print(f"{'correlation pass':44s}{'time':>12s}{'mults':>12s}")
    for label, t, mults in correlation_cases(args.repeat):
        print(f"{label:44s}{t * 1e3:10.3f}ms{mults:12d}")


if __name__ == "__main__":
    main()
