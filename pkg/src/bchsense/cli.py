"""Command-line front end: ``bchsense <subcommand> ...``.

Exit codes: 0 success, 1 invalid arguments or parameters, 2 file I/O or
parse failure, 3 internal invariant failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import counting
from .bsm import ParseError, read_bsm, read_vector, write_bsm, write_vector
from .codes import build_code, find_table1_primitive, gap_for_order
from .gf2m import FieldConsistencyError, Gf2Poly, make_field
from .matrices import (
    DevoreSpec,
    build_devore,
    build_pm1,
    build_ternary,
    coherence,
    gershgorin_check,
    FULL_GRAM_LIMIT,
)
from .recovery import correlate_naive, make_engine, mp_recover

# published parity-check polynomials for i = 3
REFERENCE_H = {
    4: "x^5+x^4+x^2+1",
    6: "x^7+x^6+x^2+1",
    8: "x^13+x^12+x^10+x^9+x^8+x^4+x^3+1",
    10: "x^26+x^25+x^24+x^20+x^16+x^14+x^13+x^12+x^10+x^9+x^7+x^5+x^4+x^3+x+1",
}

DELTA_ROWS = 100


class CliError(Exception):
    def __init__(self, message: str, code: int = 1):
        super().__init__(message)
        self.code = code


@dataclass
class ExperimentConfig:
    m_tilde: int | None = None
    i: int | None = None
    k: int | None = None
    primitive_poly: str | None = None
    trials: int = 200
    seed: int = 0
    sparsity: int = 4
    backend: str = "naive"
    mode: str = "ls_refine"
    out: str | None = None
    fmt: str = "text"

    def resolve_gap(self) -> int:
        if self.i is None and self.k is None:
            raise CliError("give --i or --k")
        if self.i is None:
            self.i = gap_for_order(self.k)
        elif self.k is not None and gap_for_order(self.k) != self.i:
            raise CliError(f"--k {self.k} implies i = {gap_for_order(self.k)}, not {self.i}")
        return self.i

    @classmethod
    def from_args(cls, args) -> ExperimentConfig:
        return cls(
            m_tilde=getattr(args, "mtilde", None),
            i=getattr(args, "i", None),
            k=getattr(args, "k", None),
            primitive_poly=getattr(args, "primpoly", None),
            trials=getattr(args, "trials", 200),
            seed=args.seed,
            sparsity=getattr(args, "sparsity", 4),
            backend=args.backend,
            mode=args.mode,
            out=args.out,
            fmt=args.format,
        )


def _int_list(text: str) -> list[int]:
    """``"4,6,8"``, ``"1..8"`` or mixtures of both."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            lo, hi = part.split("..")
            out.extend(range(int(lo), int(hi) + 1))
        elif part:
            out.append(int(part))
    return out


def _frac(q) -> str:
    if isinstance(q, Fraction):
        return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"
    return f"{q:.17g}"


def _build_code(cfg: ExperimentConfig):
    i = cfg.resolve_gap()
    if cfg.m_tilde is None:
        raise CliError("give --mtilde")
    if not 1 <= i <= cfg.m_tilde:
        raise CliError(f"need 1 <= i <= m_tilde, got i = {i}, m_tilde = {cfg.m_tilde}")
    fld = make_field(cfg.m_tilde, Gf2Poly.parse(cfg.primitive_poly) if cfg.primitive_poly else None)
    return build_code(fld, i)


def _load_or_build(args, cfg: ExperimentConfig):
    if getattr(args, "matrix", None):
        return read_bsm(args.matrix)
    return build_pm1(_build_code(cfg))


def cmd_construct(args, out) -> None:
    cfg = ExperimentConfig.from_args(args)
    code = _build_code(cfg)
    matrix = build_pm1(code)
    path = cfg.out or f"pm1_m{code.m_tilde}_i{code.i}.bsm"
    write_bsm(matrix, path)
    bound = Fraction(code.n_tilde - 2 * code.dmin_bound, code.n_tilde)
    rows = [
        ("file", path),
        ("m", matrix.rows),
        ("n", matrix.cols),
        ("k_tilde", code.k_tilde),
        ("primitive_poly", code.field.primitive_poly.hex()),
        ("h", code.h.hex()),
        ("dmin_bound", code.dmin_bound),
        ("coherence_bound", _frac(bound)),
    ]
    _emit_pairs(rows, cfg.fmt, out)


def _emit_pairs(rows, fmt: str, out) -> None:
    if fmt == "csv":
        out.write("key,value\n")
        for k, v in rows:
            out.write(f"{k},{v}\n")
    else:
        for k, v in rows:
            out.write(f"{k}: {v}\n")


def cmd_analyze(args, out) -> None:
    cfg = ExperimentConfig.from_args(args)
    matrix = read_bsm(args.matrix)
    mode = "full" if matrix.cols <= FULL_GRAM_LIMIT else "sampled"
    rep = coherence(matrix, mode, count=args.pairs, seed=cfg.seed)
    coh = _frac(rep.coherence_exact) if rep.coherence_exact is not None else f"sqrt({_frac(rep.coherence_sq)})"
    rows = [
        ("kind", matrix.kind),
        ("m", matrix.rows),
        ("n", matrix.cols),
        ("coherence_mode", rep.mode),
        ("coherence", coh),
        ("coherence_float", f"{rep.coherence:.17g}"),
        ("max_rip_order", rep.max_rip_order),
    ]
    gk = args.k if args.k else min(rep.max_rip_order, 5, matrix.rows, matrix.cols)
    if gk >= 2 and args.trials > 0:
        g = gershgorin_check(matrix, gk, args.trials, cfg.seed, report=rep)
        rows += [
            ("gershgorin_k", g.k),
            ("gershgorin_trials", g.trials),
            ("gershgorin_delta", f"{g.delta:.17g}"),
            ("gershgorin_eig_range", f"{g.min_eigenvalue:.12f} {g.max_eigenvalue:.12f}"),
            ("gershgorin_failures", g.failures),
        ]
    _emit_pairs(rows, cfg.fmt, out)
    deltas = list(rep.delta_k.items())
    if cfg.fmt == "csv":
        out.write("k,delta_k\n")
    elif deltas:
        out.write("delta_k:\n")
    for k, d in deltas[:DELTA_ROWS]:
        if cfg.fmt == "csv":
            out.write(f"{k},{_frac(d)}\n")
        else:
            out.write(f"  k={k} delta={_frac(d)}\n")
    if len(deltas) > DELTA_ROWS and cfg.fmt != "csv":
        out.write(f"  ... {len(deltas) - DELTA_ROWS} more rows up to k={rep.max_rip_order}\n")


def cmd_recover(args, out) -> None:
    cfg = ExperimentConfig.from_args(args)
    matrix = read_bsm(args.matrix)
    y = read_vector(args.y)
    if y.shape != (matrix.rows,):
        raise CliError(f"sample vector has length {y.size}, matrix has {matrix.rows} rows")
    k_max = args.k_max or matrix.rows
    res = mp_recover(matrix, y, k_max, tol=args.tol, mode=cfg.mode, backend=cfg.backend)
    if cfg.out:
        write_vector(cfg.out, res.coefficients,
                     comment=f"support {' '.join(map(str, res.support))}")
    rows = [
        ("support", " ".join(map(str, res.support))),
        ("iterations", res.iterations),
        ("residual", f"{res.residual:.6e}"),
        ("mult_count", res.mult_count),
    ]
    if cfg.out:
        rows.append(("coefficients_file", cfg.out))
    _emit_pairs(rows, cfg.fmt, out)


def simulate(matrix, sparsity: int, trials: int, seed: int, mode: str, backend: str,
             k_max: int | None = None):
    """Seeded trials: uniform support, standard normal amplitudes, noiseless samples.

    Trial ``t`` draws from ``default_rng(seed + t)``.
    """
    engine = make_engine(matrix, backend)
    A = engine.normalized
    n = matrix.cols
    k_max = k_max or 4 * sparsity
    successes, residuals, selection_ok = 0, [], 0
    for t in range(trials):
        rng = np.random.default_rng(seed + t)
        support = np.sort(rng.choice(n, size=sparsity, replace=False))
        s = np.zeros(n)
        s[support] = rng.standard_normal(sparsity)
        y = A @ s
        res = mp_recover(engine, y, k_max, mode=mode)
        successes += res.support == support.tolist()
        selection_ok += set(res.selections) <= set(support.tolist())
        residuals.append(res.residual)
    return successes / trials, float(np.mean(residuals)), selection_ok / trials


def cmd_simulate(args, out) -> None:
    cfg = ExperimentConfig.from_args(args)
    matrix = _load_or_build(args, cfg)
    rate, mean_res, sel = simulate(matrix, cfg.sparsity, cfg.trials, cfg.seed, cfg.mode,
                                   cfg.backend, args.k_max)
    rep = coherence(matrix, "full" if matrix.cols <= FULL_GRAM_LIMIT else "sampled", seed=cfg.seed)
    guarantee = rep.coherence_sq * (2 * cfg.sparsity - 1) ** 2 < 1
    r = np.random.default_rng(cfg.seed).standard_normal(matrix.rows)
    naive = [0]
    correlate_naive(matrix, r, naive)
    rows = [
        ("m", matrix.rows),
        ("n", matrix.cols),
        ("sparsity", cfg.sparsity),
        ("trials", cfg.trials),
        ("mode", cfg.mode),
        ("backend", cfg.backend),
        ("success_rate", f"{rate:.6f}"),
        ("selection_in_support_rate", f"{sel:.6f}"),
        ("mean_residual", f"{mean_res:.6e}"),
        ("selection_guarantee", "yes" if guarantee else "no"),
        ("mult_count_naive", naive[0]),
    ]
    if matrix.orbit_table is not None:
        dft = [0]
        make_engine(matrix, "dft").correlate(r, dft)
        rows.append(("mult_count_dft", dft[0]))
    _emit_pairs(rows, cfg.fmt, out)


def cmd_tables(args, out) -> None:
    cfg = ExperimentConfig.from_args(args)
    i = cfg.resolve_gap()
    header = "m_tilde,i,primitive_poly_hex,h_hex,deg_h,reference_primitive"
    out.write(header + "\n" if cfg.fmt == "csv" else header.replace(",", " ") + "\n")
    for m in _int_list(args.mtilde):
        if not 1 <= i <= m:
            raise CliError(f"need 1 <= i <= m_tilde, got i = {i}, m_tilde = {m}")
        fld = make_field(m, Gf2Poly.parse(cfg.primitive_poly) if cfg.primitive_poly else None)
        code = build_code(fld, i)
        if i == 3 and m in REFERENCE_H:
            hit = find_table1_primitive(m, i, REFERENCE_H[m])
            found = hit.hex() if hit is not None else "none"
        else:
            found = "-"
        fields = [m, i, fld.primitive_poly.hex(), code.h.hex(), code.k_tilde, found]
        sep = "," if cfg.fmt == "csv" else " "
        out.write(sep.join(map(str, fields)) + "\n")


def cmd_count(args, out) -> None:
    cfg = ExperimentConfig.from_args(args)
    sep = "," if cfg.fmt == "csv" else " "
    if args.degh:
        if cfg.fmt == "csv":
            out.write("m_tilde,i,deg_h\n")
        for m in _int_list(args.b):
            for i in range(1, m + 1):
                out.write(sep.join(map(str, (m, i, counting.tau(i, m)))) + "\n")
        return
    if cfg.fmt == "csv":
        out.write("a,b,kappa,tau\n")
    for a in _int_list(args.a):
        for b in _int_list(args.b):
            if b < 1:
                raise CliError("lengths must be >= 1")
            out.write(sep.join(map(str, (a, b, counting.kappa(a, b), counting.tau(a, b)))) + "\n")


def cmd_devore(args, out) -> None:
    cfg = ExperimentConfig.from_args(args)
    matrix = build_devore(DevoreSpec(args.p, args.r))
    path = cfg.out or f"devore_p{args.p}_r{args.r}.bsm"
    write_bsm(matrix, path)
    _emit_pairs([("file", path), ("m", matrix.rows), ("n", matrix.cols)], cfg.fmt, out)


def cmd_combine(args, out) -> None:
    cfg = ExperimentConfig.from_args(args)
    m_tilde = (args.p + 1).bit_length() - 1
    if (1 << m_tilde) - 1 != args.p:
        raise CliError(f"p = {args.p} is not of the form 2^m - 1")
    matrix = build_ternary(args.k, m_tilde, cfg.primitive_poly)
    path = cfg.out or f"tern_p{args.p}_k{args.k}.bsm"
    write_bsm(matrix, path)
    _emit_pairs([("file", path), ("m", matrix.rows), ("n", matrix.cols),
                 ("r", matrix.meta["r"]), ("i", matrix.meta["i"])], cfg.fmt, out)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", default=None)
    common.add_argument("--backend", choices=("naive", "dft"), default="naive")
    common.add_argument("--mode", choices=("pure_mp", "ls_refine"), default="ls_refine")
    common.add_argument("--format", choices=("text", "csv"), default="text")

    parser = argparse.ArgumentParser(prog="bchsense", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def code_args(p):
        p.add_argument("--mtilde", type=int)
        p.add_argument("--i", type=int)
        p.add_argument("--k", type=int)
        p.add_argument("--primpoly", help="primitive polynomial, e.g. 0x13 or x^4+x+1")

    p = sub.add_parser("construct", parents=[common], help="write a +-1 BCH matrix")
    code_args(p)
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("analyze", parents=[common], help="coherence and RIP report")
    p.add_argument("matrix")
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--k", type=int, default=None, help="order for the Gershgorin spot check")
    p.add_argument("--pairs", type=int, default=100_000, help="pairs in sampled mode")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("recover", parents=[common], help="matching pursuit on one sample vector")
    p.add_argument("matrix")
    p.add_argument("--y", required=True)
    p.add_argument("--k-max", type=int, default=None)
    p.add_argument("--tol", type=float, default=1e-10)
    p.set_defaults(func=cmd_recover)

    p = sub.add_parser("simulate", parents=[common], help="seeded recovery trials")
    p.add_argument("matrix", nargs="?")
    code_args(p)
    p.add_argument("--sparsity", type=int, default=4)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--k-max", type=int, default=None)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("tables", parents=[common], help="parity-check polynomial table")
    p.add_argument("--mtilde", required=True)
    p.add_argument("--i", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--primpoly")
    p.set_defaults(func=cmd_tables)

    p = sub.add_parser("count", parents=[common], help="kappa / tau counts")
    p.add_argument("--a", default="0..6")
    p.add_argument("--b", default="1..16")
    p.add_argument("--degh", action="store_true", help="emit deg h(x) for every 1 <= i <= m over --b")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("devore", parents=[common], help="write a DeVore binary matrix")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.set_defaults(func=cmd_devore)

    p = sub.add_parser("combine", parents=[common], help="write a DeVore x BCH ternary matrix")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--primpoly")
    p.set_defaults(func=cmd_combine)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0
    try:
        args.func(args, out)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (ParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (FieldConsistencyError, AssertionError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
