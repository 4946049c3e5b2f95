"""Command-line entry point.

Exit status: 0 success, 1 numerical failure or divergence, 2 usage, parse
or I/O error.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys

from . import convergence, propagator
from .iterations import RankDeficiencyError, SolverConfig, Termination, run
from .linalg import LinalgError
from .problem import ProblemParseError, load_problem, write_trace_csv
from .sweep import SweepConfig, emit_csv, run_sweep
from .verify import run_verification

EXIT_OK, EXIT_NUMERIC, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _num(x: float) -> str:
    return "%.15g" % x


def _method(text: str) -> str:
    if text in ("picard", "aa1-restarted"):
        return text
    if text.startswith("aa-windowed:") and text.split(":", 1)[1].isdigit():
        return text
    raise argparse.ArgumentTypeError(
        f"invalid method {text!r} (expected picard, aa1-restarted or aa-windowed:<m>)")


def _range(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(v) for v in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid range {text!r} (expected lo:hi)") from None
    if not lo < hi:
        raise argparse.ArgumentTypeError(f"invalid range {text!r} (need lo < hi)")
    return lo, hi


def cmd_solve(args, out) -> int:
    spec = load_problem(args.problem)
    try:
        system = spec.system()
    except LinalgError as exc:
        raise UsageError(f"{args.problem}: {exc}") from exc
    cfg = SolverConfig(max_iters=args.max_iters, residual_tolerance=args.tol,
                       divergence_cap=args.divergence_cap)
    try:
        trace = run(system, spec.x0, args.method, cfg)
    except RankDeficiencyError as exc:
        print(f"error: {exc}", file=out)
        return EXIT_NUMERIC
    betas = trace.beta_by_step()
    print(f"{'k':>6}  {'residual_norm':>22}  beta", file=out)
    for k, nr in enumerate(trace.residual_norms.tolist()):
        beta = betas.get(k)
        if beta is None:
            btxt = ""
        elif isinstance(beta, tuple):
            btxt = " ".join(_num(b) for b in beta)
        else:
            btxt = _num(beta)
        print(f"{k:>6}  {nr:>22.15e}  {btxt}", file=out)
    print(f"termination: {trace.termination.value} after {trace.n_steps} iterations", file=out)
    if args.trace_out:
        write_trace_csv(trace, args.trace_out)
    if trace.termination in (Termination.DIVERGED, Termination.MAX_ITERS):
        return EXIT_NUMERIC
    return EXIT_OK


def cmd_analyze2x2(args, out) -> int:
    m1, m2 = args.m1, args.m2
    if not (math.isfinite(m1) and math.isfinite(m2)) or m1 == 1.0 or m2 == 1.0:
        raise UsageError("eigenvalues must be finite and different from 1")
    degenerate = m1 == 0.0 or m2 == 0.0 or m1 == m2
    print(f"m1 = {_num(m1)}", file=out)
    print(f"m2 = {_num(m2)}", file=out)
    if args.eps is not None:
        eps = args.eps
        if eps == 0.0:
            print("eps = 0 (r0 along v1)", file=out)
        else:
            print(f"lambda(eps) = {_num(propagator.lambda_of_eps(m1, m2, eps))}", file=out)
        print(f"rho(r0) = {_num(convergence.rho_closed_form_2x2(m1, m2, eps))}", file=out)
    wc = convergence.worst_case_2x2(m1, m2)
    if degenerate:
        print("eps_max = n/a (rho(r0) = 0 for every r0)", file=out)
        print("lambda_max = 0", file=out)
    else:
        e = propagator.eps_max(m1, m2)
        print(f"eps_max = +-{_num(e[0])}", file=out)
        print(f"lambda_max = {_num(propagator.lambda_max(m1, m2))}", file=out)
    print(f"rho_aa_worst = {_num(wc.rho_worst_aa)}", file=out)
    print(f"rho_pi_worst = {_num(wc.rho_worst_pi)}", file=out)
    if wc.rho_worst_aa < 1.0 <= wc.rho_worst_pi:
        verdict = "aa-converges-picard-diverges"
    else:
        verdict = convergence.compare_aa_vs_picard(m1, m2).value
    print(f"verdict = {verdict}", file=out)
    print(f"contractive_pair = {'yes' if convergence.in_contractive_range(m1, m2) else 'no'}", file=out)
    d = wc.r0_worst_direction
    print(f"r0_worst = ({_num(d[0])}, {_num(d[1])}) in the eigenbasis (v1, v2)", file=out)
    return EXIT_OK


def cmd_sweep(args, out) -> int:
    try:
        cfg = SweepConfig(args.range, args.range, args.resolution, args.exclusion_band)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    grid = run_sweep(cfg)
    emit_csv(grid, args.out)
    n = grid.shape[0] * grid.shape[1]
    print(f"wrote {n} cells to {args.out} ({int(grid.masked.sum())} masked, "
          f"{int((~grid.valid).sum())} invalid)", file=out)
    return EXIT_OK


def cmd_verify(args, out) -> int:
    if args.samples < 1:
        raise UsageError("--samples must be >= 1")
    results = run_verification(args.seed, args.samples)
    failed = 0
    for name, (passed, total) in results.items():
        status = "PASS" if passed == total else "FAIL"
        failed += passed != total
        print(f"{status} {name}: {passed}/{total}", file=out)
    print("all properties passed" if not failed else f"{failed} properties failed", file=out)
    return EXIT_NUMERIC if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="restarted-aa", description=(
        "Picard, windowed AA(m) and restarted AA(1) on symmetric affine fixed-point "
        "problems, with the 2x2 convergence theory."))
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="run a solver on a problem file")
    s.add_argument("problem")
    s.add_argument("--method", type=_method, default="aa1-restarted")
    s.add_argument("--max-iters", type=int, default=1000)
    s.add_argument("--tol", type=float, default=1e-10)
    s.add_argument("--divergence-cap", type=float, default=1e10)
    s.add_argument("--trace-out", metavar="PATH")
    s.set_defaults(func=cmd_solve)

    a = sub.add_parser("analyze2x2", help="closed-form factors for eigenvalues (m1, m2)")
    a.add_argument("--m1", type=float, required=True)
    a.add_argument("--m2", type=float, required=True)
    a.add_argument("--eps", type=float)
    a.set_defaults(func=cmd_analyze2x2)

    w = sub.add_parser("sweep", help="worst-case factors on an (m1, m2) grid, as CSV")
    w.add_argument("--range", type=_range, default=(-1.0, 1.0), metavar="LO:HI")
    w.add_argument("--resolution", type=int, default=401)
    w.add_argument("--exclusion-band", type=float, default=1e-8)
    w.add_argument("--out", required=True, metavar="PATH")
    w.set_defaults(func=cmd_sweep)

    v = sub.add_parser("verify", help="seeded batch check of the theory")
    v.add_argument("--seed", type=int, default=42)
    v.add_argument("--samples", type=int, default=100)
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    logging.basicConfig(level=logging.WARNING, format="warning: %(message)s")
    argv = list(sys.argv[1:] if argv is None else argv)
    # "--range -3:3" would otherwise be read as an unknown option
    for i in range(len(argv) - 1):
        if argv[i] == "--range" and argv[i + 1].startswith("-"):
            argv[i:i + 2] = [f"--range={argv[i + 1]}"]
            break
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except (ProblemParseError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
