"""Iterations to a relative residual of 1e-10 for Picard and AA variants.

    python scripts/compare_methods.py --n 20 --trials 50

Random symmetric problems with spectrum in [-rho, rho].
"""

import argparse

import numpy as np

from restarted_aa import SolverConfig, SymmetricSystem, Termination, run

METHODS = ("picard", "aa1-restarted", "aa-windowed:1", "aa-windowed:3", "aa-windowed:5")


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=int, default=20)
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--rho", type=float, default=0.95)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()

    rng = np.random.default_rng(args.seed)
    counts = {m: [] for m in METHODS}
    for _ in range(args.trials):
        Q, R = np.linalg.qr(rng.standard_normal((args.n, args.n)))
        sys = SymmetricSystem.from_eigen(rng.uniform(-args.rho, args.rho, args.n),
                                         Q * np.sign(np.diag(R)), rng.standard_normal(args.n))
        x0 = rng.standard_normal(args.n)
        tol = 1e-10 * np.linalg.norm(sys.residual(x0))
        for m in METHODS:
            tr = run(sys, x0, m, SolverConfig(max_iters=5000, residual_tolerance=tol))
            ok = tr.termination in (Termination.TOLERANCE, Termination.EXACT)
            counts[m].append(tr.n_steps if ok else np.nan)
    print(f"n = {args.n}, {args.trials} trials, spectrum in [-{args.rho}, {args.rho}]")
    print(f"{'method':>15}  {'median':>7}  {'max':>7}  failed")
    for m, c in counts.items():
        c = np.array(c, dtype=float)
        print(f"{m:>15}  {np.nanmedian(c):>7.0f}  {np.nanmax(c):>7.0f}  {int(np.isnan(c).sum())}")


if __name__ == "__main__":
    main()
