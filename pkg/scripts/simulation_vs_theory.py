"""Measured vs predicted restarted AA(1) factors on random 2x2 problems.

    python scripts/simulation_vs_theory.py --samples 500 --seed 0

Also prints rho(eps) for (m1, m2) = (0.9, 0.3) to show that the factor
depends on the starting residual.
"""

import argparse
import math

import numpy as np

from restarted_aa import (
    SolverConfig,
    SymmetricSystem,
    estimate_rho,
    rho_closed_form_2x2,
    run_restarted_aa1,
    worst_case_2x2,
)


def rotation(theta):
    return np.array([[math.cos(theta), -math.sin(theta)], [math.sin(theta), math.cos(theta)]])


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--samples", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--iters", type=int, default=200)
    args = p.parse_args()

    rng = np.random.default_rng(args.seed)
    errs = []
    for _ in range(args.samples):
        m1, m2 = rng.uniform(-0.95, 0.95, 2)
        eps = 10 ** rng.uniform(-0.7, 0.7) * rng.choice([-1.0, 1.0])
        V = rotation(rng.uniform(0, math.pi))
        sys = SymmetricSystem.from_eigen([m1, m2], V)
        tr = run_restarted_aa1(sys, sys.x0_for_residual(V[:, 0] + eps * V[:, 1]),
                               SolverConfig(max_iters=args.iters))
        errs.append(abs(estimate_rho(tr) - rho_closed_form_2x2(m1, m2, eps)))
    errs = np.array(errs)
    print(f"{args.samples} runs of {args.iters} steps: |rho_est - rho_closed|  "
          f"max {errs.max():.2e}  median {np.median(errs):.2e}")

    m1, m2 = 0.9, 0.3
    wc = worst_case_2x2(m1, m2)
    print(f"\n(m1, m2) = ({m1}, {m2}): worst case rho = {wc.rho_worst_aa:.6f} at "
          f"eps = +-{wc.eps_worst[0]:.6f}; Picard rho = {wc.rho_worst_pi}")
    print(f"{'eps':>10}  {'rho(eps)':>10}")
    for eps in (0.01, 0.1, 0.3, wc.eps_worst[0], 1.0, 3.0, 10.0, 100.0):
        print(f"{eps:>10.4g}  {rho_closed_form_2x2(m1, m2, eps):>10.6f}")


if __name__ == "__main__":
    main()
