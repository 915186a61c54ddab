#!/usr/bin/env python3
"""Sweep the kick strength of the closed quantum kicked rotor and compare the
fitted localization length with the k^2/4 estimate and the crossover-time
formulas. Writes a small summary table to stdout.
"""

import numpy as np

from chaodyn import qkr


def main():
    hbar = qkr.hbar_from_frac(0.1)
    print(f"hbar = {hbar:.5f}")
    print(f"{'K':>5} {'k':>7} {'L_fit':>8} {'k^2/4':>8} {'R^2':>6} {'n*_info':>8} {'n*_unc':>8}")
    for K in (3.0, 5.0, 8.0, 10.0, 14.0):
        k = K / hbar
        state = qkr.delta_state(max(qkr.auto_l_max(K, hbar), 512), hbar, k)
        run = qkr.evolve(state, 800)
        fit = qkr.localization_length(run.final_distribution, run.l_values)
        n_info, n_unc = qkr.crossover_estimates(K, hbar)
        print(
            f"{K:5.1f} {k:7.3f} {fit.length:8.2f} {k * k / 4:8.2f} "
            f"{fit.r_squared:6.3f} {n_info:8.1f} {n_unc:8.1f}"
        )


if __name__ == "__main__":
    main()
