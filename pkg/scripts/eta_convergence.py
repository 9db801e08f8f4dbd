"""Steady-state route: deviation from the closed form as the continuum smoothing eta shrinks.

    python scripts/eta_convergence.py --preset fig2 --detuning-gamma 0.5
"""

import argparse

import numpy as np

from fano_eit.oracle import (chi_steady_state_extrapolated, convergence_table, observed_orders,
                             peak_reference)
from fano_eit.presets import PRESETS, paper_preset
from fano_eit.susceptibility import chi


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--preset", choices=PRESETS, default="fig2")
    parser.add_argument("--detuning-gamma", type=float, default=0.5)
    parser.add_argument("--levels", type=int, default=5)
    args = parser.parse_args()

    system, field = paper_preset(args.preset)
    g = system.gamma
    x = args.detuning_gamma * g
    etas = 0.16 * g / 2.0 ** np.arange(args.levels)
    rows = convergence_table(x, system, field, etas)
    orders = observed_orders(rows)
    peak = peak_reference(system, field)

    print(f"{args.preset}, x = {args.detuning_gamma:g} gamma, closed form chi = "
          f"{complex(chi(x, system, field)):.6e}")
    print(f"{'eta/gamma':>10} {'bins':>8} {'|dev|/peak':>12} {'order':>7}")
    for k, (eta, n, _, _, dev) in enumerate(rows):
        order = f"{orders[k - 1]:.3f}" if k else ""
        print(f"{eta / g:>10.4g} {n:>8d} {dev / peak:>12.4e} {order:>7}")
    ext = chi_steady_state_extrapolated([x], system, field)[0]
    print(f"eta-extrapolated: |dev|/peak = {abs(ext - chi(x, system, field)) / peak:.4e}")


if __name__ == "__main__":
    main()
