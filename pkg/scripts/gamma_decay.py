"""Tabulate sup_{||z|| <= 0.5} |gamma_w(z)| as ||w|| approaches 1 for nu(t) = 1 - t^2.

The supremum equals G(||w||/2)^2 / G(||w||^2); the denominator grows like
log 1/(1 - ||w||), so the decay is logarithmic.
"""

import argparse

import numpy as np

from blochlab.testfuncs import build_g, gamma_compact_sup
from blochlab.weights import standard_weight


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--max-exponent", type=int, default=8, help="largest k in ||w|| = 1 - 10^-k")
    parser.add_argument("--radius", type=float, default=0.5)
    args = parser.parse_args()

    series = build_g(standard_weight(), eval_radius_max=1.0 - 10.0 ** -(args.max_exponent + 1))
    base = gamma_compact_sup(series, 0.9, args.radius)
    print(f"k_max={series.k_max}  tail bound={series.tail_bound:.2e}")
    print(f"{'||w||':>12} {'sup |gamma_w|':>14} {'drop vs 0.9':>12} {'G(||w||^2)':>12}")
    for w_norm in [0.9, 0.95, 0.99] + [1.0 - 10.0**-k for k in range(3, args.max_exponent + 1)]:
        s = gamma_compact_sup(series, w_norm, args.radius)
        big_g = float(series.antiderivative(w_norm**2).real)
        print(f"{w_norm:12.9f} {s:14.6f} {base / s:12.3f} {big_g:12.4f}")
    print(f"slope of G(r) in log(1/(1-r)): "
          f"{np.polyfit(-np.log1p(-np.array([0.99, 0.999, 0.9999])), series.antiderivative(np.array([0.99, 0.999, 0.9999])).real, 1)[0]:.4f}")


if __name__ == "__main__":
    main()
