"""Ratios between the radial, gradient and affine Bloch norms over a function dictionary."""

import argparse

import numpy as np

from blochlab.bloch import norm_chain
from blochlab.holo import function_dictionary
from blochlab.weights import power_weight, r_mu_constant


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--dim", type=int, default=2)
    parser.add_argument("--size", type=int, default=50)
    parser.add_argument("--alphas", type=float, nargs="+", default=[1.0, 0.5, 2.0])
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    funcs = function_dictionary(args.dim, args.size, seed=args.seed)
    print(f"{'alpha':>6} {'R_mu':>8} {'min rad/grad':>13} {'max grad/aff':>13} {'bound 2sqrt2 R_mu':>18}")
    for alpha in args.alphas:
        mu = power_weight(alpha)
        r_mu = r_mu_constant(mu)
        chains = [norm_chain(f, mu).norms for f in funcs]
        rad = np.array([c["radial"] / c["gradient"] for c in chains])
        aff = np.array([c["gradient"] / c["affine"] for c in chains])
        print(f"{alpha:6.2f} {r_mu:8.4f} {rad.min():13.4f} {aff.max():13.4f} {2 * np.sqrt(2) * r_mu:18.4f}")


if __name__ == "__main__":
    main()
