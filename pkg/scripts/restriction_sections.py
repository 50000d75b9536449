"""How many random 2-dimensional sections does the restricted gradient semi-norm need?

For each function the best restricted semi-norm over n random orthonormal
pairs is compared with the direct estimate, for a ladder of n.
"""

import argparse

import numpy as np

from blochlab.bloch import seminorm
from blochlab.holo import OrthonormalSystem, function_dictionary, restrict
from blochlab.weights import standard_weight


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--dim", type=int, default=3)
    parser.add_argument("--size", type=int, default=50)
    parser.add_argument("--seed", type=int, default=4)
    parser.add_argument("--sections", type=int, nargs="+", default=[8, 16, 32, 64, 128, 256])
    parser.add_argument("--only", type=int, nargs="*", help="dictionary indices to examine")
    args = parser.parse_args()

    mu = standard_weight()
    funcs = function_dictionary(args.dim, args.size, seed=args.seed)
    idx = args.only if args.only else range(len(funcs))
    top = max(args.sections)
    print("index " + " ".join(f"n={n:<5}" for n in args.sections))
    for i in idx:
        f = funcs[i]
        direct = seminorm(f, mu, "gradient").value
        rng = np.random.default_rng(i)
        vals = np.array([seminorm(restrict(f, OrthonormalSystem.random(args.dim, 2, rng)), mu, "gradient").value
                         for _ in range(top)])
        best = np.maximum.accumulate(vals) / direct
        print(f"{i:<5} " + " ".join(f"{best[n - 1]:<7.4f}" for n in args.sections))


if __name__ == "__main__":
    main()
