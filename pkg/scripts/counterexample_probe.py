"""Greedy eps-net sizes for phi(z) = (z_1, z_2^2, ..., z_m^m) on the preimages of e_k / 4.

The images are pairwise sqrt(2)/4 apart, so any eps < sqrt(2)/4 forces a net
of size m: the image of a compact part of the ball is not covered by a
dimension-free number of balls.
"""

import argparse

import numpy as np

from blochlab.cesaro import counterexample_map, counterexample_points, epsnet_probe, pairwise_distances


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--dims", type=int, nargs="+", default=[2, 4, 8, 16, 32])
    parser.add_argument("--eps", type=float, nargs="+", default=[0.2, 0.3, 0.35, 0.36])
    parser.add_argument("--samples", type=int, default=0, help="extra uniform samples of the ball")
    args = parser.parse_args()

    print("m  " + " ".join(f"eps={e:<5}" for e in args.eps) + "  distance range")
    for m in args.dims:
        phi = counterexample_map(m)
        pts = counterexample_points(m)
        sizes = [epsnet_probe(phi, 0.5, e, samples=args.samples, points=pts).size for e in args.eps]
        d = [x for *_, x in pairwise_distances(phi(pts))]
        print(f"{m:<3}" + " ".join(f"{s:<9}" for s in sizes) + f"  [{min(d):.12f}, {max(d):.12f}]")
    print(f"sqrt(2)/4 = {np.sqrt(2) / 4:.12f}")


if __name__ == "__main__":
    main()
