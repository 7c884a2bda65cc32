"""Variation-exponent estimates across Hurst parameters, next to the theoretical 1/H."""

import argparse

import numpy as np

from vexgame import generate_brownian, generate_fbm, vex_estimate


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--hursts", type=float, nargs="+", default=[0.25, 0.4, 0.5, 0.6, 0.75, 0.9])
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--steps", type=int, default=2**14)
    args = ap.parse_args()

    print(f"{'H':>5} {'1/H':>6} {'median':>7} {'q10':>7} {'q90':>7}")
    for h in args.hursts:
        if h == 0.5:
            est = [vex_estimate(generate_brownian(args.steps, seed=s)) for s in range(args.seeds)]
        else:
            est = [vex_estimate(generate_fbm(args.steps, 1.0, h, s)) for s in range(args.seeds)]
        q10, med, q90 = np.quantile(est, [0.1, 0.5, 0.9])
        print(f"{h:>5g} {1 / h:>6.3f} {med:>7.3f} {q10:>7.3f} {q90:>7.3f}")


if __name__ == "__main__":
    main()
