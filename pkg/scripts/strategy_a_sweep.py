"""Initial capital vs grid step for the grid strategy on a family of linear paths.

Prints one row per delta: S_0, the smallest terminal capital on the event and
their ratio, which bounds the upper probability of the event on this corpus.
"""

import argparse

import numpy as np

from vexgame import generate_deterministic, superhedge_certificate


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--deltas", type=float, nargs="+", default=[0.1, 0.05, 0.01, 0.005, 0.001])
    ap.add_argument("--paths", type=int, default=20)
    ap.add_argument("--steps", type=int, default=1000)
    ap.add_argument("--p", type=float, default=1.0)
    ap.add_argument("--C", type=float, default=2.0)
    ap.add_argument("--A", type=float, default=0.5)
    args = ap.parse_args()

    slopes = np.linspace(0.6, 1.4, args.paths)
    corpus = [generate_deterministic("linear", {"slope": float(s)}, args.steps) for s in slopes]
    event = ("E_pCA", {"p": args.p, "C": args.C, "A": args.A})
    print(f"{'delta':>8} {'S_0':>10} {'min_terminal':>13} {'bound':>10}")
    for delta in args.deltas:
        build = {"delta": delta, "p": args.p, "C": args.C, "A": args.A}
        rep = superhedge_certificate(corpus, event, ("strategy_a", build))
        print(f"{delta:>8g} {rep.initial_capital:>10.5f} {rep.min_terminal_in_event:>13.5f} {rep.certified_bound:>10.5f}")


if __name__ == "__main__":
    main()
