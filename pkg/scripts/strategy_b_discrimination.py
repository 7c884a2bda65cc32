"""Terminal capital of the upcrossing ensemble on rough vs Brownian paths.

Reports medians and per-path summaries of the terminal capital, the gain over
the initial capital and the truncated Bruneau constant at lambda = A.
"""

import argparse
import time

import numpy as np

from vexgame import generate_brownian, generate_fbm, normalize, strategy_B


def summarize(paths, q, A, K):
    terminal, gain, const = [], [], []
    for path in paths:
        path = normalize(path)
        ens, rep = strategy_B(path, q, A, K)
        run = ens.run(path)
        terminal.append(run.terminal_capital)
        gain.append(run.terminal_capital - ens.initial_capital)
        const.append(rep.truncated_constant)
    return np.array(terminal), np.array(gain), np.array(const)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-paths", type=int, default=50)
    ap.add_argument("--steps", type=int, default=2**14)
    ap.add_argument("--hurst", type=float, default=0.25)
    ap.add_argument("--q", type=float, default=2.5)
    ap.add_argument("--A", type=float, default=4.0)
    ap.add_argument("--K", type=int, default=8)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    start = time.perf_counter()
    rough = [generate_fbm(args.steps, 1.0, args.hurst, args.seed + i) for i in range(args.n_paths)]
    smooth = [generate_brownian(args.steps, 1.0, 1.0, args.seed + 10_000 + i) for i in range(args.n_paths)]
    rows = {f"fBm(H={args.hurst:g})": summarize(rough, args.q, args.A, args.K), "BM": summarize(smooth, args.q, args.A, args.K)}
    print(f"{'corpus':>12} {'med_terminal':>13} {'med_gain':>10} {'med_c_trunc':>12} {'max_c_trunc':>12}")
    for name, (terminal, gain, const) in rows.items():
        print(f"{name:>12} {np.median(terminal):>13.4f} {np.median(gain):>10.4f} {np.median(const):>12.4f} {const.max():>12.4f}")
    ratio = np.median(rows[f"fBm(H={args.hurst:g})"][0]) / np.median(rows["BM"][0])
    print(f"median terminal ratio {ratio:.3f}  ({time.perf_counter() - start:.0f}s)")


if __name__ == "__main__":
    main()
