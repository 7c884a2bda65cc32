"""Batch experiment runner.

    vexgame generate --kind brownian --n 100 --steps 4096 --seed 7 --out corpus/
    vexgame varp corpus/ --p 2 --out reports/
    vexgame certify corpus/ --event E_pCA --p 1 --C 2 --A 0.5 --strategy a --delta 0.1 0.01

Every command also reads a JSON config file (``--config``) whose keys are the
command's option names; explicit flags override it.  Exit status is 0 on
success, 2 on invalid parameters and 1 on runtime failures (including
skipped malformed inputs and refused certificates).
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Optional

import numpy as np

from vexgame import analysis, gametheory, paths

log = logging.getLogger("vexgame")

EXIT_OK, EXIT_RUNTIME, EXIT_VALIDATION = 0, 1, 2

GENERATOR_KINDS = ("brownian", "fbm") + paths.DETERMINISTIC_KINDS
KIND_PARAMS = {
    "brownian": ("scale",),
    "fbm": ("hurst",),
    "constant": ("level",),
    "linear": ("slope", "intercept"),
    "sine": ("amplitude", "cycles"),
    "sawtooth": ("teeth", "amplitude"),
    "weierstrass": ("hurst", "base", "terms"),
}


class ValidationError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    """Validated parameters of one command after merging config file and flags."""

    command: str
    params: dict[str, Any]
    inputs: list[str] = field(default_factory=list)
    out: Optional[Path] = None
    json: bool = False
    threads: int = 1
    seed: Optional[int] = None


# --------------------------------------------------------------------------
# parser


def _common(p: argparse.ArgumentParser):
    p.add_argument("--config", type=Path, help="JSON file of option values (flags win)")
    p.add_argument("--out", type=Path, help="output directory")
    p.add_argument("--json", action="store_true", default=None, help="print JSON results on stdout")
    p.add_argument("--threads", type=int, help="paths processed in parallel")
    p.add_argument("--seed", type=int, help="base seed (path i uses seed + i)")


def _corpus(p: argparse.ArgumentParser):
    p.add_argument("inputs", nargs="*", help="path files (.json/.csv) or directories of them")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vexgame", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a seeded corpus of paths")
    _common(g)
    g.add_argument("--kind", choices=GENERATOR_KINDS)
    g.add_argument("--n", type=int, help="number of paths")
    g.add_argument("--steps", type=int, help="steps per path")
    g.add_argument("--T", type=float, help="horizon")
    g.add_argument("--format", choices=("json", "csv", "both"))
    for name in ("scale", "hurst", "level", "slope", "intercept", "amplitude", "cycles"):
        g.add_argument(f"--{name}", type=float)
    for name in ("teeth", "base", "terms"):
        g.add_argument(f"--{name}", type=int)

    v = sub.add_parser("varp", help="strong p-variation of each path")
    _common(v)
    _corpus(v)
    v.add_argument("--p", type=float)

    x = sub.add_parser("vex", help="variation exponent estimate of each path")
    _common(x)
    _corpus(x)
    x.add_argument("--p-min", type=float)
    x.add_argument("--p-max", type=float)
    x.add_argument("--p-step", type=float)
    x.add_argument("--levels", type=int)

    u = sub.add_parser("upcross", help="upcrossing counts of an interval or a grid")
    _common(u)
    _corpus(u)
    u.add_argument("--a", type=float)
    u.add_argument("--b", type=float)
    u.add_argument("--delta", type=float, help="sum over the grid delta*Z instead of (a, b)")
    u.add_argument("--t", type=float, help="count up to time t (default T)")
    u.add_argument("--strict", action="store_true", default=None, help="strict touch convention")

    b = sub.add_parser("bruneau", help="Bruneau constant tables and the p-variation bound")
    _common(b)
    _corpus(b)
    b.add_argument("--q", type=float)
    b.add_argument("--p", type=float, help="also check the bound on var_p (needs q < p)")
    b.add_argument("--lambda", dest="lam", type=float, help="mesh scale (default sup|f - f(0)|)")
    b.add_argument("--k-max", type=int)
    b.add_argument("--t", type=float)

    a = sub.add_parser("simulate-a", help="run the grid strategy on each path")
    _common(a)
    _corpus(a)
    for name in ("delta", "p", "C", "A"):
        a.add_argument(f"--{name}", type=float)
    a.add_argument("--uncorrected", action="store_true", default=None, help="drop the 2*A*delta correction")
    a.add_argument("--trajectories", action="store_true", default=None, help="write capital trajectories")

    s = sub.add_parser("simulate-b", help="run the upcrossing ensemble on each path")
    _common(s)
    _corpus(s)
    s.add_argument("--q", type=float)
    s.add_argument("--A", type=float)
    s.add_argument("--K", type=int, help="number of dyadic levels")

    c = sub.add_parser("certify", help="superhedging certificate for an event over a corpus")
    _common(c)
    _corpus(c)
    c.add_argument("--event", choices=sorted(gametheory.EVENTS))
    c.add_argument("--strategy", choices=("a", "b"))
    c.add_argument("--delta", type=float, nargs="+", help="grid steps for strategy a (several = sweep)")
    for name in ("p", "C", "A", "V", "q"):
        c.add_argument(f"--{name}", type=float)
    c.add_argument("--K", type=int)
    c.add_argument("--uncorrected", action="store_true", default=None)
    return parser


def _subparser(parser: argparse.ArgumentParser, command: str) -> argparse.ArgumentParser:
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            return action.choices[command]
    raise KeyError(command)


def _apply_config(sub: argparse.ArgumentParser, file: Path):
    try:
        raw = json.loads(Path(file).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot read config {file}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ValidationError("config file must hold a JSON object")
    dests = {a.dest for a in sub._actions} - {"help", "config"}
    aliases = {"lambda": "lam"}
    values = {}
    for key, val in raw.items():
        dest = aliases.get(key, key.replace("-", "_"))
        if dest not in dests:
            raise ValidationError(f"unknown config key {key!r}")
        values[dest] = val
    sub.set_defaults(**values)


# --------------------------------------------------------------------------
# validation


def _need(args, *names):
    missing = [n for n in names if getattr(args, n, None) is None]
    if missing:
        raise ValidationError(f"missing required option(s): {', '.join('--' + m for m in missing)}")


def _positive(args, *names):
    for n in names:
        val = getattr(args, n, None)
        if val is not None and not val > 0:
            raise ValidationError(f"--{n} must be positive, got {val}")


def validate(args) -> ExperimentConfig:
    cmd = args.command
    threads = args.threads or 1
    if threads < 1:
        raise ValidationError("--threads must be >= 1")
    params: dict[str, Any] = {}

    if cmd == "generate":
        _need(args, "kind")
        n = 1 if args.n is None else args.n
        steps = 1024 if args.steps is None else args.steps
        T = 1.0 if args.T is None else args.T
        if n < 0 or steps < 1 or not T > 0:
            raise ValidationError("need --n >= 0, --steps >= 1 and --T > 0")
        kp = {k: getattr(args, k) for k in KIND_PARAMS[args.kind] if getattr(args, k) is not None}
        stray = [k for ks in KIND_PARAMS.values() for k in ks if k not in KIND_PARAMS[args.kind] and getattr(args, k) is not None]
        if stray:
            raise ValidationError(f"options {sorted(set(stray))} do not apply to --kind {args.kind}")
        if "hurst" in kp and not 0 < kp["hurst"] < 1:
            raise ValidationError(f"--hurst must lie in (0, 1), got {kp['hurst']}")
        if args.kind == "fbm" and steps > paths.FBM_MAX_STEPS:
            raise ValidationError(f"--steps exceeds the fBm cap {paths.FBM_MAX_STEPS}")
        if "scale" in kp and not kp["scale"] > 0:
            raise ValidationError("--scale must be positive")
        if "teeth" in kp and kp["teeth"] < 1:
            raise ValidationError("--teeth must be >= 1")
        params = {"kind": args.kind, "n": n, "steps": steps, "T": T, "format": args.format or "json", "kind_params": kp}
        if args.out is None:
            raise ValidationError("generate needs --out")

    elif cmd == "varp":
        _need(args, "p")
        _positive(args, "p")
        params = {"p": args.p}

    elif cmd == "vex":
        p_min = 1.0 if args.p_min is None else args.p_min
        p_max = 6.0 if args.p_max is None else args.p_max
        step = 0.05 if args.p_step is None else args.p_step
        if not (0 < p_min < p_max and step > 0):
            raise ValidationError("need 0 < --p-min < --p-max and --p-step > 0")
        if args.levels is not None and args.levels < 2:
            raise ValidationError("--levels must be >= 2")
        params = {"p_grid": np.round(np.arange(p_min, p_max + step / 2, step), 10).tolist(), "levels": args.levels}

    elif cmd == "upcross":
        if args.delta is None:
            _need(args, "a", "b")
            if not args.a < args.b:
                raise ValidationError("need --a < --b")
        _positive(args, "delta")
        if args.t is not None and args.t < 0:
            raise ValidationError("--t must be >= 0")
        params = {"a": args.a, "b": args.b, "delta": args.delta, "t": args.t, "closed": not args.strict}

    elif cmd == "bruneau":
        _need(args, "q")
        if args.q < 1:
            raise ValidationError("--q must be >= 1")
        if args.p is not None and not args.q < args.p:
            raise ValidationError(f"need --q < --p, got q={args.q}, p={args.p}")
        _positive(args, "lam")
        if args.k_max is not None and args.k_max < 1:
            raise ValidationError("--k-max must be >= 1")
        params = {"q": args.q, "p": args.p, "lam": args.lam, "k_max": args.k_max, "t": args.t}

    elif cmd == "simulate-a":
        _need(args, "delta", "p", "C", "A")
        _positive(args, "delta", "C", "A")
        _check_strategy_a_params(args.delta, args.p, args.A)
        params = {"delta": args.delta, "p": args.p, "C": args.C, "A": args.A,
                  "corrected": not args.uncorrected, "trajectories": bool(args.trajectories)}

    elif cmd == "simulate-b":
        _need(args, "q", "A", "K")
        _check_strategy_b_params(args.q, args.A, args.K)
        params = {"q": args.q, "A": args.A, "K_levels": args.K}

    elif cmd == "certify":
        params = _validate_certify(args)

    return ExperimentConfig(cmd, params, list(getattr(args, "inputs", []) or []), args.out, bool(args.json), threads, args.seed)


def _check_strategy_a_params(delta, p, A):
    if not 0 < p < 2:
        raise ValidationError(f"strategy a needs p in (0, 2), got {p}")
    ratio = A / delta
    if round(ratio) < 1 or abs(ratio - round(ratio)) > 1e-9 * ratio:
        raise ValidationError(f"A/delta = {ratio} must be a positive integer")


def _check_strategy_b_params(q, A, K):
    if not q > 2:
        raise ValidationError(f"strategy b needs q > 2, got {q}")
    if not A > 0 or K < 1:
        raise ValidationError("strategy b needs A > 0 and K >= 1")


def _validate_certify(args) -> dict:
    _need(args, "event", "strategy")
    builder = "strategy_a" if args.strategy == "a" else "strategy_b"
    if builder not in gametheory.COMPATIBLE[args.event]:
        raise ValidationError(f"strategy {args.strategy} does not target event {args.event}")
    need = gametheory.EVENTS[args.event][1]
    _need(args, *need)
    event_params = {k: getattr(args, k) for k in need}
    if "p" in event_params and event_params["p"] < 1:
        raise ValidationError("event needs p >= 1")
    _positive(args, "C", "A", "V")
    if builder == "strategy_a":
        _need(args, "delta", "p", "C", "A")
        builds = []
        for delta in args.delta:
            if not delta > 0:
                raise ValidationError("--delta must be positive")
            _check_strategy_a_params(delta, args.p, args.A)
            builds.append({"delta": delta, "p": args.p, "C": args.C, "A": args.A, "corrected": not args.uncorrected})
    else:
        _need(args, "q", "A", "K")
        _check_strategy_b_params(args.q, args.A, args.K)
        builds = [{"q": args.q, "A": args.A, "K_levels": args.K}]
    return {"event": args.event, "event_params": event_params, "builder": builder, "builds": builds}


# --------------------------------------------------------------------------
# corpus handling


def corpus_files(inputs: list[str]) -> list[Path]:
    files = []
    for item in inputs:
        p = Path(item)
        if p.is_dir():
            found = sorted(f for f in p.glob("*.json") if f.name != "manifest.json")
            if not found:
                found = sorted(p.glob("*.csv"))
            files.extend(found)
        else:
            files.append(p)
    return files


def load_corpus(inputs: list[str]) -> tuple[list[tuple[str, paths.SampledPath]], int]:
    """``[(path_id, path)]`` plus the number of files that failed to load."""
    out, bad = [], 0
    for f in corpus_files(inputs):
        try:
            out.append((f.stem, paths.load_path(f)))
        except (OSError, ValueError, KeyError, TypeError, json.JSONDecodeError) as exc:
            log.warning("skipping malformed path file %s: %s", f, exc)
            bad += 1
    return out, bad


def pmap(fn: Callable, items: list, threads: int) -> list:
    """Apply ``fn`` to every item, results in input order."""
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def write_csv(file: Path, header: list[str], rows: list) -> None:
    file.parent.mkdir(parents=True, exist_ok=True)
    with open(file, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def _jsonable(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    return x


def emit(cfg: ExperimentConfig, name: str, header: list[str], rows: list, extra: Optional[dict] = None):
    if cfg.out is not None:
        write_csv(cfg.out / f"{name}.csv", header, rows)
    payload = {"command": cfg.command, "params": cfg.params, "rows": [dict(zip(header, map(_jsonable, r))) for r in rows]}
    if extra:
        payload.update(extra)
    if cfg.json:
        print(json.dumps(payload, default=_jsonable))
    elif cfg.out is None:
        w = csv.writer(sys.stdout)
        w.writerow(header)
        w.writerows(rows)
    return payload


# --------------------------------------------------------------------------
# commands


def cmd_generate(cfg: ExperimentConfig) -> int:
    p = cfg.params
    base = 0 if cfg.seed is None else cfg.seed
    out = cfg.out
    out.mkdir(parents=True, exist_ok=True)

    def make(i: int) -> paths.SampledPath:
        kind, kp = p["kind"], p["kind_params"]
        if kind == "brownian":
            return paths.generate_brownian(p["steps"], p["T"], kp.get("scale", 1.0), base + i)
        if kind == "fbm":
            return paths.generate_fbm(p["steps"], p["T"], kp.get("hurst", 0.5), base + i)
        return paths.generate_deterministic(kind, kp, p["steps"], p["T"])

    records = []
    for i, path in enumerate(pmap(make, list(range(p["n"])), cfg.threads)):
        stem = f"path_{i:04d}"
        if p["format"] in ("json", "both"):
            paths.save_json(path, out / f"{stem}.json")
        if p["format"] in ("csv", "both"):
            paths.save_csv(path, out / f"{stem}.csv")
        records.append({"id": stem, "seed": path.meta.get("seed"), "generator": path.meta.get("generator")})
    manifest = {"command": "generate", "params": p, "base_seed": base, "paths": records}
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2))
    if cfg.json:
        print(json.dumps(manifest))
    return EXIT_OK


def cmd_varp(cfg, corpus):
    def row(item):
        pid, path = item
        r = analysis.var_p(path, cfg.params["p"])
        return (pid, r.p, None if r.is_infinite else r.value, r.is_infinite)

    emit(cfg, "varp", ["path_id", "p", "value", "infinite"], pmap(row, corpus, cfg.threads))


def cmd_vex(cfg, corpus):
    def row(item):
        pid, path = item
        return (pid, analysis.vex_estimate(path, cfg.params["p_grid"], cfg.params["levels"]))

    emit(cfg, "vex", ["path_id", "vex"], pmap(row, corpus, cfg.threads))


def cmd_upcross(cfg, corpus):
    p = cfg.params

    def row(item):
        pid, path = item
        t = path.T if p["t"] is None else min(p["t"], path.T)
        if p["delta"] is not None:
            return (pid, p["delta"], t, analysis.grid_upcrossing_sum(path, p["delta"], t, p["closed"]))
        return (pid, p["a"], p["b"], t, analysis.count_upcrossings(path, p["a"], p["b"], t, p["closed"]))

    header = ["path_id", "delta", "t", "M"] if p["delta"] is not None else ["path_id", "a", "b", "t", "M"]
    emit(cfg, "upcross", header, pmap(row, corpus, cfg.threads))


def cmd_bruneau(cfg, corpus):
    p = cfg.params

    def row(item):
        pid, path = item
        t = path.T if p["t"] is None else min(p["t"], path.T)
        vals = np.append(path.values[path.times < t], paths.evaluate(path, t))
        lam = p["lam"] if p["lam"] is not None else float(np.max(np.abs(vals - vals[0])))
        if lam == 0:
            rep = None
        else:
            rep = analysis.bruneau_constant(path, p["q"], lam, t, p["k_max"])
        check = analysis.bruneau_bound_check(path, p["p"], p["q"], t, p["k_max"]) if p["p"] is not None else None
        return pid, lam, rep, check

    results = pmap(row, corpus, cfg.threads)
    rows = []
    for pid, lam, rep, check in results:
        if rep is not None and cfg.out is not None:
            write_csv(cfg.out / f"bruneau_{pid}.csv", ["k", "mesh", "M", "weighted"], rep.rows())
        rows.append((
            pid, lam,
            rep.constant if rep else 0.0,
            rep.argmax_level if rep else None,
            rep.k_max if rep else None,
            check.lhs if check else None,
            check.rhs if check else None,
            check.holds if check else None,
        ))
    header = ["path_id", "lambda", "constant", "argmax_k", "k_max", "lhs", "rhs", "holds"]
    levels = {pid: rep.to_dict() for pid, _, rep, _ in results if rep is not None}
    emit(cfg, "bruneau", header, rows, {"levels": levels})
    if any(check is not None and not check.holds for *_, check in results):
        log.error("Bruneau bound violated on some path")
        return EXIT_RUNTIME
    return EXIT_OK


def cmd_simulate_a(cfg, corpus):
    p = cfg.params

    def row(item):
        pid, raw = item
        path = paths.normalize(raw)
        strat, c = gametheory.strategy_A(path, p["delta"], p["p"], p["C"], p["A"], corrected=p["corrected"])
        traj = gametheory.run_elementary(path, strat, c)
        ident = gametheory.verify_cumulative_identity(path, p["delta"], p["p"], p["C"], p["A"])
        if p["trajectories"] and cfg.out is not None:
            (cfg.out / "trajectories").mkdir(parents=True, exist_ok=True)
            (cfg.out / "trajectories" / f"{pid}.json").write_text(json.dumps(traj.to_dict()))
        return (pid, c, traj.min_capital, traj.terminal_capital, len(strat), ident.max_residual)

    emit(cfg, "simulate_a", ["path_id", "S_0", "min_capital", "terminal_capital", "n_trades", "identity_max_residual"],
         pmap(row, corpus, cfg.threads))


def cmd_simulate_b(cfg, corpus):
    p = cfg.params

    def row(item):
        pid, raw = item
        path = paths.normalize(raw)
        ens, rep = gametheory.strategy_B(path, p["q"], p["A"], p["K_levels"])
        run = ens.run(path)
        return (pid, ens.initial_capital, run.min_component_capital, run.terminal_capital,
                rep.truncated_constant, rep.stop_time)

    emit(cfg, "simulate_b",
         ["path_id", "S_0", "min_component_capital", "terminal_capital", "truncated_constant", "stop_time"],
         pmap(row, corpus, cfg.threads))


def cmd_certify(cfg, corpus) -> int:
    p = cfg.params
    ids = [pid for pid, _ in corpus]
    corpus_paths = [path for _, path in corpus]
    summaries = []
    for build in p["builds"]:
        tag = f"_delta{build['delta']:g}" if len(p["builds"]) > 1 else ""
        try:
            rep = gametheory.superhedge_certificate(
                corpus_paths, (p["event"], p["event_params"]), (p["builder"], build), ids
            )
        except gametheory.CertificateRefused as exc:
            log.error("certificate refused: %s", exc)
            if cfg.json:
                print(json.dumps({"refused": True, "path_id": str(exc.path_id), "min_capital": exc.min_capital}))
            return EXIT_RUNTIME
        if cfg.out is not None:
            cfg.out.mkdir(parents=True, exist_ok=True)
            (cfg.out / f"certificate{tag}.json").write_text(json.dumps(rep.to_dict(), indent=2, default=_jsonable))
            write_csv(cfg.out / f"certificate{tag}.csv",
                      ["path_id", "in_event", "S_0", "min_capital", "terminal_capital"], rep.rows())
        d = rep.to_dict()
        summaries.append(d)
        if not cfg.json:
            print(f"{p['event']} / {p['builder']} {build}: S_0={rep.initial_capital:.6g} "
                  f"min_terminal_on_event={rep.min_terminal_in_event} certified_bound={d['certified_bound']}")
    if cfg.json:
        print(json.dumps({"certificates": summaries}, default=_jsonable))
    return EXIT_OK


COMMANDS = {
    "varp": cmd_varp,
    "vex": cmd_vex,
    "upcross": cmd_upcross,
    "bruneau": cmd_bruneau,
    "simulate-a": cmd_simulate_a,
    "simulate-b": cmd_simulate_b,
    "certify": cmd_certify,
}


def main(argv: Optional[list[str]] = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.config is not None:
            _apply_config(_subparser(parser, args.command), args.config)
            args = parser.parse_args(argv)
        cfg = validate(args)
    except ValidationError as exc:
        print(f"vexgame {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION

    try:
        if cfg.command == "generate":
            return cmd_generate(cfg)
        corpus, bad = load_corpus(cfg.inputs)
        status = COMMANDS[cfg.command](cfg, corpus) or EXIT_OK
    except OSError as exc:
        print(f"vexgame {cfg.command}: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except ValueError as exc:
        print(f"vexgame {cfg.command}: error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    if bad:
        log.error("%d malformed path file(s) skipped", bad)
        return EXIT_RUNTIME
    return status


if __name__ == "__main__":
    sys.exit(main())
