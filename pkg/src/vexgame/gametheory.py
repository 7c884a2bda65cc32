"""Capital processes of Sceptic's elementary strategies and superhedging certificates.

Strategies are realized on a concrete path: a builder scans the path forward
and emits ``(stop_time, portfolio)`` pairs whose values depend only on what
the path has done up to ``stop_time``.  Rerunning a builder on a truncated
path must reproduce the same early trades (checked in the test suite).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from vexgame.analysis import alternating_events, upcrossing_masks, var_p
from vexgame.paths import (
    LEVEL_TOL,
    SampledPath,
    grid_crossings,
    hitting_time,
    normalize,
    restrict,
)

POSITIVITY_TOL = 1e-9


class CertificateRefused(RuntimeError):
    """A capital process went negative beyond tolerance on some path."""

    def __init__(self, path_id, min_capital: float):
        super().__init__(f"path {path_id}: min capital {min_capital:.3e} below -tolerance")
        self.path_id = path_id
        self.min_capital = min_capital


@dataclass(frozen=True, eq=False)
class ElementaryStrategy:
    """Portfolio ``portfolios[n]`` is held from ``stop_times[n]`` to ``stop_times[n+1]`` (or T).

    ``prices[n]`` is the price used for accounting at ``stop_times[n]``; builders
    pass the exact level hit (snapped grid value) rather than the interpolated
    float.
    """

    stop_times: np.ndarray
    portfolios: np.ndarray
    prices: np.ndarray
    provenance: str = "custom"
    params: dict = field(default_factory=dict)
    bound: float = math.inf

    def __post_init__(self):
        for name in ("stop_times", "portfolios", "prices"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if not len(self.stop_times) == len(self.portfolios) == len(self.prices):
            raise ValueError("stop_times, portfolios and prices must have equal length")
        if np.any(np.diff(self.stop_times) < 0):
            raise ValueError("stop times must be nondecreasing")
        if not np.all(np.isfinite(self.portfolios)):
            raise ValueError("portfolios must be finite")
        if np.any(np.abs(self.portfolios) > self.bound):
            raise ValueError(f"portfolio exceeds declared bound {self.bound}")

    @property
    def trades(self) -> list[tuple[float, float]]:
        return list(zip(self.stop_times.tolist(), self.portfolios.tolist()))

    def __len__(self) -> int:
        return len(self.stop_times)

    @classmethod
    def empty(cls, provenance: str = "custom", params: Optional[dict] = None) -> "ElementaryStrategy":
        return cls([], [], [], provenance, dict(params or {}))


@dataclass(frozen=True, eq=False)
class CapitalTrajectory:
    initial_capital: float
    times: np.ndarray
    capital: np.ndarray
    stop_times: np.ndarray
    stop_capital: np.ndarray
    snap_gap: float = 0.0

    @property
    def min_capital(self) -> float:
        return float(self.capital.min())

    @property
    def terminal_capital(self) -> float:
        return float(self.capital[-1])

    def at(self, t: float) -> float:
        return float(np.interp(t, self.times, self.capital))

    def to_dict(self) -> dict:
        return {
            "initial_capital": self.initial_capital,
            "min_capital": self.min_capital,
            "terminal_capital": self.terminal_capital,
            "snap_gap": self.snap_gap,
            "times": self.times.tolist(),
            "capital": self.capital.tolist(),
        }


# --------------------------------------------------------------------------
# elementary capital process


def _check_stops(path: SampledPath, strategy: ElementaryStrategy):
    st = strategy.stop_times
    if len(st) and (st[0] < 0 or st[-1] > path.T):
        raise ValueError(f"stop times must lie in [0, {path.T}]")


def _stop_gains(strategy: ElementaryStrategy) -> np.ndarray:
    """``G[n]`` = gain accumulated from the start up to stop ``n``."""
    h, P = strategy.portfolios, strategy.prices
    gains = np.zeros(len(h))
    if len(h) > 1:
        gains[1:] = np.cumsum(h[:-1] * np.diff(P))
    return gains


def capital_at(path: SampledPath, strategy: ElementaryStrategy, c: float, times: np.ndarray, prices=None) -> np.ndarray:
    """``K_t = c + Σ h_n (ω(τ_{n+1}∧t) - ω(τ_n∧t))`` at each of ``times``."""
    times = np.asarray(times, dtype=float)
    if prices is None:
        prices = np.interp(times, path.times, path.values)
    out = np.full(len(times), float(c))
    st = strategy.stop_times
    if not len(st):
        return out
    gains = _stop_gains(strategy)
    n = np.searchsorted(st, times, side="right") - 1
    live = n >= 0
    nl = n[live]
    held = strategy.portfolios[nl] * (prices[live] - strategy.prices[nl])
    held = np.where(times[live] == st[nl], 0.0, held)
    out[live] = c + gains[nl] + held
    return out


def run_elementary(path: SampledPath, strategy: ElementaryStrategy, c: float) -> CapitalTrajectory:
    """Capital of ``strategy`` started from ``c``, recorded at every sample and stop time."""
    _check_stops(path, strategy)
    st = strategy.stop_times
    times = np.union1d(path.times, st)
    capital = capital_at(path, strategy, c, times)
    stop_capital = c + _stop_gains(strategy)
    gap = float(np.max(np.abs(np.interp(st, path.times, path.values) - strategy.prices))) if len(st) else 0.0
    return CapitalTrajectory(float(c), times, capital, st, stop_capital, gap)


# --------------------------------------------------------------------------
# Strategy A: grid momentum, capital grows like ω² - (number of grid steps)·δ²


def _trade_cap(C: float, delta: float, p: float) -> int:
    """Largest n with ``n + 1 < C/δ^p``; equality counts as failing."""
    ratio = C / delta**p
    near = round(ratio)
    if abs(ratio - near) <= 1e-9 * max(1.0, ratio):
        ratio = float(near)
    return math.ceil(ratio) - 2


def _check_strategy_a(path, delta, p, C, A) -> int:
    if not delta > 0 or not A > 0 or not C > 0:
        raise ValueError("delta, C and A must be positive")
    if not 0 < p < 2:
        raise ValueError(f"p must lie in (0, 2), got {p}")
    steps = A / delta
    n_a = round(steps)
    if n_a < 1 or abs(steps - n_a) > 1e-9 * steps:
        raise ValueError(f"A/delta = {steps} must be a positive integer")
    if path.values[0] != 0.0:
        raise ValueError("strategy A needs a path with ω(0) = 0; call normalize() first")
    return n_a


def strategy_a_initial_capital(delta: float, p: float, C: float, A: float, corrected: bool = True) -> float:
    c = delta ** (2 - p) * C
    return c + 2 * A * delta if corrected else c


def strategy_A(
    path: SampledPath,
    delta: float,
    p: float,
    C: float,
    A: float,
    horizon: Optional[float] = None,
    corrected: bool = True,
) -> tuple[ElementaryStrategy, float]:
    """Buy ``2ω(τ_n)`` at every grid hit while ``τ_n < T∧T_A`` and ``n+1 < C/δ^p``.

    Returns the realized strategy and its initial capital ``δ^(2-p)C + 2Aδ``
    (``corrected=False`` drops the ``2Aδ`` that keeps capital nonnegative
    between grid hits).  ``horizon`` is the game horizon T; it defaults to
    ``path.T`` and must be passed explicitly when ``path`` is a truncation.
    """
    n_a = _check_strategy_a(path, delta, p, C, A)
    horizon = path.T if horizon is None else horizon
    n_max = _trade_cap(C, delta, p)
    params = {"delta": delta, "p": p, "C": C, "A": A, "corrected": corrected}
    crossings = grid_crossings(path, delta)
    stops, hs, prices = [], [], []
    seen_a = False
    for i, (t, level) in enumerate(zip(crossings.times.tolist(), crossings.levels.tolist())):
        n = i + 1
        value = level * delta
        seen_a = seen_a or abs(level) >= n_a
        active = t < horizon and not seen_a and n <= n_max
        stops.append(t)
        prices.append(value)
        if not active:
            hs.append(0.0)
            break
        hs.append(2.0 * value)
    strategy = ElementaryStrategy(stops, hs, prices, "strategy_a", params, bound=2.0 * A)
    return strategy, strategy_a_initial_capital(delta, p, C, A, corrected)


@dataclass(frozen=True)
class IdentityReport:
    N: np.ndarray
    times: np.ndarray
    residuals: np.ndarray

    @property
    def max_residual(self) -> float:
        return float(self.residuals.max()) if len(self.residuals) else 0.0

    def __len__(self) -> int:
        return len(self.N)


def verify_cumulative_identity(path: SampledPath, delta: float, p: float, C: float, A: float) -> IdentityReport:
    """Residuals of ``ω²(τ_N) = K_{τ_N} - δ^(2-p)C + Nδ²`` for every admissible N.

    Uses the uncorrected initial capital; N ranges over ``τ_N <= T∧T_A`` and
    ``N < C/δ^p``.
    """
    strategy, c = strategy_A(path, delta, p, C, A, corrected=False)
    traj = run_elementary(path, strategy, c)
    n_a = round(A / delta)
    n_max = _trade_cap(C, delta, p)
    Ns, ts, res = [], [], []
    for idx, (t, price) in enumerate(zip(strategy.stop_times.tolist(), strategy.prices.tolist())):
        N = idx + 1
        if N > n_max + 1:
            break
        K = traj.stop_capital[idx]
        Ns.append(N)
        ts.append(t)
        res.append(abs(price * price - K + delta ** (2 - p) * C - N * delta * delta))
        if abs(round(price / delta)) >= n_a:
            break
    return IdentityReport(np.array(Ns, dtype=np.int64), np.array(ts), np.array(res))


# --------------------------------------------------------------------------
# Doob upcrossing strategy and Strategy B


def _segment_hit(times, values, k: int, level: float) -> float:
    """Time in segment ``(k-1, k]`` at which the interpolant reaches ``level``."""
    if k == 0:
        return float(times[0])
    x0, x1 = values[k - 1], values[k]
    t0, t1 = times[k - 1], times[k]
    if x1 == x0:
        return float(t1)
    t = t0 + (level - x0) / (x1 - x0) * (t1 - t0)
    return float(min(max(t, t0), t1))


def doob_strategy(
    path: SampledPath,
    a: float,
    b: float,
    floor: float,
    stop_at: Optional[float] = None,
    horizon: Optional[float] = None,
) -> tuple[ElementaryStrategy, float]:
    """Hold one unit from each descent to ``<= a`` until the next rise to ``>= b``.

    Initial capital is ``a - floor``; as long as the path stays above
    ``floor`` the capital is nonnegative and dominates ``(b - a)`` times the
    number of completed upcrossings.  All trading stops at ``stop_at``; an
    open position is closed there unless ``stop_at`` is the game horizon.
    ``floor == a`` is allowed (zero initial capital, the position can only open
    at the floor).
    """
    if not floor <= a < b:
        raise ValueError(f"need floor <= a < b, got floor={floor}, a={a}, b={b}")
    horizon = path.T if horizon is None else horizon
    params = {"a": a, "b": b, "floor": floor, "stop_at": stop_at}
    if stop_at is not None and stop_at < 0:
        raise ValueError(f"stop_at={stop_at} is negative")
    if stop_at == 0:
        if path.values[0] < floor:
            raise ValueError(f"path starts at {path.values[0]} below floor {floor}")
        return ElementaryStrategy.empty("doob", params), a - floor
    prefix = restrict(path, stop_at) if stop_at is not None and stop_at < path.T else path
    lowest = float(prefix.values.min())
    if lowest < floor - LEVEL_TOL * (b - a):
        raise ValueError(f"path drops to {lowest} below floor {floor} before stop time")

    x, tt = prefix.values, prefix.times
    low, high = upcrossing_masks(x, a, b, closed=True)
    starts, ends = alternating_events(low, high)
    stops, hs, prices = [], [], []
    for i, j in zip(starts.tolist(), ends.tolist()):
        stops.append(_segment_hit(tt, x, i, a))
        hs.append(1.0)
        prices.append(float(x[0]) if i == 0 else a)
        if j < 0:
            break
        stops.append(_segment_hit(tt, x, j, b))
        hs.append(0.0)
        prices.append(b)
    holding = bool(hs) and hs[-1] == 1.0
    if holding and stop_at is not None and stop_at < horizon:
        stops.append(float(prefix.T))
        hs.append(0.0)
        prices.append(float(x[-1]))
    return ElementaryStrategy(stops, hs, prices, "doob", params, bound=1.0), a - floor


def doob_until_floor(
    path: SampledPath, a: float, b: float, floor: float, horizon: Optional[float] = None
) -> tuple[ElementaryStrategy, float]:
    """``doob_strategy`` frozen at the first time the path reaches ``floor``.

    The freeze time is itself a stopping time, so this form needs no
    knowledge of the path beyond the current time.
    """
    stop = _first_at_or_below(path, floor)
    return doob_strategy(path, a, b, floor, stop_at=stop, horizon=horizon)


def _first_at_or_below(path: SampledPath, level: float) -> Optional[float]:
    hits = np.flatnonzero(path.values <= level)
    if not len(hits):
        return None
    return _segment_hit(path.times, path.values, int(hits[0]), level)


@dataclass(frozen=True, eq=False)
class EnsembleComponent:
    key: tuple
    strategy: ElementaryStrategy
    c: float
    weight: float


@dataclass(frozen=True, eq=False)
class EnsembleRun:
    times: np.ndarray
    capital: np.ndarray
    component_min: np.ndarray
    component_terminal: np.ndarray

    @property
    def initial_capital(self) -> float:
        return float(self.capital[0])

    @property
    def terminal_capital(self) -> float:
        return float(self.capital[-1])

    @property
    def min_capital(self) -> float:
        return float(self.capital.min())

    @property
    def min_component_capital(self) -> float:
        return float(self.component_min.min()) if len(self.component_min) else 0.0


@dataclass(frozen=True, eq=False)
class PositiveCapitalEnsemble:
    """Truncated weighted sum ``Σ weight_n · K^{G_n, c_n}`` of positive elementary processes."""

    components: tuple[EnsembleComponent, ...]
    truncation_note: str = ""
    tail_initial_bound: float = 0.0

    @property
    def initial_capital(self) -> float:
        return float(sum(comp.weight * comp.c for comp in self.components))

    def run(self, path: SampledPath) -> EnsembleRun:
        """Evaluate every component; the weighted sum is recorded at the path samples.

        Each component is also evaluated at its own stop times, so
        ``component_min`` covers every time at which it can turn.
        """
        n_samples = len(path.times)
        total = np.zeros(n_samples)
        mins = np.empty(len(self.components))
        terms = np.empty(len(self.components))
        for n, comp in enumerate(self.components):
            _check_stops(path, comp.strategy)
            times = np.concatenate((path.times, comp.strategy.stop_times))
            k = capital_at(path, comp.strategy, comp.c, times)
            mins[n] = k.min() if len(k) else comp.c
            terms[n] = k[n_samples - 1]
            total += comp.weight * k[:n_samples]
        return EnsembleRun(path.times, total, mins, terms)


def strategy_b_initial_capital(q: float, K_levels: int) -> float:
    """``Σ_{k<=K} 2^(-kq) (2^(2k+1) - 2^k)``, the exact truncated initial capital."""
    return float(sum(2.0 ** (-k * q) * (2.0 ** (2 * k + 1) - 2.0**k) for k in range(1, K_levels + 1)))


def strategy_b_capital_bound(q: float) -> float:
    """``Σ_{k>=1} 2^(-kq) 2^(2k+1) = 2^(3-q) / (1 - 2^(2-q))``."""
    return 2.0 ** (3 - q) / (1.0 - 2.0 ** (2 - q))


def strategy_b_tail_bound(q: float, K_levels: int) -> float:
    """Initial-capital bound of the omitted levels ``k > K_levels``."""
    return 2.0 * 2.0 ** ((2 - q) * (K_levels + 1)) / (1.0 - 2.0 ** (2 - q))


@dataclass(frozen=True)
class StrategyBReport:
    q: float
    A: float
    K_levels: int
    stop_time: Optional[float]
    initial_capital: float
    initial_capital_bound: float
    per_level_upcrossings: tuple[int, ...]

    @property
    def per_level_weighted(self) -> tuple[float, ...]:
        return tuple(2.0 ** (-k * self.q) * M for k, M in enumerate(self.per_level_upcrossings, start=1))

    @property
    def truncated_constant(self) -> float:
        return max(self.per_level_weighted, default=0.0)


def strategy_B(
    path: SampledPath,
    q: float,
    A: float,
    K_levels: int,
    horizon: Optional[float] = None,
) -> tuple[PositiveCapitalEnsemble, StrategyBReport]:
    """Doob upcrossing ensemble over the dyadic intervals of ``(-A, A)``.

    Level k contributes, for ``i = -2^k+1 .. 2^k``, a Doob strategy on
    ``((i-1)A2^-k, iA2^-k)`` with floor ``-A`` and initial capital
    ``A + (i-1)A2^-k``, weighted by ``2^(-kq) / (A2^-k)``.  Every component
    freezes at the first exit of the open band ``(-A, A)``, which keeps it
    nonnegative on every path.
    """
    if not q > 2:
        raise ValueError(f"q must exceed 2, got {q}")
    if not A > 0 or K_levels < 1:
        raise ValueError("need A > 0 and K_levels >= 1")
    if path.values[0] != 0.0:
        raise ValueError("strategy B needs a path with ω(0) = 0; call normalize() first")
    horizon = path.T if horizon is None else horizon

    stop = hitting_time(path, A, "absolute")
    prefix = path
    if stop is not None:
        side = 1.0 if np.interp(stop, path.times, path.values) > 0 else -1.0
        prefix = restrict(path, stop, endpoint=side * A)

    components = []
    per_level = []
    for k in range(1, K_levels + 1):
        mesh = A * 2.0**-k
        weight = 2.0 ** (-k * q) / mesh
        M = 0
        for i in range(-(2**k) + 1, 2**k + 1):
            a, b = (i - 1) * mesh, i * mesh
            strat, c = doob_strategy(prefix, a, b, -A, stop_at=stop, horizon=horizon)
            components.append(EnsembleComponent((k, i), strat, c, weight))
            M += int(np.count_nonzero((strat.portfolios == 0.0) & (strat.prices == b)))
        per_level.append(M)

    tail = strategy_b_tail_bound(q, K_levels)
    note = f"levels k > {K_levels} omitted; their initial capital is at most {tail:.6g}"
    ensemble = PositiveCapitalEnsemble(tuple(components), note, tail)
    report = StrategyBReport(
        q, A, K_levels, stop, ensemble.initial_capital, strategy_b_capital_bound(q), tuple(per_level)
    )
    return ensemble, report


# --------------------------------------------------------------------------
# events and certificates


def nc(path: SampledPath) -> bool:
    """True when the path is not constant."""
    return not path.is_constant()


def event_E_pCA(path: SampledPath, p: float, C: float, A: float) -> bool:
    """``var_p < C`` and ``sup |ω| > A``."""
    if not p >= 1 or not C > 0 or not A > 0:
        raise ValueError("need p >= 1, C > 0, A > 0")
    if not path.sup_abs() > A:
        return False
    return var_p(path, p).value < C


def event_E_pA(path: SampledPath, p: float, A: float, V: float) -> bool:
    """``var_p >= V`` (finite stand-in for ``var_p = ∞``) and ``sup |ω| < A``."""
    if not p >= 1 or not A > 0 or not V > 0:
        raise ValueError("need p >= 1, A > 0, V > 0")
    if not path.sup_abs() < A:
        return False
    return var_p(path, p).value >= V


EVENTS: dict[str, tuple[Callable[..., bool], tuple[str, ...]]] = {
    "E_pCA": (event_E_pCA, ("p", "C", "A")),
    "E_pA": (event_E_pA, ("p", "A", "V")),
    "nc": (lambda path: nc(path), ()),
    "always_false": (lambda path: False, ()),
}

BUILDER_PARAMS = {
    "strategy_a": ("delta", "p", "C", "A", "corrected"),
    "strategy_b": ("q", "A", "K_levels"),
}

# event families each strategy family is meant to certify
COMPATIBLE = {
    "E_pCA": {"strategy_a"},
    "E_pA": {"strategy_b"},
    "nc": {"strategy_a", "strategy_b"},
    "always_false": {"strategy_a", "strategy_b"},
}


def check_event(name: str, params: dict):
    if name not in EVENTS:
        raise ValueError(f"unknown event {name!r}; expected one of {sorted(EVENTS)}")
    need = EVENTS[name][1]
    if set(params) != set(need):
        raise ValueError(f"event {name} takes parameters {need}, got {sorted(params)}")


def check_builder(name: str, params: dict):
    if name not in BUILDER_PARAMS:
        raise ValueError(f"unknown strategy family {name!r}; expected one of {sorted(BUILDER_PARAMS)}")
    allowed = set(BUILDER_PARAMS[name])
    required = allowed - {"corrected"}
    if not required <= set(params) <= allowed:
        raise ValueError(f"strategy {name} takes parameters {sorted(allowed)}, got {sorted(params)}")


@dataclass(frozen=True)
class PathOutcome:
    path_id: str
    in_event: bool
    terminal_capital: float
    min_capital: float


@dataclass(frozen=True)
class CertificateReport:
    event_name: str
    event_params: dict
    builder_name: str
    builder_params: dict
    initial_capital: float
    per_path: tuple[PathOutcome, ...]
    positivity_tol: float = POSITIVITY_TOL
    truncation_note: str = ""

    @property
    def in_event_count(self) -> int:
        return sum(o.in_event for o in self.per_path)

    @property
    def min_capital(self) -> float:
        return min((o.min_capital for o in self.per_path), default=0.0)

    @property
    def min_terminal_in_event(self) -> Optional[float]:
        vals = [o.terminal_capital for o in self.per_path if o.in_event]
        return min(vals) if vals else None

    @property
    def certified_bound(self) -> Optional[float]:
        """``S_0 / min terminal on the event``; ``None`` when no path is in the event."""
        m = self.min_terminal_in_event
        if m is None:
            return None
        return self.initial_capital / m if m > 0 else math.inf

    def rows(self) -> list[tuple]:
        return [(o.path_id, o.in_event, self.initial_capital, o.min_capital, o.terminal_capital) for o in self.per_path]

    def to_dict(self) -> dict:
        bound = self.certified_bound
        return {
            "event": {"name": self.event_name, "params": self.event_params},
            "builder": {"name": self.builder_name, "params": self.builder_params},
            "S_0": self.initial_capital,
            "positivity_tol": self.positivity_tol,
            "min_capital": self.min_capital,
            "in_event_count": self.in_event_count,
            "min_terminal_in_event": self.min_terminal_in_event,
            "certified_bound": None if bound is None or math.isinf(bound) else bound,
            "truncation_note": self.truncation_note,
            "per_path": [o.__dict__ for o in self.per_path],
        }


def run_builder(path: SampledPath, name: str, params: dict) -> tuple[float, float, float, str]:
    """Run a strategy family on a normalized path: ``(S_0, min capital, terminal, note)``."""
    if name == "strategy_a":
        strat, c = strategy_A(path, **params)
        traj = run_elementary(path, strat, c)
        return c, traj.min_capital, traj.terminal_capital, ""
    ensemble, _ = strategy_B(path, **params)
    out = ensemble.run(path)
    return ensemble.initial_capital, min(out.min_component_capital, out.min_capital), out.terminal_capital, ensemble.truncation_note


def superhedge_certificate(
    paths: Sequence[SampledPath],
    event: tuple[str, dict],
    builder: tuple[str, dict],
    path_ids: Optional[Sequence] = None,
    positivity_tol: float = POSITIVITY_TOL,
) -> CertificateReport:
    """Run one strategy family on every path and report its superhedging performance.

    The certificate is refused (``CertificateRefused``) if any path drives a
    capital process below ``-positivity_tol``.  Otherwise ``certified_bound``
    is an empirical witness of ``UpProb(E) <= S_0 / min terminal on E`` over
    this corpus.
    """
    event_name, event_params = event
    builder_name, builder_params = builder
    check_event(event_name, event_params)
    check_builder(builder_name, builder_params)
    if builder_name not in COMPATIBLE[event_name]:
        raise ValueError(f"strategy {builder_name} does not target event {event_name}")
    detector = EVENTS[event_name][0]
    path_ids = list(range(len(paths))) if path_ids is None else list(path_ids)

    outcomes = []
    s0 = None
    note = ""
    for pid, raw in zip(path_ids, paths):
        path = normalize(raw)
        in_event = bool(detector(path, **event_params))
        c, lowest, terminal, note = run_builder(path, builder_name, builder_params)
        if s0 is not None and not math.isclose(c, s0, rel_tol=1e-12, abs_tol=1e-15):
            raise RuntimeError(f"initial capital depends on the path ({c} vs {s0})")
        s0 = c
        if lowest < -positivity_tol:
            raise CertificateRefused(pid, lowest)
        outcomes.append(PathOutcome(str(pid), in_event, terminal, lowest))
    if s0 is None:
        s0 = _initial_capital_for(builder_name, builder_params)
    return CertificateReport(
        event_name, dict(event_params), builder_name, dict(builder_params), s0, tuple(outcomes), positivity_tol, note
    )


def _initial_capital_for(name: str, params: dict) -> float:
    if name == "strategy_a":
        return strategy_a_initial_capital(params["delta"], params["p"], params["C"], params["A"], params.get("corrected", True))
    return strategy_b_initial_capital(params["q"], params["K_levels"])
