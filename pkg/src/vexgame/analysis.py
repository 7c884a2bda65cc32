"""Path functionals: strong p-variation, variation exponent, upcrossings."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np

from vexgame.paths import LEVEL_TOL, SampledPath, evaluate, level_walk, restrict

DEFAULT_P_GRID = np.round(np.arange(1.0, 6.0 + 1e-9, 0.05), 10)
VEX_GROWTH_THRESHOLD = 1.05
VEX_TOP_LEVELS = 3
BRUTEFORCE_MAX_SAMPLES = 16


@dataclass(frozen=True)
class VariationReport:
    p: float
    value: float
    maximizing_subdivision: tuple[int, ...] = ()

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.value)

    def to_dict(self) -> dict:
        # JSON has no infinity literal
        return {
            "p": self.p,
            "value": None if self.is_infinite else self.value,
            "infinite": self.is_infinite,
            "maximizing_subdivision": list(self.maximizing_subdivision),
        }


@dataclass(frozen=True)
class BruneauLevel:
    k: int
    mesh: float
    M: int
    weighted: float


@dataclass(frozen=True)
class BruneauReport:
    q: float
    lam: float
    t: float
    k_max: int
    per_level: tuple[BruneauLevel, ...] = field(default_factory=tuple)

    @property
    def constant(self) -> float:
        return max((lv.weighted for lv in self.per_level), default=0.0)

    @property
    def argmax_level(self) -> Optional[int]:
        """Level attaining the truncated sup; equal to ``k_max`` means it may not have saturated."""
        if not self.per_level or self.constant == 0.0:
            return None
        return max(self.per_level, key=lambda lv: lv.weighted).k

    def rows(self) -> list[tuple[int, float, int, float]]:
        return [(lv.k, lv.mesh, lv.M, lv.weighted) for lv in self.per_level]

    def to_dict(self) -> dict:
        return {
            "q": self.q,
            "lambda": self.lam,
            "t": self.t,
            "k_max": self.k_max,
            "constant": self.constant,
            "per_level": [lv.__dict__ for lv in self.per_level],
        }


class BoundCheck(NamedTuple):
    lhs: float
    rhs: float
    holds: bool


# --------------------------------------------------------------------------
# strong p-variation


def _turning_points(values: np.ndarray) -> np.ndarray:
    """Indices of the endpoints and the strict turning points of ``values``.

    For p >= 1 a subdivision point inside a monotone run can be slid to one
    end of the run without decreasing the sum (|y-a|^p + |b-y|^p is convex in
    y), so these indices suffice for the supremum.
    """
    n = len(values)
    keep = np.ones(n, dtype=bool)
    keep[1:] = values[1:] != values[:-1]
    idx = np.flatnonzero(keep)
    if len(idx) <= 2:
        return idx
    d = np.sign(np.diff(values[idx]))
    turn = d[1:] != d[:-1]
    return np.concatenate(([idx[0]], idx[1:-1][turn], [idx[-1]]))


def var_p(path: SampledPath, p: float) -> VariationReport:
    """Exact strong p-variation of the interpolant.

    For p >= 1 the supremum is attained on sample points and is found by
    dynamic programming over the turning points; for p < 1 any non-constant
    interpolant has infinite p-variation.
    """
    if not p > 0:
        raise ValueError(f"p must be positive, got {p}")
    x = path.values
    last = len(x) - 1
    if path.is_constant():
        return VariationReport(p, 0.0, (0, last))
    if p < 1:
        return VariationReport(p, math.inf, ())

    idx = _turning_points(x)
    y = x[idx]
    m = len(y)
    best = np.zeros(m)
    parent = np.zeros(m, dtype=np.int64)
    for j in range(1, m):
        d = np.abs(y[j] - y[:j])
        cand = best[:j] + (d * d if p == 2 else d**p)
        i = int(np.argmax(cand))
        best[j] = cand[i]
        parent[j] = i

    chain = [m - 1]
    while chain[-1] != 0:
        chain.append(int(parent[chain[-1]]))
    sub = [int(idx[c]) for c in reversed(chain)]
    # the last turning point may stand for a flat tail ending at ``last``
    sub[-1] = last
    return VariationReport(p, float(best[-1]), tuple(sub))


def var_p_bruteforce(path: SampledPath, p: float) -> float:
    """Maximum of the p-variation sum over every subset of interior samples."""
    if not p >= 1:
        raise ValueError(f"brute force oracle needs p >= 1, got {p}")
    n = len(path)
    if n > BRUTEFORCE_MAX_SAMPLES:
        raise ValueError(f"brute force refuses {n} samples (max {BRUTEFORCE_MAX_SAMPLES})")
    x = path.values.tolist()
    best = 0.0
    for mask in itertools.product((False, True), repeat=n - 2):
        pts = [0] + [i + 1 for i, used in enumerate(mask) if used] + [n - 1]
        s = 0.0
        for a, b in zip(pts, pts[1:]):
            s += abs(x[b] - x[a]) ** p
        best = max(best, s)
    return best


def var_p_prefix(path: SampledPath, p: float, t: float) -> float:
    """Strong p-variation of the path restricted to ``[0, t]``."""
    if not 0.0 <= t <= path.T:
        raise ValueError(f"t={t} outside [0, {path.T}]")
    if t == 0.0:
        return 0.0
    return var_p(restrict(path, t), p).value


# --------------------------------------------------------------------------
# variation exponent


def dyadic_sums(path: SampledPath, p_grid: Sequence[float], levels: int) -> np.ndarray:
    """``V[i, m] = Σ_j |ω(jT2^-m) - ω((j-1)T2^-m)|^p_i`` for ``m = 0..levels``."""
    p_grid = np.asarray(p_grid, dtype=float)
    out = np.empty((len(p_grid), levels + 1))
    for m in range(levels + 1):
        grid = np.linspace(0.0, path.T, 2**m + 1)
        d = np.abs(np.diff(np.interp(grid, path.times, path.values)))
        out[:, m] = (d[None, :] ** p_grid[:, None]).sum(axis=1)
    return out


def vex_estimate(
    path: SampledPath,
    p_grid: Optional[Sequence[float]] = None,
    levels: Optional[int] = None,
    threshold: float = VEX_GROWTH_THRESHOLD,
) -> float:
    """Estimate the variation exponent from dyadic variation sums.

    For each p the level-to-level ratios ``V^(m+1)/V^(m)`` over the finest
    three levels are averaged; p counts as "still growing" when the average
    is at least ``threshold``.  The estimate is the crossing point of the
    average ratio through ``threshold`` (log-linear between grid points),
    clipped to ``[p_grid[0], p_grid[-1]]``.  Constant paths get 0 and
    non-constant paths never get less than 1.
    """
    p_grid = DEFAULT_P_GRID if p_grid is None else np.asarray(p_grid, dtype=float)
    if len(p_grid) == 0 or np.any(np.diff(p_grid) <= 0):
        raise ValueError("p_grid must be nonempty and strictly increasing")
    if levels is None:
        levels = int(math.floor(math.log2(len(path) - 1))) if len(path) > 2 else 1
    if levels < 2:
        raise ValueError(f"levels must be >= 2, got {levels}")
    if len(path) < 2**levels:
        raise ValueError(f"path has {len(path)} samples, needs >= 2^{levels}")
    if path.is_constant():
        return 0.0

    V = dyadic_sums(path, p_grid, levels)
    top = min(VEX_TOP_LEVELS, levels)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = V[:, -top:] / V[:, -top - 1 : -1]
    ratios = np.where(np.isnan(ratios), 1.0, ratios)
    score = np.log(ratios.mean(axis=1)) - math.log(threshold)

    failing = np.flatnonzero(score < 0)
    if not len(failing):
        estimate = float(p_grid[-1])
    elif failing[0] == 0:
        estimate = float(p_grid[0])
    else:
        i = int(failing[0])
        s0, s1 = score[i - 1], score[i]
        w = s0 / (s0 - s1) if np.isfinite(s0) else 1.0
        estimate = float(p_grid[i - 1] + w * (p_grid[i] - p_grid[i - 1]))
    return max(estimate, 1.0)


# --------------------------------------------------------------------------
# upcrossings


def _prefix_values(path: SampledPath, t: Optional[float]) -> np.ndarray:
    if t is None or t == path.T:
        return path.values
    if not 0.0 <= t <= path.T:
        raise ValueError(f"t={t} outside [0, {path.T}]")
    k = int(np.searchsorted(path.times, t, side="left"))
    return np.append(path.values[:k], evaluate(path, t))


def upcrossing_masks(values: np.ndarray, a: float, b: float, closed: bool = True):
    """Boolean masks of samples at-or-below ``a`` and at-or-above ``b``.

    ``closed`` uses ``<= a`` / ``>= b``; otherwise ``< a`` / ``> b``.  A slack
    of ``LEVEL_TOL·(b - a)`` absorbs rounding in computed levels.
    """
    eps = LEVEL_TOL * (b - a)
    if closed:
        return values <= a + eps, values >= b - eps
    return values < a - eps, values > b + eps


def alternating_events(low: np.ndarray, high: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Index pairs ``(i_k, j_k)``: first low at or after the previous high, then first high after it."""
    # The scan only reacts to the first sample of each run of lows (or highs)
    # in the merged event sequence, so it reduces to run-length compression.
    idx = np.flatnonzero(low | high)
    label = high[idx]
    first = np.ones(len(idx), dtype=bool)
    first[1:] = label[1:] != label[:-1]
    idx, label = idx[first], label[first]
    if len(label) and label[0]:
        idx, label = idx[1:], label[1:]
    starts = idx[~label]
    ends = np.full(len(starts), -1, dtype=np.int64)
    highs = idx[label]
    ends[: len(highs)] = highs
    return starts.astype(np.int64), ends


def count_upcrossings(path: SampledPath, a: float, b: float, t: Optional[float] = None, closed: bool = True) -> int:
    """Number of upcrossings of ``(a, b)`` completed by time ``t``.

    Scans the samples of the restricted interpolant (the extrema of a
    piecewise-linear path are at its samples) alternating between "waiting
    for a value <= a" and "waiting for a value >= b".
    """
    if not a < b:
        raise ValueError(f"need a < b, got a={a}, b={b}")
    values = _prefix_values(path, t)
    low, high = upcrossing_masks(values, a, b, closed)
    _, ends = alternating_events(low, high)
    return int(np.count_nonzero(ends >= 0))


def grid_upcrossing_sum(path: SampledPath, delta: float, t: Optional[float] = None, closed: bool = True) -> int:
    """Total upcrossings of all intervals ``(kδ, (k+1)δ)`` by time ``t``.

    With the closed convention this equals the number of up-steps in the walk
    of successive grid levels hit by the path.
    """
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")
    if not closed:
        return grid_upcrossing_sum_direct(path, delta, t, closed=False)
    if t is not None and t < path.T:
        if t == 0.0:
            return 0
        path = restrict(path, t)
    _, levels, start = level_walk(path.times, path.values, delta, 0.0)
    if start is not None:
        levels = np.concatenate(([start], levels))
    return int(np.count_nonzero(np.diff(levels) == 1))


def grid_upcrossing_sum_direct(path: SampledPath, delta: float, t: Optional[float] = None, closed: bool = True) -> int:
    """Same quantity as ``grid_upcrossing_sum``, summed interval by interval."""
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")
    values = _prefix_values(path, t)
    lo = int(math.floor(values.min() / delta)) - 1
    hi = int(math.ceil(values.max() / delta)) + 1
    total = 0
    for k in range(lo, hi):
        a, b = k * delta, (k + 1) * delta
        low, high = upcrossing_masks(values, a, b, closed)
        if not (low.any() and high.any()):
            continue
        _, ends = alternating_events(low, high)
        total += int(np.count_nonzero(ends >= 0))
    return total


# --------------------------------------------------------------------------
# Bruneau constant and inequality


def default_k_max(path: SampledPath, lam: float) -> int:
    """Deepest dyadic level whose mesh is still above the typical sample increment."""
    inc = np.abs(np.diff(path.values))
    inc = inc[inc > 0]
    if not len(inc) or lam <= 0:
        return 1
    return max(1, int(math.floor(math.log2(lam / float(np.median(inc))))))


def bruneau_constant(
    path: SampledPath,
    q: float,
    lam: float,
    t: Optional[float] = None,
    k_max: Optional[int] = None,
) -> BruneauReport:
    """Truncated ``sup_{1<=k<=k_max} 2^(-kq) M_t(f, lam·2^-k)`` with the per-level table."""
    if not q >= 1:
        raise ValueError(f"q must be >= 1, got {q}")
    if not lam > 0:
        raise ValueError(f"lambda must be positive, got {lam}")
    t = path.T if t is None else t
    if not 0.0 <= t <= path.T:
        raise ValueError(f"t={t} outside [0, {path.T}]")
    if k_max is None:
        k_max = default_k_max(path, lam)
    if k_max < 1:
        raise ValueError(f"k_max must be >= 1, got {k_max}")
    prefix = restrict(path, t) if t > 0 else None
    levels = []
    for k in range(1, k_max + 1):
        mesh = lam * 2.0**-k
        M = 0 if prefix is None else grid_upcrossing_sum(prefix, mesh)
        levels.append(BruneauLevel(k, mesh, M, 2.0 ** (-k * q) * M))
    return BruneauReport(q, lam, t, k_max, tuple(levels))


def bruneau_rhs(p: float, q: float, c: float, lam: float) -> float:
    return 2.0 ** (p + q + 1) / (1.0 - 2.0 ** (q - p)) * (2.0 * c + 1.0) * lam**p


def bruneau_bound_check(
    path: SampledPath,
    p: float,
    q: float,
    t: Optional[float] = None,
    k_max: Optional[int] = None,
) -> BoundCheck:
    """Evaluate both sides of the Bruneau bound on ``var_p(f, [0, t])``.

    ``lam`` is the smallest admissible value ``sup_{s<=t} |f(s) - f(0)|``.
    Truncating the sup over k only lowers the right-hand side, so ``holds``
    is a conservative check.
    """
    if not 1 <= q < p:
        raise ValueError(f"need 1 <= q < p, got p={p}, q={q}")
    t = path.T if t is None else t
    values = _prefix_values(path, t)
    lam = float(np.max(np.abs(values - values[0])))
    if lam == 0.0:
        return BoundCheck(0.0, 0.0, True)
    lhs = var_p_prefix(path, p, t)
    c = bruneau_constant(path, q, lam, t, k_max).constant
    rhs = bruneau_rhs(p, q, c, lam)
    return BoundCheck(lhs, rhs, bool(lhs <= rhs))
