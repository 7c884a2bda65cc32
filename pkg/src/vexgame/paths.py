"""Sampled continuous paths: construction, generators, grid crossings and I/O.

A ``SampledPath`` stands for the piecewise-linear interpolant of its samples.
Everything downstream (variation, upcrossings, trading) is computed on that
interpolant, never on the raw samples alone.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

# Tolerance (in units of the grid mesh) within which a sample counts as lying
# on a grid level.  Shared by every level comparison in the package.
LEVEL_TOL = 1e-9

# Hard cap for the exact-covariance fBm generator.
FBM_MAX_STEPS = 2**16

DETERMINISTIC_KINDS = ("constant", "linear", "sine", "sawtooth", "weierstrass")


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class SampledPath:
    """Continuous path on ``[0, T]`` given by samples and linear interpolation."""

    times: np.ndarray
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        times = _frozen(self.times)
        values = _frozen(self.values)
        if times.ndim != 1 or values.ndim != 1:
            raise ValueError("times and values must be one-dimensional")
        if len(times) != len(values):
            raise ValueError("times and values must have the same length")
        if len(times) < 2:
            raise ValueError("a path needs at least two samples")
        if times[0] != 0.0:
            raise ValueError("times must start at 0")
        if not np.all(np.diff(times) > 0):
            raise ValueError("times must be strictly increasing")
        if not (np.all(np.isfinite(values)) and np.all(np.isfinite(times))):
            raise ValueError("times and values must be finite")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    @property
    def T(self) -> float:
        return float(self.times[-1])

    def __len__(self) -> int:
        return len(self.times)

    def is_constant(self) -> bool:
        return bool(np.all(self.values == self.values[0]))

    def sup_abs(self) -> float:
        """``sup |ω(t)|``; attained at a sample since the path is piecewise linear."""
        return float(np.max(np.abs(self.values)))

    def to_dict(self) -> dict:
        return {
            "T": self.T,
            "times": self.times.tolist(),
            "values": self.values.tolist(),
            "meta": self.meta,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SampledPath":
        path = cls(d["times"], d["values"], dict(d.get("meta", {})))
        if "T" in d and float(d["T"]) != path.T:
            raise ValueError(f"T={d['T']} does not match last time {path.T}")
        return path


@dataclass(frozen=True, eq=False)
class GridCrossingSequence:
    """Realized grid-hitting times ``τ_1 < τ_2 < ...`` with snapped levels.

    ``levels[n]`` is the integer grid index of the n-th hit, so the snapped
    value is ``origin_value + levels[n] * delta`` exactly as recorded.
    """

    delta: float
    origin_value: float
    times: np.ndarray
    levels: np.ndarray

    @property
    def values(self) -> np.ndarray:
        return self.origin_value + self.levels * self.delta

    @property
    def entries(self) -> list[tuple[float, float]]:
        return list(zip(self.times.tolist(), self.values.tolist()))

    def __len__(self) -> int:
        return len(self.times)


# --------------------------------------------------------------------------
# evaluation and restriction


def evaluate(path: SampledPath, t: float) -> float:
    """Value of the interpolant at ``t``."""
    if not 0.0 <= t <= path.T:
        raise ValueError(f"t={t} outside [0, {path.T}]")
    return float(np.interp(t, path.times, path.values))


def restrict(path: SampledPath, t: float, endpoint: Optional[float] = None) -> SampledPath:
    """The path on ``[0, t]``: samples before ``t`` plus the point ``(t, ω(t))``.

    ``endpoint`` overrides ``ω(t)``; callers use it when the value at ``t`` is
    known exactly (e.g. a hitting time of a known level).
    """
    if not 0.0 < t <= path.T:
        raise ValueError(f"t={t} outside (0, {path.T}]")
    if t == path.T and endpoint is None:
        return path
    value = evaluate(path, t) if endpoint is None else float(endpoint)
    k = int(np.searchsorted(path.times, t, side="left"))
    times = np.append(path.times[:k], t)
    values = np.append(path.values[:k], value)
    return SampledPath(times, values, {**path.meta, "restricted_to": t})


def normalize(path: SampledPath) -> SampledPath:
    """Shift the path so that ``ω(0) = 0``; the removed offset goes to ``meta``."""
    offset = float(path.values[0])
    if offset == 0.0:
        return path
    meta = {**path.meta, "offset": offset + path.meta.get("offset", 0.0)}
    return SampledPath(path.times, path.values - offset, meta)


# --------------------------------------------------------------------------
# generators


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def _check_steps(n_steps: int, T: float):
    if int(n_steps) != n_steps or n_steps < 1:
        raise ValueError(f"n_steps must be a positive integer, got {n_steps}")
    if not T > 0:
        raise ValueError(f"T must be positive, got {T}")


def generate_brownian(n_steps: int, T: float = 1.0, scale: float = 1.0, seed: int = 0) -> SampledPath:
    """Brownian path: cumulative sum of N(0, scale² T/n_steps) increments."""
    _check_steps(n_steps, T)
    if not scale > 0:
        raise ValueError(f"scale must be positive, got {scale}")
    rng = _rng(seed)
    inc = rng.standard_normal(n_steps) * (scale * math.sqrt(T / n_steps))
    values = np.concatenate(([0.0], np.cumsum(inc)))
    times = np.linspace(0.0, T, n_steps + 1)
    meta = {"generator": "brownian", "seed": seed, "params": {"n_steps": n_steps, "T": T, "scale": scale}}
    return SampledPath(times, values, meta)


def fgn_autocovariance(hurst: float, n: int) -> np.ndarray:
    """Autocovariance of unit-variance fractional Gaussian noise at lags 0..n-1."""
    k = np.arange(n, dtype=float)
    h2 = 2.0 * hurst
    return 0.5 * (np.abs(k + 1) ** h2 + np.abs(k - 1) ** h2 - 2.0 * k**h2)


def _fgn_davies_harte(n: int, hurst: float, rng: np.random.Generator) -> np.ndarray:
    gamma = fgn_autocovariance(hurst, n + 1)
    row = np.concatenate((gamma[: n + 1], gamma[n - 1 : 0 : -1]))
    eig = np.fft.fft(row).real
    if np.any(eig < -1e-10):
        raise ArithmeticError("circulant embedding is not nonnegative definite")
    eig = np.clip(eig, 0.0, None)
    m = len(row)
    z = rng.standard_normal(m) + 1j * rng.standard_normal(m)
    y = np.fft.fft(np.sqrt(eig / m) * z)
    return y.real[:n]


def _fgn_hosking(n: int, hurst: float, rng: np.random.Generator) -> np.ndarray:
    # Durbin-Levinson recursion on the fGn autocovariance.
    gamma = fgn_autocovariance(hurst, n)
    z = rng.standard_normal(n)
    x = np.empty(n)
    x[0] = z[0]
    phi = np.zeros(0)
    v = 1.0
    for k in range(1, n):
        if k == 1:
            phi_kk = gamma[1]
        else:
            phi_kk = (gamma[k] - phi @ gamma[k - 1 : 0 : -1]) / v
        phi = np.append(phi - phi_kk * phi[::-1], phi_kk)
        v *= 1.0 - phi_kk * phi_kk
        x[k] = phi @ x[k - 1 :: -1] + math.sqrt(v) * z[k]
    return x


def generate_fbm(
    n_steps: int,
    T: float = 1.0,
    hurst: float = 0.5,
    seed: int = 0,
    method: str = "davies-harte",
) -> SampledPath:
    """Fractional Brownian motion sampled on a uniform grid of ``n_steps`` steps.

    Both methods are exact in distribution.  ``davies-harte`` (circulant
    embedding) is O(n log n); ``hosking`` is the O(n²) Durbin-Levinson
    recursion, kept as an independent cross-check.  ``n_steps`` is capped at
    ``FBM_MAX_STEPS``.
    """
    _check_steps(n_steps, T)
    if not 0.0 < hurst < 1.0:
        raise ValueError(f"hurst must lie in (0, 1), got {hurst}")
    if n_steps > FBM_MAX_STEPS:
        raise ValueError(f"n_steps={n_steps} exceeds the cap {FBM_MAX_STEPS}")
    rng = _rng(seed)
    if method == "davies-harte":
        noise = _fgn_davies_harte(n_steps, hurst, rng)
    elif method == "hosking":
        noise = _fgn_hosking(n_steps, hurst, rng)
    else:
        raise ValueError(f"unknown fBm method {method!r}")
    noise = noise * (T / n_steps) ** hurst
    values = np.concatenate(([0.0], np.cumsum(noise)))
    times = np.linspace(0.0, T, n_steps + 1)
    meta = {
        "generator": "fbm",
        "seed": seed,
        "params": {"n_steps": n_steps, "T": T, "hurst": hurst, "method": method},
    }
    return SampledPath(times, values, meta)


_DETERMINISTIC_DEFAULTS = {
    "constant": {"level": 0.0},
    "linear": {"slope": 1.0, "intercept": 0.0},
    "sine": {"amplitude": 1.0, "cycles": 1.0},
    "sawtooth": {"teeth": 1, "amplitude": 1.0},
    "weierstrass": {"hurst": 0.5, "base": 2, "terms": None},
}


def generate_deterministic(kind: str, params: Optional[dict] = None, n_steps: int = 1024, T: float = 1.0) -> SampledPath:
    """Closed-form test paths.

    ``sawtooth`` is a triangle wave 0 → amplitude → 0 repeated ``teeth`` times;
    its vertices are always included among the samples.  ``weierstrass`` is
    ``Σ_k base^(-k·hurst) cos(2π base^k t / T)`` shifted to start at 0, whose
    variation exponent is ``1/hurst`` at scales above the sampling mesh.
    """
    if kind not in _DETERMINISTIC_DEFAULTS:
        raise ValueError(f"unknown path kind {kind!r}; expected one of {DETERMINISTIC_KINDS}")
    params = dict(params or {})
    unknown = set(params) - set(_DETERMINISTIC_DEFAULTS[kind])
    if unknown:
        raise ValueError(f"unknown parameters for {kind}: {sorted(unknown)}")
    _check_steps(n_steps, T)
    p = {**_DETERMINISTIC_DEFAULTS[kind], **params}
    times = np.linspace(0.0, T, n_steps + 1)

    if kind == "constant":
        values = np.full_like(times, float(p["level"]))
    elif kind == "linear":
        values = p["intercept"] + p["slope"] * times
    elif kind == "sine":
        values = p["amplitude"] * np.sin(2.0 * np.pi * p["cycles"] * times / T)
    elif kind == "sawtooth":
        teeth = int(p["teeth"])
        if teeth < 1:
            raise ValueError("sawtooth needs at least one tooth")
        vertices = np.linspace(0.0, T, 2 * teeth + 1)
        times = np.union1d(times, vertices)
        leg = T / (2 * teeth)
        phase = times / leg
        k = np.minimum(np.floor(phase), 2 * teeth - 1)
        frac = phase - k
        # exact 0/amplitude at vertices
        up = (k % 2) == 0
        values = p["amplitude"] * np.where(up, frac, 1.0 - frac)
        on_vertex = np.isin(times, vertices)
        values[on_vertex] = p["amplitude"] * (np.round(phase[on_vertex]) % 2)
    else:
        hurst = float(p["hurst"])
        base = int(p["base"])
        if not 0.0 < hurst < 1.0 or base < 2:
            raise ValueError("weierstrass needs 0 < hurst < 1 and integer base >= 2")
        terms = p["terms"]
        if terms is None:
            terms = max(1, int(math.ceil(math.log(n_steps) / math.log(base))))
        values = np.zeros_like(times)
        for k in range(int(terms) + 1):
            values += base ** (-k * hurst) * np.cos(2.0 * np.pi * base**k * times / T)
        values -= values[0]

    meta = {"generator": kind, "seed": None, "params": {"n_steps": n_steps, "T": T, **p}}
    return SampledPath(times, values, meta)


# --------------------------------------------------------------------------
# grid crossings and hitting times


def _snap(u: np.ndarray) -> np.ndarray:
    r = np.rint(u)
    return np.where(np.abs(u - r) <= LEVEL_TOL, r, u)


def level_walk(times, values, delta: float, offset: float = 0.0):
    """Successive hits of new levels of the grid ``offset + delta·Z``.

    Returns ``(hit_times, hit_levels, start_level)`` where ``hit_levels`` are
    integer grid indices and ``start_level`` is the index of ``ω(0)`` if it lies
    on the grid (else ``None``).  A hit is recorded each time the interpolant
    reaches a grid level other than the last recorded one; touching a level
    without crossing it counts.
    """
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")
    times = np.asarray(times, dtype=float)
    u = _snap((np.asarray(values, dtype=float) - offset) / delta)
    u0, u1 = u[:-1], u[1:]
    t0, t1 = times[:-1], times[1:]
    up = u1 > u0
    down = u1 < u0
    count = np.zeros(len(u0), dtype=np.int64)
    first = np.zeros(len(u0), dtype=np.int64)
    step = np.zeros(len(u0), dtype=np.int64)
    count[up] = (np.floor(u1[up]) - np.floor(u0[up])).astype(np.int64)
    first[up] = np.floor(u0[up]).astype(np.int64) + 1
    step[up] = 1
    count[down] = (np.ceil(u0[down]) - np.ceil(u1[down])).astype(np.int64)
    first[down] = np.ceil(u0[down]).astype(np.int64) - 1
    step[down] = -1

    seg = np.repeat(np.arange(len(u0)), count)
    offsets = np.arange(len(seg)) - np.repeat(np.cumsum(count) - count, count)
    levels = first[seg] + step[seg] * offsets
    frac = (levels - u0[seg]) / (u1[seg] - u0[seg])
    hit_t = t0[seg] + frac * (t1[seg] - t0[seg])
    at_end = levels == u1[seg]
    hit_t[at_end] = t1[seg][at_end]
    hit_t = np.clip(hit_t, t0[seg], t1[seg])

    start_level = int(u[0]) if u[0] == np.rint(u[0]) else None
    prev = np.empty_like(levels)
    if len(levels):
        prev[0] = start_level if start_level is not None else levels[0] + 1
        prev[1:] = levels[:-1]
    keep = levels != prev
    if len(levels) and start_level is None:
        keep[0] = True
    return hit_t[keep], levels[keep], start_level


def grid_crossings(path: SampledPath, delta: float) -> GridCrossingSequence:
    """Stopping times at which the path reaches a new level of ``ω(0) + delta·Z``."""
    origin = float(path.values[0])
    hit_t, levels, _ = level_walk(path.times, path.values, delta, origin)
    return GridCrossingSequence(float(delta), origin, _frozen(hit_t), levels)


def hitting_time(path: SampledPath, A: float, mode: str = "absolute") -> Optional[float]:
    """First time the interpolant reaches ``|ω| >= A`` (``absolute``), ``ω >= A`` (``upper``) or ``ω <= -A`` (``lower``)."""
    if not A > 0:
        raise ValueError(f"level A must be positive, got {A}")
    if mode == "absolute":
        targets = (A, -A)
    elif mode == "upper":
        targets = (A,)
    elif mode == "lower":
        targets = (-A,)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    best = None
    for level in targets:
        # signed distance, nonnegative once the threshold is reached
        d = path.values - level if level > 0 else level - path.values
        hits = np.flatnonzero(d >= 0.0)
        if not len(hits):
            continue
        j = int(hits[0])
        if j == 0:
            return 0.0
        t0, t1 = path.times[j - 1], path.times[j]
        t = float(t1) if d[j] == 0.0 else float(t0 + d[j - 1] / (d[j - 1] - d[j]) * (t1 - t0))
        best = t if best is None else min(best, t)
    return best


# --------------------------------------------------------------------------
# serialization


def save_json(path: SampledPath, file) -> None:
    Path(file).write_text(json.dumps(path.to_dict()))


def load_json(file) -> SampledPath:
    return SampledPath.from_dict(json.loads(Path(file).read_text()))


def save_csv(path: SampledPath, file) -> None:
    with open(file, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "x"])
        for t, x in zip(path.times.tolist(), path.values.tolist()):
            w.writerow([repr(t), repr(x)])


def load_csv(file) -> SampledPath:
    with open(file, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != ["t", "x"]:
        raise ValueError(f"{file}: expected header 't,x'")
    data = np.array(rows[1:], dtype=float)
    return SampledPath(data[:, 0], data[:, 1])


def load_path(file) -> SampledPath:
    file = Path(file)
    if file.suffix == ".csv":
        return load_csv(file)
    return load_json(file)
