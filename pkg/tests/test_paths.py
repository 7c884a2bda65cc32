import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from vexgame.paths import (
    FBM_MAX_STEPS,
    LEVEL_TOL,
    SampledPath,
    evaluate,
    fgn_autocovariance,
    generate_brownian,
    generate_deterministic,
    generate_fbm,
    grid_crossings,
    hitting_time,
    load_csv,
    load_json,
    normalize,
    restrict,
    save_csv,
    save_json,
)

from conftest import path_of


@st.composite
def random_paths(draw, min_size=2, max_size=40):
    n = draw(st.integers(min_size, max_size))
    vals = draw(st.lists(st.floats(-3, 3, allow_nan=False), min_size=n, max_size=n))
    gaps = draw(st.lists(st.floats(0.01, 2.0), min_size=n - 1, max_size=n - 1))
    times = np.concatenate(([0.0], np.cumsum(gaps)))
    return SampledPath(times, vals)


def test_rejects_bad_samples():
    with pytest.raises(ValueError):
        SampledPath([0.0], [1.0])
    with pytest.raises(ValueError):
        SampledPath([0, 1, 1], [0, 1, 2])
    with pytest.raises(ValueError):
        SampledPath([0.5, 1], [0, 1])
    with pytest.raises(ValueError):
        SampledPath([0, 1], [0, np.nan])
    with pytest.raises(ValueError):
        SampledPath([0, 1], [0, 1, 2])


def test_evaluate_examples():
    line = path_of([0, 1])
    assert evaluate(line, 0.5) == 0.5
    assert evaluate(line, 1.0) == 1.0
    tent = path_of([0, 2, 0], times=[0, 0.5, 1])
    assert evaluate(tent, 0.75) == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(ValueError):
        evaluate(line, 1.5)
    with pytest.raises(ValueError):
        evaluate(line, -0.1)


@given(random_paths())
def test_evaluate_exact_at_samples_and_linear_between(path):
    for t, x in zip(path.times, path.values):
        assert evaluate(path, t) == x
    mids = (path.times[:-1] + path.times[1:]) / 2
    expect = (path.values[:-1] + path.values[1:]) / 2
    for t, e in zip(mids, expect):
        assert evaluate(path, t) == pytest.approx(e, abs=1e-12)


def test_brownian_is_deterministic_and_rejects_zero_scale():
    a = generate_brownian(1000, seed=5)
    b = generate_brownian(1000, seed=5)
    assert np.array_equal(a.values, b.values)
    assert a.values[0] == 0.0
    assert not np.array_equal(a.values, generate_brownian(1000, seed=6).values)
    with pytest.raises(ValueError):
        generate_brownian(1000, scale=0.0)


def test_brownian_terminal_variance():
    finals = np.array([generate_brownian(2**14, 1.0, 1.0, s).values[-1] for s in range(500)])
    assert 0.8 <= finals.var(ddof=1) <= 1.2


def _lag1_corr(path):
    inc = np.diff(path.values)
    return np.corrcoef(inc[:-1], inc[1:])[0, 1]


def test_fbm_half_has_uncorrelated_increments():
    r = [_lag1_corr(generate_fbm(1024, 1.0, 0.5, s)) for s in range(500)]
    assert -0.05 <= np.mean(r) <= 0.05


def test_fbm_quarter_lag1_correlation():
    expected = 2 ** (2 * 0.25 - 1) - 1
    assert expected == pytest.approx(-0.2929, abs=1e-4)
    r = [_lag1_corr(generate_fbm(1024, 1.0, 0.25, s)) for s in range(500)]
    assert abs(np.mean(r) - expected) <= 0.05


def test_fbm_determinism_and_domain():
    a = generate_fbm(512, hurst=0.3, seed=11)
    assert np.array_equal(a.values, generate_fbm(512, hurst=0.3, seed=11).values)
    assert a.values[0] == 0.0
    for h in (0.0, 1.0, 1.5, -0.2):
        with pytest.raises(ValueError):
            generate_fbm(16, hurst=h)
    with pytest.raises(ValueError):
        generate_fbm(FBM_MAX_STEPS + 1, hurst=0.3)


@pytest.mark.parametrize("method", ["davies-harte", "hosking"])
def test_fbm_increment_covariance(method):
    # empirical covariance of the noise against the exact fGn autocovariance
    n, hurst, reps = 12, 0.3, 3000
    X = np.array([np.diff(generate_fbm(n, float(n), hurst, s, method=method).values) for s in range(reps)])
    emp = X.T @ X / reps
    gamma = fgn_autocovariance(hurst, n)
    exact = gamma[np.abs(np.subtract.outer(np.arange(n), np.arange(n)))]
    assert np.max(np.abs(emp - exact)) < 0.1


def test_fbm_scaling_with_horizon():
    # Var ω(T) = T^(2H)
    finals = np.array([generate_fbm(256, 4.0, 0.75, s).values[-1] for s in range(800)])
    assert finals.var() == pytest.approx(4.0**1.5, rel=0.15)


def test_deterministic_kinds():
    c = generate_deterministic("constant", {"level": 3.0}, 10)
    assert np.all(c.values == 3.0)
    lin = generate_deterministic("linear", {"slope": 1.0}, 10, T=1.0)
    assert np.array_equal(lin.values, lin.times)
    saw = generate_deterministic("sawtooth", {"teeth": 2, "amplitude": 1.0}, 10)
    d = np.diff(saw.values)
    signs = np.sign(d[d != 0])
    legs = 1 + np.count_nonzero(signs[1:] != signs[:-1])
    assert legs == 4
    assert np.sum(np.abs(d)) == pytest.approx(4.0, abs=1e-12)
    with pytest.raises(ValueError):
        generate_deterministic("fractal", {}, 10)
    with pytest.raises(ValueError):
        generate_deterministic("linear", {"teeth": 3}, 10)


def test_grid_crossings_examples():
    lin = generate_deterministic("linear", {}, 4)
    g = grid_crossings(lin, 0.25)
    assert g.entries == [(0.25, 0.25), (0.5, 0.5), (0.75, 0.75), (1.0, 1.0)]
    assert len(grid_crossings(generate_deterministic("constant", {}, 10), 0.1)) == 0

    g = grid_crossings(path_of([0, 0.9, -0.9]), 0.5)
    assert g.values.tolist() == [0.5, 0.0, -0.5]
    # hand interpolation: 0.5/0.9, 1 + 0.9/1.8, 1 + 1.4/1.8
    assert g.times == pytest.approx([5 / 9, 1.5, 1 + 1.4 / 1.8], abs=1e-15)


def test_touching_a_level_counts_as_a_hit():
    g = grid_crossings(path_of([0, 1, 0.5, 1, 0]), 1.0)
    # the return to 1 is not a new level; the descent to 0 is
    assert g.values.tolist() == [1.0, 0.0]
    g = grid_crossings(path_of([0, 1, 0]), 1.0)
    assert g.times.tolist() == [1.0, 2.0]


def test_grid_is_shifted_to_origin():
    g = grid_crossings(path_of([0.3, 1.3, 0.8]), 0.5)
    assert g.origin_value == 0.3
    assert g.values == pytest.approx([0.8, 1.3, 0.8])


@settings(max_examples=60)
@given(random_paths(), st.floats(0.05, 1.0))
def test_grid_crossing_invariants(path, delta):
    g = grid_crossings(path, delta)
    lv = np.concatenate(([0], g.levels))
    assert np.all(np.abs(np.diff(lv)) == 1)
    assert np.all(np.diff(g.times) >= 0)
    assert np.all(g.times <= path.T)
    # between consecutive hits the path stays inside the open band around the last level
    stamps = np.concatenate(([0.0], g.times, [path.T]))
    for n in range(len(stamps) - 1):
        level = path.values[0] + lv[n] * delta
        inside = (path.times > stamps[n]) & (path.times < stamps[n + 1])
        dev = np.abs(path.values[inside] - level)
        assert np.all(dev < delta * (1 + LEVEL_TOL))


@settings(max_examples=40)
@given(random_paths(), st.floats(0.05, 0.5))
def test_crossing_count_decreases_when_mesh_doubles(path, delta):
    assert len(grid_crossings(path, 2 * delta)) <= len(grid_crossings(path, delta)) + 1


def test_crossing_count_tracks_quadratic_variation():
    # for Brownian motion the number of δ-grid hits is about QV/δ²
    for s in range(5):
        path = generate_brownian(2**14, 1.0, 1.0, s)
        qv = np.sum(np.diff(path.values) ** 2)
        n = len(grid_crossings(path, 0.05))
        assert 0.5 <= n * 0.05**2 / qv <= 2.0


def test_hitting_time_examples():
    lin = generate_deterministic("linear", {}, 4)
    assert hitting_time(lin, 0.5) == 0.5
    assert hitting_time(generate_deterministic("constant", {}, 4), 1.0) is None
    drop = path_of([0, -2])
    assert hitting_time(drop, 1.0, "upper") is None
    assert hitting_time(drop, 1.0, "absolute") == 0.5
    assert hitting_time(drop, 1.0, "lower") == 0.5
    with pytest.raises(ValueError):
        hitting_time(lin, 0.0)


@settings(max_examples=50)
@given(random_paths(), st.floats(0.01, 2.0), st.floats(0.01, 2.0), st.sampled_from(["absolute", "upper"]))
def test_hitting_time_monotone_in_level(path, a1, a2, mode):
    lo, hi = sorted((a1, a2))
    t_lo, t_hi = hitting_time(path, lo, mode), hitting_time(path, hi, mode)
    if t_hi is not None:
        assert t_lo is not None and t_lo <= t_hi + 1e-12


def test_restrict_and_normalize():
    p = path_of([1, 2, 0])
    r = restrict(p, 1.5)
    assert r.times.tolist() == [0, 1, 1.5]
    assert r.values.tolist() == [1, 2, 1]
    assert restrict(p, 1.0).values.tolist() == [1, 2]
    n = normalize(p)
    assert n.values.tolist() == [0, 1, -1]
    assert n.meta["offset"] == 1.0


def test_json_round_trip_is_bit_exact(tmp_path):
    p = generate_fbm(300, 1.7, 0.3, 4)
    save_json(p, tmp_path / "p.json")
    q = load_json(tmp_path / "p.json")
    assert np.array_equal(p.times, q.times) and np.array_equal(p.values, q.values)
    assert q.meta == json.loads(json.dumps(p.meta))
    doc = json.loads((tmp_path / "p.json").read_text())
    assert set(doc) == {"T", "times", "values", "meta"}
    assert set(doc["meta"]) >= {"generator", "seed", "params"}


def test_csv_has_header_and_loads(tmp_path):
    p = generate_brownian(20, seed=1)
    save_csv(p, tmp_path / "p.csv")
    assert (tmp_path / "p.csv").read_text().splitlines()[0] == "t,x"
    q = load_csv(tmp_path / "p.csv")
    assert np.allclose(q.values, p.values)
