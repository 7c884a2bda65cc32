import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from vexgame.analysis import (
    BRUTEFORCE_MAX_SAMPLES,
    bruneau_bound_check,
    bruneau_constant,
    bruneau_rhs,
    count_upcrossings,
    dyadic_sums,
    grid_upcrossing_sum,
    grid_upcrossing_sum_direct,
    var_p,
    var_p_bruteforce,
    var_p_prefix,
    vex_estimate,
)
from vexgame.paths import SampledPath, generate_brownian, generate_deterministic, restrict

from conftest import hand_fixtures, path_of


@st.composite
def small_paths(draw, max_size=12, integer=False):
    n = draw(st.integers(2, max_size))
    if integer:
        vals = draw(st.lists(st.integers(-4, 4), min_size=n, max_size=n))
    else:
        vals = draw(st.lists(st.floats(-2, 2, allow_nan=False), min_size=n, max_size=n))
    return path_of([float(v) for v in vals])


def refine(path: SampledPath, where: float) -> SampledPath:
    """Insert an interpolated sample at fraction ``where`` of a random segment."""
    i = int(where * (len(path) - 1)) % (len(path) - 1)
    frac = 0.37
    t = path.times[i] + frac * (path.times[i + 1] - path.times[i])
    x = path.values[i] + frac * (path.values[i + 1] - path.values[i])
    return SampledPath(np.insert(path.times, i + 1, t), np.insert(path.values, i + 1, x))


# --- strong p-variation ---------------------------------------------------


def test_var_p_examples():
    z = path_of([0, 1, 0.5, 1.5])
    assert var_p(z, 1.0).value == pytest.approx(2.5, abs=1e-12)
    assert var_p(z, 2.0).value == pytest.approx(2.25, abs=1e-12)
    assert var_p(generate_deterministic("linear", {}, 100), 2.0).value == pytest.approx(1.0, abs=1e-12)
    assert var_p(path_of([0, 0, 0]), 0.5).value == 0.0
    r = var_p(path_of([0, 1, 0]), 0.5)
    assert r.is_infinite and r.value == math.inf
    assert r.to_dict()["value"] is None
    with pytest.raises(ValueError):
        var_p(z, 0.0)


def test_var_p_prefix_example():
    z = path_of([0, 1, 0.5, 1.5])
    # prefix values 0, 1, 0.5, 1.0
    assert var_p_prefix(z, 1.0, 2.5) == pytest.approx(2.0, abs=1e-12)
    assert var_p_prefix(z, 2.0, z.T) == var_p(z, 2.0).value
    assert var_p_prefix(path_of([0, 1]), 2.0, 0.0) == 0.0
    assert var_p_prefix(path_of([0, 1, 0]), 1.0, 1.5) == pytest.approx(1.5, abs=1e-12)


def test_maximizing_subdivision_attains_value():
    path = generate_brownian(200, seed=3)
    rep = var_p(path, 2.5)
    idx = np.array(rep.maximizing_subdivision)
    assert idx[0] == 0 and idx[-1] == len(path) - 1
    s = np.sum(np.abs(np.diff(path.values[idx])) ** 2.5)
    assert s == pytest.approx(rep.value, rel=1e-12)


@pytest.mark.parametrize("name", sorted(hand_fixtures()))
@pytest.mark.parametrize("p", [1.0, 1.5, 2.0, 3.0, 4.5])
def test_oracle_on_hand_fixtures(name, p):
    path = hand_fixtures()[name]
    assert abs(var_p(path, p).value - var_p_bruteforce(path, p)) <= 1e-9


@settings(max_examples=150, deadline=None)
@given(small_paths(), st.floats(1.0, 5.0))
def test_oracle_equivalence(path, p):
    assert abs(var_p(path, p).value - var_p_bruteforce(path, p)) <= 1e-9


@settings(max_examples=60, deadline=None)
@given(small_paths(integer=True), st.sampled_from([1.0, 2.0, 3.0]))
def test_oracle_equivalence_with_ties(path, p):
    # integer levels create flat runs and repeated extrema
    assert abs(var_p(path, p).value - var_p_bruteforce(path, p)) <= 1e-9


def test_bruteforce_refuses_large_inputs():
    with pytest.raises(ValueError):
        var_p_bruteforce(generate_brownian(BRUTEFORCE_MAX_SAMPLES + 5), 2.0)


@settings(max_examples=80, deadline=None)
@given(small_paths(max_size=30), st.floats(1.0, 5.0), st.floats(0, 1))
def test_refinement_invariance(path, p, where):
    a = var_p(path, p).value
    b = var_p(refine(path, where), p).value
    assert b == pytest.approx(a, rel=1e-9, abs=1e-12)


@settings(max_examples=80, deadline=None)
@given(small_paths(max_size=30), st.floats(1.0, 3.0), st.floats(0.01, 2.0))
def test_monotone_in_p_after_rescaling(path, p, dp):
    assume(not path.is_constant())
    # with the oscillation below 1 every subdivision increment is below 1,
    # so each sum, and hence the sup, can only shrink as p grows
    scale = 0.99 / np.ptp(path.values)
    small = SampledPath(path.times, path.values * scale)
    assert var_p(small, p + dp).value <= var_p(small, p).value + 1e-12


@settings(max_examples=40)
@given(small_paths(), st.floats(0.05, 0.95))
def test_sub_unit_p_is_infinite(path, p):
    v = var_p(path, p).value
    assert (v == 0.0) if path.is_constant() else math.isinf(v)


# --- variation exponent ---------------------------------------------------


def test_dyadic_sums_shape_and_coarsest_level():
    path = generate_brownian(64, seed=1)
    V = dyadic_sums(path, [1.0, 2.0], 6)
    assert V.shape == (2, 7)
    assert V[1, 0] == pytest.approx(path.values[-1] ** 2)
    assert V[1, 6] == pytest.approx(np.sum(np.diff(path.values) ** 2))


def test_vex_examples():
    assert vex_estimate(generate_deterministic("constant", {}, 1024)) == 0.0
    assert vex_estimate(generate_deterministic("linear", {}, 1024)) <= 1.1
    with pytest.raises(ValueError):
        vex_estimate(generate_brownian(100), levels=10)


def test_vex_never_below_one_on_rough_or_smooth_paths(corpus):
    for name, path in corpus.items():
        if len(path) < 8:
            continue
        v = vex_estimate(path)
        assert v == 0.0 or v >= 1.0, name


# --- upcrossings ----------------------------------------------------------


def test_upcrossing_examples():
    square = path_of([0, 1, 0, 1, 0])
    assert count_upcrossings(square, 0.0, 1.0) == 2
    assert count_upcrossings(square, 0.0, 1.0, closed=False) == 0
    assert count_upcrossings(square, 0.0, 1.0, t=1.5) == 1
    assert count_upcrossings(path_of([0, 2]), 0.5, 1.5) == 1
    assert count_upcrossings(path_of([1, 0]), 0.2, 0.8) == 0
    with pytest.raises(ValueError):
        count_upcrossings(square, 1.0, 1.0)


@settings(max_examples=80)
@given(small_paths(max_size=30), st.floats(-2, 2), st.floats(0.01, 2), st.floats(0.01, 2))
def test_upcrossings_nonincreasing_in_b(path, a, w1, w2):
    lo, hi = sorted((w1, w2))
    assert count_upcrossings(path, a, a + hi) <= count_upcrossings(path, a, a + lo)


@settings(max_examples=80)
@given(small_paths(max_size=30), st.floats(-2, 2), st.floats(0.01, 2), st.floats(0, 1), st.floats(0, 1))
def test_upcrossings_nondecreasing_in_t(path, a, w, f1, f2):
    t1, t2 = sorted((f1 * path.T, f2 * path.T))
    assert count_upcrossings(path, a, a + w, t1) <= count_upcrossings(path, a, a + w, t2)


@settings(max_examples=80)
@given(small_paths(max_size=30), st.floats(-2, 2), st.floats(0.01, 2), st.floats(0, 1))
def test_upcrossings_refinement_invariant(path, a, w, where):
    assert count_upcrossings(refine(path, where), a, a + w) == count_upcrossings(path, a, a + w)


@settings(max_examples=100, deadline=None)
@given(small_paths(max_size=30), st.floats(0.05, 1.5), st.floats(0, 1))
def test_grid_sum_walk_matches_direct(path, delta, frac):
    t = frac * path.T
    assert grid_upcrossing_sum(path, delta, t) == grid_upcrossing_sum_direct(path, delta, t)


@settings(max_examples=60, deadline=None)
@given(small_paths(max_size=20, integer=True), st.sampled_from([0.5, 1.0, 2.0]))
def test_grid_sum_walk_matches_direct_on_grid_values(path, delta):
    # samples sitting exactly on grid levels are the delicate case
    assert grid_upcrossing_sum(path, delta) == grid_upcrossing_sum_direct(path, delta)


def test_grid_sum_walk_matches_direct_on_brownian():
    for s in range(5):
        path = generate_brownian(2000, seed=s)
        for delta in (0.3, 0.1, 0.03):
            assert grid_upcrossing_sum(path, delta) == grid_upcrossing_sum_direct(path, delta)


# --- Bruneau --------------------------------------------------------------


def test_bruneau_linear_example():
    rep = bruneau_constant(generate_deterministic("linear", {}, 16), 2.0, 1.0, k_max=4)
    # M(f, 2^-k) = 2^k upward steps, weighted 2^-2k · 2^k
    assert [lv.M for lv in rep.per_level] == [2, 4, 8, 16]
    assert rep.constant == pytest.approx(0.5)
    assert rep.argmax_level == 1


def test_bruneau_tent_by_hand():
    tent = path_of([0, 1, 0])
    rep = bruneau_constant(tent, 2.0, 1.0, k_max=3)
    # mesh 1/2: one upcrossing of each of (0,.5) and (.5,1) -> M=2, weighted 2/4
    assert rep.rows()[0] == (1, 0.5, 2, 0.5)
    assert rep.constant == pytest.approx(0.5)
    check = bruneau_bound_check(tent, 3.0, 2.0, k_max=3)
    assert check.lhs == pytest.approx(2.0)
    assert check.rhs == pytest.approx(2**6 / 0.5 * 2.0)
    assert check.rhs >= 64 and check.holds


def test_bruneau_degenerate_and_domain():
    assert bruneau_bound_check(path_of([0, 0, 0]), 3.0, 2.0) == (0.0, 0.0, True)
    with pytest.raises(ValueError):
        bruneau_bound_check(path_of([0, 1]), 2.0, 2.0)
    with pytest.raises(ValueError):
        bruneau_constant(path_of([0, 1]), 2.0, 0.0)
    assert bruneau_rhs(3, 2, 0, 1) == pytest.approx(128.0)


@pytest.mark.parametrize("pq", [(3.0, 2.0), (4.0, 2.5)])
def test_bruneau_holds_on_brownian(pq):
    for s in range(3):
        path = generate_brownian(4096, seed=s)
        assert bruneau_bound_check(path, *pq, k_max=12).holds


@settings(max_examples=60, deadline=None)
@given(small_paths(max_size=25), st.sampled_from([(3.0, 2.0), (4.0, 2.5), (2.0, 1.0)]), st.floats(0.05, 1))
def test_bruneau_holds_on_arbitrary_paths(path, pq, frac):
    assert bruneau_bound_check(path, *pq, t=frac * path.T).holds


def test_bruneau_prefix_matches_restricted_path():
    path = generate_brownian(1000, seed=9)
    a = bruneau_constant(path, 2.5, 0.7, t=0.4, k_max=6)
    b = bruneau_constant(restrict(path, 0.4), 2.5, 0.7, k_max=6)
    assert a.rows() == b.rows()
