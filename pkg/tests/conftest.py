import numpy as np
import pytest

from vexgame.paths import SampledPath, generate_brownian, generate_deterministic, generate_fbm

# lines recorded by test_acceptance.py, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def path_of(values, times=None, **meta):
    values = np.asarray(values, dtype=float)
    if times is None:
        times = np.arange(len(values), dtype=float)
    return SampledPath(times, values, meta)


def hand_fixtures() -> dict[str, SampledPath]:
    return {
        "tent": path_of([0, 1, 0]),
        "zigzag": path_of([0, 1, 0.5, 1.5]),
        "kink": path_of([0, 0.9, -0.9]),
        "sawtooth3": path_of([0, 1, 0, 1]),
        "square": path_of([0, 1, 0, 1, 0]),
        "monotone": path_of([0, 1]),
        "drop": path_of([0, -2]),
        "peak": path_of([0, 2, 0], times=[0, 0.5, 1]),
        "constant": path_of([0, 0, 0]),
    }


def fixture_corpus() -> dict[str, SampledPath]:
    """Hand fixtures plus deterministic and random paths of moderate size."""
    corpus = dict(hand_fixtures())
    corpus["linear"] = generate_deterministic("linear", {"slope": 1.0}, 256)
    corpus["sine"] = generate_deterministic("sine", {"amplitude": 0.8, "cycles": 3}, 512)
    corpus["saw"] = generate_deterministic("sawtooth", {"teeth": 3, "amplitude": 0.7}, 300)
    corpus["weier"] = generate_deterministic("weierstrass", {"hurst": 0.4}, 1024)
    for s in range(4):
        corpus[f"bm{s}"] = generate_brownian(1024, 1.0, 1.0, 100 + s)
    for s in range(2):
        corpus[f"fbm25_{s}"] = generate_fbm(1024, 1.0, 0.25, 200 + s)
        corpus[f"fbm75_{s}"] = generate_fbm(1024, 1.0, 0.75, 300 + s)
    return corpus


def generated_corpus() -> dict[str, SampledPath]:
    """Everything the suite generates: fixtures plus larger random samples."""
    corpus = fixture_corpus()
    for s in range(20):
        corpus[f"bm_big{s}"] = generate_brownian(4096, 1.0, 1.0, 1000 + s)
    for h in (0.25, 0.4, 0.75):
        for s in range(8):
            corpus[f"fbm{h}_{s}"] = generate_fbm(4096, 1.0, h, 2000 + s)
    for s in range(5):
        corpus[f"bm_scaled{s}"] = generate_brownian(2048, 2.0, 3.0, 3000 + s)
    return corpus


@pytest.fixture(scope="session")
def fixtures():
    return hand_fixtures()


@pytest.fixture(scope="session")
def corpus():
    return fixture_corpus()


@pytest.fixture(scope="session")
def big_corpus():
    return generated_corpus()


@pytest.fixture(scope="session")
def linear_corpus():
    slopes = np.linspace(0.6, 1.4, 20)
    return [generate_deterministic("linear", {"slope": float(s)}, 1000) for s in slopes]


# --- non-anticipation -------------------------------------------------------

# the last partial segment of a truncated path is rebuilt by interpolation, so
# hit times inside it agree with the full run only to rounding
TIME_TOL = 1e-12


def early_trades(strategy, s):
    keep = strategy.stop_times <= s + TIME_TOL
    return strategy.stop_times[keep], strategy.portfolios[keep], strategy.prices[keep]


def same_early_trades(full, truncated, s) -> bool:
    a, b = early_trades(full, s), early_trades(truncated, s)
    if len(a[0]) != len(b[0]):
        return False
    return (
        bool(np.all(np.abs(a[0] - b[0]) <= TIME_TOL))
        and np.array_equal(a[1], b[1])
        and bool(np.all(np.abs(a[2] - b[2]) <= TIME_TOL))
    )


def truncation_times(path, count, seed):
    rng = np.random.default_rng(seed)
    return np.sort(rng.uniform(0.0, path.T, count))
