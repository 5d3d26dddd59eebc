import io
import math

import numpy as np
import pytest
from scipy import stats

from betawishart.errors import InvalidArgumentError
from betawishart.montecarlo import (
    CHUNK,
    THREADS_ENV,
    empirical_cdf,
    format_float,
    ks_distance,
    quantile_grid,
    run_extreme_experiment,
    run_free_probability_experiment,
    semicircle_sample,
    thread_count,
    write_csv,
)
from betawishart.rng import RngStream
from betawishart.sampler import WishartParams

MAX_M4_N4 = WishartParams(4, 4, 2.5, [1.1, 1.2, 1.4, 1.8])
MIN_M7_N4 = WishartParams(7, 4, 0.5, [1.0, 2.0, 3.0, 4.0])


# -- empirical CDF ---------------------------------------------------------------

def test_empirical_cdf_examples():
    e = empirical_cdf([3.0, 1.0, 2.0])
    assert e(2.0) == pytest.approx(2 / 3)
    assert e(0.5) == 0.0 and e(3.0) == 1.0
    assert np.array_equal(e.sorted_samples, [1.0, 2.0, 3.0]) and e.count == 3


def test_empirical_cdf_ties_right_continuous():
    e = empirical_cdf([1.0, 2.0, 2.0, 4.0])
    assert e(2.0) == 0.75 and e.left_limit(2.0) == 0.25
    assert e(1.999999) == 0.25


def test_empirical_cdf_rejects():
    with pytest.raises(InvalidArgumentError):
        empirical_cdf([])
    with pytest.raises(InvalidArgumentError):
        empirical_cdf([1.0, np.nan])


# -- KS ----------------------------------------------------------------------------

def test_ks_self_is_zero():
    e = empirical_cdf(np.random.default_rng(0).standard_normal(500))
    assert ks_distance(e, e) == 0.0
    # a plain function carries no left limits, so each jump costs one step
    assert ks_distance(e, lambda t: e(t)) == pytest.approx(1 / e.count)


def test_ks_uniform():
    x = np.random.default_rng(1).uniform(size=10000)
    e = empirical_cdf(x)
    d = ks_distance(e, lambda t: np.clip(t, 0, 1))
    assert d <= 0.025
    assert d == pytest.approx(stats.kstest(x, "uniform").statistic, abs=1e-15)


def test_ks_shifted():
    x = np.random.default_rng(2).uniform(size=1000)
    e = empirical_cdf(x)
    delta = 0.1
    assert ks_distance(e, lambda t: np.clip(t - delta, 0, 1)) >= delta - 1 / e.count


def test_quantile_grid():
    g = quantile_grid(np.arange(1001.0))
    assert g.size == 99 and g[49] == pytest.approx(500.0)


# -- extreme experiment ------------------------------------------------------------

def test_single_point_grid():
    r = run_extreme_experiment(MIN_M7_N4, "min", 200, grid=[1.0], seed=3)
    assert r.grid.size == r.empirical.size == r.analytic.size == 1


def test_rejects():
    with pytest.raises(InvalidArgumentError):
        run_extreme_experiment(MIN_M7_N4, "middle", 10)
    with pytest.raises(InvalidArgumentError):
        run_extreme_experiment(MIN_M7_N4, "min", 0)
    with pytest.raises(InvalidArgumentError):
        run_extreme_experiment(WishartParams(4, 3, 1.5), "min", 10)
    with pytest.raises(InvalidArgumentError):
        run_extreme_experiment(MIN_M7_N4, "min", 10, grid=[])


def test_report_csv_roundtrip():
    r = run_extreme_experiment(MIN_M7_N4, "min", 500, seed=4)
    text = r.to_csv()
    lines = text.split("\n")
    assert lines[0] == ",".join(r.HEADER)
    assert len(lines) == r.grid.size + 2 and lines[-1] == ""
    assert "\r" not in text
    first = lines[1].split(",")
    assert float(first[0]) == r.grid[0]
    assert float(first[2]) == r.analytic[0]


def test_report_ks_matches_definition():
    r = run_extreme_experiment(MIN_M7_N4, "min", 2000, seed=5)
    e = empirical_cdf(r.samples)
    gap = np.maximum(np.abs(e(r.grid) - r.analytic_raw), np.abs(e.left_limit(r.grid) - r.analytic_raw))
    assert r.ks == gap.max()


def test_deterministic_across_threads(monkeypatch):
    n = 2 * CHUNK + 123
    monkeypatch.setenv(THREADS_ENV, "1")
    a = run_extreme_experiment(MIN_M7_N4, "min", n, seed=6).to_csv()
    monkeypatch.setenv(THREADS_ENV, "4")
    b = run_extreme_experiment(MIN_M7_N4, "min", n, seed=6).to_csv()
    assert a == b


def test_thread_count(monkeypatch):
    monkeypatch.setenv(THREADS_ENV, "3")
    assert thread_count() == 3
    monkeypatch.setenv(THREADS_ENV, "x")
    with pytest.raises(InvalidArgumentError):
        thread_count()


def test_lambda_min_m7_n4_ks():
    r = run_extreme_experiment(MIN_M7_N4, "min", 10000, seed=7)
    assert r.ks <= 0.02


@pytest.mark.slow
def test_ks_shrinks_with_draws():
    small = run_extreme_experiment(MAX_M4_N4, "max", 1000, seed=8)
    large = run_extreme_experiment(MAX_M4_N4, "max", 10000, seed=8)
    assert large.ks < small.ks
    assert large.ks <= 0.02


# -- semicircle ----------------------------------------------------------------------

def test_semicircle_moments():
    x = semicircle_sample(RngStream(9), 3.0, math.sqrt(2), 100000)
    assert x.min() >= 3 - math.sqrt(2) and x.max() <= 3 + math.sqrt(2)
    se = math.sqrt(0.5 / x.size)
    assert abs(x.mean() - 3.0) < 3 * se
    # variance r^2/4 = 0.5; fourth central moment r^4/8 gives its s.e.
    se_var = math.sqrt((0.5 - 0.25) / x.size)
    assert abs(x.var() - 0.5) < 3 * se_var


def test_semicircle_density():
    c, r = 1.0, 2.0
    x = semicircle_sample(np.random.default_rng(10), c, r, 20000)
    u = (x - c) / r

    def cdf(t):
        t = np.clip(t, -1, 1)
        return 0.5 + (t * np.sqrt(1 - t * t) + np.arcsin(t)) / np.pi

    assert stats.kstest(u, cdf).pvalue > 1e-3


def test_semicircle_rejects():
    with pytest.raises(InvalidArgumentError):
        semicircle_sample(RngStream(0), 3.0, 0.0)


# -- free probability -------------------------------------------------------------

def test_free_probability_small():
    r = run_free_probability_experiment(m=60, n=10, beta=3.0, draws=40, seed=11, bins=20)
    assert r.mass.sum() == pytest.approx(1.0, abs=1e-12)
    assert r.oracle_mass.sum() == pytest.approx(1.0, abs=1e-12)
    assert r.eigenvalues.shape == (40, 10)
    assert r.edges.size == 21 and r.prior == "iid semicircle diagonal"
    text = r.to_csv()
    assert text.startswith("bin_lo,bin_hi,mass,oracle_mass\n")


def test_free_probability_deterministic():
    a = run_free_probability_experiment(m=40, n=5, draws=10, seed=12, oracle=False)
    b = run_free_probability_experiment(m=40, n=5, draws=10, seed=12, oracle=False)
    assert a.to_csv() == b.to_csv()
    assert a.ks_to_oracle is None and "nan" in a.to_csv()


def test_free_probability_degenerate_prior_is_marchenko_pastur():
    m, n = 500, 50
    r = run_free_probability_experiment(m=m, n=n, beta=2.0, draws=100, center=3.0,
                                        radius=1e-9, seed=13, oracle=False)
    c = n / m
    lam = r.eigenvalues.ravel()
    assert r.moments[0] == pytest.approx(3.0, rel=5e-3)
    assert r.moments[1] == pytest.approx(9 * (1 + c), rel=1e-2)
    assert r.moments[2] == pytest.approx(27 * (1 + 3 * c + c * c), rel=2e-2)
    # support of the scaled law
    lo, hi = 3 * (1 - math.sqrt(c)) ** 2, 3 * (1 + math.sqrt(c)) ** 2
    assert lam.min() > 0.8 * lo and lam.max() < 1.1 * hi


def test_free_probability_rejects():
    with pytest.raises(InvalidArgumentError):
        run_free_probability_experiment(m=40, n=5, draws=0)
    with pytest.raises(InvalidArgumentError):
        run_free_probability_experiment(m=40, n=5, draws=2, center=1.0, radius=2.0)


# -- CSV -------------------------------------------------------------------------------

def test_float_format_roundtrip():
    for v in (0.1, 1 / 3, 1e-300, 123456789.123456789, -2.5e17):
        assert float(format_float(v)) == v


def test_write_csv(tmp_path):
    p = tmp_path / "a.csv"
    write_csv(p, ["x", "k"], [(0.1, 3), (np.float64(2.0), "s")])
    assert p.read_bytes() == b"x,k\n0.10000000000000001,3\n2,s\n"
    buf = io.StringIO()
    write_csv(buf, ["x"], [])
    assert buf.getvalue() == "x\n"
