import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from betawishart.errors import InvalidArgumentError
from betawishart.rng import RngStream
from betawishart.sampler import (
    WishartParams,
    chi_sample,
    laguerre_bidiagonal_sample,
    recursive_singular_values,
    sample_eigenvalues,
    sample_singular_values,
)
from betawishart.secular import WorkspaceTrace

# mpmath, 30 digits: sqrt(2) Gamma((k+1)/2) / Gamma(k/2)
CHI6_MEAN = 2.34996400746656297
CHI2_MEAN = 1.25331413731550025
CHI6_VAR = 0.477669163611691573


# -- streams ------------------------------------------------------------------

def test_stream_determinism():
    a = RngStream(7, 3).generator.standard_normal(5)
    b = RngStream(7, 3).generator.standard_normal(5)
    c = RngStream(7, 4).generator.standard_normal(5)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


@pytest.mark.parametrize("bad", [-1, 2 ** 64, 1.5, True, "3"])
def test_stream_rejects(bad):
    with pytest.raises(InvalidArgumentError):
        RngStream(bad)


def test_spawn():
    s = RngStream(11).spawn(2)
    assert (s.seed, s.stream_id) == (11, 2)


# -- chi -----------------------------------------------------------------------

def test_chi_mean_and_variance():
    x = chi_sample(RngStream(1), 6, 200000)
    se = np.sqrt(CHI6_VAR / x.size)
    assert abs(x.mean() - CHI6_MEAN) < 4 * se
    assert x.var() == pytest.approx(CHI6_VAR, rel=0.02)
    y = chi_sample(RngStream(2), 2, 200000)
    assert abs(y.mean() - CHI2_MEAN) < 4 * np.sqrt((2 - CHI2_MEAN ** 2) / y.size)


@pytest.mark.parametrize("dof", [0.5, 1.0, 3.7, 40.0])
def test_chi_ks(dof):
    x = chi_sample(RngStream(3), dof, 20000)
    assert stats.kstest(x, stats.chi(dof).cdf).pvalue > 1e-3


@pytest.mark.parametrize("dof", [0.0, -1.0, np.nan, np.inf])
def test_chi_rejects(dof):
    with pytest.raises(InvalidArgumentError):
        chi_sample(RngStream(0), dof)


def test_chi_rejects_rng():
    with pytest.raises(InvalidArgumentError):
        chi_sample(12, 2.0)


# -- parameters -------------------------------------------------------------------

def test_params_broadcast_and_freeze():
    p = WishartParams(5, 3, 2, 2.5)
    assert np.array_equal(p.D, [2.5, 2.5, 2.5])
    with pytest.raises(ValueError):
        p.D[0] = 1.0
    assert np.array_equal(WishartParams(5, 3, 2).D, np.ones(3))


@pytest.mark.parametrize("kw", [
    dict(m=2, n=3, beta=1),
    dict(m=5, n=0, beta=1),
    dict(m=5, n=2.5, beta=1),
    dict(m=5, n=3, beta=0),
    dict(m=5, n=3, beta=1, D=[1, 2]),
    dict(m=5, n=3, beta=1, D=[1, -2, 3]),
    dict(m=np.inf, n=3, beta=1),
])
def test_params_reject(kw):
    with pytest.raises(InvalidArgumentError):
        WishartParams(**kw)


def test_params_message():
    with pytest.raises(InvalidArgumentError, match="m must exceed n-1"):
        WishartParams(1.5, 3, 1.0)


def test_fractional_m_allowed():
    s = sample_singular_values(RngStream(0), WishartParams(2.5, 3, 0.7), size=4)
    assert s.shape == (4, 3) and np.all(s > 0)


# -- recursive sampler ----------------------------------------------------------

def test_deterministic_given_seed():
    p = WishartParams(7, 4, 1.5, [1, 2, 3, 4])
    a = sample_eigenvalues(RngStream(99), p, size=10)
    b = sample_eigenvalues(RngStream(99), p, size=10)
    assert np.array_equal(a, b)


def test_shapes_and_order():
    p = WishartParams(6, 4, 2.0, [0.5, 1, 2, 4])
    one = sample_eigenvalues(RngStream(0), p)
    many = sample_eigenvalues(RngStream(0), p, size=50)
    assert one.shape == (4,) and many.shape == (50, 4)
    assert np.all(np.diff(many, axis=1) <= 0)
    assert np.all(many > 0)


def test_n_equal_one_is_scaled_chi():
    p = WishartParams(3, 1, 2.0, 1.0)
    s = sample_singular_values(RngStream(4), p, size=100000)[:, 0]
    assert abs(s.mean() - CHI6_MEAN) < 4 * np.sqrt(CHI6_VAR / s.size)
    p2 = WishartParams(3, 1, 2.0, 4.0)
    s2 = sample_singular_values(RngStream(4), p2, size=10)[:, 0]
    assert np.allclose(s2, 2.0 * sample_singular_values(RngStream(4), p, size=10)[:, 0])


def test_covariance_scaling_exact():
    p = WishartParams(6, 3, 1.3, [1, 2, 3])
    q = WishartParams(6, 3, 1.3, [4, 8, 12])
    a = sample_eigenvalues(RngStream(5), p, size=20)
    b = sample_eigenvalues(RngStream(5), q, size=20)
    assert np.allclose(b, 4 * a, rtol=1e-13)


def test_trace_expectation():
    # E trace W = m beta trace D
    p = WishartParams(5, 3, 1.7, [1, 2, 3])
    lam = sample_eigenvalues(RngStream(6), p, size=40000)
    tr = lam.sum(axis=1)
    assert abs(tr.mean() - 5 * 1.7 * 6) < 4 * tr.std() / np.sqrt(tr.size)


@pytest.mark.parametrize("beta", [0.5, 1.0, 2.0, 4.0])
def test_matches_laguerre_model(beta):
    p = WishartParams(6, 4, beta)
    rec = sample_eigenvalues(RngStream(7), p, size=20000)
    lag = laguerre_bidiagonal_sample(RngStream(8), 6, 4, beta, size=20000)
    for col in (0, 3):
        assert stats.ks_2samp(rec[:, col], lag[:, col]).pvalue > 1e-3
    # first two moments of the spectrum
    for k in (1, 2):
        r = (rec ** k).sum(axis=1)
        l = (lag ** k).sum(axis=1)
        se = np.sqrt(r.var() / r.size + l.var() / l.size)
        assert abs(r.mean() - l.mean()) < 4 * se


def test_real_dense_oracle():
    D = np.array([1.0, 2.0, 3.0])
    p = WishartParams(5, 3, 1.0, D)
    rec = sample_eigenvalues(RngStream(9), p, size=20000)
    g = np.random.default_rng(10)
    X = g.standard_normal((20000, 5, 3)) * np.sqrt(D)
    dense = np.linalg.eigvalsh(np.swapaxes(X, 1, 2) @ X)[:, ::-1]
    for col in range(3):
        assert stats.ks_2samp(rec[:, col], dense[:, col]).pvalue > 1e-3


def test_complex_dense_oracle():
    D = np.array([1.0, 3.0])
    p = WishartParams(2, 2, 2.0, D)
    rec = sample_eigenvalues(RngStream(11), p, size=20000)
    g = np.random.default_rng(12)
    X = (g.standard_normal((20000, 2, 2)) + 1j * g.standard_normal((20000, 2, 2))) / np.sqrt(2)
    X = X * np.sqrt(2 * D)  # entries of variance beta D_j
    dense = np.linalg.eigvalsh(np.conj(np.swapaxes(X, 1, 2)) @ X)[:, ::-1]
    for col in range(2):
        assert stats.ks_2samp(rec[:, col], dense[:, col]).pvalue > 1e-3


def test_workspace_linear_in_n():
    peaks = []
    for n in (10, 20, 40):
        tr = WorkspaceTrace()
        sample_singular_values(RngStream(0), WishartParams(n + 5, n, 1.0), trace=tr)
        peaks.append(tr.peak_floats_per_draw)
    assert peaks[2] <= 7 * 40 + 4
    assert peaks[1] / peaks[0] == pytest.approx(2, rel=0.15)
    assert peaks[2] / peaks[1] == pytest.approx(2, rel=0.15)


def test_per_draw_covariance():
    root = np.sqrt(np.array([[1.0, 2.0, 3.0], [4.0, 8.0, 12.0]]))
    s = recursive_singular_values(np.random.default_rng(0), 5.0, 1.0, root)
    assert s.shape == (2, 3) and np.all(s > 0)


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 8), st.floats(0.2, 5.0), st.integers(0, 2 ** 32 - 1))
def test_sample_valid(n, beta, seed):
    g = np.random.default_rng(seed)
    D = g.uniform(0.1, 5.0, n)
    p = WishartParams(n + g.uniform(0, 4), n, beta, D)
    s = sample_singular_values(RngStream(seed), p, size=5)
    assert np.all(np.isfinite(s)) and np.all(s > 0)
    assert np.all(np.diff(s, axis=1) <= 0)


def test_laguerre_shape_and_validation():
    assert laguerre_bidiagonal_sample(RngStream(0), 5, 3, 1.0).shape == (3,)
    with pytest.raises(InvalidArgumentError):
        laguerre_bidiagonal_sample(RngStream(0), 1, 3, 1.0)
