"""End-to-end acceptance checks, one test per criterion.

Each test records a PASS/FAIL line through the ``record`` fixture; the
lines are repeated in the terminal summary.
"""

import math
import time

import numpy as np
import pytest
from scipy import integrate, stats

from betawishart.densities import DensityQuery, lambda_min_order, log_joint_eigen_density
from betawishart.hypergeom import SeriesTruncation
from betawishart.jack import jack_C, partitions_of, sphere_projection_average
from betawishart.montecarlo import run_extreme_experiment, run_free_probability_experiment
from betawishart.rng import RngStream
from betawishart.sampler import WishartParams, laguerre_bidiagonal_sample, sample_eigenvalues
from betawishart.secular import BrokenArrowMatrix, broken_arrow_svd

KS_BOUND = 0.02


def _random_broken(g, n):
    b = g.uniform(0.1, 5.0, n - 1)
    a = g.standard_normal(n)
    a[-1] = abs(a[-1])
    return BrokenArrowMatrix(b, a)


def test_criterion_01_secular_vs_dense(record):
    g = np.random.default_rng(101)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(1000):
        B = _random_broken(g, int(g.integers(2, 51)))
        s = broken_arrow_svd(B).values
        ref = np.linalg.svd(B.to_dense(), compute_uv=False)
        worst = max(worst, float(np.max(np.abs(np.sort(s)[::-1] - ref) / ref)))
    dt = time.perf_counter() - t0
    ok = worst <= 1e-10 and dt < 60
    record(1, ok, f"max relative error {worst:.2e} over 1000 matrices, {dt:.1f}s")
    assert ok


def _chart(v, n):
    f = broken_arrow_svd(BrokenArrowMatrix(v[n:], v[:n]))
    return np.concatenate([np.abs(f.q[:n - 1]), f.values])


def test_criterion_02_jacobian(record):
    # (a, b) -> (q_1..q_{n-1}, sigma); the free sphere coordinates carry the
    # chart factor 1/q_n, and a_n enters only through det B
    g = np.random.default_rng(102)
    t0 = time.perf_counter()
    worst = 0.0
    for i in range(50):
        n = 2 + i % 4
        a = g.uniform(0.5, 2.0, n)
        b = np.sort(g.uniform(0.5, 3.0, n - 1))[::-1]
        v = np.concatenate([a, b])
        h = 1e-6
        J = np.empty((2 * n - 1, 2 * n - 1))
        for j in range(2 * n - 1):
            e = np.zeros(2 * n - 1)
            e[j] = h
            J[:, j] = (_chart(v + e, n) - _chart(v - e, n)) / (2 * h)
        q = np.abs(broken_arrow_svd(BrokenArrowMatrix(b, a)).q)
        lhs = abs(np.linalg.det(J)) / q[-1]
        rhs = np.prod(q) / np.prod(a[:-1])
        worst = max(worst, abs(lhs / rhs - 1))
    dt = time.perf_counter() - t0
    ok = worst <= 1e-5 and dt < 60
    record(2, ok, f"max relative Jacobian error {worst:.2e} over 50 instances, {dt:.1f}s")
    assert ok


def test_criterion_03_jack_sum_identity(record):
    g = np.random.default_rng(103)
    t0 = time.perf_counter()
    worst = 0.0
    for beta in (0.5, 1.0, 2.0, 2.5, 4.0):
        for n in range(1, 6):
            x = g.uniform(0.1, 2.0, n)
            for k in range(7):
                total = sum(jack_C(p, beta, x) for p in partitions_of(k, n))
                worst = max(worst, abs(total / x.sum() ** k - 1))
    dt = time.perf_counter() - t0
    ok = worst <= 1e-10 and dt < 120
    record(3, ok, f"max relative error {worst:.2e}, {dt:.1f}s")
    assert ok


def test_criterion_04_sphere_average(record):
    g = np.random.default_rng(104)
    t0 = time.perf_counter()
    zs = []
    for kappa in ((2,), (2, 1)):
        for n in (3, 4):
            for beta in (1.0, 3.0):
                lam = g.uniform(0.5, 3.0, n)
                mean, se = sphere_projection_average(kappa, beta, lam, 100000,
                                                     RngStream(104, len(zs)), return_stderr=True)
                zs.append((mean - jack_C(kappa, beta, lam)) / se)
    dt = time.perf_counter() - t0
    worst = float(np.max(np.abs(zs)))
    ok = worst < 3 and dt < 300
    record(4, ok, f"max |z| {worst:.2f} over 8 cases at 1e5 draws, {dt:.1f}s")
    assert ok


def _extreme(p, which, seed):
    t0 = time.perf_counter()
    r = run_extreme_experiment(p, which, 10000, seed=seed)
    dt = time.perf_counter() - t0
    ok = r.ks <= KS_BOUND and dt < 300
    return ok, f"ks {r.ks:.4f} (bound {KS_BOUND}), {dt:.1f}s"


def test_criterion_05_lambda_max_m4_n4(record):
    ok, msg = _extreme(WishartParams(4, 4, 2.5, [1.1, 1.2, 1.4, 1.8]), "max", 5)
    record(5, ok, msg)
    assert ok


def test_criterion_06_lambda_max_m6_n4(record):
    ok, msg = _extreme(WishartParams(6, 4, 0.75), "max", 6)
    record(6, ok, msg)
    assert ok


def test_criterion_07_lambda_min(record):
    p3 = WishartParams(4, 3, 5.0, [1.1, 1.2, 1.4])
    p4 = WishartParams(7, 4, 0.5, [1.0, 2.0, 3.0, 4.0])
    t3, t4 = lambda_min_order(p3), lambda_min_order(p4)
    ok3, m3 = _extreme(p3, "min", 73)
    ok4, m4 = _extreme(p4, "min", 74)
    ok = ok3 and ok4 and (t3, t4) == (4, 0)
    record(7, ok, f"t=({t3},{t4}); m=4,n=3: {m3}; m=7,n=4: {m4}")
    assert ok


def _moment_z(x, y, k):
    u = (x ** k).mean(axis=1)
    v = (y ** k).mean(axis=1)
    return (u.mean() - v.mean()) / math.sqrt(u.var(ddof=1) / u.size + v.var(ddof=1) / v.size)


def test_criterion_08_laguerre_reduction(record):
    zs = []
    for i, beta in enumerate((0.5, 1.0, 2.5)):
        p = WishartParams(6, 4, beta)
        rec = sample_eigenvalues(RngStream(108, i), p, size=100000)
        lag = laguerre_bidiagonal_sample(RngStream(108, 10 + i), 6, 4, beta, size=100000)
        zs += [_moment_z(rec, lag, k) for k in range(1, 5)]
    worst = float(np.max(np.abs(zs)))
    ok = worst < 3
    record(8, ok, f"max |z| {worst:.2f} over 12 moment comparisons at 1e5 draws")
    assert ok


def _dense_top(g, m, D, beta, size):
    n = D.size
    if beta == 1.0:
        X = g.standard_normal((size, m, n))
    else:
        X = g.standard_normal((size, m, n)) + 1j * g.standard_normal((size, m, n))
    X = X * np.sqrt(D)
    W = np.conj(np.swapaxes(X, 1, 2)) @ X
    return np.linalg.eigvalsh(W)[:, -1]


def test_criterion_09_dense_oracle(record):
    # complex entries with unit real and imaginary variance: E|X_ij|^2 = beta D_j
    D = np.array([1.0, 2.0, 3.0])
    m = 5
    zs = []
    for beta in (1.0, 2.0):
        rec = sample_eigenvalues(RngStream(109, int(beta)), WishartParams(m, 3, beta, D),
                                 size=100000)[:, 0]
        dense = _dense_top(np.random.default_rng(1090 + int(beta)), m, D, beta, 100000)
        for k in (1, 2, 3):
            u, v = rec ** k, dense ** k
            zs.append((u.mean() - v.mean()) / math.sqrt(u.var() / u.size + v.var() / v.size))
    worst = float(np.max(np.abs(zs)))
    ok = worst < 3
    record(9, ok, f"max |z| {worst:.2f}, lambda_max moments 1-3, beta in {{1,2}}, m={m}")
    assert ok


def test_criterion_10_free_probability(record):
    t0 = time.perf_counter()
    r = run_free_probability_experiment(m=500, n=50, beta=3.0, draws=200, center=3.0,
                                        radius=math.sqrt(2.0), seed=110)
    dt = time.perf_counter() - t0
    z = (r.mean - 3.0) / r.draw_mean_stderr
    ok = abs(z) < 3 and r.ks_to_oracle <= 0.05 and dt < 600
    record(10, ok, f"mean {r.mean:.4f} (z {z:.2f}), ks to beta=1 oracle {r.ks_to_oracle:.4f}, {dt:.1f}s")
    assert ok


def _density(q):
    # f(lambda_1, ..., lambda_n), zero off the ordered cone
    def f(*lam):
        lam = np.asarray(lam)
        if lam[-1] <= 0 or np.any(np.diff(lam) >= 0):
            return 0.0
        return math.exp(log_joint_eigen_density(lam, q)[0])
    return f


def test_criterion_11_normalization(record):
    t0 = time.perf_counter()
    out = []
    # n = 1
    for m, beta, D in ((2, 1.0, 1.0), (3.5, 0.7, 2.0)):
        f = _density(DensityQuery(WishartParams(m, 1, beta, D)))
        out.append(integrate.quad(f, 0, np.inf, epsabs=1e-12, limit=200)[0])
    # n = 2 over the ordered cone, lambda_1 > lambda_2, truncated where the
    # chi-square tail of the largest scale is below 1e-13
    tq = SeriesTruncation(30, 1e-12, 400)
    for m, beta, D in ((3, 1.0, [1.0, 1.0]), (3, 1.0, [1.0, 2.5])):
        f = _density(DensityQuery(WishartParams(m, 2, beta, D), tq))
        box = max(D) * stats.chi2(m * beta).isf(1e-13)
        # outer variable lambda_2, inner lambda_1 in (lambda_2, box)
        v, _ = integrate.dblquad(lambda l1, l2: f(l1, l2), 0, box, lambda l2: l2,
                                 lambda l2: box, epsabs=1e-10, epsrel=1e-10)
        out.append(v)
    dt = time.perf_counter() - t0
    worst = max(abs(v - 1) for v in out)
    ok = worst <= 1e-6
    record(11, ok, f"integrals {', '.join(f'{v:.10f}' for v in out)}, {dt:.1f}s")
    assert ok
