"""Monte Carlo harness: empirical CDFs, Kolmogorov-Smirnov distances,
extreme-eigenvalue experiments against the analytic CDFs, and the
free-probability experiment with a semicircle covariance prior.

Draws are split into fixed-size chunks, chunk ``i`` using stream id ``i``
of the experiment seed.  Chunks may run on several threads (set
``BETAWISHART_THREADS``); results are combined in chunk order, so the
output does not depend on the thread count.
"""

import csv
import io
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .densities import DensityQuery, cdf_lambda_max, cdf_lambda_min, lambda_min_order
from .errors import InvalidArgumentError
from .rng import RngStream
from .sampler import WishartParams, recursive_singular_values, sample_eigenvalues

__all__ = [
    "EmpiricalCdf",
    "empirical_cdf",
    "ks_distance",
    "ExperimentReport",
    "run_extreme_experiment",
    "semicircle_sample",
    "FreeProbabilityReport",
    "run_free_probability_experiment",
    "quantile_grid",
    "thread_count",
    "format_float",
    "write_csv",
]

THREADS_ENV = "BETAWISHART_THREADS"
CHUNK = 5000


def thread_count():
    """Worker threads from ``BETAWISHART_THREADS`` (default 1)."""
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        k = int(raw)
    except ValueError:
        raise InvalidArgumentError(f"{THREADS_ENV} must be an integer, got {raw!r}")
    return max(1, k)


def format_float(v):
    return format(float(v), ".17g")


def write_csv(out, header, rows):
    """Write comma separated rows with a header and ``\\n`` line ends.

    ``out`` is a path or a text stream.  Floats use 17 significant digits.
    """
    def cell(v):
        if isinstance(v, (float, np.floating)):
            return format_float(v)
        return str(v)

    if isinstance(out, (str, os.PathLike)):
        with open(out, "w", newline="") as fh:
            return write_csv(fh, header, rows)
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([cell(v) for v in r])


# ---------------------------------------------------------------------------
# empirical CDF and KS
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EmpiricalCdf:
    """Right-continuous step function of a sample."""

    sorted_samples: np.ndarray
    count: int

    def __call__(self, x):
        """Fraction of samples <= x."""
        return np.searchsorted(self.sorted_samples, x, side="right") / self.count

    def left_limit(self, x):
        """Fraction of samples < x."""
        return np.searchsorted(self.sorted_samples, x, side="left") / self.count


def empirical_cdf(samples):
    s = np.sort(np.asarray(samples, dtype=float).ravel())
    if s.size == 0:
        raise InvalidArgumentError("empirical CDF needs at least one sample")
    if not np.all(np.isfinite(s)):
        raise InvalidArgumentError("samples must be finite")
    return EmpiricalCdf(s, int(s.size))


def _sup_gap(e, points, F, F_left=None):
    F_left = F if F_left is None else F_left
    return float(np.max(np.maximum(np.abs(e(points) - F), np.abs(e.left_limit(points) - F_left))))


def ks_distance(e, analytic):
    """sup_x |F_n(x) - F(x)|, checked on both sides of every jump.

    ``analytic`` is called once with the array of sample points.  If it
    has a ``left_limit`` method (another :class:`EmpiricalCdf`, say) the
    left side is compared with that; otherwise F is taken as continuous.
    """
    pts = np.unique(e.sorted_samples)
    F = np.asarray(analytic(pts), dtype=float)
    left = getattr(analytic, "left_limit", None)
    F_left = None if left is None else np.asarray(left(pts), dtype=float)
    return _sup_gap(e, pts, F, F_left)


def quantile_grid(samples, levels=99):
    """Empirical quantiles at ``levels`` evenly spaced probabilities in (0, 1)."""
    p = np.arange(1, levels + 1) / (levels + 1)
    return np.quantile(np.asarray(samples, dtype=float), p)


# ---------------------------------------------------------------------------
# extreme eigenvalues
# ---------------------------------------------------------------------------

def _chunked(draws, seed, work):
    """Run ``work(rng, size)`` over chunks of draws; concatenate in order."""
    sizes = [min(CHUNK, draws - s) for s in range(0, draws, CHUNK)]
    jobs = [(RngStream(seed, i), k) for i, k in enumerate(sizes)]
    threads = thread_count()
    if threads == 1 or len(jobs) == 1:
        parts = [work(r, k) for r, k in jobs]
    else:
        with ThreadPoolExecutor(threads) as ex:
            parts = list(ex.map(lambda j: work(*j), jobs))
    return np.concatenate(parts, axis=0)


@dataclass(frozen=True)
class ExperimentReport:
    """Empirical versus analytic CDF of an extreme eigenvalue on a grid.

    ``ks`` is the largest gap between the analytic CDF and either side of
    the empirical step function at the grid points.
    """

    grid: np.ndarray
    empirical: np.ndarray
    analytic: np.ndarray
    analytic_raw: np.ndarray
    tail_estimate: np.ndarray
    ks: float
    draws: int
    seed: int
    which: str
    params: WishartParams
    samples: np.ndarray = field(repr=False, default=None)

    HEADER = ("x", "empirical_cdf", "analytic_cdf", "analytic_raw", "tail_estimate",
              "ks", "draws", "seed")

    def rows(self):
        for i in range(self.grid.size):
            yield (float(self.grid[i]), float(self.empirical[i]), float(self.analytic[i]),
                   float(self.analytic_raw[i]), float(self.tail_estimate[i]),
                   float(self.ks), self.draws, self.seed)

    def to_csv(self, out=None):
        """Write to ``out`` (path or stream); returns the text if ``out`` is None."""
        if out is None:
            buf = io.StringIO()
            write_csv(buf, self.HEADER, self.rows())
            return buf.getvalue()
        write_csv(out, self.HEADER, self.rows())


def run_extreme_experiment(p, which, draws, grid=None, seed=0, truncation=None):
    """Sample the largest or smallest eigenvalue and compare with its CDF.

    Parameters
    ----------
    p : WishartParams
    which : {"max", "min"}
    draws : int
    grid : array_like, optional
        Evaluation points; defaults to the empirical quantiles at 99 levels.
    seed : int
    truncation : SeriesTruncation, optional
        Series control for the largest-eigenvalue CDF.

    Returns
    -------
    ExperimentReport
    """
    if which not in ("max", "min"):
        raise InvalidArgumentError("which must be 'max' or 'min'")
    draws = int(draws)
    if draws < 1:
        raise InvalidArgumentError("draws must be positive")
    if which == "min":
        lambda_min_order(p)
    q = DensityQuery(p) if truncation is None else DensityQuery(p, truncation)

    col = 0 if which == "max" else -1
    samples = _chunked(draws, seed, lambda r, k: sample_eigenvalues(r, p, size=k)[:, col])
    if grid is None:
        grid = quantile_grid(samples)
    grid = np.atleast_1d(np.asarray(grid, dtype=float))
    if grid.size == 0:
        raise InvalidArgumentError("grid is empty")
    f = cdf_lambda_max if which == "max" else cdf_lambda_min
    res = f(grid, q)
    e = empirical_cdf(samples)
    ks = _sup_gap(e, grid, res.raw)
    return ExperimentReport(grid, e(grid), res.clamped, res.raw, res.tail_estimate,
                            ks, draws, int(seed), which, p, samples)


# ---------------------------------------------------------------------------
# free probability
# ---------------------------------------------------------------------------

def semicircle_sample(rng, center, radius, size=None):
    """Draws from the semicircle law on [center - radius, center + radius].

    Uses center + radius * (2 B - 1) with B ~ Beta(3/2, 3/2).
    """
    radius = float(radius)
    if not (np.isfinite(radius) and radius > 0):
        raise InvalidArgumentError("radius must be positive")
    gen = rng.generator if isinstance(rng, RngStream) else rng
    return float(center) + radius * (2.0 * gen.beta(1.5, 1.5, size=size) - 1.0)


@dataclass(frozen=True)
class FreeProbabilityReport:
    """Histogram and moments of scaled eigenvalues under a random covariance.

    ``mass`` sums to one over the bins.  ``draw_mean_stderr`` is the
    standard error of the mean built from per-draw averages, which are
    independent.  The oracle fields are filled when the beta = 1 dense
    comparison was run.
    """

    edges: np.ndarray
    mass: np.ndarray
    moments: np.ndarray
    mean: float
    draw_mean_stderr: float
    eigenvalues: np.ndarray = field(repr=False)
    oracle_mass: np.ndarray = None
    oracle_eigenvalues: np.ndarray = field(repr=False, default=None)
    ks_to_oracle: float = None
    m: int = 0
    n: int = 0
    beta: float = 0.0
    draws: int = 0
    seed: int = 0
    prior: str = "iid semicircle diagonal"

    HEADER = ("bin_lo", "bin_hi", "mass", "oracle_mass")

    def rows(self):
        om = self.oracle_mass
        for i in range(self.mass.size):
            yield (float(self.edges[i]), float(self.edges[i + 1]), float(self.mass[i]),
                   float(om[i]) if om is not None else float("nan"))

    def to_csv(self, out=None):
        if out is None:
            buf = io.StringIO()
            write_csv(buf, self.HEADER, self.rows())
            return buf.getvalue()
        write_csv(out, self.HEADER, self.rows())


def _prior_draws(gen, center, radius, draws, n):
    D = semicircle_sample(gen, center, radius, size=(draws, n))
    if np.any(D <= 0):
        raise InvalidArgumentError("covariance prior produced a nonpositive entry")
    return D


def run_free_probability_experiment(m=500, n=50, beta=3.0, draws=200, center=3.0,
                                    radius=math.sqrt(2.0), seed=0, bins=60, oracle=True):
    """Eigenvalues of W(D, m, n) / (m beta) with D drawn from a semicircle.

    Each draw takes a fresh diagonal D with i.i.d. semicircle entries.  With
    ``oracle=True`` the same number of dense beta = 1 draws,
    eig(X^t X D) / m for an m x n standard Gaussian X, are made from an
    independent stream and compared by a two-sample KS statistic.

    Returns
    -------
    FreeProbabilityReport
    """
    p = WishartParams(m, n, beta)
    draws = int(draws)
    if draws < 1:
        raise InvalidArgumentError("draws must be positive")
    if float(center) - float(radius) <= 0:
        raise InvalidArgumentError("semicircle prior must stay positive (center > radius)")
    gen = RngStream(seed, 0).generator
    D = _prior_draws(gen, center, radius, draws, p.n)
    s = recursive_singular_values(gen, p.m, p.beta, np.sqrt(D))
    lam = s * s / (p.m * p.beta)

    oracle_lam = None
    if oracle:
        og = RngStream(seed, 1).generator
        Do = _prior_draws(og, center, radius, draws, p.n)
        mm = int(round(p.m))
        oracle_lam = np.empty((draws, p.n))
        for i in range(draws):
            X = og.standard_normal((mm, p.n)) * np.sqrt(Do[i])
            oracle_lam[i] = np.linalg.eigvalsh(X.T @ X)[::-1] / mm

    pooled = lam.ravel()
    lo, hi = pooled.min(), pooled.max()
    if oracle_lam is not None:
        lo, hi = min(lo, oracle_lam.min()), max(hi, oracle_lam.max())
    edges = np.linspace(lo, hi, int(bins) + 1)
    mass = np.histogram(pooled, edges)[0] / pooled.size
    moments = np.array([np.mean(pooled ** k) for k in range(1, 5)])
    per_draw = lam.mean(axis=1)
    se = float(np.std(per_draw, ddof=1) / math.sqrt(draws)) if draws > 1 else float("nan")

    om, ks = None, None
    if oracle_lam is not None:
        om = np.histogram(oracle_lam.ravel(), edges)[0] / oracle_lam.size
        ks = float(stats.ks_2samp(pooled, oracle_lam.ravel()).statistic)
    return FreeProbabilityReport(edges, mass, moments, float(moments[0]), se, lam, om,
                                 oracle_lam, ks, int(p.m), p.n, p.beta, draws, int(seed))
