"""Joint eigenvalue density and extreme-eigenvalue distributions of the
beta-Wishart ensemble with diagonal covariance D.

Everything is computed in log space.  Series-based quantities are
returned together with their tail estimates.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from .errors import InvalidArgumentError
from .hypergeom import SeriesTruncation, hyp1f1_ray, log_hyp0f0
from .jack import gamma_n, jack_values
from .sampler import WishartParams

__all__ = [
    "DensityQuery",
    "CdfResult",
    "normalization_logK",
    "log_joint_eigen_density",
    "cdf_lambda_max",
    "cdf_lambda_min",
    "lambda_min_order",
]

# Extreme-eigenvalue series need degrees well past the default 30 once
# x * trace(D^-1) reaches the tens, so the default here may grow.
DEFAULT_DEGREE_CAP = 400


def _default_truncation():
    return SeriesTruncation(30, 1e-9, DEFAULT_DEGREE_CAP)


@dataclass(frozen=True)
class DensityQuery:
    """An ensemble together with the truncation used for its series."""

    params: WishartParams
    truncation: SeriesTruncation = field(default_factory=_default_truncation)


@dataclass(frozen=True)
class CdfResult:
    """CDF values on a grid.

    ``raw`` is the formula value, ``clamped`` the same clipped to [0, 1].
    ``tail_estimate`` is the relative size of the last series layers and
    ``degree`` the largest partition weight summed.
    """

    x: np.ndarray
    raw: np.ndarray
    clamped: np.ndarray
    tail_estimate: np.ndarray
    degree: int


def _log_gamma_n(c, n, beta):
    logabs, sign = gamma_n(c, n, beta)
    if sign <= 0:
        raise InvalidArgumentError(f"multivariate Gamma is not positive at c={c}")
    return logabs


def normalization_logK(m, n, beta):
    """log of the joint density constant K_{m,n}^beta.

    K = 2^{m n beta / 2} / pi^{n (n-1) beta / 2}
        * Gamma_n(m beta / 2) Gamma_n(n beta / 2) / Gamma(beta / 2)^n
    """
    p = WishartParams(m, n, beta)
    m, n, beta = p.m, p.n, p.beta
    return (
        0.5 * m * n * beta * math.log(2.0)
        - 0.5 * n * (n - 1) * beta * math.log(math.pi)
        + _log_gamma_n(0.5 * m * beta, n, beta)
        + _log_gamma_n(0.5 * n * beta, n, beta)
        - n * gammaln(0.5 * beta)
    )


def log_joint_eigen_density(lam, q):
    """Log density of the eigenvalues at ``lam`` (sorted decreasing).

    The density is

        det(D)^{-m beta/2} / K * prod lam_i^{(m-n+1) beta/2 - 1}
            * prod_{i<j} |lam_i - lam_j|^beta * 0F0(-Lambda/2, D^{-1})

    on the ordered cone lam_1 > ... > lam_n > 0.

    Returns
    -------
    logpdf : float
    tail_estimate : float
    """
    p = q.params
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    if lam.shape != (p.n,):
        raise InvalidArgumentError(f"lambda must have n = {p.n} entries")
    if not np.all(np.isfinite(lam)) or np.any(lam <= 0):
        raise InvalidArgumentError("eigenvalues must be positive")
    if np.any(np.diff(lam) >= 0):
        raise InvalidArgumentError("eigenvalues must be strictly decreasing")
    m, n, beta = p.m, p.n, p.beta
    out = -0.5 * m * beta * float(np.sum(np.log(p.D))) - normalization_logK(m, n, beta)
    out += (0.5 * (m - n + 1) * beta - 1.0) * float(np.sum(np.log(lam)))
    i, j = np.triu_indices(n, 1)
    out += beta * float(np.sum(np.log(lam[i] - lam[j])))
    res = log_hyp0f0(-0.5 * lam, 1.0 / p.D, beta, q.truncation, shift="same_sign")
    if res.sign <= 0:
        raise InvalidArgumentError("0F0 series summed to a nonpositive value")
    return out + res.log_abs, res.tail_estimate


def _grid(x):
    xa = np.asarray(x, dtype=float)
    flat = np.atleast_1d(xa).ravel()
    if not np.all(np.isfinite(flat)) or np.any(flat < 0):
        raise InvalidArgumentError("x must be finite and nonnegative")
    return xa, flat


def _shape(xa, *arrays):
    if xa.ndim == 0:
        return tuple(float(a[0]) for a in arrays)
    return tuple(a.reshape(xa.shape) for a in arrays)


def cdf_lambda_max(x, q):
    """P(lambda_max < x).

    Evaluates

        Gamma_n(1 + (n-1) beta/2) / Gamma_n(b) * det(x Y)^a * 1F1(a; b; -x Y)

    with Y = D^{-1}/2, a = m beta/2, b = (m+n-1) beta/2 + 1.  The 1F1 is
    summed in its Kummer form etr(-x Y) 1F1(b - a; b; x Y), whose terms are
    all positive, and its layers are shared by every grid point.

    Parameters
    ----------
    x : float or array_like
    q : DensityQuery

    Returns
    -------
    CdfResult
    """
    p = q.params
    xa, flat = _grid(x)
    m, n, beta = p.m, p.n, p.beta
    a = 0.5 * m * beta
    b = 0.5 * (m + n - 1) * beta + 1.0
    y = 0.5 / p.D
    ymax = float(y.max())
    log_ratio = _log_gamma_n(1.0 + 0.5 * (n - 1) * beta, n, beta) - _log_gamma_n(b, n, beta)

    t = q.truncation
    # start just past the degree where the series terms peak at the largest x
    peak = float(flat.max(initial=0.0)) * float(y.sum())
    start = min(max(t.max_degree, int(math.ceil(peak + 5.0 * math.sqrt(peak)))), t.degree_cap)
    t = SeriesTruncation(start, t.tail_tol, t.degree_cap)
    log_f, sign, tail, K = hyp1f1_ray(b - a, b, y / ymax, flat * ymax, beta, t)

    raw = np.zeros_like(flat)
    pos = flat > 0
    xp = flat[pos]
    logdet = a * (n * np.log(xp) + float(np.sum(np.log(y))))
    raw[pos] = sign[pos] * np.exp(log_ratio + logdet - xp * float(y.sum()) + log_f[pos])
    tail = np.where(pos, tail, 0.0)
    clamped = np.clip(raw, 0.0, 1.0)
    r, c, tl = _shape(xa, raw, clamped, tail)
    return CdfResult(xa if xa.ndim else float(xa), r, c, tl, K)


def lambda_min_order(p, tol=1e-9):
    """The integer t = (m-n+1) beta/2 - 1 for which the smallest-eigenvalue
    CDF is a finite sum; raises if t is not a nonnegative integer."""
    t = 0.5 * (p.m - p.n + 1) * p.beta - 1.0
    r = round(t)
    if abs(t - r) > tol or r < 0:
        raise InvalidArgumentError(
            "the smallest-eigenvalue CDF needs t = (m-n+1)*beta/2 - 1 to be a "
            f"nonnegative integer; got t = {t:.12g}"
        )
    return int(r)


def cdf_lambda_min(x, q):
    """P(lambda_min < x) for integral t = (m-n+1) beta/2 - 1.

    Evaluates the finite sum

        1 - etr(-x Y) sum_{k <= n t} sum_{kappa |- k, kappa_1 <= t} C_kappa(x Y) / k!

    with Y = D^{-1}/2.  No truncation is involved; ``tail_estimate`` is 0.

    Parameters
    ----------
    x : float or array_like
    q : DensityQuery

    Returns
    -------
    CdfResult
    """
    p = q.params
    xa, flat = _grid(x)
    t = lambda_min_order(p)
    n, beta = p.n, p.beta
    y = 0.5 / p.D
    ymax = float(y.max())
    K = n * t
    jv = jack_values(y / ymax, beta, K)
    keep = jv.parts[:, 0] <= t
    k = jv.degree[keep]
    # layers sum_kappa C_kappa(y/ymax)/k!, all terms positive
    layers = np.zeros(K + 1)
    np.add.at(layers, k, np.exp(jv.log_abs[keep]))
    log_layers = np.log(layers)
    s = flat * ymax
    with np.errstate(divide="ignore"):
        ls = np.log(s)
    deg = np.arange(K + 1)
    with np.errstate(invalid="ignore"):
        powers = np.where(deg[None, :] == 0, 0.0, deg[None, :] * ls[:, None])
    log_sum = np.logaddexp.reduce(log_layers[None, :] + powers, axis=1)
    raw = -np.expm1(log_sum - flat * float(y.sum())) + 0.0
    clamped = np.clip(raw, 0.0, 1.0)
    r, c, tl = _shape(xa, raw, clamped, np.zeros_like(raw))
    return CdfResult(xa if xa.ndim else float(xa), r, c, tl, K)
