"""Partitions, Jack polynomials of matrix argument and the multivariate
Pochhammer and Gamma functions.

Jack polynomials use the C normalization, in which the polynomials of a
fixed weight k sum to ``trace(X)**k``.  Two evaluation routes are provided:

* :func:`jack_C` expands C_k in monomial symmetric polynomials.  The
  coefficients solve the triangular system coming from the
  Laplace-Beltrami eigen-equation, in exact rational arithmetic for small
  weights and rational beta, otherwise at 40 significant digits.
* :func:`jack_values` evaluates every Jack polynomial up to a degree at a
  single point with the branching rule.  Hypergeometric series use this
  route because it reaches degrees in the hundreds.
"""

import functools
import math
import threading
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np
from scipy.special import gammaln, gammasgn

from . import _branching
from .errors import InvalidArgumentError
from .rng import RngStream

__all__ = [
    "Partition",
    "as_partition",
    "partitions_of",
    "rho",
    "pochhammer_general",
    "gamma_n",
    "jack_C",
    "jack_C_identity",
    "jack_J_one_var",
    "jack_coefficient_table",
    "stanley_det_pullout_check",
    "sphere_projection_average",
    "JackValues",
    "jack_values",
]


# ---------------------------------------------------------------------------
# Partitions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Partition:
    """A non-increasing tuple of positive integers."""

    parts: tuple = ()

    def __post_init__(self):
        parts = tuple(int(p) for p in self.parts)
        if any(p <= 0 for p in parts):
            raise InvalidArgumentError(f"partition parts must be positive: {parts}")
        if any(parts[i] < parts[i + 1] for i in range(len(parts) - 1)):
            raise InvalidArgumentError(f"partition parts must be non-increasing: {parts}")
        object.__setattr__(self, "parts", parts)

    @property
    def weight(self):
        return sum(self.parts)

    @property
    def length(self):
        return len(self.parts)

    def __len__(self):
        return len(self.parts)

    def __iter__(self):
        return iter(self.parts)

    def __getitem__(self, i):
        return self.parts[i]

    def __repr__(self):
        return f"Partition{self.parts}"

    def conjugate(self):
        if not self.parts:
            return Partition(())
        return Partition(tuple(sum(1 for p in self.parts if p >= j)
                               for j in range(1, self.parts[0] + 1)))


def as_partition(kappa):
    """Coerce a tuple/list (trailing zeros allowed) to a :class:`Partition`."""
    if isinstance(kappa, Partition):
        return kappa
    try:
        parts = [int(p) for p in kappa]
    except TypeError:
        raise InvalidArgumentError(f"not a partition: {kappa!r}") from None
    while parts and parts[-1] == 0:
        parts.pop()
    return Partition(tuple(parts))


def _partition_tuples(k, max_len, max_part):
    if k == 0:
        yield ()
        return
    if max_len == 0:
        return
    for first in range(min(k, max_part), 0, -1):
        for rest in _partition_tuples(k - first, max_len - 1, first):
            yield (first,) + rest


def partitions_of(k, max_len=None, max_part=None):
    """Partitions of ``k`` with at most ``max_len`` parts.

    Returned in descending lexicographic order, e.g. ``k=4, max_len=2``
    gives (4), (3, 1), (2, 2).
    """
    if k < 0:
        raise InvalidArgumentError("k must be nonnegative")
    max_len = k if max_len is None else max_len
    max_part = k if max_part is None else max_part
    return [Partition(p) for p in _partition_tuples(k, max_len, max_part)]


# ---------------------------------------------------------------------------
# Scalar helpers
# ---------------------------------------------------------------------------

def rho(kappa, alpha):
    """sum_i k_i (k_i - 1 - (2/alpha)(i - 1))."""
    if alpha <= 0:
        raise InvalidArgumentError("alpha must be positive")
    kappa = as_partition(kappa)
    return sum(k * (k - 1 - (2.0 / alpha) * i) for i, k in enumerate(kappa.parts))


def pochhammer_general(a, kappa, beta):
    """Generalized Pochhammer symbol prod_i prod_j (a - (i-1) beta/2 + j - 1)."""
    kappa = as_partition(kappa)
    out = 1.0
    for i, k in enumerate(kappa.parts):
        for j in range(k):
            out *= a - i * beta / 2.0 + j
    return out


def gamma_n(c, n, beta):
    """Multivariate Gamma function as ``(log|value|, sign)``.

    pi^{n(n-1)beta/4} prod_{i=1}^{n} Gamma(c - (i-1) beta/2).
    """
    if beta <= 0:
        raise InvalidArgumentError("beta must be positive")
    args = c - np.arange(n) * beta / 2.0
    bad = args[(args <= 0) & (args == np.round(args))]
    if bad.size:
        raise InvalidArgumentError(f"Gamma pole at argument {bad[0]:g} (c={c}, n={n}, beta={beta})")
    logabs = n * (n - 1) * beta / 4.0 * math.log(math.pi) + float(np.sum(gammaln(args)))
    sign = float(np.prod(gammasgn(args)))
    return logabs, sign


def jack_J_one_var(kappa1, beta, x):
    """Jack polynomial of one variable in the J normalization."""
    alpha = 2.0 / beta
    out = x ** kappa1
    for j in range(1, kappa1):
        out *= 1.0 + j * alpha
    return out


# ---------------------------------------------------------------------------
# Monomial coefficient tables
# ---------------------------------------------------------------------------

_table_lock = threading.Lock()
_tables = {}
_perm_cache = {}


def _beta_key(beta):
    return round(float(beta), 12)


def _scalar_field(beta, k):
    """Exact rationals when possible, else 40 digit floats."""
    if k <= 8:
        fr = Fraction(float(beta)).limit_denominator(10**6)
        if float(fr) == float(beta):
            return fr, Fraction
    ctx = mpmath.mp.clone()
    ctx.dps = 40
    return ctx.mpf(beta), ctx.mpf


def _spreads(nu):
    """Partitions mu reached from nu by pushing two parts apart, with the
    off-diagonal weight (p - q) of the eigen-operator."""
    out = {}
    L = len(nu)
    for i in range(L):
        for j in range(i + 1, L):
            u, v = nu[i], nu[j]
            for s in range(1, v + 1):
                p, q = u + s, v - s
                new = list(nu)
                new[i], new[j] = p, q
                mu = tuple(sorted((x for x in new if x), reverse=True))
                out[mu] = out.get(mu, 0) + (p - q)
    return out


def _build_table(k, n, beta):
    parts = [p.parts for p in partitions_of(k, n)]
    index = {p: i for i, p in enumerate(parts)}
    b, conv = _scalar_field(beta, k)

    def rho_exact(p):
        return (sum(conv(x * (x - 1)) for x in p)
                - b * sum(conv(i * x) for i, x in enumerate(p)))

    rhos = [rho_exact(p) for p in parts]
    spreads = [_spreads(p) for p in parts]
    P = len(parts)
    raw = []
    for r in range(P):
        c = [conv(0)] * P
        c[r] = conv(1)
        for j in range(r + 1, P):
            num = conv(0)
            for mu, w in spreads[j].items():
                cm = c[index[mu]]
                if cm != 0:
                    num += w * cm
            if num != 0:
                c[j] = b * num / (rhos[r] - rhos[j])
        raw.append(c)
    # scale so that the weight-k family sums to (x_1 + ... + x_n)^k
    scale = []
    for j, nu in enumerate(parts):
        target = conv(math.factorial(k) // math.prod(math.factorial(x) for x in nu))
        acc = target
        for r in range(j):
            acc -= scale[r] * raw[r][j]
        scale.append(acc)
    coef = np.array([[float(scale[r] * raw[r][j]) for j in range(P)] for r in range(P)])
    return parts, index, coef


def jack_coefficient_table(k, n, beta):
    """Monomial coefficients of every C_kappa with |kappa| = k, l(kappa) <= n.

    Returns ``(parts, coef)`` where ``parts`` lists the partitions in
    descending lexicographic order and ``coef[r, j]`` is the coefficient of
    m_{parts[j]} in C_{parts[r]}.
    """
    key = (int(k), int(n), _beta_key(beta))
    table = _tables.get(key)
    if table is None:
        with _table_lock:
            table = _tables.get(key)
            if table is None:
                table = _build_table(int(k), int(n), float(beta))
                _tables[key] = table
    return table[0], table[2]


def _distinct_perms(items):
    if len(items) <= 1:
        yield tuple(items)
        return
    seen = set()
    for i, x in enumerate(items):
        if x in seen:
            continue
        seen.add(x)
        for rest in _distinct_perms(items[:i] + items[i + 1:]):
            yield (x,) + rest


def _exponents(nu, n):
    key = (nu, n)
    E = _perm_cache.get(key)
    if E is None:
        padded = list(nu) + [0] * (n - len(nu))
        E = np.array(sorted(set(_distinct_perms(padded))), dtype=np.int64).reshape(-1, n)
        _perm_cache[key] = E
    return E


def _monomials(parts, x):
    """m_nu(x) for each nu in ``parts``; x has shape (N, n)."""
    n = x.shape[1]
    out = np.empty((x.shape[0], len(parts)))
    for j, nu in enumerate(parts):
        E = _exponents(nu, n)
        out[:, j] = np.prod(x[:, None, :] ** E[None, :, :], axis=2).sum(axis=1)
    return out


def _check_beta(beta):
    if not beta > 0 or not np.isfinite(beta):
        raise InvalidArgumentError("beta must be a positive finite number")


def jack_C(kappa, beta, x):
    """Evaluate C_kappa^(beta) at ``diag(x)``.

    Parameters
    ----------
    kappa : Partition or tuple
    beta : float
    x : array_like, shape (n,) or (N, n)
        Eigenvalues; a 2-d array evaluates many points at once.

    Returns
    -------
    float or ndarray
    """
    kappa = as_partition(kappa)
    _check_beta(beta)
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    X = np.atleast_2d(x)
    n = X.shape[1]
    if kappa.length > n:
        raise InvalidArgumentError(
            f"partition {kappa.parts} has more than n={n} parts; pad x with zeros instead")
    parts, coef = jack_coefficient_table(kappa.weight, n, beta)
    r = parts.index(kappa.parts)
    cols = np.nonzero(coef[r])[0]
    vals = _monomials([parts[j] for j in cols], X) @ coef[r, cols]
    return float(vals[0]) if single else vals


def jack_C_identity(kappa, beta, n):
    """C_kappa^(beta)(I_n)."""
    return jack_C(kappa, beta, np.ones(int(n)))


def stanley_det_pullout_check(kappa, beta, x):
    """Ratio C_kappa(x) / (prod(x) * C_{kappa - 1}(x)) for l(kappa) = len(x).

    The ratio depends only on kappa, beta and n.
    """
    kappa = as_partition(kappa)
    x = np.asarray(x, dtype=float)
    if kappa.length != x.shape[-1]:
        raise InvalidArgumentError("kappa must have exactly n parts")
    lowered = as_partition([p - 1 for p in kappa.parts])
    den = np.prod(x, axis=-1) * jack_C(lowered, beta, x)
    if np.any(den == 0):
        raise InvalidArgumentError("zero denominator: x has a zero entry or C_{kappa-1}(x) = 0")
    return jack_C(kappa, beta, x) / den


# ---------------------------------------------------------------------------
# Sphere average
# ---------------------------------------------------------------------------

def _compressions(lam, q):
    """(n-1) x (n-1) compressions of diag(lam) to the complements of rows of q.

    Uses a Householder reflector whose first column is q, so that the
    eigenvalues are the nonzero eigenvalues of (I - qq^t) diag(lam) (I - qq^t).
    """
    v = q.copy()
    v[:, 0] += np.where(q[:, 0] >= 0, 1.0, -1.0)
    vv = np.einsum("bi,bi->b", v, v)
    Lv = v * lam
    vLv = np.einsum("bi,bi->b", v, Lv)
    M = (np.diag(lam)[None, :, :]
         - 2.0 * (Lv[:, :, None] * v[:, None, :] + v[:, :, None] * Lv[:, None, :]) / vv[:, None, None]
         + 4.0 * vLv[:, None, None] * v[:, :, None] * v[:, None, :] / vv[:, None, None] ** 2)
    return M[:, 1:, 1:]


def sphere_projection_average(kappa, beta, lam, draws, rng, return_stderr=False, batch=20000):
    """Monte Carlo estimate of C_kappa(diag(lam)) from projections onto
    random hyperplanes.

    q is a vector of independent chi_beta variables scaled to unit length.
    The integrand C_kappa((I - qq^t) Lambda) is evaluated on the n-1 nonzero
    eigenvalues of the projected matrix and rescaled by
    C_kappa(I_n) / C_kappa(I_{n-1}).

    Returns the estimate, and its standard error when ``return_stderr``.
    """
    from .sampler import chi_sample

    kappa = as_partition(kappa)
    _check_beta(beta)
    lam = np.asarray(lam, dtype=float)
    n = lam.shape[0]
    if kappa.length >= n:
        raise InvalidArgumentError("need l(kappa) < n")
    if draws < 1:
        raise InvalidArgumentError("draws must be positive")
    if not isinstance(rng, RngStream):
        raise InvalidArgumentError("rng must be an RngStream")

    # analytic constant times the mass of the chi_beta sphere measure
    log_const = ((n - 1) * math.log(2.0) + gammaln(n * beta / 2.0) - n * gammaln(beta / 2.0))
    log_mass = n * gammaln(beta / 2.0) - (n - 1) * math.log(2.0) - gammaln(n * beta / 2.0)
    ratio = jack_C_identity(kappa, beta, n) / jack_C_identity(kappa, beta, n - 1)
    factor = ratio * math.exp(log_const + log_mass)

    total = 0.0
    total_sq = 0.0
    done = 0
    while done < draws:
        b = min(batch, draws - done)
        q = chi_sample(rng, beta, size=(b, n))
        q /= np.linalg.norm(q, axis=1, keepdims=True)
        mu = np.linalg.eigvalsh(_compressions(lam, q))
        vals = factor * jack_C(kappa, beta, mu)
        total += vals.sum()
        total_sq += np.dot(vals, vals)
        done += b
    mean = total / draws
    if not return_stderr:
        return mean
    var = max(total_sq / draws - mean * mean, 0.0) * draws / max(draws - 1, 1)
    return mean, math.sqrt(var / draws)


# ---------------------------------------------------------------------------
# All partitions at one point
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class JackValues:
    """Every C_kappa(x) with |kappa| <= max_degree and l(kappa) <= len(x).

    Values are stored as ``sign * exp(log_abs)`` of C_kappa(x) / |kappa|!,
    the combination that appears in hypergeometric series, so that
    large degrees do not overflow.
    """

    parts: np.ndarray
    degree: np.ndarray
    sign: np.ndarray
    log_abs: np.ndarray
    beta: float

    def values(self):
        """C_kappa(x) as plain floats (may overflow for very large degrees)."""
        lf = gammaln(self.degree + 1.0)
        return self.sign * np.exp(self.log_abs + lf)

    def partitions(self):
        return [as_partition(p) for p in self.parts]


@functools.lru_cache(maxsize=64)
def hook_tables(n, K, alpha):
    """Partitions with at most n parts and weight <= K (branching order) and
    their hook logs ``(parts, log_upper, log_lower, log_p_identity)``.

    Cached; the arrays are read-only.
    """
    parts = _branching.enumerate_partitions(n, K)
    out = (parts,) + tuple(_branching.hook_logs(parts, alpha, n))
    for a in out:
        a.setflags(write=False)
    return out


def jack_values(x, beta, max_degree):
    """Evaluate C_kappa(x) for all partitions up to ``max_degree`` at once.

    Uses the horizontal-strip branching rule (one variable at a time), so the
    cost grows with the number of strips rather than with monomial
    expansions; degrees of a few hundred are practical for n <= 4.

    Parameters
    ----------
    x : array_like, shape (n,)
    beta : float
    max_degree : int

    Returns
    -------
    JackValues
    """
    _check_beta(beta)
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise InvalidArgumentError("x must be a nonempty vector")
    if not np.all(np.isfinite(x)):
        raise InvalidArgumentError("x must be finite")
    K = int(max_degree)
    if K < 0:
        raise InvalidArgumentError("max_degree must be nonnegative")
    alpha = 2.0 / beta
    n = x.size
    scale = float(np.max(np.abs(x)))
    if scale == 0.0:
        parts = _branching.enumerate_partitions(n, K)
        degree = parts.sum(axis=1)
        sign = (degree == 0).astype(float)
        log_abs = np.where(degree == 0, 0.0, -np.inf)
        return JackValues(parts, degree, sign, log_abs, float(beta))
    parts, p_vals = _branching.jack_p_values(x / scale, alpha, K)
    degree = parts.sum(axis=1)
    log_upper = hook_tables(n, K, alpha)[1]
    with np.errstate(divide="ignore"):
        log_abs = degree * (math.log(alpha) + math.log(scale)) - log_upper + np.log(np.abs(p_vals))
    return JackValues(parts, degree, np.sign(p_vals), log_abs, float(beta))
