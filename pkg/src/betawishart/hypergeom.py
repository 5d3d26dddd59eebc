"""Hypergeometric functions of matrix argument, 0F0 and 1F1, summed as
truncated series over partitions grouped by total degree.

Every series is accumulated layer by layer (all partitions of one weight
together), in log space with explicit signs.  Each result comes with a
tail estimate: the size of the last included layers relative to the
partial sum.

Jack values for a whole series come from the branching evaluator in
:func:`betawishart.jack.jack_values`, which handles degrees in the
hundreds for small n.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, logsumexp

from . import _branching
from .errors import InvalidArgumentError
from .jack import as_partition, hook_tables, jack_values

__all__ = [
    "SeriesTruncation",
    "SeriesResult",
    "hyp0f0",
    "log_hyp0f0",
    "shift_regularize",
    "ShiftedArguments",
    "hyp1f1",
    "log_hyp1f1",
    "hyp1f1_ray",
]

_GROWTH = 1.5


@dataclass(frozen=True)
class SeriesTruncation:
    """How far to sum a hypergeometric series.

    Parameters
    ----------
    max_degree : int
        Largest partition weight included.
    tail_tol : float
        Summation stops once two consecutive layers are below ``tail_tol``
        relative to the partial sum.
    degree_cap : int, optional
        If larger than ``max_degree``, an unconverged series is re-summed
        with the degree raised by half each time, up to this cap.
    """

    max_degree: int = 30
    tail_tol: float = 1e-9
    degree_cap: int = None

    def __post_init__(self):
        if isinstance(self.max_degree, bool) or int(self.max_degree) != self.max_degree:
            raise InvalidArgumentError("max_degree must be an integer")
        if int(self.max_degree) < 1:
            raise InvalidArgumentError("max_degree must be at least 1")
        if not 0 < float(self.tail_tol) < 1:
            raise InvalidArgumentError("tail_tol must lie in (0, 1)")
        object.__setattr__(self, "max_degree", int(self.max_degree))
        object.__setattr__(self, "tail_tol", float(self.tail_tol))
        cap = self.max_degree if self.degree_cap is None else int(self.degree_cap)
        if cap < self.max_degree:
            raise InvalidArgumentError("degree_cap must be at least max_degree")
        object.__setattr__(self, "degree_cap", cap)


@dataclass(frozen=True)
class SeriesResult:
    """A summed series as ``sign * exp(log_abs)`` with its tail estimate."""

    log_abs: float
    sign: float
    tail_estimate: float
    degree: int
    converged: bool

    @property
    def value(self):
        return self.sign * math.exp(self.log_abs) if self.sign else 0.0


# ---------------------------------------------------------------------------
# layer bookkeeping
# ---------------------------------------------------------------------------

def _layers(degree, log_terms, signs, K):
    """Per-degree sums of ``signs * exp(log_terms)`` as (log|L_k|, sign L_k)."""
    live = signs != 0
    M = np.full(K + 1, -np.inf)
    np.maximum.at(M, degree[live], log_terms[live])
    Mf = np.where(np.isfinite(M), M, 0.0)
    acc = np.zeros(K + 1)
    with np.errstate(invalid="ignore"):
        contrib = np.where(live, signs * np.exp(log_terms - Mf[degree]), 0.0)
    np.add.at(acc, degree, contrib)
    with np.errstate(divide="ignore"):
        return np.log(np.abs(acc)) + Mf, np.sign(acc)


def _sum_layers(log_layers, signs, tail_tol):
    """Sum layers in order, stopping after two consecutive small layers."""
    K = log_layers.size - 1
    partial = 0.0
    log_scale = np.max(np.where(signs != 0, log_layers, -np.inf))
    if not np.isfinite(log_scale):
        return -np.inf, 0.0, 0.0, 0, True
    rel = np.zeros(K + 1)
    used = K
    small = 0
    for k in range(K + 1):
        if signs[k] != 0:
            partial += signs[k] * math.exp(log_layers[k] - log_scale)
        if partial != 0 and signs[k] != 0:
            rel[k] = math.exp(log_layers[k] - log_scale) / abs(partial)
        elif signs[k] != 0:
            rel[k] = np.inf
        small = small + 1 if rel[k] < tail_tol else 0
        if k >= 1 and small >= 2:
            used = k
            break
    tail = float(max(rel[used], rel[used - 1] if used >= 1 else 0.0))
    if partial == 0:
        return -np.inf, 0.0, tail, used, tail <= tail_tol
    return math.log(abs(partial)) + log_scale, math.copysign(1.0, partial), tail, used, tail <= tail_tol


def _grow(t, evaluate, peak=0.0):
    """Run ``evaluate(K)`` with K raised until converged or capped.

    When the degree may grow, the first attempt starts past ``peak``, the
    degree near which the series terms are largest.
    """
    K = t.max_degree
    if t.degree_cap > K and peak > K:
        K = min(t.degree_cap, int(math.ceil(peak + 3.0 * math.sqrt(peak))))
    while True:
        res = evaluate(K)
        if res.converged or K >= t.degree_cap:
            return res
        K = min(t.degree_cap, int(math.ceil(_GROWTH * K)) + 1)


def _extrapolate(terms, log_abs, tol, K):
    """Degree at which the worst row should meet ``tol``, assuming its
    last terms keep decaying at their current geometric rate."""
    worst = int(np.argmax(terms[:, -1] - log_abs))
    last, prev = terms[worst, -1], terms[worst, -2]
    rate = last - prev
    if not (np.isfinite(rate) and rate < 0):
        return int(math.ceil(_GROWTH * K)) + 1
    need = (math.log(tol) - (last - log_abs[worst])) / rate
    return K + int(math.ceil(1.3 * need)) + 5


def _vector(x, name):
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.ndim != 1 or x.size == 0:
        raise InvalidArgumentError(f"{name} must be a nonempty vector")
    if not np.all(np.isfinite(x)):
        raise InvalidArgumentError(f"{name} must be finite")
    return x


def _check_beta(beta):
    beta = float(beta)
    if not (np.isfinite(beta) and beta > 0):
        raise InvalidArgumentError("beta must be positive")
    return beta


def _log_c_identity(parts, beta, n):
    """log C_kappa(I_n) for zero padded partitions."""
    alpha = 2.0 / beta
    K = int(parts.sum(axis=1).max())
    _, lu, _, lpid = hook_tables(n, K, alpha)
    k = parts.sum(axis=1)
    return k * math.log(alpha) + gammaln(k + 1.0) - lu + lpid


# ---------------------------------------------------------------------------
# 0F0
# ---------------------------------------------------------------------------

def _log_0f0_fixed(x, y, beta, K, tail_tol):
    n = x.size
    jx = jack_values(x, beta, K)
    jy = jack_values(y, beta, K)
    k = jx.degree
    log_t = jx.log_abs + jy.log_abs + gammaln(k + 1.0) - _log_c_identity(jx.parts, beta, n)
    ll, ls = _layers(k, log_t, jx.sign * jy.sign, K)
    return SeriesResult(*_sum_layers(ll, ls, tail_tol))


def log_hyp0f0(x, y, beta, t=None, shift=None):
    """0F0(X, Y) of two diagonal matrix arguments as a :class:`SeriesResult`.

    Parameters
    ----------
    x, y : array_like, shape (n,)
        Diagonals of X and Y.
    beta : float
    t : SeriesTruncation, optional
    shift : {None, "center", "same_sign"} or bool
        Sum the series at ``y - s`` and restore the factor
        ``exp(s * trace(X))`` afterwards; ``True`` means ``"center"``.
        See :func:`shift_regularize`.
    """
    t = SeriesTruncation() if t is None else t
    beta = _check_beta(beta)
    x, y = _vector(x, "x"), _vector(y, "y")
    if x.size != y.size:
        raise InvalidArgumentError("x and y must have equal length")
    log_factor = 0.0
    if shift:
        mode = "center" if shift is True else shift
        s, shifted = shift_regularize(x, y, beta, mode)
        y, log_factor = shifted.y, shifted.log_factor
    # the terms are bounded by (sum|x| max|y|)^k / k!
    peak = float(np.sum(np.abs(x)) * np.max(np.abs(y)))
    res = _grow(t, lambda K: _log_0f0_fixed(x, y, beta, K, t.tail_tol), peak)
    if log_factor:
        res = SeriesResult(res.log_abs + log_factor, res.sign, res.tail_estimate,
                           res.degree, res.converged)
    return res


def hyp0f0(x, y, beta, t=None, shift=None):
    """Truncated 0F0(X, Y) = sum_k sum_kappa C_kappa(X) C_kappa(Y) / (k! C_kappa(I)).

    Returns
    -------
    value : float
    tail_estimate : float
        Relative size of the last included layers; compare with
        ``t.tail_tol`` to decide whether the truncation converged.
    """
    res = log_hyp0f0(x, y, beta, t, shift)
    return res.value, res.tail_estimate


@dataclass(frozen=True)
class ShiftedArguments:
    """0F0(X, Y) = exp(log_factor) * 0F0(x, y) for the stored x, y."""

    x: np.ndarray
    y: np.ndarray
    log_factor: float


def shift_regularize(x, y, beta, mode="center"):
    """Shift the second argument of 0F0.

    Uses 0F0(X, Y) = exp(s trace X) 0F0(X, Y - s I).

    ``mode="center"`` takes s = mean(y), which minimizes the spread of the
    second argument.  ``mode="same_sign"`` takes s = max(y) when x <= 0
    (s = min(y) when x >= 0), so that X and Y - s I have the same sign and
    every series term is positive; this avoids cancellation when x is large.

    Returns
    -------
    s : float
    ShiftedArguments
    """
    _check_beta(beta)
    x, y = _vector(x, "x"), _vector(y, "y")
    if x.size != y.size:
        raise InvalidArgumentError("x and y must have equal length")
    if mode == "center":
        s = float(np.mean(y))
    elif mode == "same_sign":
        if np.all(x <= 0):
            s = float(np.max(y))
        elif np.all(x >= 0):
            s = float(np.min(y))
        else:
            raise InvalidArgumentError("same_sign shift needs x of one sign")
    else:
        raise InvalidArgumentError(f"unknown shift mode {mode!r}")
    return s, ShiftedArguments(x, y - s, s * float(np.sum(x)))


# ---------------------------------------------------------------------------
# 1F1 with the identity as second argument
# ---------------------------------------------------------------------------

def _pochhammer_checked(parts, b, beta):
    lb, sb = _branching.pochhammer_logs(parts, float(b), beta / 2.0)
    bad = np.nonzero(sb == 0)[0]
    if bad.size:
        kappa = as_partition(parts[bad[0]])
        raise InvalidArgumentError(
            f"(b)_kappa vanishes at kappa={tuple(kappa.parts)} for b={b}"
        )
    return lb, sb


def _ray_layers(a, b, y, beta, K):
    """Layers L_k = sum_{|kappa|=k} (a)_k/(b)_k C_kappa(y)/k! as logs and signs."""
    jy = jack_values(y, beta, K)
    la, sa = _branching.pochhammer_logs(jy.parts, float(a), beta / 2.0)
    lb, sb = _pochhammer_checked(jy.parts, b, beta)
    return _layers(jy.degree, jy.log_abs + la - lb, jy.sign * sa * sb, K)


def _log_1f1_fixed(a, b, x, beta, K, tail_tol):
    ll, ls = _ray_layers(a, b, x, beta, K)
    return SeriesResult(*_sum_layers(ll, ls, tail_tol))


def log_hyp1f1(a, b, x, beta, t=None):
    """1F1(a; b; X) as a :class:`SeriesResult`.

    For a nonpositive argument the series is summed in the Kummer form
    1F1(a; b; X) = etr(X) 1F1(b - a; b; -X), whose terms do not alternate.
    """
    t = SeriesTruncation() if t is None else t
    beta = _check_beta(beta)
    x = _vector(x, "x")
    a, b = float(a), float(b)
    if np.all(x <= 0) and np.any(x < 0):
        res = _grow(t, lambda K: _log_1f1_fixed(b - a, b, -x, beta, K, t.tail_tol))
        return SeriesResult(res.log_abs + float(np.sum(x)), res.sign, res.tail_estimate,
                            res.degree, res.converged)
    return _grow(t, lambda K: _log_1f1_fixed(a, b, x, beta, K, t.tail_tol))


def hyp1f1(a, b, x, beta, t=None):
    """Truncated 1F1(a; b; X) = sum_k sum_kappa (a)_kappa/(b)_kappa C_kappa(X)/k!.

    Returns
    -------
    value : float
    tail_estimate : float
    """
    res = log_hyp1f1(a, b, x, beta, t)
    return res.value, res.tail_estimate


def hyp1f1_ray(a, b, y, scales, beta, t=None):
    """1F1(a; b; s Y) for many scalars s along a fixed direction Y.

    The layers of the series at Y are computed once; the value at s Y is
    then the power series sum_k L_k s^k.  The degree grows (within
    ``t.degree_cap``) until every requested scale meets ``t.tail_tol``.

    Returns
    -------
    log_abs, sign, tail : ndarray
        Per scale; the value is ``sign * exp(log_abs)``.
    degree : int
    """
    t = SeriesTruncation() if t is None else t
    beta = _check_beta(beta)
    y = _vector(y, "y")
    s = np.atleast_1d(np.asarray(scales, dtype=float))
    if np.any(s < 0) or not np.all(np.isfinite(s)):
        raise InvalidArgumentError("scales must be finite and nonnegative")
    K = t.max_degree
    while True:
        ll, ls = _ray_layers(float(a), float(b), y, beta, K)
        k = np.arange(K + 1)
        with np.errstate(divide="ignore", invalid="ignore"):
            logs = np.log(s)[:, None]
            terms = ll[None, :] + np.where(k[None, :] == 0, 0.0, k[None, :] * logs)
        w = np.broadcast_to(ls, terms.shape)
        log_abs, sign = logsumexp(terms, b=w, axis=1, return_sign=True)
        last = np.maximum(terms[:, -1], terms[:, -2] if K >= 1 else -np.inf)
        tail = np.exp(last - log_abs)
        tail = np.where(np.isfinite(tail), tail, np.where(ls[-1] == 0, 0.0, np.inf))
        if np.all(tail <= t.tail_tol) or K >= t.degree_cap:
            return log_abs, sign, tail, K
        K = min(t.degree_cap, _extrapolate(terms, log_abs, t.tail_tol, K))
