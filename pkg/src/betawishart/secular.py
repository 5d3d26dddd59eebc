"""Eigenvalues of arrow matrices and singular values of broken-arrow
matrices through their secular equations.

An arrow matrix has diagonal head ``d`` (length n-1), arrow column
``c[:n-1]`` and corner ``c[n-1]``.  Its eigenvalues are the roots of

    f(lam) = c_n - lam - sum_j c_j^2 / (d_j - lam),

one in each gap of the interlacing pattern.  A broken-arrow matrix is
upper triangular with diagonal ``b`` (length n-1) and last column ``a``;
its squared singular values are the eigenvalues of the rank-one update
``diag(b^2, 0) + a a^t``, i.e. roots of

    g(s) = 1 + sum_j a_j^2 / (p_j^2 - s^2),   p = (b_1, ..., b_{n-1}, 0).

Every root is computed in coordinates shifted to the nearer pole of its
gap, which keeps the distance to that pole (and hence the last-row
vector ``q``) accurate.  Iterations use a one-pole-plus-linear model of
the secular function, safeguarded by bisection.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError, InvalidArgumentError

__all__ = [
    "ArrowMatrix",
    "BrokenArrowMatrix",
    "SpectralFactorization",
    "WorkspaceTrace",
    "arrow_eigen",
    "broken_arrow_svd",
    "broken_arrow_singular_values",
    "secular_root",
    "last_row_q",
    "deflate",
    "DEFLATION_FACTOR",
    "MAX_ITERATIONS",
]

EPS = np.finfo(float).eps
DEFLATION_FACTOR = 64 * EPS
MAX_ITERATIONS = 100


# ---------------------------------------------------------------------------
# Data types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ArrowMatrix:
    """Symmetric arrow matrix [[diag(d), c[:-1]], [c[:-1]^t, c[-1]]]."""

    d: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        d = np.atleast_1d(np.asarray(self.d, dtype=float))
        c = np.atleast_1d(np.asarray(self.c, dtype=float))
        if d.ndim != 1 or c.ndim != 1 or c.size != d.size + 1:
            raise InvalidArgumentError("need len(c) == len(d) + 1")
        if not (np.all(np.isfinite(d)) and np.all(np.isfinite(c))):
            raise InvalidArgumentError("arrow matrix entries must be finite")
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "c", c)

    @property
    def n(self):
        return self.c.size

    def to_dense(self):
        n = self.n
        A = np.zeros((n, n))
        A[np.arange(n - 1), np.arange(n - 1)] = self.d
        A[:-1, -1] = self.c[:-1]
        A[-1, :-1] = self.c[:-1]
        A[-1, -1] = self.c[-1]
        return A


@dataclass(frozen=True)
class BrokenArrowMatrix:
    """Upper triangular [[diag(b), a[:-1]], [0, a[-1]]]."""

    b: np.ndarray
    a: np.ndarray

    def __post_init__(self):
        b = np.atleast_1d(np.asarray(self.b, dtype=float))
        a = np.atleast_1d(np.asarray(self.a, dtype=float))
        if b.ndim != 1 or a.ndim != 1 or a.size != b.size + 1:
            raise InvalidArgumentError("need len(a) == len(b) + 1")
        if not (np.all(np.isfinite(b)) and np.all(np.isfinite(a))):
            raise InvalidArgumentError("broken arrow entries must be finite")
        if np.any(b <= 0):
            raise InvalidArgumentError("broken arrow diagonal b must be positive")
        if a[-1] < 0:
            raise InvalidArgumentError("corner entry a_n must be nonnegative")
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "a", a)

    @property
    def n(self):
        return self.a.size

    def to_dense(self):
        n = self.n
        B = np.zeros((n, n))
        B[np.arange(n - 1), np.arange(n - 1)] = self.b
        B[:, -1] = self.a
        return B

    def gram(self):
        """The arrow matrix B^t B."""
        return ArrowMatrix(self.b ** 2, np.append(self.a[:-1] * self.b, np.dot(self.a, self.a)))


@dataclass(frozen=True)
class SpectralFactorization:
    """Sorted values with the last row ``q`` of the eigenvector matrix.

    ``orthogonality_defect`` is |1 - ||q||| before renormalization and
    ``deflated`` counts the coordinates removed before root finding.
    """

    values: np.ndarray
    q: np.ndarray
    orthogonality_defect: float = 0.0
    deflated: int = 0


@dataclass
class WorkspaceTrace:
    """Counts the largest number of floats held per draw by the batched
    singular value routine (recursion state plus solver temporaries)."""

    peak_floats_per_draw: int = 0
    calls: int = field(default=0)

    def record(self, floats):
        self.calls += 1
        if floats > self.peak_floats_per_draw:
            self.peak_floats_per_draw = int(floats)


# ---------------------------------------------------------------------------
# Root finding core
# ---------------------------------------------------------------------------
# A "problem" row holds poles (descending), positive weights w and the index
# k of the wanted root.  In arrow mode the secular function (negated so that
# it increases) is (lam - c_n) + sum w_j / (d_j - lam); roots k lie in
# (d_k, d_{k-1}).  In svd mode it is 1 + sum w_j / (p_j^2 - s), s = sigma^2,
# and root k lies in (p_k^2, p_{k-1}^2).  In a frame centred at pole o both
# read h(mu) = alpha + gamma*mu + sum w_j / (D_j - mu) with D_o = 0.


def _frame(mode, poles, cn, o):
    rows = np.arange(poles.shape[0])
    po = poles[rows, o]
    if mode == "arrow":
        return poles - po[:, None], po - cn
    return (poles - po[:, None]) * (poles + po[:, None]), np.ones(poles.shape[0])


def _iterate(D, w, alpha, gamma, o, lo, hi, above):
    """Solve h(mu) = 0 for each row inside (lo, hi).

    ``above`` marks rows whose origin pole is the lower end of the gap, so
    that the root has mu > 0.
    """
    R = D.shape[0]
    rows = np.arange(R)
    wo = w[rows, o]
    mu = 0.5 * (lo + hi)
    active = np.ones(R, dtype=bool)
    for _ in range(MAX_ITERATIONS):
        idx = np.nonzero(active)[0]
        if idx.size == 0:
            return mu
        m = mu[idx]
        Dm = D[idx] - m[:, None]
        t = w[idx] / Dm
        h = alpha[idx] + gamma * m + t.sum(axis=1)
        scale = np.abs(alpha[idx]) + gamma * np.abs(m) + np.abs(t).sum(axis=1)
        below = h < 0
        lo[idx] = np.where(below, m, lo[idx])
        hi[idx] = np.where(below, hi[idx], m)
        done = np.abs(h) <= 4 * EPS * scale

        r = np.arange(idx.size)
        to = t[r, o[idx]]
        # one pole kept exactly, the rest linearized at m
        slope = gamma + (t * t / w[idx]).sum(axis=1) - to * to / wo[idx]
        A = (h - to) - slope * m
        W = wo[idx]
        disc = np.sqrt(A * A + 4.0 * slope * W)
        with np.errstate(divide="ignore", invalid="ignore"):
            up = np.where(A >= 0, 2.0 * W / (A + disc), (disc - A) / (2.0 * slope))
            down = np.where(A <= 0, -2.0 * W / (disc - A), -(A + disc) / (2.0 * slope))
        new = np.where(above[idx], up, down)
        l, u = lo[idx], hi[idx]
        bad = ~(np.isfinite(new) & (new > l) & (new < u))
        new = np.where(bad, 0.5 * (l + u), new)
        stalled = np.abs(new - m) <= 2 * EPS * np.abs(new)
        collapsed = (u - l) <= 2 * EPS * np.maximum(np.abs(l), np.abs(u))
        mu[idx] = np.where(done, m, new)
        active[idx] = ~(done | stalled | collapsed)
    idx = np.nonzero(active)[0]
    if idx.size == 0:
        return mu
    j = idx[0]
    raise ConvergenceError(
        f"secular iteration did not converge in {MAX_ITERATIONS} steps "
        f"(shifted bracket [{lo[j]:.17g}, {hi[j]:.17g}] about pole {o[j]})",
        bracket=(float(lo[j]), float(hi[j])),
    )


def _solve(mode, poles, w, cn, ks):
    """Root ``ks[r]`` of problem row r; returns (mu, o, D).

    ``mu`` is measured from pole ``o`` in the frame of that pole and ``D``
    holds the shifted poles of the same frame.
    """
    R, p = poles.shape
    rows = np.arange(R)
    gamma = 1.0 if mode == "arrow" else 0.0
    has_lo = ks < p
    has_up = ks >= 1
    o_lo = np.minimum(ks, p - 1)
    o_up = np.maximum(ks - 1, 0)

    D_lo, a_lo = _frame(mode, poles, cn, o_lo)
    D_up, a_up = _frame(mode, poles, cn, o_up)

    # decide which end of the gap is nearer the root
    gap = np.where(has_lo & has_up, D_lo[rows, o_up], 1.0)
    mid = 0.5 * gap
    with np.errstate(divide="ignore", invalid="ignore"):
        h_mid = a_lo + gamma * mid + (w / (D_lo - mid[:, None])).sum(axis=1)
    above = has_lo & (~has_up | (h_mid >= 0))

    D = np.where(above[:, None], D_lo, D_up)
    alpha = np.where(above, a_lo, a_up)
    o = np.where(above, o_lo, o_up)

    lo = np.where(above, 0.0, -mid)
    hi = np.where(above, mid, 0.0)
    wsum = w.sum(axis=1)
    if mode == "arrow":
        top = ~has_up
        ext = np.maximum(0.0, cn - poles[:, 0]) + np.sqrt(wsum)
        hi = np.where(top, ext * (1 + 8 * EPS) + np.finfo(float).tiny, hi)
        bottom = ~has_lo
        ext = np.maximum(0.0, poles[:, -1] - cn) + np.sqrt(wsum)
        lo = np.where(bottom, -ext * (1 + 8 * EPS) - np.finfo(float).tiny, lo)
    else:
        top = ~has_up
        hi = np.where(top, wsum * (1 + 8 * EPS) + np.finfo(float).tiny, hi)
    mu = _iterate(D, w, alpha, gamma, o, lo, hi, above)
    return mu, o, D


def _arrow_roots(d, c):
    """All eigenvalues and q of a deflated arrow matrix (head sorted)."""
    p = d.size
    if p == 0:
        return np.array([c[0]]), np.ones(1)
    n = p + 1
    poles = np.broadcast_to(d, (n, p)).copy()
    w = np.broadcast_to(c[:-1] ** 2, (n, p)).copy()
    cn = np.full(n, c[-1])
    mu, o, D = _solve("arrow", poles, w, cn, np.arange(n))
    lam = d[o] + mu
    q = 1.0 / np.sqrt(1.0 + (w / (mu[:, None] - D) ** 2).sum(axis=1))
    return lam, q


def _svd_roots(poles, z):
    """Roots of 1 + sum z_j^2 / (p_j^2 - s), one above each pole.

    ``poles`` is strictly decreasing and may end with a zero pseudo pole.
    Returns sigma and q (for B^t B with head b = nonzero poles).
    """
    p = poles.size
    P = np.broadcast_to(poles, (p, p)).copy()
    w = np.broadcast_to(z ** 2, (p, p)).copy()
    mu, o, D = _solve("svd", P, w, None, np.arange(p))
    sigma = _sigma_from_shift(poles[o], mu)
    q = 1.0 / np.sqrt(1.0 + ((P * P * w) / (mu[:, None] - D) ** 2).sum(axis=1))
    return sigma, q


def _sigma_from_shift(po, mu):
    root = np.sqrt(np.maximum(po * po + mu, 0.0))
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(po > 0, po + mu / (po + root), root)
    return out


# ---------------------------------------------------------------------------
# Deflation
# ---------------------------------------------------------------------------

def deflate(A, tol=DEFLATION_FACTOR):
    """Split off decoupled coordinates of an arrow matrix.

    Parameters
    ----------
    A : ArrowMatrix
    tol : float
        Relative threshold; a coupling |c_j| <= tol * max(|d|, |c|) is
        treated as zero and head entries closer than that are merged.

    Returns
    -------
    reduced : ArrowMatrix
        Sorted strictly decreasing head with nonzero couplings.
    fixed : list of (value, vector)
        Exact eigenpairs in the original coordinates; each vector has a zero
        last entry.
    """
    n = A.n
    scale = max(np.max(np.abs(A.d), initial=0.0), np.max(np.abs(A.c)))
    thr = tol * scale
    order = np.argsort(-A.d, kind="stable")
    d = list(A.d[order])
    c = list(A.c[:-1][order])
    # basis vectors (original coordinates) of the kept head coordinates
    basis = [np.eye(n)[j] for j in order]
    fixed = []

    keep_d, keep_c, keep_v = [], [], []
    for dj, cj, vj in zip(d, c, basis):
        if abs(cj) <= thr:
            fixed.append((float(dj), vj))
        else:
            keep_d.append(dj)
            keep_c.append(cj)
            keep_v.append(vj)

    i = 0
    while i + 1 < len(keep_d):
        if keep_d[i] - keep_d[i + 1] <= thr:
            c1, c2 = keep_c[i], keep_c[i + 1]
            r = float(np.hypot(c1, c2))
            cs, sn = c1 / r, c2 / r
            v1, v2 = keep_v[i], keep_v[i + 1]
            keep_c[i] = r
            keep_v[i] = cs * v1 + sn * v2
            fixed.append((float(keep_d[i + 1]), -sn * v1 + cs * v2))
            del keep_d[i + 1], keep_c[i + 1], keep_v[i + 1]
        else:
            i += 1
    reduced = ArrowMatrix(np.array(keep_d, dtype=float), np.append(keep_c, A.c[-1]))
    return reduced, fixed


def _finish(values, q, deflated):
    order = np.argsort(-values, kind="stable")
    values = values[order]
    q = np.abs(q[order])
    norm = float(np.linalg.norm(q))
    defect = abs(1.0 - norm)
    if norm > 0:
        q = q / norm
    return SpectralFactorization(values, q, defect, deflated)


# ---------------------------------------------------------------------------
# Public solvers
# ---------------------------------------------------------------------------

def arrow_eigen(A, tol=DEFLATION_FACTOR):
    """Eigenvalues of an arrow matrix with the last row of its eigenvectors.

    Parameters
    ----------
    A : ArrowMatrix
    tol : float, optional
        Relative deflation threshold, see :func:`deflate`.

    Returns
    -------
    SpectralFactorization
        Eigenvalues in decreasing order; ``q`` is nonnegative.
    """
    if A.n == 1:
        return SpectralFactorization(A.c.copy(), np.ones(1))
    reduced, fixed = deflate(A, tol)
    lam, q = _arrow_roots(reduced.d, reduced.c)
    if fixed:
        lam = np.concatenate([lam, [v for v, _ in fixed]])
        q = np.concatenate([q, np.zeros(len(fixed))])
    return _finish(lam, q, len(fixed))


def broken_arrow_svd(B, tol=DEFLATION_FACTOR):
    """Singular values of a broken-arrow matrix and the last row of its
    right singular vectors.

    Parameters
    ----------
    B : BrokenArrowMatrix
    tol : float, optional
        Relative deflation threshold.

    Returns
    -------
    SpectralFactorization
    """
    n = B.n
    if n == 1:
        return SpectralFactorization(np.abs(B.a), np.ones(1))
    order = np.argsort(-B.b, kind="stable")
    b = B.b[order]
    a_head = B.a[:-1][order]
    an = B.a[-1]
    thr = tol * max(b[0], np.max(np.abs(B.a)))

    if b[-1] <= thr:
        # a head entry indistinguishable from the zero pseudo pole: solve
        # the Gram arrow matrix instead
        f = arrow_eigen(BrokenArrowMatrix(b, np.append(a_head, an)).gram(), tol)
        return SpectralFactorization(np.sqrt(np.maximum(f.values, 0.0)), f.q,
                                     f.orthogonality_defect, f.deflated)

    fixed_vals = []
    keep_b, keep_a = [], []
    for bj, aj in zip(b, a_head):
        if abs(aj) <= thr:
            fixed_vals.append(bj)
        else:
            keep_b.append(bj)
            keep_a.append(aj)
    i = 0
    while i + 1 < len(keep_b):
        if keep_b[i] - keep_b[i + 1] <= thr:
            keep_a[i] = float(np.hypot(keep_a[i], keep_a[i + 1]))
            fixed_vals.append(keep_b[i + 1])
            del keep_b[i + 1], keep_a[i + 1]
        else:
            i += 1
    keep_b = np.array(keep_b)
    keep_a = np.array(keep_a)
    fixed_q = [0.0] * len(fixed_vals)

    if abs(an) <= thr:
        # singular: sigma = 0 with q from the last-row formula at lam = 0
        fixed_vals.append(0.0)
        fixed_q.append(1.0 / np.sqrt(1.0 + np.sum((keep_a / keep_b) ** 2)))
        poles, z = keep_b, keep_a
    else:
        poles, z = np.append(keep_b, 0.0), np.append(keep_a, an)

    if poles.size:
        sigma, q = _svd_roots(poles, z)
    else:
        sigma, q = np.zeros(0), np.zeros(0)
    sigma = np.concatenate([sigma, fixed_vals])
    q = np.concatenate([q, fixed_q])
    return _finish(sigma, q, len(fixed_vals))


def broken_arrow_singular_values(b, a, trace=None, tol=DEFLATION_FACTOR):
    """Singular values for a batch of broken-arrow matrices.

    Roots are found one gap at a time across the whole batch, so the
    temporary storage per matrix stays proportional to n.

    Parameters
    ----------
    b : ndarray, shape (batch, n-1)
        Positive diagonals, each row sorted decreasing.
    a : ndarray, shape (batch, n)
        Last columns.
    trace : WorkspaceTrace, optional
        Receives the number of floats held per matrix.

    Returns
    -------
    ndarray, shape (batch, n)
        Singular values, each row decreasing.
    """
    b = np.asarray(b, dtype=float)
    a = np.asarray(a, dtype=float)
    batch, n = a.shape
    if n == 1:
        return np.abs(a)
    thr = tol * np.maximum(b.max(axis=1), np.abs(a).max(axis=1))
    needs = (
        (np.abs(a) <= thr[:, None]).any(axis=1)
        | ((b[:, :-1] - b[:, 1:]) <= thr[:, None]).any(axis=1)
        | (b[:, -1] <= thr)
    )
    out = np.empty((batch, n))
    clean = np.nonzero(~needs)[0]
    if clean.size:
        poles = np.concatenate([b[clean], np.zeros((clean.size, 1))], axis=1)
        w = a[clean] ** 2
        if trace is not None:
            # poles, weights, two shifted frames, terms and result per draw
            trace.record(6 * n + 4)
        for k in range(n):
            ks = np.full(clean.size, k)
            mu, o, _ = _solve("svd", poles, w, None, ks)
            out[clean, k] = _sigma_from_shift(poles[np.arange(clean.size), o], mu)
    for r in np.nonzero(needs)[0]:
        out[r] = broken_arrow_svd(BrokenArrowMatrix(b[r], a[r]), tol).values
    return out


def secular_root(bracket_lo, bracket_hi, d, c):
    """Root of f(lam) = c_n - lam - sum c_j^2/(d_j - lam) inside a bracket.

    The endpoints may be poles or infinite; f must change sign across the
    bracket and no pole with a nonzero weight may lie strictly inside it.

    Returns
    -------
    float
    """
    d = np.atleast_1d(np.asarray(d, dtype=float))
    c = np.atleast_1d(np.asarray(c, dtype=float))
    if c.size != d.size + 1:
        raise InvalidArgumentError("need len(c) == len(d) + 1")
    lo, hi = float(bracket_lo), float(bracket_hi)
    if not lo < hi:
        raise InvalidArgumentError("bracket must satisfy lo < hi")
    w = c[:-1] ** 2
    live = w > 0
    if not np.any(live):
        root = float(c[-1])
        if not lo <= root <= hi:
            raise InvalidArgumentError("f does not change sign on the bracket")
        return root
    d, w = d[live], w[live]
    bound = (max(abs(c[-1]), np.max(np.abs(d))) + np.sqrt(w.sum())) * (1 + 8 * EPS) + 1e-300
    lo, hi = max(lo, -bound), min(hi, bound)
    if np.any((d > lo) & (d < hi)):
        raise InvalidArgumentError("bracket contains a pole")
    if np.any(d == lo):
        o = int(np.nonzero(d == lo)[0][0])
    elif np.any(d == hi):
        o = int(np.nonzero(d == hi)[0][0])
    else:
        o = int(np.argmin(np.minimum(np.abs(d - lo), np.abs(d - hi))))
    D = (d - d[o])[None, :]
    alpha = np.array([d[o] - c[-1]])
    lo_s, hi_s = lo - d[o], hi - d[o]

    def h(m):
        with np.errstate(divide="ignore"):
            return alpha[0] + m + np.sum(w / (D[0] - m))

    h_lo = -np.inf if lo_s in D[0] else h(lo_s)
    h_hi = np.inf if hi_s in D[0] else h(hi_s)
    if not (h_lo <= 0 <= h_hi):
        raise InvalidArgumentError("f does not change sign on the bracket")
    if h_lo == 0:
        return lo
    if h_hi == 0:
        return hi
    mu = _iterate(D, w[None, :], alpha, 1.0, np.array([o]),
                  np.array([lo_s]), np.array([hi_s]), np.array([lo_s >= 0.0]))
    return float(d[o] + mu[0])


def last_row_q(lam, d, c):
    """Last row of the eigenvector matrix of an arrow matrix.

    q_k = (1 + sum_j c_j^2 / (lam_k - d_j)^2)^(-1/2), renormalized to unit
    length.  Returns ``(q, defect)`` with defect = |1 - ||q|| before
    renormalization.
    """
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    d = np.atleast_1d(np.asarray(d, dtype=float))
    c = np.atleast_1d(np.asarray(c, dtype=float))
    if d.size == 0:
        return np.ones(lam.size), 0.0
    diff = lam[:, None] - d[None, :]
    close = np.abs(diff) <= EPS * np.maximum(np.abs(lam[:, None]), np.abs(d[None, :]))
    if np.any(close & (c[None, :-1] != 0)):
        raise InvalidArgumentError("an eigenvalue coincides with a head entry: deflation missing")
    with np.errstate(divide="ignore"):
        terms = np.where(c[None, :-1] == 0, 0.0, c[None, :-1] ** 2 / diff ** 2)
    q = 1.0 / np.sqrt(1.0 + terms.sum(axis=1))
    norm = float(np.linalg.norm(q))
    return q / norm, abs(1.0 - norm)
