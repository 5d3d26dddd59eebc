"""Samplers for the eigenvalues of the beta-Wishart ensemble.

The recursive model builds the singular values of an n x m "matrix" one
column of the covariance at a time.  Level k takes the k-1 singular values
from level k-1 as the diagonal of a broken-arrow matrix whose last column
is ``chi_beta * sqrt(D_k)`` (k-1 times) followed by
``chi_{(m-k+1) beta} * sqrt(D_k)``, and keeps only its singular values.
Only vectors of length n are carried between levels.

The bidiagonal Laguerre model is provided as an independent reference for
``D = I``.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, InvalidArgumentError
from .rng import RngStream
from .secular import (
    DEFLATION_FACTOR,
    BrokenArrowMatrix,
    WorkspaceTrace,
    broken_arrow_singular_values,
    broken_arrow_svd,
)

__all__ = [
    "WishartParams",
    "chi_sample",
    "sample_singular_values",
    "sample_eigenvalues",
    "laguerre_bidiagonal_sample",
    "recursive_singular_values",
]


def _generator(rng):
    if isinstance(rng, RngStream):
        return rng.generator
    if isinstance(rng, np.random.Generator):
        return rng
    raise InvalidArgumentError("rng must be an RngStream or numpy Generator")


def chi_sample(rng, dof, size=None):
    """Draw from the chi distribution with ``dof`` degrees of freedom.

    ``dof`` may be fractional; draws are sqrt(2 * Gamma(dof / 2)).

    Parameters
    ----------
    rng : RngStream or numpy.random.Generator
    dof : float
    size : int or tuple, optional

    Returns
    -------
    float or ndarray
    """
    dof = float(dof)
    if not (np.isfinite(dof) and dof > 0):
        raise InvalidArgumentError("chi degrees of freedom must be positive")
    g = _generator(rng).standard_gamma(dof / 2.0, size=size)
    return np.sqrt(2.0 * g)


@dataclass(frozen=True)
class WishartParams:
    """Parameters (m, n, beta, D) of one beta-Wishart ensemble.

    ``D`` holds the diagonal of the covariance.  A scalar is broadcast to
    ``D * I``.
    """

    m: float
    n: int
    beta: float
    D: np.ndarray = None

    def __post_init__(self):
        n = self.n
        if isinstance(n, bool) or int(n) != n or int(n) < 1:
            raise InvalidArgumentError("n must be a positive integer")
        n = int(n)
        m = float(self.m)
        beta = float(self.beta)
        if not np.isfinite(m) or not m > n - 1:
            raise InvalidArgumentError("m must exceed n-1")
        if not (np.isfinite(beta) and beta > 0):
            raise InvalidArgumentError("beta must be positive")
        D = np.ones(n) if self.D is None else np.asarray(self.D, dtype=float)
        if D.ndim == 0:
            D = np.full(n, float(D))
        if D.shape != (n,):
            raise InvalidArgumentError(f"D must have n = {n} entries")
        if not np.all(np.isfinite(D)) or np.any(D <= 0):
            raise InvalidArgumentError("D entries must be positive")
        D = D.copy()
        D.setflags(write=False)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "D", D)


def _level(b, a, trace):
    try:
        return broken_arrow_singular_values(b, a, trace=trace)
    except ConvergenceError:
        # once more, with a looser deflation threshold, row by row
        out = np.empty_like(a)
        for r in range(a.shape[0]):
            B = BrokenArrowMatrix(b[r], a[r])
            out[r] = broken_arrow_svd(B, tol=16 * DEFLATION_FACTOR).values
        return out


def sample_singular_values(rng, p, size=None, trace=None):
    """Singular values of a draw from the recursive beta-Wishart model.

    Parameters
    ----------
    rng : RngStream or numpy.random.Generator
    p : WishartParams
    size : int, optional
        Number of independent draws.  If omitted a single vector is returned.
    trace : WorkspaceTrace, optional
        Records the floats held per draw between and within levels.

    Returns
    -------
    ndarray, shape (n,) or (size, n)
        Each row sorted decreasing.
    """
    gen = _generator(rng)
    N = 1 if size is None else int(size)
    if N < 0:
        raise InvalidArgumentError("size must be nonnegative")
    root = np.broadcast_to(np.sqrt(p.D), (N, p.n))
    sigma = recursive_singular_values(gen, p.m, p.beta, root, trace)
    return sigma[0] if size is None else sigma


def recursive_singular_values(gen, m, beta, root, trace=None):
    """Level loop of the recursive model with a covariance per draw.

    Parameters
    ----------
    gen : numpy.random.Generator
    m, beta : float
    root : ndarray, shape (N, n)
        Square roots of the covariance diagonals, one row per draw.
    trace : WorkspaceTrace, optional

    Returns
    -------
    ndarray, shape (N, n)
    """
    N, n = root.shape
    sigma = (chi_sample(gen, m * beta, N) * root[:, 0])[:, None]
    for k in range(2, n + 1):
        a = np.empty((N, k))
        a[:, :-1] = chi_sample(gen, beta, (N, k - 1)) * root[:, k - 1, None]
        a[:, -1] = chi_sample(gen, (m - k + 1) * beta, N) * root[:, k - 1]
        if trace is not None:
            # state carried between levels: sigma plus the new column
            trace.record(2 * k - 1)
        sigma = _level(sigma, a, trace)
    return sigma


def sample_eigenvalues(rng, p, size=None, trace=None):
    """Eigenvalues (squared singular values) of recursive model draws,
    sorted decreasing."""
    s = sample_singular_values(rng, p, size=size, trace=trace)
    return s * s


def laguerre_bidiagonal_sample(rng, m, n, beta, size=None, chunk=20000):
    """Eigenvalues of B^t B for the bidiagonal beta-Laguerre model.

    B has diagonal chi_{m beta}, chi_{(m-1) beta}, ..., chi_{(m-n+1) beta}
    and superdiagonal chi_{(n-1) beta}, ..., chi_beta.

    Returns
    -------
    ndarray, shape (n,) or (size, n)
        Eigenvalues sorted decreasing.
    """
    p = WishartParams(m, n, beta)
    gen = _generator(rng)
    N = 1 if size is None else int(size)
    m, n, beta = p.m, p.n, p.beta
    out = np.empty((N, n))
    for start in range(0, N, chunk):
        R = min(chunk, N - start)
        B = np.zeros((R, n, n))
        for j in range(n):
            B[:, j, j] = chi_sample(gen, (m - j) * beta, R)
        for j in range(n - 1):
            B[:, j, j + 1] = chi_sample(gen, (n - 1 - j) * beta, R)
        s = np.linalg.svd(B, compute_uv=False)
        out[start:start + R] = s * s
    return out[0] if size is None else out
