"""Compiled kernels for evaluating every Jack polynomial up to a given
degree at one point.

Values are built one variable at a time with the horizontal-strip
branching rule for the monic (P) normalization,

    P_k(y_1..y_t) = sum_mu psi_{k/mu} y_t^{|k|-|mu|} P_mu(y_1..y_{t-1}),

where the strip coefficient factors over pairs of rows (i <= r) into
ratios of prefix products of b(a, l) = (alpha*a + l + 1) / (alpha*(a+1) + l).
Partitions of full length t are obtained from P_k = e_t * P_{k - 1^t}.

Partitions with at most t parts and weight <= K are stored in
lexicographic order and located through a ranking table, so memory is
linear in the number of partitions.
"""

import numpy as np
from numba import njit

__all__ = [
    "enumerate_partitions",
    "rank_table",
    "jack_p_values",
    "hook_logs",
    "pochhammer_logs",
]


@njit(cache=True)
def _count_partitions(t, K):
    p = np.zeros(t, np.int64)
    s = 0
    count = 0
    while True:
        count += 1
        i = t - 1
        while i >= 0:
            if (i == 0 or p[i] < p[i - 1]) and s + 1 <= K:
                p[i] += 1
                s += 1
                break
            s -= p[i]
            p[i] = 0
            i -= 1
        if i < 0:
            break
    return count


@njit(cache=True)
def enumerate_partitions(t, K):
    """All partitions with at most ``t`` parts and weight <= ``K``.

    Rows are zero padded to length ``t`` and sorted lexicographically
    increasing, which is the order assumed by :func:`rank_table`.
    """
    out = np.zeros((_count_partitions(t, K), t), np.int64)
    p = np.zeros(t, np.int64)
    s = 0
    row = 0
    while True:
        for c in range(t):
            out[row, c] = p[c]
        row += 1
        i = t - 1
        while i >= 0:
            if (i == 0 or p[i] < p[i - 1]) and s + 1 <= K:
                p[i] += 1
                s += 1
                break
            s -= p[i]
            p[i] = 0
            i -= 1
        if i < 0:
            break
    return out


@njit(cache=True)
def rank_table(t, K):
    """Table ``A`` with rank(p) = sum_i A[i, p_i, K - p_1 - ... - p_{i-1}]."""
    # C[i, m, s]: nonincreasing fillings of positions i..t-1 bounded by m
    # with total at most s.
    C = np.zeros((t + 1, K + 1, K + 1), np.int64)
    for m in range(K + 1):
        for s in range(K + 1):
            C[t, m, s] = 1
    for i in range(t - 1, -1, -1):
        for m in range(K + 1):
            for s in range(K + 1):
                acc = 0
                for v in range(min(m, s) + 1):
                    acc += C[i + 1, v, s - v]
                C[i, m, s] = acc
    A = np.zeros((t, K + 2, K + 1), np.int64)
    for i in range(t):
        for s in range(K + 1):
            acc = 0
            for u in range(K + 1):
                A[i, u, s] = acc
                if u <= s:
                    acc += C[i + 1, u, s - u]
            A[i, K + 1, s] = acc
    return A


@njit(cache=True)
def _prefix_b(alpha, nrows, K):
    B = np.ones((nrows, K + 2))
    for l in range(nrows):
        for m in range(1, K + 2):
            a = m - 1
            B[l, m] = B[l, m - 1] * (alpha * a + l + 1.0) / (alpha * (a + 1.0) + l)
    return B


@njit(cache=True)
def _level(prev_vals, prev_A, t, K, alpha, y_new, e_new, B):
    """Values in t+1 variables from values in t variables."""
    parts = enumerate_partitions(t + 1, K)
    A = rank_table(t + 1, K)
    N = parts.shape[0]
    vals = np.zeros(N)
    ypow = np.ones(K + 1)
    for k in range(1, K + 1):
        ypow[k] = ypow[k - 1] * y_new
    kap = np.zeros(t + 1, np.int64)
    mu = np.zeros(t, np.int64)
    part = np.ones(t + 1)
    racc = np.zeros(t + 1, np.int64)
    sacc = np.zeros(t + 1, np.int64)
    for idx in range(N):
        weight = 0
        for c in range(t + 1):
            kap[c] = parts[idx, c]
            weight += kap[c]
        if kap[t] > 0:
            # full length: pull out the determinant
            rk = 0
            s = K
            for c in range(t + 1):
                v = kap[c] - 1
                rk += A[c, v, s]
                s -= v
            vals[idx] = e_new * vals[rk]
            continue
        total = 0.0
        r = 0
        mu[0] = kap[1] - 1
        part[0] = 1.0
        racc[0] = 0
        sacc[0] = 0
        while r >= 0:
            mu[r] += 1
            if mu[r] > kap[r]:
                r -= 1
                continue
            lo = kap[r + 1]
            m_r = mu[r]
            f = 1.0
            for i in range(r + 1):
                l = r - i
                f *= (B[l, mu[i] - lo] * B[l, kap[i] - m_r]) / (
                    B[l, mu[i] - m_r] * B[l, kap[i] - lo]
                )
            part[r + 1] = part[r] * f
            sacc[r + 1] = sacc[r] + m_r
            racc[r + 1] = racc[r] + prev_A[r, m_r, K - sacc[r]]
            if r == t - 1:
                total += part[t] * ypow[weight - sacc[t]] * prev_vals[racc[t]]
            else:
                r += 1
                mu[r] = kap[r + 1] - 1
        vals[idx] = total
    return parts, A, vals


@njit(cache=True)
def jack_p_values(y, alpha, K):
    """Monic Jack polynomials P_k(y) for every partition of weight <= K
    with at most len(y) parts.

    Returns ``(parts, values)`` with parts zero padded to len(y).
    """
    n = y.shape[0]
    parts = enumerate_partitions(1, K)
    A = rank_table(1, K)
    vals = np.ones(parts.shape[0])
    for k in range(1, parts.shape[0]):
        vals[k] = vals[k - 1] * y[0]
    B = _prefix_b(alpha, n, K)
    e = y[0]
    for t in range(1, n):
        e *= y[t]
        parts, A, vals = _level(vals, A, t, K, alpha, y[t], e, B)
    return parts, vals


@njit(cache=True)
def hook_logs(parts, alpha, n):
    """Per-partition logs of the hook products used for normalizations.

    Returns ``(log_upper, log_lower, log_p_identity)`` where
    upper = prod_s (alpha*(a(s)+1) + l(s)), lower = prod_s (alpha*a(s) + l(s) + 1)
    and p_identity = P_k(1, ..., 1) in ``n`` variables.
    """
    N, L = parts.shape
    log_upper = np.zeros(N)
    log_lower = np.zeros(N)
    log_pid = np.zeros(N)
    for idx in range(N):
        width = parts[idx, 0]
        for j in range(1, width + 1):
            # column height
            h = 0
            for i in range(L):
                if parts[idx, i] >= j:
                    h += 1
            for i in range(1, h + 1):
                arm = parts[idx, i - 1] - j
                leg = h - i
                log_upper[idx] += np.log(alpha * (arm + 1.0) + leg)
                lower = np.log(alpha * arm + leg + 1.0)
                log_lower[idx] += lower
                log_pid[idx] += np.log(n - (i - 1.0) + alpha * (j - 1.0)) - lower
    return log_upper, log_lower, log_pid


@njit(cache=True)
def pochhammer_logs(parts, a, half_beta):
    """log|(a)_k| and sign for the generalized Pochhammer symbol."""
    N, L = parts.shape
    logabs = np.zeros(N)
    sign = np.ones(N)
    for idx in range(N):
        for i in range(L):
            base = a - i * half_beta
            for j in range(parts[idx, i]):
                v = base + j
                if v == 0.0:
                    sign[idx] = 0.0
                elif v < 0.0:
                    sign[idx] = -sign[idx]
                    logabs[idx] += np.log(-v)
                else:
                    logabs[idx] += np.log(v)
    return logabs, sign
