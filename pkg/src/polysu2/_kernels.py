"""Numba kernels for the tridiagonal eigensolver.

Hot loops only; all policy (bracketing, clustering, sign conventions) lives
in spectral.py. Kernels are deterministic: every parallel iteration writes
its own slot and the start vectors come from a fixed xorshift stream.
"""

from __future__ import annotations

import numpy as np
from numba import njit, prange

_TINY = 1e-300
_U64 = np.uint64


@njit(cache=True)
def sturm_count_scalar(diag, off2, lam):
    """Number of eigenvalues strictly below lam (negative LDL^T pivots)."""
    n = diag.shape[0]
    count = 0
    q = 1.0
    for v in range(n):
        if v == 0:
            q = diag[0] - lam
        else:
            q = (diag[v] - lam) - off2[v - 1] / q
        if q == 0.0:
            q = -_TINY
        if q < 0.0:
            count += 1
    return count


@njit(cache=True, parallel=True)
def sturm_count_batch(diag, off2, lams):
    out = np.empty(lams.shape[0], dtype=np.int64)
    for i in prange(lams.shape[0]):
        out[i] = sturm_count_scalar(diag, off2, lams[i])
    return out


@njit(cache=True, parallel=True)
def bisect_eigenvalues(diag, off2, lo, hi, tol):
    """All eigenvalues by index-targeted bisection on the Sturm count.

    Each eigenvalue i keeps a bracket with count(lo) <= i < count(hi);
    brackets shrink independently until narrower than tol.
    """
    n = diag.shape[0]
    lam = np.empty(n)
    for i in prange(n):
        a = lo
        c = hi
        while c - a > tol:
            mid = 0.5 * (a + c)
            if sturm_count_scalar(diag, off2, mid) > i:
                c = mid
            else:
                a = mid
        lam[i] = 0.5 * (a + c)
    return lam


@njit(cache=True)
def newton_refine_scalar(diag, off2, lam, lo, hi):
    """One Newton step on the characteristic polynomial via pivot logs.

    d/dlam log det(T - lam) accumulated from the pivot recurrence; the
    step is rejected if it leaves [lo, hi].
    """
    n = diag.shape[0]
    q = 1.0
    dq = 0.0
    slope = 0.0
    for v in range(n):
        if v == 0:
            q = diag[0] - lam
            dq = -1.0
        else:
            qm = q
            dqm = dq
            q = (diag[v] - lam) - off2[v - 1] / qm
            dq = -1.0 + off2[v - 1] * dqm / (qm * qm)
        if q == 0.0:
            q = -_TINY
        slope += dq / q
    if slope == 0.0:
        return lam
    step = -1.0 / slope
    out = lam + step
    if out < lo or out > hi:
        return lam
    return out


@njit(cache=True, parallel=True)
def newton_refine_batch(diag, off2, lams, width):
    out = np.empty(lams.shape[0])
    for i in prange(lams.shape[0]):
        out[i] = newton_refine_scalar(diag, off2, lams[i], lams[i] - width, lams[i] + width)
    return out


@njit(cache=True)
def _xorshift_fill(x, salt):
    state = _U64(88172645463325252) ^ (_U64(0x9E3779B97F4A7C15) * _U64(salt + 1))
    for i in range(x.shape[0]):
        state ^= state << _U64(13)
        state ^= state >> _U64(7)
        state ^= state << _U64(17)
        x[i] = np.float64(state) / 1.8446744073709552e19 - 0.5


@njit(cache=True)
def solve_shifted_inplace(diag, off, lam, x):
    """Solve (T - lam I) y = x in place; LU with partial pivoting.

    T is symmetric tridiagonal with diagonal diag and off-diagonal off;
    pivoting introduces a second superdiagonal.
    """
    n = diag.shape[0]
    u0 = np.empty(n)
    u1 = np.empty(n)
    u2 = np.empty(n)
    mult = np.empty(n)
    swap = np.zeros(n, dtype=np.bool_)
    c0 = diag[0] - lam
    c1 = off[0] if n > 1 else 0.0
    c2 = 0.0
    for i in range(n - 1):
        bi = off[i]
        r0 = diag[i + 1] - lam
        r1 = off[i + 1] if i + 2 < n else 0.0
        if abs(bi) > abs(c0):
            swap[i] = True
            u0[i] = bi
            u1[i] = r0
            u2[i] = r1
            m = c0 / bi
            c0 = c1 - m * r0
            c1 = c2 - m * r1
        else:
            if c0 == 0.0:
                c0 = -_TINY
            u0[i] = c0
            u1[i] = c1
            u2[i] = c2
            m = bi / c0
            c0 = r0 - m * c1
            c1 = r1 - m * c2
        c2 = 0.0
        mult[i] = m
    if c0 == 0.0:
        c0 = -_TINY
    u0[n - 1] = c0
    u1[n - 1] = 0.0
    u2[n - 1] = 0.0
    for i in range(n - 1):
        if swap[i]:
            t = x[i]
            x[i] = x[i + 1]
            x[i + 1] = t
        x[i + 1] -= mult[i] * x[i]
    x[n - 1] = x[n - 1] / u0[n - 1]
    if n > 1:
        x[n - 2] = (x[n - 2] - u1[n - 2] * x[n - 1]) / u0[n - 2]
    for i in range(n - 3, -1, -1):
        x[i] = (x[i] - u1[i] * x[i + 1] - u2[i] * x[i + 2]) / u0[i]


@njit(cache=True, parallel=True)
def inverse_iteration(diag, off, lams, n_iter):
    """One eigenvector per shift; columns of the returned (n, m) array."""
    n = diag.shape[0]
    m = lams.shape[0]
    q = np.empty((n, m))
    for k in prange(m):
        x = np.empty(n)
        _xorshift_fill(x, k)
        for _ in range(n_iter):
            solve_shifted_inplace(diag, off, lams[k], x)
            nrm = 0.0
            for i in range(n):
                nrm += x[i] * x[i]
            nrm = np.sqrt(nrm)
            for i in range(n):
                x[i] /= nrm
        for i in range(n):
            q[i, k] = x[i]
    return q


@njit(cache=True, parallel=True)
def rayleigh_quotients(diag, off, q):
    """x^T T x per column of q (columns assumed unit norm)."""
    n, m = q.shape
    out = np.empty(m)
    for k in prange(m):
        acc = 0.0
        for i in range(n):
            t = diag[i] * q[i, k]
            if i > 0:
                t += off[i - 1] * q[i - 1, k]
            if i + 1 < n:
                t += off[i] * q[i + 1, k]
            acc += q[i, k] * t
        out[k] = acc
    return out


def warm_up():
    """Trigger JIT compilation on a tiny problem (cached across runs)."""
    diag = np.array([0.0, 0.0, 0.0])
    off = np.array([2.0, np.sqrt(12.0)])
    off2 = off * off
    sturm_count_batch(diag, off2, np.array([0.0]))
    lam = bisect_eigenvalues(diag, off2, -5.0, 5.0, 1e-12)
    newton_refine_batch(diag, off2, lam, 1e-9)
    q = inverse_iteration(diag, off, lam, 2)
    rayleigh_quotients(diag, off, q)
