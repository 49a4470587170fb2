"""Scalar-loop kernels.

Written in the numba nopython subset and compiled with ``njit`` when the
numba backend is active; otherwise they stay plain Python functions.
"""

import math

import numpy as np

from ._jit import jit


@jit
def _falling(n, d):
    out = 1.0
    for i in range(d):
        out *= n - i
    return out


@jit
def _ipow(z, n):
    out = 1.0 + 0.0j
    for _ in range(n):
        out *= z
    return out


@jit
def _start_index(dx, dq):
    # first j whose coefficient [j]_dx * [j(j+1)/2]_dq is nonzero
    j = dx
    while (j * (j + 1)) // 2 < dq:
        j += 1
    return j


@jit
def series_sum(q, x, N, dx, dq):
    """Sum_{j<=N} d^dx/dx d^dq/dq [q^{j(j+1)/2} x^j] with Neumaier compensation.

    Returns (value, sum of |terms|).
    """
    j0 = _start_index(dx, dq)
    if N < j0:
        return 0.0 + 0.0j, 0.0
    e0 = (j0 * (j0 + 1)) // 2
    T = _ipow(q, e0 - dq) * _ipow(x, j0 - dx)
    qp = _ipow(q, j0 + 1)
    sr = 0.0
    cr = 0.0
    si = 0.0
    ci = 0.0
    mag = 0.0
    for j in range(j0, N + 1):
        e = (j * (j + 1)) // 2
        t = _falling(j, dx) * _falling(e, dq) * T
        tr = t.real
        ti = t.imag
        s = sr + tr
        if abs(sr) >= abs(tr):
            cr += (sr - s) + tr
        else:
            cr += (tr - s) + sr
        sr = s
        s = si + ti
        if abs(si) >= abs(ti):
            ci += (si - s) + ti
        else:
            ci += (ti - s) + si
        si = s
        mag += abs(t)
        T = T * qp * x
        qp = qp * q
    return complex(sr + cr, si + ci), mag


@jit
def series_sum_many(q, xs, N, dx, dq):
    n = xs.shape[0]
    vals = np.empty(n, dtype=np.complex128)
    mags = np.empty(n, dtype=np.float64)
    for i in range(n):
        v, m = series_sum(q, xs[i], N, dx, dq)
        vals[i] = v
        mags[i] = m
    return vals, mags


@jit
def newton_ratio(q, N, z):
    """p(z)/p'(z) for the degree-N truncation p, evaluated with rescaled terms.

    Term magnitudes are formed from logarithms and normalised by the largest
    one, so huge or tiny coefficients never overflow.
    """
    if z == 0:
        return 1.0 / q
    aq = abs(q)
    az = abs(z)
    lq = math.log(aq)
    lz = math.log(az)
    smax = -1e300
    for j in range(N + 1):
        a = 0.5 * j * (j + 1) * lq + j * lz
        if a > smax:
            smax = a
    uq = q / aq
    uz = z / az
    ph = 1.0 + 0.0j
    uqp = uq
    s0 = 0.0 + 0.0j
    s1 = 0.0 + 0.0j
    for j in range(N + 1):
        a = 0.5 * j * (j + 1) * lq + j * lz
        t = math.exp(a - smax) * ph
        s0 += t
        s1 += j * t
        ph = ph * uqp * uz
        uqp = uqp * uq
    return z * s0 / s1


@jit
def aberth(q, N, z0, max_iter, rtol):
    """Ehrlich-Aberth iteration (Gauss-Seidel sweep) for the degree-N truncation.

    Returns (roots, converged flags, sweeps used).
    """
    z = z0.copy()
    done = np.zeros(N, dtype=np.bool_)
    it = 0
    for it in range(1, max_iter + 1):
        active = 0
        for i in range(N):
            if done[i]:
                continue
            active += 1
            w = newton_ratio(q, N, z[i])
            s = 0.0 + 0.0j
            for k in range(N):
                if k != i:
                    s += 1.0 / (z[i] - z[k])
            c = w / (1.0 - w * s)
            z[i] = z[i] - c
            if abs(c) <= rtol * abs(z[i]):
                done[i] = True
        if active == 0:
            break
    return z, done, it


@jit
def theta_star_product(q, y, X, k, M):
    """Truncated triple product for Theta*(q, y), y = -q^{-k} + X when k >= 1.

    With k >= 1 the m = k factor (1 + y q^k) is formed as X q^k, so the value
    keeps full relative accuracy next to the zero mu_k. With k = 0, X is
    ignored. Returns (value, first-order relative rounding bound).
    """
    u = 1.1102230246251565e-16
    g = 2.3 * u  # complex multiply
    val = 1.0 + 0.0j
    rel = 0.0
    qm = q  # q^m
    qm1 = 1.0 + 0.0j  # q^{m-1}
    inv_y = 1.0 / y
    qinv = 1.0 / q if q != 0 else 0.0 + 0.0j
    r = _ipow(qinv, k)  # becomes q^{m-k} after k + m multiplications
    for m in range(1, M + 1):
        r = r * q
        pw = (m + 2) * g
        f1 = 1.0 - qm
        rel += u + pw * abs(qm) / abs(f1)
        if k >= 1:
            if m == k:
                f2 = X * qm
                rel += pw + g
            else:
                pr = (k + m + 2) * g
                a2 = X * qm
                f2 = (1.0 - r) + a2
                af2 = abs(f2)
                if af2 == 0.0:
                    return 0.0 + 0.0j, 0.0
                rel += (u * (1.0 + abs(r) + abs(a2)) + pr * abs(r) + (pw + g) * abs(a2)) / af2
        else:
            a2 = y * qm
            f2 = 1.0 + a2
            af2 = abs(f2)
            if af2 == 0.0:
                return 0.0 + 0.0j, 0.0
            rel += u + (pw + g) * abs(a2) / af2
        a3 = qm1 * inv_y
        f3 = 1.0 + a3
        af3 = abs(f3)
        if af3 == 0.0:
            return 0.0 + 0.0j, 0.0
        rel += u + (pw + 2 * g) * abs(a3) / af3
        val = val * f1 * f2 * f3
        rel += 3 * g
        qm1 = qm
        qm = qm * q
    return val, rel


@jit
def elementary_symmetric(v, kmax):
    """e_0..e_kmax of the entries of v by the one-variable-at-a-time recurrence."""
    e = np.zeros(kmax + 1)
    e[0] = 1.0
    n = v.shape[0]
    for i in range(n):
        x = v[n - 1 - i]  # smallest entries first
        top = min(kmax, i + 1)
        for k in range(top, 0, -1):
            e[k] += x * e[k - 1]
    return e
