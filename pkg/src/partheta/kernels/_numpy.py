"""Vectorised numpy versions of the hot kernels (fallback when numba is off)."""

import numpy as np

from . import _loops


def _coefficients(N, dx, dq):
    j = np.arange(N + 1, dtype=np.float64)
    e = 0.5 * j * (j + 1)
    c = np.ones(N + 1)
    for i in range(dx):
        c *= j - i
    for i in range(dq):
        c *= e - i
    return c


def series_sum_many(q, xs, N, dx, dq):
    xs = np.asarray(xs, dtype=np.complex128)
    j0 = _loops._start_index(dx, dq)
    if N < j0:
        return np.zeros(xs.shape, np.complex128), np.zeros(xs.shape)
    q = complex(q)
    e0 = (j0 * (j0 + 1)) // 2
    js = np.arange(j0, N + 1)
    # multiplier from term j to j+1 is q^{j+1} x
    qpow = np.cumprod(np.full(N + 1 - j0, q, dtype=np.complex128)) * q ** j0
    first = q ** (e0 - dq) * xs ** (j0 - dx)
    steps = qpow[:-1, None] * xs[None, :]
    T = np.empty((N + 1 - j0, xs.size), dtype=np.complex128)
    T[0] = first
    if N > j0:
        T[1:] = first[None, :] * np.cumprod(steps, axis=0)
    terms = _coefficients(N, dx, dq)[js][:, None] * T
    return terms.sum(axis=0), np.abs(terms).sum(axis=0)


def series_sum(q, x, N, dx, dq):
    v, m = series_sum_many(q, np.array([x], dtype=np.complex128), N, dx, dq)
    return complex(v[0]), float(m[0])


def _newton_ratios(q, N, z):
    out = np.empty(z.shape, np.complex128)
    zero = z == 0
    out[zero] = 1.0 / q
    zz = z[~zero]
    j = np.arange(N + 1, dtype=np.float64)
    a = 0.5 * j[None, :] * (j[None, :] + 1) * np.log(abs(q)) + j[None, :] * np.log(np.abs(zz))[:, None]
    a -= a.max(axis=1, keepdims=True)
    uq = q / abs(q)
    uz = zz / np.abs(zz)
    jj = np.arange(N + 1)
    # phases by repeated multiplication, matching the loop kernel
    ph = np.cumprod(np.concatenate([np.ones((zz.size, 1), np.complex128),
                                    (uq ** (jj[1:])[None, :]) * uz[:, None]], axis=1), axis=1)
    t = np.exp(a) * ph
    out[~zero] = zz * t.sum(axis=1) / (t * j[None, :]).sum(axis=1)
    return out


def newton_ratio(q, N, z):
    return complex(_newton_ratios(complex(q), N, np.array([z], dtype=np.complex128))[0])


def aberth(q, N, z0, max_iter, rtol):
    """Ehrlich-Aberth iteration in Jacobi form: all roots updated at once."""
    q = complex(q)
    z = np.array(z0, dtype=np.complex128)
    done = np.zeros(N, dtype=bool)
    it = 0
    for it in range(1, max_iter + 1):
        act = np.flatnonzero(~done)
        if act.size == 0:
            break
        w = _newton_ratios(q, N, z[act])
        diff = z[act][:, None] - z[None, :]
        diff[np.arange(act.size), act] = 1.0
        inv = 1.0 / diff
        inv[np.arange(act.size), act] = 0.0
        c = w / (1.0 - w * inv.sum(axis=1))
        z[act] = z[act] - c
        done[act] = np.abs(c) <= rtol * np.abs(z[act])
    return z, done, it


def theta_star_product(q, y, X, k, M):
    return _loops.theta_star_product(complex(q), complex(y), complex(X), int(k), int(M))


def elementary_symmetric(v, kmax):
    e = np.zeros(kmax + 1)
    e[0] = 1.0
    for x in np.asarray(v, dtype=np.float64)[::-1]:
        e[1:] = e[1:] + x * e[:-1]
    return e


def theta_star_product_many(q, ys, Xs, k, M):
    # same factors and rounding model as _loops.theta_star_product, vectorised over the points
    q = complex(q)
    y = np.asarray(ys, dtype=np.complex128)
    Xs = np.asarray(Xs, dtype=np.complex128)
    u = 1.1102230246251565e-16
    g = 2.3 * u
    inv_y = 1 / y
    val = np.ones(Xs.shape, np.complex128)
    rel = np.zeros(Xs.shape)
    dead = np.zeros(Xs.shape, bool)
    qm, qm1 = q, 1.0 + 0j
    qinv = 1 / q
    r = 1.0 + 0j
    for _ in range(k):  # repeated products, matching _loops bit for bit
        r = r * qinv
    for m in range(1, M + 1):
        r = r * q
        pw = (m + 2) * g
        f1 = 1 - qm
        rel += u + pw * abs(qm) / abs(f1)
        if k == 0:
            a2 = y * qm
            f2 = 1 + a2
            af2 = np.abs(f2)
            dead |= af2 == 0
            with np.errstate(divide="ignore", invalid="ignore"):
                rel += u + (pw + g) * np.abs(a2) / af2
        elif m == k:
            f2 = Xs * qm
            rel += pw + g
        else:
            a2 = Xs * qm
            pr = (k + m + 2) * g
            f2 = (1 - r) + a2
            af2 = np.abs(f2)
            dead |= af2 == 0
            with np.errstate(divide="ignore", invalid="ignore"):
                rel += (u * (1 + abs(r) + np.abs(a2)) + pr * abs(r) + (pw + g) * np.abs(a2)) / af2
        a3 = qm1 * inv_y
        f3 = 1 + a3
        af3 = np.abs(f3)
        dead |= af3 == 0
        with np.errstate(divide="ignore", invalid="ignore"):
            rel += u + (pw + 2 * g) * np.abs(a3) / af3
        val = val * f1 * f2 * f3
        rel += 3 * g
        qm1, qm = qm, qm * q
    val[dead] = 0
    rel[dead] = 0
    return val, rel
