"""Complete, certified zero sets of theta(q, .).

Pipeline for a disk |x| <= R:

1. roots of the truncated polynomial by Ehrlich-Aberth iteration, seeded on
   the ladder mu_k = -q^{-k} rotated onto generic rays;
2. Newton polish of every candidate on the full series;
3. grouping of coincident candidates;
4. one argument-principle certificate per zero (disjoint circles) and one
   for the total count on the boundary.

Far zeros are handled separately by :func:`certify_tail_zero`, which works
in the shifted coordinate x = mu_k + X so the tiny offset X stays exact.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import (
    CertificationError,
    ContourError,
    ConvergenceError,
    DomainError,
    IncompleteZeroSet,
    PrecisionBudgetExceeded,
    TailRegimeNotReached,
)
from .evalcore import (
    EPS,
    QParam,
    _order,
    _product_order,
    product_tail_relative,
    as_q,
    max_log10_term,
    theta_values,
)

DELTA_REL = 0.1
CLUSTER_REL = 1e-8
MERGE_REL = 1e-3
RESIDUAL_TOL = 1e-10
EVAL_EPS = 1e-18
MIN_SAMPLES = 64
MAX_SAMPLES = 1 << 16
CONTOUR_SAFETY = 4.0
BUDGET_LOG10 = 280.0
BOUNDARY_CLEARANCE = 1e-3
STALL_REL = 1e-10
PRODUCT_SWITCH = 1e3  # series clearance below which contours switch to the product form


@dataclass(frozen=True)
class Zero:
    """One zero of theta(q, .).

    ``residual`` is |theta| at the location divided by the sum of the term
    moduli there, i.e. relative to the scale rounding errors live on.
    Tail zeros also carry their ladder index ``k`` and the exact offset
    ``offset`` = location - (-q^{-k}).
    """

    location: complex
    multiplicity: int = 1
    residual: float = math.inf
    certified: bool = False
    cert_radius: float = 0.0
    offset: complex | None = None
    k: int | None = None
    iterations: int = 0
    suspected_multiple: bool = False

    @property
    def is_real(self) -> bool:
        return self.location.imag == 0


@dataclass(frozen=True)
class ZeroSet:
    q: QParam
    disk_radius: float
    zeros: tuple
    tail_start_k: int
    winding: int
    requested_radius: float = 0.0

    @property
    def total_multiplicity(self) -> int:
        return sum(z.multiplicity for z in self.zeros)

    def real_zeros(self):
        return [z for z in self.zeros if z.location.imag == 0]

    def upper_zeros(self):
        return [z for z in self.zeros if z.location.imag > 0]


def tail_delta(q) -> float:
    """Relative radius of the tail disks: DELTA_REL, shrunk so that the disk
    around mu_k stays clear of mu_{k-1} = q mu_k (needed once |q| >= 0.9)."""
    return min(DELTA_REL, 0.5 * (1 - abs(as_q(q).value)))


def default_k0(q) -> int:
    """First ladder index handed to tail certification: |q|^k0 <= 1e-6."""
    qa = abs(as_q(q).value)
    return max(1, math.ceil(6 / math.log10(1 / qa)))


def _sort_key(z):
    return (abs(z), math.atan2(z.imag, z.real))


@functools.lru_cache(maxsize=4096)
def _order_cached(qa: float, log2r: int) -> int:
    return _order(qa, 2.0 ** log2r, EVAL_EPS, 1, 0)


def contour_order(q: complex, radius: float) -> int:
    """Series order that is valid (value and x-derivative) on |x| <= radius."""
    qa = abs(q)
    if max_log10_term(qa, radius) > BUDGET_LOG10:
        raise PrecisionBudgetExceeded(
            f"precision budget exceeded: terms of theta reach 1e{max_log10_term(qa, radius):.0f} "
            f"at radius {radius:.3g} for |q| = {qa:.6g}"
        )
    return _order_cached(qa, max(0, math.ceil(math.log2(max(radius, 1.0)))))


def seed_zeros_asymptotic(q, k_min: int, k_max: int) -> list:
    """The ladder -q^{-k}, k_min <= k <= k_max, as Newton starting points."""
    qp = as_q(q, allow_zero=False)
    return [-(qp.value ** (-k)) if not qp.is_real else complex(-(qp.value.real ** (-k)))
            for k in range(k_min, k_max + 1)]


# ---------------------------------------------------------------------------
# argument principle

def _winding(q: complex, center: complex, radius: float, N: int | None = None):
    if N is None:
        N = contour_order(q, abs(center) + radius)

    def evaluate(t):
        return stable_theta_values(q, center + radius * np.exp(2j * np.pi * t), N)

    return _track_argument(evaluate, N, f"contour |x - {center:.6g}| = {radius:.4g}")


def _track_argument(evaluate, N, where):
    # theta has at most about N zeros in reach, so 8N samples avoid aliasing a full turn
    n0 = max(MIN_SAMPLES, 1 << math.ceil(math.log2(8 * max(N, 1))))
    t = np.arange(n0) / n0
    vals, bounds = evaluate(t)
    while True:
        clear = np.abs(vals) / np.maximum(bounds, np.finfo(float).tiny)
        if np.min(clear) <= CONTOUR_SAFETY:
            i = int(np.argmin(clear))
            raise ContourError(
                f"{where} passes within the error bound of a zero "
                f"(|theta| = {abs(vals[i]):.3g}, bound = {bounds[i]:.3g})"
            )
        dphi = np.angle(np.roll(vals, -1) / vals)
        bad = np.abs(dphi) >= np.pi / 2
        if not bad.any():
            w = dphi.sum() / (2 * np.pi)
            k = int(round(w))
            if abs(w - k) > 1e-6:
                raise ContourError(f"non-integer winding {w!r}")
            return k, t.size
        if t.size >= MAX_SAMPLES:
            raise ContourError(f"winding not resolved with {t.size} samples")
        gaps = np.diff(np.append(t, 1.0))
        tn = t[bad] + 0.5 * gaps[bad]
        vn, bn = evaluate(tn)
        t = np.concatenate([t, tn])
        vals = np.concatenate([vals, vn])
        bounds = np.concatenate([bounds, bn])
        order = np.argsort(t, kind="stable")
        t, vals, bounds = t[order], vals[order], bounds[order]


def count_zeros_argument_principle(q, center, radius: float) -> int:
    """Number of zeros (with multiplicity) inside |x - center| < radius.

    Raises ContourError when |theta| on the circle is not safely above its
    error bound, or when the winding cannot be resolved.
    """
    qp = as_q(q)
    if not radius > 0:
        raise DomainError("radius must be positive")
    return _winding(qp.value, complex(center), float(radius))[0]


# ---------------------------------------------------------------------------
# Newton

def _theta_and_dx(q: complex, z: complex, N: int):
    f, fmag = kernels.series_sum(q, z, N, 0, 0)
    d, dmag = kernels.series_sum(q, z, N, 1, 0)
    return complex(f), float(fmag), complex(d), float(dmag)


def scaled_residual(q, z: complex) -> float:
    qv = as_q(q).value
    N = contour_order(qv, abs(z))
    f, fmag = kernels.series_sum(qv, complex(z), N, 0, 0)
    return abs(f) / fmag


def refine_newton(q, seed, tol: float = 1e-12, max_iter: int = 60) -> Zero:
    """Newton iteration on the full series from ``seed``.

    Stops when the scaled residual is <= tol or the step falls below
    rounding level. A tiny derivative marks the result ``suspected_multiple``.
    """
    qp = as_q(q)
    qv = qp.value
    z = complex(seed)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise DomainError("seed must be finite")
    suspected = False
    for it in range(1, max_iter + 1):
        N = contour_order(qv, abs(z))
        f, fmag, d, dmag = _theta_and_dx(qv, z, N)
        res = abs(f) / fmag
        if res <= tol:
            return Zero(z, 1, res, False, 0.0, iterations=it - 1, suspected_multiple=suspected)
        if abs(d) <= 1e-8 * dmag:
            suspected = True
        if d == 0:
            raise ConvergenceError("zero derivative in Newton iteration", last_iterate=z)
        step = f / d
        z = z - step
        if not (math.isfinite(z.real) and math.isfinite(z.imag)):
            raise ConvergenceError("Newton iteration diverged", last_iterate=z)
        if abs(step) <= 4 * EPS * abs(z):
            N = contour_order(qv, abs(z))
            f, fmag, _, _ = _theta_and_dx(qv, z, N)
            return Zero(z, 1, abs(f) / fmag, False, 0.0, iterations=it, suspected_multiple=suspected)
    raise ConvergenceError(f"Newton did not converge in {max_iter} iterations", last_iterate=z)


# ---------------------------------------------------------------------------
# tail zeros

def theta_shifted(q, k: int, X: complex) -> complex:
    """theta(q, mu_k + X) for mu_k = -q^{-k}, accurate relative to its size.

    Theta* comes from the triple product with the vanishing factor written as
    X q^k; Xi from its own convergent series in 1/x.
    """
    qv = as_q(q, allow_zero=False).value
    mu = -(qv ** (-k))
    y = mu + X
    M = _product_order(abs(qv), abs(y), EPS / 4)
    star, _ = kernels.theta_star_product(qv, complex(y), complex(X), int(k), int(M))
    w = 1 / y
    N = contour_order(qv, abs(w))
    inner, _ = kernels.series_sum(qv, complex(w), N, 0, 0)
    return complex(star) - inner * w


def _product_values(q: complex, ys: np.ndarray, Xs: np.ndarray, k: int):
    """theta = Theta* - theta(q, 1/y)/y at |y| > 1, Theta* from the triple product.

    For k >= 1 the points are y = mu_k + X and the vanishing factor is formed
    from X. Where the plain series cancels (near the negative real axis, down
    to about exp(-pi^2 / (2 log(1/|q|))) of its largest term, 1e-20 at
    q = 0.9) the product keeps full relative accuracy.
    """
    ay = np.abs(ys)
    ymin, ymax = float(np.min(ay)), float(np.max(ay))
    qa = abs(q)
    M = max(_product_order(qa, ymax, EPS / 4), _product_order(qa, ymin, EPS / 4), k)
    star, rel = kernels.theta_star_product_many(q, ys, Xs, int(k), int(M))
    tail_rel = max(product_tail_relative(qa, ymax, M), product_tail_relative(qa, ymin, M))
    er = np.expm1(rel)
    star_bound = np.abs(star) * (er + tail_rel * (1 + er))
    ws = 1 / ys
    inner, ibound, _ = theta_values(q, ws, contour_order(q, 1 / ymin))
    vals = star - inner * ws
    bounds = star_bound + (ibound + EPS * np.abs(inner)) * np.abs(ws) + EPS * np.abs(vals)
    if not (np.all(np.isfinite(vals)) and np.all(np.isfinite(bounds))):
        raise PrecisionBudgetExceeded("precision budget exceeded: Theta* overflows double range")
    return vals, bounds


def stable_theta_values(q: complex, xs: np.ndarray, N: int):
    """theta on contour points; the product form where the series is not clear of its bound."""
    vals, bounds, _ = theta_values(q, xs, N)
    far = (np.abs(xs) > 1) & (np.abs(vals) <= PRODUCT_SWITCH * bounds)
    if q != 0 and far.any():
        pv, pb = _product_values(q, xs[far], xs[far], 0)
        better = pb < bounds[far]
        idx = np.flatnonzero(far)[better]
        vals[idx], bounds[idx] = pv[better], pb[better]
    return vals, bounds


def _tail_winding(q: complex, k: int, r: float):
    N = contour_order(q, abs(q) ** (-k) + r)
    mu = -(q ** (-k))

    def evaluate(t):
        Xs = r * np.exp(2j * np.pi * t)
        return _product_values(q, mu + Xs, Xs, k)

    return _track_argument(evaluate, N,
                           f"contour |x + q^-{k}| = {r:.4g}")


def _shifted_dy(q: complex, k: int, X: complex) -> complex:
    """d/dx theta at x = mu_k + X, from the product form of Theta*.

    With Theta* = P X q^k, where P collects every factor except (1 + x q^k),
    the derivative is P q^k (1 + X L) and L = P'/P.
    """
    y = -(q ** (-k)) + X
    M = max(_product_order(abs(q), abs(y), EPS / 4), k)
    m = np.arange(1, M + 1)
    qm = q ** m.astype(float)
    qm1 = q ** (m - 1).astype(float)
    f2 = (1 - q ** (m - k).astype(float)) + X * qm
    f3 = 1 + qm1 / y
    other = m != k
    P = np.prod(1 - qm) * np.prod(f2[other]) * np.prod(f3)
    L = np.sum(qm[other] / f2[other]) - np.sum(qm1 / (y * y * f3))
    dstar = P * q ** k * (1 + X * L)
    w = 1 / y
    N = contour_order(q, abs(w))
    inner, _ = kernels.series_sum(q, complex(w), N, 0, 0)
    dinner, _ = kernels.series_sum(q, complex(w), N, 1, 0)
    return complex(dstar + w * w * (inner + w * dinner))


def tail_offset(q, k: int, max_iter: int = 40) -> complex:
    """Offset X = zeta_k - mu_k of the zero attached to mu_k = -q^{-k}."""
    qv = as_q(q, allow_zero=False).value
    X = 0j
    for _ in range(max_iter):
        f = theta_shifted(qv, k, X)
        d = _shifted_dy(qv, k, X)
        if d == 0:
            raise ConvergenceError("zero derivative at tail zero", last_iterate=-(qv ** (-k)) + X)
        step = f / d
        X = X - step
        if abs(step) <= 4 * EPS * abs(X) or step == 0:
            return X
    if abs(step) <= STALL_REL * abs(X):
        return X  # stalled at rounding level; certify_tail_zero still checks the residual
    raise ConvergenceError(f"tail offset iteration did not converge at k = {k}", last_iterate=-(qv ** (-k)) + X)


def certify_tail_zero(q, k: int, delta_rel: float | None = None) -> Zero:
    """Certify the unique simple zero in the disk |x - mu_k| <= delta_rel |mu_k|.

    ``delta_rel`` defaults to :func:`tail_delta`.
    """
    qp = as_q(q, allow_zero=False)
    if delta_rel is None:
        delta_rel = tail_delta(qp)
    qv = qp.value
    mu = complex(-(qv.real ** (-k))) if qp.is_real else -(qv ** (-k))
    r = delta_rel * abs(mu)
    try:
        count, _ = _tail_winding(qv, k, r)
    except ContourError as exc:
        raise TailRegimeNotReached(f"tail regime not reached at k = {k}: {exc}", k=k) from exc
    if count != 1:
        raise TailRegimeNotReached(
            f"tail regime not reached at k = {k}: disk around -q^-k holds {count} zeros", k=k, count=count
        )
    X = tail_offset(qv, k)
    if qp.is_real:
        X = complex(X.real)
    if not abs(X) < r:
        raise TailRegimeNotReached(f"Newton left the disk around -q^-{k}", k=k, count=count)
    z = mu + X
    N = contour_order(qv, abs(z))
    _, fmag = kernels.series_sum(qv, z, N, 0, 0)
    residual = abs(theta_shifted(qv, k, X)) / fmag
    return Zero(z, 1, residual, residual <= RESIDUAL_TOL, r, offset=X, k=k)


def tail_zeros(q, k_min: int, k_max: int, delta_rel: float | None = None) -> list:
    return [certify_tail_zero(q, k, delta_rel) for k in range(k_min, k_max + 1)]


# ---------------------------------------------------------------------------
# clusters

def classify_multiplicity(q, zero_cluster, cluster_radius: float) -> Zero:
    """Multiplicity of the zero(s) represented by a cluster of approximations.

    The count comes from the argument principle on the circle of radius
    ``cluster_radius`` about the centroid. A cluster whose members are
    resolvable as separate simple zeros is rejected.
    """
    qp = as_q(q)
    pts = np.asarray(list(zero_cluster), dtype=np.complex128)
    if pts.size == 0:
        raise DomainError("cluster must be nonempty")
    c = complex(pts.mean())
    if qp.is_real and abs(c.imag) < 0.5 * cluster_radius:
        c = complex(c.real)
    if np.max(np.abs(pts - c)) >= cluster_radius:
        raise CertificationError("cluster members lie outside the cluster radius")
    count, _ = _winding(qp.value, c, cluster_radius)
    if count == 0:
        raise CertificationError("no zero inside the cluster circle")
    if count == 1:
        z = refine_newton(qp.value, c)
        if abs(z.location - c) >= cluster_radius:
            raise CertificationError("refined zero left the cluster circle")
        return Zero(z.location, 1, z.residual, z.residual <= RESIDUAL_TOL, cluster_radius,
                    iterations=z.iterations)
    _reject_resolvable(qp, pts)
    return Zero(c, count, scaled_residual(qp.value, c), True, cluster_radius, suspected_multiple=True)


def _reject_resolvable(qp: QParam, pts):
    # members far apart that each certify as simple are distinct zeros
    for i in range(pts.size):
        for j in range(i + 1, pts.size):
            d = abs(pts[i] - pts[j])
            if d <= MERGE_REL * max(abs(pts[i]), abs(pts[j]), 1.0):
                continue
            try:
                a, _ = _winding(qp.value, complex(pts[i]), d / 3)
                b, _ = _winding(qp.value, complex(pts[j]), d / 3)
            except ContourError:
                continue
            if a == 1 and b == 1:
                raise CertificationError(
                    "cluster contains distinct certified zeros; their circles must be disjoint"
                )


def _group(points, rel):
    n = len(points)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(points[i] - points[j]) <= rel * max(abs(points[i]), abs(points[j]), 1.0):
                parent[find(i)] = find(j)
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(points[i])
    return list(groups.values())


def _circle_radius(center, d_nn):
    # 0.3 of the neighbour distance keeps all certification circles disjoint
    return min(0.3 * d_nn, 0.1 * max(abs(center), 1e-2))


def _real_centered(qp: QParam, center, r):
    return qp.is_real and abs(center.imag) < 0.5 * r


def _certify_cluster(qp: QParam, members, center, d_nn, N):
    """Certify one group; returns a Zero, or None for a spurious candidate."""
    spread = max(abs(m - center) for m in members)
    r = _circle_radius(center, d_nn)
    if _real_centered(qp, center, r):
        r = min(r, 0.3 * d_nn - abs(center.imag)) if d_nn < math.inf else r
        center = complex(center.real)
    last = None
    for rr in (r, 0.5 * r, 0.25 * r):
        if rr <= 2 * spread:
            break
        try:
            count, _ = _winding(qp.value, center, rr, N)
        except ContourError as exc:
            last = exc
            continue
        if count == 0:
            return None
        if count == 1:
            z = refine_newton(qp.value, center)
            loc = z.location
            if qp.is_real and center.imag == 0:
                loc = complex(loc.real)
            if abs(loc - center) >= rr:
                raise CertificationError(f"Newton left the certification circle around {center:.6g}")
            res = scaled_residual(qp.value, loc)
            return Zero(loc, 1, res, res <= RESIDUAL_TOL, rr, iterations=z.iterations)
        return Zero(center, count, scaled_residual(qp.value, center), True, rr, suspected_multiple=True)
    raise last or ContourError(f"cannot place a certification circle around {center:.6g}")


def _certify_all(qp: QParam, cands, N, keep=None):
    """Certify every group of candidates; ``keep`` filters which groups are certified."""
    groups = _group(cands, CLUSTER_REL)
    pending = list(range(len(groups)))
    zeros = []
    while pending:
        centers = [complex(np.mean(g)) if g else complex("nan") for g in groups]
        i = pending[0]
        c = centers[i]
        others = [(abs(c - centers[j]), j) for j in range(len(groups)) if j != i and groups[j]]
        d_nn, j_nn = min(others) if others else (math.inf, None)
        r = _circle_radius(c, d_nn)
        skip = (keep is not None and not keep(c)) or (
            qp.is_real and c.imag < 0 and not _real_centered(qp, c, r)  # mirror of an upper zero
        )
        if skip:
            pending.pop(0)
            continue
        try:
            z = _certify_cluster(qp, groups[i], c, d_nn, N)
        except ContourError:
            if j_nn is None or d_nn > MERGE_REL * max(abs(c), 1.0):
                raise
            groups[i] = groups[i] + groups[j_nn]
            groups[j_nn] = []
            if j_nn in pending:
                pending.remove(j_nn)
            continue
        pending.pop(0)
        if z is not None:
            zeros.append(z)
            if qp.is_real and z.location.imag != 0:
                zeros.append(Zero(z.location.conjugate(), z.multiplicity, z.residual, z.certified,
                                  z.cert_radius, iterations=z.iterations,
                                  suspected_multiple=z.suspected_multiple))
    return zeros


def _aberth_candidates(qp: QParam, r_ext: float, tol: float):
    qv = qp.value
    N = contour_order(qv, r_ext)
    Np = max(2, min(N, _order(abs(qv), r_ext, max(tol * 1e-3, 1e-30), 0, 0)))
    k = np.arange(1, Np + 1)
    ladder = np.array(seed_zeros_asymptotic(qv, 1, Np), dtype=np.complex128)
    seeds = ladder * np.exp(1j * (0.3 * (-1.0) ** k + 0.0137 * k))
    roots, _, _ = kernels.aberth(qv, Np, seeds, 300, 1e-13)
    roots = roots[np.isfinite(roots)]
    roots = roots[np.abs(roots) <= r_ext]
    polished = []
    for z0 in roots:
        try:
            z = refine_newton(qv, complex(z0), tol=min(tol, 1e-13))
        except ConvergenceError as exc:
            z = Zero(exc.last_iterate)
        if abs(z.location) <= r_ext:
            polished.append(z.location)
    return polished, N


def find_zeros_in_disk(q, radius: float, tol: float = 1e-12) -> ZeroSet:
    """All zeros of theta(q, .) in |x| < R', certified.

    R' is ``radius`` unless a zero sits within the boundary clearance, in
    which case the contour moves outward to the geometric midpoint between
    neighbouring zero moduli (reported as ``disk_radius``).
    """
    qp = as_q(q, allow_zero=False)
    if not radius >= 1:
        raise DomainError("radius must be >= 1")
    if not tol > 0:
        raise DomainError("tol must be positive")
    qa = abs(qp.value)
    r_ext = radius / qa ** 2
    cands, N = _aberth_candidates(qp, r_ext, tol)
    R = _choose_boundary(qp, radius, r_ext, cands, N)
    # candidates outside R still fix circle sizes but are not certified
    zeros = [z for z in _certify_all(qp, cands, N, keep=lambda c: abs(c) < R) if abs(z.location) < R]
    winding, _ = _winding(qp.value, 0j, R, N)
    total = sum(z.multiplicity for z in zeros)
    if total != winding:
        raise IncompleteZeroSet(
            f"incomplete zero set: found multiplicity {total}, argument principle on |x| = {R:.6g} gives {winding}",
            found=total, winding=winding,
        )
    zeros.sort(key=lambda z: _sort_key(z.location))
    tail_k = 1
    while qa ** (-tail_k) * (1 - tail_delta(qa)) <= R:
        tail_k += 1
    return ZeroSet(qp, R, tuple(zeros), tail_k, winding, float(radius))


def _choose_boundary(qp: QParam, radius, r_ext, cands, N):
    mods = sorted(abs(c) for c in cands)
    options = [radius] + [math.sqrt(a * b) for a, b in zip(mods, mods[1:]) if b > radius]
    options = sorted(o for o in options if radius <= o <= r_ext * abs(qp.value))
    for R in options:
        if mods and min(abs(m - R) for m in mods) < BOUNDARY_CLEARANCE * R:
            continue
        try:
            _winding(qp.value, 0j, R, N)
        except ContourError:
            continue
        return R
    raise CertificationError(f"no admissible contour radius in [{radius:.6g}, {r_ext:.6g}]")


def zero_ladder(q, k_total: int, k_disk: int | None = None, tol: float = 1e-12):
    """The first ``k_total`` zeros by modulus: disk zeros plus certified tail zeros.

    The disk has radius |q|^{-(k_disk + 1/2)}; zeros k_disk+1..k_total come
    from :func:`certify_tail_zero`. Returns (ZeroSet, list of tail Zeros).
    """
    qp = as_q(q, allow_zero=False)
    qa = abs(qp.value)
    if k_disk is None:
        k_disk = min(default_k0(qp) - 1, k_total)
    k_disk = max(0, k_disk)
    zs = find_zeros_in_disk(qp, max(1.0, qa ** (-(k_disk + 0.5))), tol)
    start = zs.total_multiplicity + 1
    tails = tail_zeros(qp, start, k_total) if k_total >= start else []
    for z in tails:
        if abs(z.location) < zs.disk_radius:
            raise CertificationError(f"tail zero k = {z.k} lies inside the certified disk")
    return zs, tails


def working_disk_index(q) -> int:
    """k0 for a disk |x| < |q|^{-(k0 - 1/2)}: default_k0, lowered to fit the budget."""
    k = min(default_k0(q), ladder_budget(q) - 3)
    if k < 2:
        raise PrecisionBudgetExceeded(f"precision budget exceeded: no admissible ladder disk for q = {q!r}")
    return k


def ranked_zeros(zs: ZeroSet, tails) -> list:
    """(rank, Zero) pairs, rank = position by modulus counted with multiplicity (1-based)."""
    out = []
    rank = 0
    for z in list(zs.zeros) + list(tails):
        for _ in range(z.multiplicity):
            rank += 1
            out.append((rank, z))
    return out


def ladder_budget(q) -> int:
    """Largest k whose tail circle stays inside the double-precision budget."""
    qa = abs(as_q(q, allow_zero=False).value)
    k = 1
    while max_log10_term(qa, qa ** (-(k + 1)) * (1 + tail_delta(qa))) <= BUDGET_LOG10:
        k += 1
        if k > 10_000:
            break
    return k - 1
