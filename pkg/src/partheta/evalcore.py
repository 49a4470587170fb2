"""Evaluation of the partial theta function with rigorous truncation bounds.

    theta(q, x) = sum_{j>=0} q^{j(j+1)/2} x^j

together with its x- and q-derivatives, the bilateral series
Theta*(q, x) = sum_{j in Z} q^{j(j+1)/2} x^j (by direct summation or by the
triple product) and the remainder Xi = theta - Theta*.

Every evaluator returns an :class:`EvalResult` whose ``error_bound`` covers
both the truncated tail and floating-point rounding.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import kernels
from .errors import DomainError, PrecisionBudgetExceeded

EPS = np.finfo(float).eps
MAX_ORDER = 1500
DEFAULT_EPS = 1e-12


class QKind(str, Enum):
    POSITIVE_REAL = "positive_real"
    NEGATIVE_REAL = "negative_real"
    COMPLEX = "complex"


@dataclass(frozen=True)
class QParam:
    """The nome q, |q| < 1, tagged with its domain class.

    q = 0 is accepted (evaluators return the constant 1) and classified as
    positive_real.
    """

    value: complex
    kind: QKind

    @classmethod
    def of(cls, q, *, allow_zero=True) -> "QParam":
        if isinstance(q, QParam):
            q = q.value
        v = complex(q)
        if not (math.isfinite(v.real) and math.isfinite(v.imag)):
            raise DomainError(f"q must be finite, got {q!r}")
        if abs(v) >= 1:
            raise DomainError(f"|q| must be < 1, got |q| = {abs(v)!r}")
        if v == 0 and not allow_zero:
            raise DomainError("q = 0 is excluded here")
        if v.imag != 0:
            kind = QKind.COMPLEX
        elif v.real < 0:
            kind = QKind.NEGATIVE_REAL
        else:
            kind = QKind.POSITIVE_REAL
        return cls(v, kind)

    @property
    def is_real(self) -> bool:
        return self.kind is not QKind.COMPLEX

    def __abs__(self) -> float:
        return abs(self.value)


def as_q(q, *, allow_zero=True) -> QParam:
    return QParam.of(q, allow_zero=allow_zero)


@dataclass(frozen=True)
class EvalResult:
    value: complex
    error_bound: float
    terms_used: int
    magnitude: float = 0.0  # sum of |terms|, the scale rounding errors live on


@dataclass(frozen=True)
class SeriesTail:
    start_index: int
    bound: float


def theta_tail(q_abs: float, radius: float, N: int) -> SeriesTail:
    """Geometric bound on sum_{j>N} |q|^{j(j+1)/2} r^j.

    Valid when |q|^{N+1} r < 1; otherwise the bound is +inf.
    """
    ratio = q_abs ** (N + 1) * radius
    if q_abs == 0 or radius == 0:
        return SeriesTail(N + 1, 0.0)
    if ratio >= 1:
        return SeriesTail(N + 1, math.inf)
    log_first = 0.5 * (N + 1) * (N + 2) * math.log(q_abs) + (N + 1) * math.log(radius)
    if log_first < -745:
        return SeriesTail(N + 1, 0.0)
    return SeriesTail(N + 1, math.exp(log_first) / (1 - ratio))


def derivative_tail(q_abs: float, radius: float, N: int, dx: int = 0, dq: int = 0) -> SeriesTail:
    """Tail bound for the series differentiated dx times in x and dq times in q."""
    if dx == 0 and dq == 0:
        return theta_tail(q_abs, radius, N)
    # first omitted index with a nonzero coefficient
    j = max(N + 1, int(kernels._loops._start_index(dx, dq)))
    e = j * (j + 1) // 2
    coef = math.prod(j - i for i in range(dx)) * math.prod(e - i for i in range(dq))
    if q_abs == 0:
        return SeriesTail(j, 0.0 if e - dq > 0 else float(coef) * radius ** (j - dx))
    if radius == 0:
        return SeriesTail(j, 0.0 if j - dx > 0 else float(coef) * q_abs ** (e - dq))
    # consecutive-term ratio, non-increasing from index j on
    e1 = (j + 1) * (j + 2) // 2
    growth = ((j + 1) / (j + 1 - dx)) ** dx * ((e1 - dq + 1) / (e - dq + 1)) ** dq
    rho = q_abs ** (j + 1) * radius * growth
    if rho >= 1:
        return SeriesTail(j, math.inf)
    log_first = math.log(coef) + (e - dq) * math.log(q_abs) + (j - dx) * math.log(radius)
    if log_first < -745:
        return SeriesTail(j, 0.0)
    return SeriesTail(j, math.exp(log_first) / (1 - rho))


def truncation_order(q, radius: float, target_eps: float, max_order: int = MAX_ORDER) -> int:
    """Smallest N with |q|^{N+1} r < 1/2 and tail bound <= target_eps."""
    qa = abs(as_q(q).value)
    if target_eps <= 0:
        raise DomainError("target_eps must be positive")
    if radius < 0:
        raise DomainError("radius must be nonnegative")
    if qa == 0 or radius == 0:
        return 0
    N = 0
    if radius > 0.5:
        # skip indices that cannot satisfy the ratio condition
        N = max(0, int(math.log(2 * radius) / -math.log(qa)) - 1)
    while N <= max_order:
        if qa ** (N + 1) * radius < 0.5 and theta_tail(qa, radius, N).bound <= target_eps:
            return N
        N += 1
    raise PrecisionBudgetExceeded(
        f"precision budget exceeded: truncation order above {max_order} needed "
        f"for |q| = {qa:g}, radius = {radius:g}, eps = {target_eps:g}"
    )


def _order(qa: float, radius: float, eps: float, dx: int, dq: int, max_order: int = MAX_ORDER) -> int:
    N = max(truncation_order(qa, radius, eps, max_order), dx)
    while derivative_tail(qa, radius, N, dx, dq).bound > eps:
        N += 1
        if N > max_order:
            raise PrecisionBudgetExceeded(f"precision budget exceeded: derivative order above {max_order}")
    return N


def rounding_bound(N: int, magnitude):
    # term j carries about 2j complex multiplications; doubled for safety
    return (4 * N + 8) * EPS * magnitude


def _finish(value, mag, N, tail, target_eps, strict, what):
    if not (cmath.isfinite(value) and math.isfinite(mag)):
        raise PrecisionBudgetExceeded(f"precision budget exceeded: {what} overflows double range")
    bound = tail + rounding_bound(N, mag)
    if strict and bound > target_eps:
        raise PrecisionBudgetExceeded(
            f"precision budget exceeded: {what} error bound {bound:.3g} > target {target_eps:.3g}"
        )
    return EvalResult(complex(value), float(bound), int(N), float(mag))


def _eval_series(q, x, target_eps, dx, dq, strict, what):
    qp = as_q(q)
    x = complex(x)
    qa = abs(qp.value)
    r = abs(x)
    N = _order(qa, r, target_eps, dx, dq)
    value, mag = kernels.series_sum(qp.value, x, N, dx, dq)
    tail = derivative_tail(qa, r, N, dx, dq).bound
    return _finish(value, mag, N, tail, target_eps, strict, what)


def eval_theta(q, x, target_eps: float = DEFAULT_EPS, *, strict: bool = True) -> EvalResult:
    """theta(q, x). With ``strict`` a bound above target_eps raises."""
    return _eval_series(q, x, target_eps, 0, 0, strict, "theta")


def eval_theta_dx(q, x, target_eps: float = DEFAULT_EPS, *, strict: bool = True) -> EvalResult:
    return _eval_series(q, x, target_eps, 1, 0, strict, "d theta/dx")


def eval_theta_dxx(q, x, target_eps: float = DEFAULT_EPS, *, strict: bool = True) -> EvalResult:
    return _eval_series(q, x, target_eps, 2, 0, strict, "d2 theta/dx2")


def eval_theta_dq(q, x, target_eps: float = DEFAULT_EPS, *, strict: bool = True) -> EvalResult:
    return _eval_series(q, x, target_eps, 0, 1, strict, "d theta/dq")


def eval_theta_dxdq(q, x, target_eps: float = DEFAULT_EPS, *, strict: bool = True) -> EvalResult:
    return _eval_series(q, x, target_eps, 1, 1, strict, "d2 theta/dx dq")


def eval_xi(q, x, target_eps: float = DEFAULT_EPS, *, strict: bool = True) -> EvalResult:
    """Xi(q, x) = -sum_{j<=-1} q^{j(j+1)/2} x^j = -theta(q, 1/x)/x, for |x| > 1."""
    x = complex(x)
    if not abs(x) > 1:
        raise DomainError(f"Xi needs |x| > 1, got |x| = {abs(x)!r}")
    inner = eval_theta(q, 1 / x, target_eps * abs(x), strict=False)
    value = -inner.value / x
    mag = inner.magnitude / abs(x)
    bound = inner.error_bound / abs(x) + EPS * abs(value)
    if strict and bound > target_eps:
        raise PrecisionBudgetExceeded(f"precision budget exceeded: Xi error bound {bound:.3g}")
    return EvalResult(value, bound, inner.terms_used, mag)


def _product_order(qa: float, ya: float, target_rel: float) -> int:
    # s(M) = sum_{m>M} |q|^m (1 + |y|) + |q|^{m-1}/|y|
    if qa == 0:
        return 1
    M = 1
    while M <= MAX_ORDER:
        s = qa ** (M + 1) * (1 + ya) / (1 - qa) + qa ** M / ((1 - qa) * ya)
        if s <= target_rel:
            return M
        M += 1
    raise PrecisionBudgetExceeded("precision budget exceeded: triple product needs too many factors")


def product_tail_relative(qa: float, ya: float, M: int) -> float:
    """Relative error of the M-factor triple product: exp(s) - 1."""
    if qa == 0:
        return 0.0
    s = qa ** (M + 1) * (1 + ya) / (1 - qa) + qa ** M / ((1 - qa) * ya)
    return math.expm1(s)


def eval_jacobi_theta_star(q, x, target_eps: float = DEFAULT_EPS, method: str = "bilateral_sum",
                           *, strict: bool = True) -> EvalResult:
    """Theta*(q, x) = sum_{j in Z} q^{j(j+1)/2} x^j.

    ``bilateral_sum`` keeps the indices -N-1..N, which is symmetric in the
    exponent j(j+1)/2. ``triple_product`` uses
    prod_{m>=1} (1 - q^m)(1 + x q^m)(1 + q^{m-1}/x).
    """
    qp = as_q(q)
    x = complex(x)
    if x == 0:
        raise DomainError("Theta* is undefined at x = 0")
    qa = abs(qp.value)
    if method == "bilateral_sum":
        pos = eval_theta(qp, x, target_eps / 2, strict=False)
        neg = eval_theta(qp, 1 / x, target_eps * abs(x) / 2, strict=False)
        value = pos.value + neg.value / x
        bound = pos.error_bound + neg.error_bound / abs(x) + EPS * (abs(pos.value) + abs(neg.value / x))
        mag = pos.magnitude + neg.magnitude / abs(x)
        N = max(pos.terms_used, neg.terms_used)
    elif method == "triple_product":
        ya = abs(x)
        M = _product_order(qa, ya, EPS / 4)
        value, rel = kernels.theta_star_product(qp.value, x, 0j, 0, M)
        value = complex(value)
        tail_rel = product_tail_relative(qa, ya, M)
        bound = abs(value) * (math.expm1(rel) + tail_rel * (1 + math.expm1(rel)))
        mag = abs(value)
        N = M
    else:
        raise DomainError(f"unknown method {method!r}")
    if not (cmath.isfinite(value) and math.isfinite(bound)):
        raise PrecisionBudgetExceeded("precision budget exceeded: Theta* overflows double range")
    if strict and bound > target_eps:
        raise PrecisionBudgetExceeded(f"precision budget exceeded: Theta* error bound {bound:.3g}")
    return EvalResult(value, float(bound), int(N), float(mag))


# ---------------------------------------------------------------------------
# internal helpers shared by the zero finder

def theta_values(q: complex, xs: np.ndarray, N: int, dx: int = 0):
    """Vectorised theta (or its x-derivative) at fixed order N.

    Returns (values, error bounds, magnitudes); the bound includes the tail
    at the largest |x| in ``xs``.
    """
    xs = np.ascontiguousarray(xs, dtype=np.complex128)
    vals, mags = kernels.series_sum_many(complex(q), xs, int(N), dx, 0)
    rmax = float(np.max(np.abs(xs))) if xs.size else 0.0
    tail = derivative_tail(abs(q), rmax, N, dx, 0).bound
    bounds = tail + rounding_bound(N, mags)
    if not (np.all(np.isfinite(vals)) and np.all(np.isfinite(mags))):
        raise PrecisionBudgetExceeded("precision budget exceeded: theta overflows double range on the contour")
    return vals, bounds, mags


def max_log10_term(q_abs: float, radius: float) -> float:
    """log10 of the largest |q|^{j(j+1)/2} r^j; a cheap overflow predictor."""
    if q_abs == 0 or radius <= 1:
        return 0.0
    lq = math.log10(q_abs)
    lr = math.log10(radius)
    jstar = max(0.0, lr / -lq - 0.5)
    best = 0.0
    for j in (math.floor(jstar), math.ceil(jstar)):
        best = max(best, 0.5 * j * (j + 1) * lq + j * lr)
    return best
