"""Product structure of theta(q, .) built from certified zeros.

* ``reconstruct_product``: theta against the truncated product of (1 - x/zeta).
* ``decompose``: theta = P * psi, where P collects the conjugate pairs and psi
  the real zeros.
* ``lp_bound_check``: coefficients g_k of psi against q^{k(k+1)/2} / (D (1 - q))^k.
* ``negative_q_report``: sign pattern of the real zeros for q in (-1, 0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import kernels
from .errors import CertificationError, DomainError, NearSpectralAmbiguity
from .evalcore import EPS, QKind, QParam, as_q, eval_theta
from .zerofinder import (
    default_k0,
    ladder_budget,
    ranked_zeros,
    tail_delta,
    working_disk_index,
    zero_ladder,
)

COLLISION_REL = 1e-6
EXTRA_TAIL = 3


class ClassTag(str, Enum):
    LP_I = "LP_I"
    LP = "LP"


@dataclass(frozen=True)
class ProductReport:
    q: QParam
    K: int
    grid: np.ndarray
    rel_error: np.ndarray  # |theta - P_K| / |theta|
    tail_bound: np.ndarray  # bound on the same quantity from the omitted zeros
    eval_bound: np.ndarray  # relative error bound of theta itself


@dataclass(frozen=True)
class ProductDecomposition:
    q: QParam
    real_zeros: tuple  # -xi_k by increasing modulus, repeated by multiplicity
    complex_pairs: tuple  # (z, conj z) with Im z > 0
    poly_coeffs: tuple  # P, ascending powers, constant term 1
    K_used: int
    discriminants: tuple  # one per quadratic factor of P

    @property
    def pairs(self) -> int:
        return len(self.complex_pairs)


@dataclass(frozen=True)
class LPClassReport:
    g_coeffs: tuple  # g_1..g_kmax from the computed real zeros
    g_upper: tuple  # the same plus the contribution of the omitted zeros
    D_estimate: float
    bound_margin: tuple  # bound_k / g_upper_k
    class_tag: ClassTag
    xi_q_k: tuple  # (ladder index k, xi_k q^k) for every computed real zero
    K_used: int


@dataclass(frozen=True)
class NegativeQReport:
    q: float
    real_zeros_signed: tuple  # real zeros ordered by modulus
    sign_alternation_ok: bool  # consecutive entries have opposite signs throughout
    monotone_from: int | None  # 1-based index into real_zeros_signed
    complex_pair_count: int
    alternation_from: int | None = None  # first index from which signs alternate


def _ladder(qp: QParam, k_total: int, k_disk: int | None = None):
    zs, tails = zero_ladder(qp, k_total, k_disk)
    return zs, tails, ranked_zeros(zs, tails)


def reconstruct_product(q, K: int, test_grid, tol: float = 1e-15) -> ProductReport:
    """Truncated product over the first K zeros (by modulus) on ``test_grid``.

    Up to three zeros after the K-th are certified and enter the tail bound
    exactly (fewer when the budget ends). Beyond them the bound uses
    |zeta_k| >= (1 - delta) |q|^{-k}, which holds in the tail regime.
    """
    qp = as_q(q, allow_zero=False)
    if K < 1:
        raise DomainError("K must be >= 1")
    qa = abs(qp.value)
    k_disk = min(default_k0(qp) - 1, K)
    k_total = min(K + EXTRA_TAIL, ladder_budget(qp))
    if k_total < K:
        raise CertificationError(f"insufficient certified zeros: K = {K} exceeds the ladder budget")
    _, _, ranked = _ladder(qp, k_total, k_disk)
    if len(ranked) < k_total:
        raise CertificationError(f"insufficient certified zeros: {len(ranked)} < {k_total}")
    zeros = np.array([z.location for _, z in ranked], dtype=np.complex128)
    head, extra = zeros[:K], zeros[K:k_total]
    xs = np.asarray(test_grid, dtype=np.complex128).ravel()
    rel, tb, eb = [], [], []
    for x in xs:
        prod = complex(np.prod(1 - x / head))
        th = eval_theta(qp, x, tol, strict=False)
        rel.append(abs(th.value - prod) / abs(th.value))
        s = float(np.sum(abs(x) / np.abs(extra)))
        s += abs(x) * qa ** (k_total + 1) / ((1 - tail_delta(qa)) * (1 - qa))
        eps = math.expm1(s)
        tb.append(eps / (1 - eps) if eps < 1 else math.inf)
        eb.append(th.error_bound / abs(th.value) + 4 * K * EPS)
    return ProductReport(qp, K, xs, np.array(rel), np.array(tb), np.array(eb))


def _split(ranked):
    real, pairs = [], []
    for _, z in ranked:
        loc = z.location
        if loc.imag == 0:
            real.append(loc.real)
        elif abs(loc.imag) <= COLLISION_REL * abs(loc.real):
            raise NearSpectralAmbiguity(f"zero {loc:.10g} is within the collision tolerance of the real axis")
        elif loc.imag > 0:
            pairs.append((loc, loc.conjugate()))
    return real, pairs


def _expand_pairs(pairs):
    coeffs = np.array([1.0])
    disc = []
    for z, _ in pairs:
        m2 = abs(z) ** 2
        quad = np.array([1.0, -2 * z.real / m2, 1 / m2])  # (1 - x/z)(1 - x/conj z)
        disc.append(quad[1] ** 2 - 4 * quad[2] * quad[0])
        coeffs = np.convolve(coeffs, quad)
    coeffs[0] = 1.0
    return tuple(float(c) for c in coeffs), tuple(float(d) for d in disc)


def decompose(q) -> ProductDecomposition:
    """theta = P psi with P the monic-at-zero product over conjugate pairs."""
    qp = as_q(q, allow_zero=False)
    if not qp.is_real:
        raise DomainError("decompose needs real q")
    k0 = working_disk_index(qp)
    _, _, ranked = _ladder(qp, k0 - 1 + EXTRA_TAIL, k0 - 1)
    real, pairs = _split(ranked)
    coeffs, disc = _expand_pairs(pairs)
    if any(d >= 0 for d in disc):
        raise CertificationError("a quadratic factor of P has real roots")
    real.sort(key=abs)
    return ProductDecomposition(qp, tuple(real), tuple(pairs), coeffs, len(ranked), disc)


def lp_bound_check(q, k_max: int = 8) -> LPClassReport:
    """Check 0 < g_k <= q^{k(k+1)/2} / (D (1 - q))^k for k <= k_max.

    g_k are the elementary symmetric functions of 1/xi over the real zeros
    -xi. Zeros are computed up to the ladder index K where q^K <= 1e-12 (or
    the budget ends); the omitted ones add at most s^i/i! to e_i with
    s = sum_{k > K} q^k / (1 - delta).
    """
    qp = as_q(q, allow_zero=False)
    if qp.kind is not QKind.POSITIVE_REAL:
        raise DomainError("lp_bound_check needs q in (0, 1)")
    if k_max < 1:
        raise DomainError("k_max must be >= 1")
    qv = qp.value.real
    K = min(math.ceil(12 / math.log10(1 / qv)), ladder_budget(qv))
    K = max(K, k_max)
    _, _, ranked = _ladder(qp, K)
    real = [(k, -z.location.real) for k, z in ranked if z.location.imag == 0]
    if any(xi <= 0 for _, xi in real):
        raise CertificationError("a real zero is not negative")
    xi_q = tuple((k, xi * qv ** k) for k, xi in real)
    D = min([r for _, r in xi_q] + [1 - tail_delta(qv)])
    if not D > 0:
        raise CertificationError(f"D estimate {D!r} is not positive")
    recip = np.array([1 / xi for _, xi in real])
    g = kernels.elementary_symmetric(recip, k_max)
    K_used = len(ranked)
    s = qv ** (K_used + 1) / ((1 - tail_delta(qv)) * (1 - qv))
    g_up = [sum(g[k - i] * s ** i / math.factorial(i) for i in range(k + 1)) for k in range(k_max + 1)]
    margins = []
    for k in range(1, k_max + 1):
        bound = math.exp(0.5 * k * (k + 1) * math.log(qv) - k * math.log(D * (1 - qv)))
        margins.append(bound / g_up[k])
    return LPClassReport(tuple(float(v) for v in g[1:]), tuple(float(v) for v in g_up[1:]), float(D),
                         tuple(margins), ClassTag.LP_I, xi_q, K_used)


def negative_q_report(q, k_max: int = 40, *, strict: bool = True) -> NegativeQReport:
    """Sign alternation and eventual monotonicity of the real zeros, q in (-1, 0).

    Real zeros are ordered by modulus. ``monotone_from`` is the first index
    from which every real zero lies in the disk |x - mu_k| <= delta |mu_k|
    of its ladder index k and the moduli strictly increase, which is the
    mechanism behind eventual monotonicity.

    Alternation can fail among the first few real zeros (q = -0.75 has real
    zeros 1.052 and 2.755 and no negative one of smaller modulus); that is
    reported, not raised. With ``strict``, a failure from ``monotone_from``
    on, or no such index at all, raises.
    """
    qp = as_q(q, allow_zero=False)
    if qp.kind is not QKind.NEGATIVE_REAL:
        raise DomainError("negative_q_report needs q in (-1, 0)")
    qv = qp.value.real
    k_max = max(2, min(k_max, ladder_budget(qv)))
    _, _, ranked = _ladder(qp, k_max, min(default_k0(qv) - 1, k_max))
    _, pairs = _split(ranked)
    reals = [(k, z.location.real) for k, z in ranked if z.location.imag == 0]
    n = len(reals)
    flips = [reals[i][1] * reals[i + 1][1] < 0 for i in range(n - 1)]
    alt_from = n if n else None
    while alt_from and alt_from > 1 and flips[alt_from - 2]:
        alt_from -= 1
    in_disk = [abs(x - (-(qv ** (-k)))) <= tail_delta(qv) * abs(qv) ** (-k) for k, x in reals]
    mono = None
    for i in range(n - 1, -1, -1):
        if not in_disk[i] or (i + 1 < n and not abs(reals[i][1]) < abs(reals[i + 1][1])):
            break
        mono = i + 1
    if strict and mono is None:
        raise CertificationError(f"no monotone index found among {n} real zeros at q = {qv!r}")
    if strict and (alt_from is None or alt_from > mono):
        raise CertificationError(f"sign alternation of the real zeros fails in the tail at q = {qv!r}")
    return NegativeQReport(qv, tuple(x for _, x in reals), all(flips), mono, len(pairs), alt_from)
