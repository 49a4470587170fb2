"""Spectral values of theta: the q in (0, 1) where a double real zero appears.

Location is two-phase. Bisection on the integer pair count brackets the
value, then a 2-D Newton iteration on (theta, theta_x) = (0, 0) in the
unknowns (q, x) pins it down.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from . import kernels
from .errors import (
    CertificationError,
    ConvergenceError,
    DomainError,
    InvalidBracket,
    NearSpectralAmbiguity,
    NonMonotonicPairCount,
    PrecisionBudgetExceeded,
)
from .evalcore import QKind, as_q
from .zerofinder import (
    contour_order,
    find_zeros_in_disk,
    stable_theta_values,
    tail_zeros,
    working_disk_index,
)

SCHEMA_VERSION = 1
COLLISION_REL = 1e-6
COARSE_WIDTH = 1e-4
DEFAULT_TOL = 1e-12
SCAN_STEPS = 12
RIGHTMOST_SAMPLES = 4000


class Provenance(str, Enum):
    COMPUTED = "computed"
    CACHED = "cached"


@dataclass(frozen=True)
class SpectralValue:
    """q_value = q~_j with its double zero.

    ``residuals`` are |theta| and |theta_x| at the point, each divided by the
    sum of the moduli of the series terms.
    """

    index: int
    q_value: float
    double_zero_x: float
    residuals: tuple

    def to_json(self) -> dict:
        return {"j": self.index, "q": self.q_value, "x": self.double_zero_x,
                "res_theta": self.residuals[0], "res_dtheta": self.residuals[1]}


@dataclass
class SpectrumTable:
    entries: list
    tolerance: float
    provenance: Provenance
    complete: bool = True
    cutoff: str | None = field(default=None)

    def to_json(self) -> dict:
        return {"schema_version": SCHEMA_VERSION, "tolerance": self.tolerance,
                "entries": [e.to_json() for e in self.entries]}


def _positive_q(q) -> float:
    qp = as_q(q, allow_zero=False)
    if qp.kind is not QKind.POSITIVE_REAL:
        raise DomainError(f"spectral questions need q in (0, 1), got {qp.value!r}")
    return qp.value.real


def complex_pair_count(q, *, check_tail: int = 3, tol: float = 1e-12) -> int:
    """Number of conjugate pairs of non-real zeros of theta(q, .), q in (0, 1).

    Zeros in |x| < |q|^{-(k0 - 1/2)} are found and certified; beyond that the
    ladder zeros k0 .. k0 + check_tail - 1 are certified as simple and real,
    which puts the rest in the tail regime.
    """
    qv = _positive_q(q)
    k0 = working_disk_index(qv)
    zs = find_zeros_in_disk(qv, qv ** (-(k0 - 0.5)), tol)
    for z in zs.zeros:
        if z.multiplicity >= 2:
            raise NearSpectralAmbiguity(
                f"q = {qv!r} is near-spectral: zero of multiplicity {z.multiplicity} at {z.location.real:.10g}"
            )
        if z.location.imag != 0 and abs(z.location.imag) <= COLLISION_REL * abs(z.location.real):
            raise NearSpectralAmbiguity(
                f"q = {qv!r} is near-spectral: pair at {z.location:.10g} within collision tolerance of the real axis"
            )
    reals = sorted(z.location.real for z in zs.real_zeros())
    for a, b in zip(reals, reals[1:]):
        # the real-axis side of a collision: a pair x +- iy with y <= COLLISION_REL |x| splits into
        # two real zeros about that close
        if b - a <= 2 * COLLISION_REL * abs(b):
            raise NearSpectralAmbiguity(
                f"q = {qv!r} is near-spectral: real zeros {a:.10g} and {b:.10g} within collision tolerance"
            )
    if check_tail > 0:
        start = zs.total_multiplicity + 1
        tail_zeros(qv, start, start + check_tail - 1)
    return len(zs.upper_zeros())


def _pair_closest_to_axis(q: float):
    k0 = working_disk_index(q)
    zs = find_zeros_in_disk(q, q ** (-(k0 - 0.5)))
    ups = zs.upper_zeros()
    if not ups:
        return None
    return min(ups, key=lambda z: abs(z.location.imag) / abs(z.location))


def _series(q: float, x: float, dx: int, dq: int):
    N = contour_order(q, abs(x)) + 2 * dq
    v, mag = kernels.series_sum(complex(q), complex(x), N, dx, dq)
    return v.real, mag


def refine_double_zero(q_init: float, x_init: float, tol: float = DEFAULT_TOL,
                       max_iter: int = 50, *, index: int = 0, check_rightmost: bool = True) -> SpectralValue:
    """2-D Newton on (theta, theta_x) = 0 in (q, x).

    The Jacobian is [[theta_q, theta_x], [theta_xq, theta_xx]].
    """
    q, x = float(q_init), float(x_init)
    if not (0 < q < 1) or not x < 0:
        raise DomainError("need q in (0, 1) and x < 0")
    if not tol > 0:
        raise DomainError("tol must be positive")
    for _ in range(max_iter):
        f, fm = _series(q, x, 0, 0)
        g, gm = _series(q, x, 1, 0)
        fq, _ = _series(q, x, 0, 1)
        gx, _ = _series(q, x, 2, 0)
        gq, _ = _series(q, x, 1, 1)
        J = np.array([[fq, g], [gq, gx]])
        det = fq * gx - g * gq
        if not math.isfinite(det) or abs(det) <= 1e-14 * (abs(fq * gx) + abs(g * gq)):
            raise ConvergenceError("singular Jacobian in double-zero Newton", last_iterate=complex(x))
        dq_, dx_ = np.linalg.solve(J, [f, g])
        q -= dq_
        x -= dx_
        if not (0 < q < 1) or not math.isfinite(x) or x >= 0:
            raise ConvergenceError(f"double-zero Newton left the domain (q = {q:.6g}, x = {x:.6g})",
                                   last_iterate=complex(x))
        if abs(dq_) <= 4e-16 * q and abs(dx_) <= 4e-16 * abs(x):
            break
    # a stalled iterate is accepted only if the residuals say so
    f, fm = _series(q, x, 0, 0)
    g, gm = _series(q, x, 1, 0)
    res = (abs(f) / fm, abs(g) / gm)
    if max(res) > tol:
        raise ConvergenceError(
            f"double-zero Newton stalled with residuals {res[0]:.3g}, {res[1]:.3g} > {tol:.3g}",
            last_iterate=complex(x),
        )
    if check_rightmost:
        _check_rightmost(q, x)
    return SpectralValue(index, float(q), float(x), (float(res[0]), float(res[1])))


def _check_rightmost(q: float, x: float):
    """theta_xx > 0 at x, and theta > its bound on a fine grid of (x, 0]."""
    gx, _ = _series(q, x, 2, 0)
    if not gx > 0:
        raise CertificationError(f"double zero at {x:.10g} is not a local minimum of theta")
    a = x * (1 - 1e-3)
    # theta is quadratic near x; the grid starts where that term dominates rounding
    xs = np.linspace(a, 0.0, RIGHTMOST_SAMPLES)
    N = contour_order(q, abs(x))
    vals, bounds = stable_theta_values(complex(q), xs.astype(np.complex128), N)
    if np.any(vals.real <= bounds):
        i = int(np.argmax(vals.real <= bounds))
        raise CertificationError(
            f"rightmost check failed: theta({xs[i]:.6g}) = {vals[i].real:.3g} at q = {q:.12g}"
        )


def locate_spectral_value(j: int, bracket, tol_q: float = 1e-12, *, tol: float = DEFAULT_TOL) -> SpectralValue:
    """q~_j inside ``bracket``: bisection on the pair count, then Newton."""
    if j < 1:
        raise DomainError("j must be a positive integer")
    lo, hi = (float(b) for b in bracket)
    if not (0 < lo < hi < 1):
        raise InvalidBracket(f"bracket must satisfy 0 < lo < hi < 1, got ({lo}, {hi})")
    c_lo = complex_pair_count(lo)
    c_hi = complex_pair_count(hi)
    if c_lo > j - 1 or c_hi < j:
        raise InvalidBracket(
            f"invalid bracket for j = {j}: pair counts {c_lo} at {lo} and {c_hi} at {hi}"
        )
    while hi - lo > COARSE_WIDTH:
        mid = 0.5 * (lo + hi)
        try:
            c = complex_pair_count(mid)
        except NearSpectralAmbiguity:
            lo = hi = mid
            break
        if c < c_lo or c > c_hi:
            raise NonMonotonicPairCount(
                f"pair count {c} at q = {mid!r} lies outside [{c_lo}, {c_hi}] of the bracket"
            )
        if c >= j:
            hi, c_hi = mid, c
        else:
            lo, c_lo = mid, c
    if c_hi - c_lo > 1 and hi > lo:
        raise NonMonotonicPairCount(
            f"pair count jumps from {c_lo} to {c_hi} inside [{lo!r}, {hi!r}]"
        )
    pair = _pair_closest_to_axis(hi) if hi > lo else None
    if pair is None:
        # ambiguous midpoint: start from the rightmost real zero there
        zs = find_zeros_in_disk(hi, 1.0 / hi)
        x0 = max(z.location.real for z in zs.zeros if z.location.imag == 0)
    else:
        x0 = pair.location.real
    sv = refine_double_zero(0.5 * (lo + hi), x0, tol, index=j)
    if not (bracket[0] - tol_q <= sv.q_value <= bracket[1] + tol_q):
        raise ConvergenceError(f"Newton left the bracket: q = {sv.q_value!r}", last_iterate=complex(sv.double_zero_x))
    return sv


# ---------------------------------------------------------------------------
# cache

def _read_cache(path: Path, tol: float):
    try:
        doc = json.loads(path.read_text())
        if doc.get("schema_version") != SCHEMA_VERSION:
            return None
        entries = []
        for i, e in enumerate(doc["entries"], start=1):
            if int(e["j"]) != i:
                return None
            entries.append(SpectralValue(i, float(e["q"]), float(e["x"]),
                                         (float(e["res_theta"]), float(e["res_dtheta"]))))
        return entries
    except (OSError, ValueError, KeyError, TypeError):
        return None


def _validate(sv: SpectralValue, tol: float) -> bool:
    if not (0 < sv.q_value < 1 and sv.double_zero_x < 0):
        return False
    f, fm = _series(sv.q_value, sv.double_zero_x, 0, 0)
    g, gm = _series(sv.q_value, sv.double_zero_x, 1, 0)
    return abs(f) / fm <= tol and abs(g) / gm <= tol


def write_cache(path, table: SpectrumTable):
    """Atomic replace: write a sibling temp file, then rename over the target."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=path.name + ".", suffix=".tmp", dir=path.parent)
    try:
        with os.fdopen(fd, "w") as fh:
            json.dump(table.to_json(), fh, indent=2, sort_keys=True)
            fh.write("\n")
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _find_bracket(j: int, lo: float):
    step = (1 - lo) / SCAN_STEPS
    prev = lo
    q = lo
    while True:
        q = q + step
        if q >= 1:
            raise PrecisionBudgetExceeded(f"precision budget exceeded: no bracket for j = {j} below q = 1")
        try:
            c = complex_pair_count(q)
        except NearSpectralAmbiguity:
            q += 1e-3 * step
            c = complex_pair_count(q)
        if c >= j:
            return prev, q
        prev = q


def spectrum_table(j_max: int, cache_path=None, tol: float = DEFAULT_TOL) -> SpectrumTable:
    """q~_1 .. q~_{j_max}, loaded from ``cache_path`` when valid, else computed.

    A budget failure for some j returns the entries found so far with
    ``complete = False`` and the reason in ``cutoff``.
    """
    if j_max < 1:
        raise DomainError("j_max must be >= 1")
    path = Path(cache_path) if cache_path else None
    cached = _read_cache(path, tol) if path and path.exists() else None
    if cached is not None and len(cached) >= j_max and all(_validate(e, tol) for e in cached[:j_max]):
        return SpectrumTable(cached[:j_max], tol, Provenance.CACHED)
    entries = []
    lo = 0.1
    complete, cutoff = True, None
    for j in range(1, j_max + 1):
        try:
            if complex_pair_count(lo) >= j:
                raise NonMonotonicPairCount(f"pair count at q = {lo!r} already reaches {j}")
            bracket = _find_bracket(j, lo)
            sv = locate_spectral_value(j, bracket, tol=tol)
        except (PrecisionBudgetExceeded, CertificationError) as exc:
            complete, cutoff = False, f"j = {j}: {exc}"
            break
        if entries and not sv.q_value > entries[-1].q_value:
            raise NonMonotonicPairCount(f"q~_{j} = {sv.q_value!r} does not exceed q~_{j - 1}")
        entries.append(sv)
        lo = sv.q_value + 10 * COARSE_WIDTH
    table = SpectrumTable(entries, tol, Provenance.COMPUTED, complete, cutoff)
    if path is not None and entries:
        keep = cached if cached is not None and len(cached) > len(entries) and \
            all(_validate(e, tol) for e in cached) else None
        write_cache(path, table if keep is None else SpectrumTable(keep, tol, Provenance.COMPUTED))
    return table


__all__ = [
    "SCHEMA_VERSION",
    "Provenance",
    "SpectralValue",
    "SpectrumTable",
    "complex_pair_count",
    "locate_spectral_value",
    "refine_double_zero",
    "spectrum_table",
    "write_cache",
]
