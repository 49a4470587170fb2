"""Command-line front end: ``partheta {eval,zeros,spectrum,verify,sweep}``.

One document goes to stdout (JSON, or CSV for sweeps), diagnostics to
stderr. Exit codes: 0 ok, 2 domain error, 3 precision budget, 4
certification failure.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import evalcore, factorization, spectrum, zerofinder
from .errors import DomainError, PartialThetaError, PrecisionBudgetExceeded

SCHEMA_VERSION = 1
CACHE_ENV = "PARTHETA_CACHE"
SWEEP_FIELDS = {
    "alternation": ["q", "sign_alternation_ok", "alternation_from", "monotone_from", "complex_pair_count",
                    "real_zeros"],
    "pairs": ["q", "complex_pair_count"],
    "lp": ["q", "D_estimate", "min_margin", "g_positive"],
}


def _c(z) -> dict:
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def _clean(obj):
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return _clean(obj.item())
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def _zero_doc(z: zerofinder.Zero) -> dict:
    return {"re": z.location.real, "im": z.location.imag, "multiplicity": z.multiplicity,
            "residual": z.residual, "certified": z.certified, "cert_radius": z.cert_radius}


def _q(args) -> evalcore.QParam:
    return evalcore.as_q(complex(args.q, args.q_imag))


# ---------------------------------------------------------------------------
# subcommands

EVALUATORS = {
    "theta": evalcore.eval_theta,
    "dx": evalcore.eval_theta_dx,
    "dq": evalcore.eval_theta_dq,
    "xi": evalcore.eval_xi,
    "theta_star": evalcore.eval_jacobi_theta_star,
}


def cmd_eval(args) -> dict:
    qp = _q(args)
    x = complex(args.x, args.x_imag)
    res = EVALUATORS[args.function](qp, x, args.tol)
    return {"q": _c(qp.value), "x": _c(x), "function": args.function, "value": _c(res.value),
            "error_bound": res.error_bound, "terms_used": res.terms_used}


def _radius(args, qp) -> float:
    if args.radius_exp is not None:
        return abs(qp.value) ** (-args.radius_exp)
    if args.radius is not None:
        return args.radius
    raise DomainError("zeros needs --radius or --radius-exp")


def cmd_zeros(args) -> dict:
    qp = _q(args)
    if qp.value == 0:
        raise DomainError("zeros needs q != 0")
    zs = zerofinder.find_zeros_in_disk(qp, _radius(args, qp), args.tol)
    return {"q": _c(qp.value), "requested_radius": zs.requested_radius, "disk_radius": zs.disk_radius,
            "winding": zs.winding, "tail_start_k": zs.tail_start_k,
            "total_multiplicity": zs.total_multiplicity,
            "complex_pairs": len(zs.upper_zeros()) if qp.is_real else None,
            "zeros": [_zero_doc(z) for z in zs.zeros]}


def cmd_spectrum(args) -> tuple:
    cache = args.cache if args.cache is not None else os.environ.get(CACHE_ENV)
    tab = spectrum.spectrum_table(args.j_max, cache or None, args.tol)
    doc = tab.to_json()
    doc.update({"provenance": tab.provenance.value, "complete": tab.complete, "cutoff": tab.cutoff,
                "j_max": args.j_max})
    return doc, (0 if tab.complete else PrecisionBudgetExceeded.exit_code)


def _check(name, fn):
    try:
        ok, detail = fn()
        return {"name": name, "ok": bool(ok), "detail": detail}
    except PartialThetaError as exc:
        return {"name": name, "ok": False, "detail": {"error": type(exc).__name__, "message": str(exc)}}


def _identities(qp):
    rng = np.random.default_rng(0)
    worst = 0.0
    for _ in range(8):
        x = complex(*rng.uniform(-3, 3, 2))
        a = evalcore.eval_jacobi_theta_star(qp, x, 1e-12, strict=False)
        b = evalcore.eval_jacobi_theta_star(qp, qp.value * x, 1e-12, strict=False)
        c = evalcore.eval_jacobi_theta_star(qp, x, 1e-12, "triple_product", strict=False)
        r1 = abs(a.value - qp.value * x * b.value) / (a.error_bound + abs(qp.value * x) * b.error_bound)
        r2 = abs(a.value - c.value) / (a.error_bound + c.error_bound)
        worst = max(worst, r1, r2)
    return worst <= 1, {"worst_ratio_to_bound": worst}


def _tails(qp):
    k0 = max(1, min(zerofinder.working_disk_index(qp), zerofinder.ladder_budget(qp) - 6))
    es = []
    for k in range(k0, k0 + 6):
        z = zerofinder.certify_tail_zero(qp, k)
        es.append(abs(z.offset) * abs(qp.value) ** k)
    return all(math.isfinite(e) for e in es), {"k0": k0, "e_k": es}


def _product(qp):
    grid = 2 * np.exp(2j * np.pi * np.arange(20) / 20)
    K = min(25, zerofinder.ladder_budget(qp))
    rep = factorization.reconstruct_product(qp, K, grid)
    ok = bool(np.all(rep.rel_error <= rep.tail_bound + rep.eval_bound + 1e-10))
    return ok, {"K": K, "max_rel_error": float(rep.rel_error.max()), "max_tail_bound": float(rep.tail_bound.max())}


def _structure(qp):
    d = factorization.decompose(qp)
    ok = d.poly_coeffs[0] == 1.0 and all(v < 0 for v in d.discriminants)
    detail = {"pairs": d.pairs, "poly_coeffs": list(d.poly_coeffs), "multiple_zeros": _multiple(d.real_zeros)}
    if qp.kind is evalcore.QKind.POSITIVE_REAL:
        lp = factorization.lp_bound_check(qp)
        ok = ok and min(lp.bound_margin) >= 1 and min(lp.g_coeffs) > 0
        detail.update({"D_estimate": lp.D_estimate, "min_margin": min(lp.bound_margin)})
    return ok, detail


def _multiple(reals):
    return sorted({x for x in reals if reals.count(x) > 1})


def _negative(qp):
    r = factorization.negative_q_report(qp, strict=False)
    ok = r.monotone_from is not None and r.alternation_from is not None and r.alternation_from <= r.monotone_from
    return ok, {"sign_alternation_ok": r.sign_alternation_ok, "alternation_from": r.alternation_from,
                "monotone_from": r.monotone_from, "complex_pair_count": r.complex_pair_count}


def cmd_verify(args) -> tuple:
    qp = _q(args)
    if qp.value == 0:
        raise DomainError("verify needs q != 0")
    checks = [_check("functional_equation_and_triple_product", lambda: _identities(qp)),
              _check("tail_zeros", lambda: _tails(qp)),
              _check("product_formula", lambda: _product(qp))]
    if qp.is_real:
        checks.append(_check("polynomial_times_lp", lambda: _structure(qp)))
    if qp.kind is evalcore.QKind.NEGATIVE_REAL:
        checks.append(_check("negative_q_structure", lambda: _negative(qp)))
    ok = all(c["ok"] for c in checks)
    return {"q": _c(qp.value), "ok": ok, "checks": checks}, (0 if ok else 4)


def sweep_row(report: str, q: float) -> dict:
    """One sweep row; a pure function of (report, q)."""
    if report == "alternation":
        r = factorization.negative_q_report(q, strict=False)
        return {"q": q, "sign_alternation_ok": r.sign_alternation_ok, "alternation_from": r.alternation_from,
                "monotone_from": r.monotone_from, "complex_pair_count": r.complex_pair_count,
                "real_zeros": len(r.real_zeros_signed)}
    if report == "pairs":
        return {"q": q, "complex_pair_count": spectrum.complex_pair_count(q)}
    lp = factorization.lp_bound_check(q)
    return {"q": q, "D_estimate": lp.D_estimate, "min_margin": min(lp.bound_margin),
            "g_positive": min(lp.g_coeffs) > 0}


def _sweep_one(item):
    return sweep_row(*item)


def cmd_sweep(args) -> dict:
    if args.steps < 1:
        raise DomainError("--steps must be >= 1")
    qs = [round(float(v), 12) for v in np.linspace(args.q_from, args.q_to, args.steps)]
    for q in qs:
        evalcore.as_q(q, allow_zero=False)
    items = [(args.report, q) for q in qs]
    jobs = 1 if args.deterministic else max(1, args.jobs)
    if jobs == 1 or len(items) == 1:
        rows = [_sweep_one(it) for it in items]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_sweep_one, items))
    return {"report": args.report, "q_from": args.q_from, "q_to": args.q_to, "steps": args.steps, "rows": rows}


# ---------------------------------------------------------------------------
# driver

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="partheta", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, with_q=True):
        if with_q:
            sp.add_argument("--q", type=float, required=True)
            sp.add_argument("--q-imag", type=float, default=0.0)
        sp.add_argument("--tol", type=float, default=1e-12)
        sp.add_argument("--format", choices=["json", "csv"], default="json")
        sp.add_argument("--deterministic", action="store_true",
                        help="fixed iteration order, no worker processes")

    sp = sub.add_parser("eval", help="evaluate theta or a related function")
    common(sp)
    sp.add_argument("--x", type=float, required=True)
    sp.add_argument("--x-imag", type=float, default=0.0)
    sp.add_argument("--function", choices=sorted(EVALUATORS), default="theta")

    sp = sub.add_parser("zeros", help="certified zeros in a disk")
    common(sp)
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--radius", type=float)
    g.add_argument("--radius-exp", type=float, help="radius |q|^-E")

    sp = sub.add_parser("spectrum", help="spectral values q~_1..q~_jmax")
    common(sp, with_q=False)
    sp.add_argument("--j-max", type=int, default=1)
    sp.add_argument("--cache", default=None, help=f"cache file (default ${CACHE_ENV})")

    sp = sub.add_parser("verify", help="check the structure theorem at one q")
    common(sp)

    sp = sub.add_parser("sweep", help="per-q reports over a grid")
    common(sp, with_q=False)
    sp.add_argument("--q-from", type=float, required=True)
    sp.add_argument("--q-to", type=float, required=True)
    sp.add_argument("--steps", type=int, default=10)
    sp.add_argument("--report", choices=sorted(SWEEP_FIELDS), default="pairs")
    sp.add_argument("--jobs", type=int, default=1)
    return p


COMMANDS = {"eval": cmd_eval, "zeros": cmd_zeros, "spectrum": cmd_spectrum,
            "verify": cmd_verify, "sweep": cmd_sweep}


def _render(doc: dict, fmt: str) -> str:
    if fmt == "csv":
        if "rows" not in doc:
            raise DomainError("--format csv is only available for sweep")
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=SWEEP_FIELDS[doc["report"]], lineterminator="\n")
        w.writeheader()
        for row in doc["rows"]:
            w.writerow({k: ("" if v is None else repr(v) if isinstance(v, float) else v)
                        for k, v in _clean(row).items()})
        return buf.getvalue()
    return json.dumps(_clean(doc), sort_keys=True, indent=2, allow_nan=False) + "\n"


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        with contextlib.redirect_stderr(stderr):
            args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and DomainError.exit_code
    try:
        out = COMMANDS[args.command](args)
        doc, code = out if isinstance(out, tuple) else (out, 0)
        doc = {"schema_version": SCHEMA_VERSION, "command": args.command, **doc}
        text = _render(doc, args.format)
    except PartialThetaError as exc:
        print(f"partheta: {type(exc).__name__}: {exc}", file=stderr)
        return exc.exit_code
    stdout.write(text)
    if code:
        print(f"partheta: finished with exit code {code}", file=stderr)
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
