"""Command-line front end: ``dal <subcommand> [flags]``.

Exit codes: 0 success, 2 usage error, 3 precondition violation, 4 budget or
precision exhausted.  Failures print one JSON object on stderr.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import bounds, records
from .approx import (
    LIMSUP_MODES,
    ScanResult,
    best_approx_scan,
    certify,
    default_bits,
    estimate_exponent,
    estimate_w,
    good_approx_enum,
)
from .errors import (
    AlgebraicHit,
    BudgetExceeded,
    DalError,
    DegenerateHit,
    PrecisionExhausted,
    PreconditionError,
    TooFewRecords,
)
from .hankel import delta_profile, prop41_family, prop42_family, rank_recurrence
from .numbers import DEFAULT_SEED, catalog_jsonl
from .realnum import as_spec, parse_spec
from .transfer import find_small_form, going_up_witness, inequality_audit, minkowski_lift
from .veronese import classify, classify_general, collapse_audit, uniform_bound_audit


SUBCOMMANDS = ("scan", "exponents", "hankel", "classify", "collapse", "transfer", "bounds", "verify",
               "catalog", "report")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ---------------------------------------------------------------------------
# helpers


def _emit(obj, path=None):
    text = json.dumps(obj, indent=2, sort_keys=True, default=str) + "\n"
    if path:
        records.atomic_write(path, text)
    else:
        sys.stdout.write(text)


def _ints(text: str) -> tuple:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def _frac(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"expected a rational number, got {text!r}") from None


def _int(text: str) -> int:
    try:
        return int(float(text)) if "e" in text.lower() else int(text)
    except ValueError:
        raise UsageError(f"expected an integer, got {text!r}") from None


def scan_cached(spec, n, qmax, *, lam=None, C=None, workers=1, use_cache=True):
    """Best-record scan (or good-approximation enumeration when lam is given), via the cache."""
    spec = as_spec(spec)
    header = records.make_header(spec, n, qmax, C, lam)
    if use_cache:
        hit = records.cache_lookup(header)
        if hit is not None:
            h, recs = hit
            return ScanResult(recs, spec=spec, n=n, qmax=qmax, degenerate_q=h.get("degenerate_q")), h, True
    if lam is None:
        res = best_approx_scan(spec, n, qmax, workers=workers)
    else:
        res = good_approx_enum(spec, n, lam, C, qmax, workers=workers)
    header["degenerate_q"] = res.degenerate_q
    if use_cache:
        records.cache_store(header, res)
    return res, header, False


def _load_vectors(args):
    if getattr(args, "p", None):
        return [_ints(args.p)]
    if getattr(args, "records", None):
        _, recs = records.read_records(args.records)
        return [r.coeffs for r in recs]
    raise UsageError("give --p or --records")


def _est(scan, mode="lambda_n", qmax=None):
    if scan.degenerate:
        return math.inf
    return estimate_exponent(scan, mode, qmax=qmax).estimate


# ---------------------------------------------------------------------------
# subcommands


def cmd_scan(args):
    res, header, hit = scan_cached(
        args.xi, args.n, args.qmax, lam=args.lam, C=args.C if args.lam is not None else None,
        workers=args.workers, use_cache=not args.no_cache,
    )
    if args.out:
        records.write_records(args.out, header, res)
    _emit({
        "spec": header["spec"],
        "n": args.n,
        "Qmax": args.qmax,
        "records": len(res),
        "degenerate_q": res.degenerate_q,
        "cache_hit": hit,
        "out": args.out,
    })
    return 0


def cmd_exponents(args):
    out = {"spec": str(parse_spec(args.xi)) if args.xi else None, "mode": args.mode}
    if args.mode in ("w_n", "w_n_lead", "w_n_cst"):
        if not args.xi:
            raise UsageError("w modes need --xi")
        tag = {"w_n": "all", "w_n_lead": "lead", "w_n_cst": "cst"}[args.mode]
        w = estimate_w(args.xi, args.n, args.hmax, tag)
        out.update(w.to_json())
        _emit(out, args.json)
        return 0
    if args.records:
        header, recs = records.read_records(args.records)
        qmax = header.get("Qmax")
        scan = ScanResult(recs, qmax=qmax, degenerate_q=header.get("degenerate_q"))
    else:
        if not args.xi:
            raise UsageError("give --xi or --records")
        scan, _, _ = scan_cached(args.xi, args.n, args.qmax, workers=args.workers, use_cache=not args.no_cache)
        qmax = args.qmax
    if scan.degenerate:
        out.update(estimate=None, degenerate_q=scan.degenerate_q, note="exact hit: exponent is infinite")
    else:
        e = estimate_exponent(scan, args.mode, window=args.window, qmax=qmax)
        out.update(e.to_json())
    _emit(out, args.json)
    return 0


def cmd_hankel(args):
    spec = as_spec(args.xi) if args.xi else None
    sizes = _ints(args.sizes) if args.sizes else (2, 3)
    out = []
    for p in _load_vectors(args):
        n = len(p) - 1
        prof = rank_recurrence(p, tuple(m for m in sizes if 2 * m - 2 <= n)) if n >= 1 else delta_profile(p, ())
        row = prof.to_json()
        if spec is not None and prof.kernel is not None:
            from .approx import form_value

            v = abs(form_value(spec, list(prof.kernel), 256))
            row["kernel_value_hi"] = float(v.hi)
        out.append(row)
    _emit({"profiles": out}, args.json)
    return 0


def cmd_classify(args):
    spec = as_spec(args.xi) if args.xi else None
    out = []
    for p in _load_vectors(args):
        if args.degrees:
            c = classify_general(p, _ints(args.degrees), spec, args.lam, args.C)
        else:
            c = classify(p, spec)
        out.append({"p": list(p), **c.to_json()})
    _emit({"classifications": out}, args.json)
    return 0


def cmd_collapse(args):
    rep = collapse_audit(args.xi, args.n, args.lam, args.C, args.qmax, workers=args.workers)
    _emit(rep, args.json)
    return 0


def cmd_transfer(args):
    spec = as_spec(args.xi)
    if args.action == "form":
        f = find_small_form(spec, args.k, args.H, args.mode)
        _emit(f.to_json(), args.json)
    elif args.action == "lift":
        f = find_small_form(spec, args.k, args.H, "lead")
        w = minkowski_lift(f, spec, args.n)
        _emit(w.to_json(), args.json)
    else:
        if args.q:
            rec = certify(spec, args.k, args.q, default_bits(args.k, args.q))
        else:
            scan, _, _ = scan_cached(spec, args.k, args.qmax, workers=args.workers, use_cache=not args.no_cache)
            if not scan:
                raise TooFewRecords("scan produced no records")
            rec = scan[-1]
        a, new, rep = going_up_witness(spec, args.k, rec)
        rep = dict(rep, record=rec.to_json(), new_record=new.to_json())
        _emit(rep, args.json)
    return 0


def _parse_grid(text):
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError("--grid expects lo:hi:step")
    return [_frac(x) for x in parts]


def cmd_bounds(args):
    if args.lam is not None and not args.grid:
        _emit(bounds.evaluate(args.n, args.lam).to_json(), args.json)
        return 0
    if args.thresholds:
        _emit({"n": args.n, "identities": bounds.threshold_report(args.n)}, args.json)
        return 0
    lo, hi, step = _parse_grid(args.grid or f"1/{args.n}:3:1/100")
    c = bounds.curve(args.n, lo, hi, step)
    if args.csv:
        records.atomic_write(args.csv, c.csv())
    if args.svg:
        records.atomic_write(args.svg, bounds.svg(c))
    _emit(c.to_json(), args.json)
    return 0


def cmd_catalog(args):
    text = catalog_jsonl(args.seed)
    if args.out:
        records.atomic_write(args.out, text)
    else:
        sys.stdout.write(text)
    return 0


SUITES = ("prop41", "prop42", "collapse", "uniform", "inequalities", "identities")


def run_verify(spec, n, qmax, suites, *, workers=1, use_cache=True, lam=2, C=1) -> dict:
    spec = as_spec(spec)
    results = {}
    scans = {}

    def scan(k):
        if k not in scans:
            scans[k] = scan_cached(spec, k, qmax, workers=workers, use_cache=use_cache)[0]
        return scans[k]

    for s in suites:
        try:
            if s == "prop41":
                r = prop41_family(scan(n), spec)
                results[s] = {k: v for k, v in r.items() if k != "rows"}
            elif s == "prop42":
                r = prop42_family(scan(n))
                results[s] = dict(r, passes=r["prop42_max_ratio"] <= 10 and r["prop43_max_ratio"] <= 10)
            elif s == "collapse":
                r = collapse_audit(spec, n, lam, C, qmax, workers=workers)
                results[s] = {k: v for k, v in r.items() if k != "rows"}
                results[s]["passes"] = not r["counterexamples"]
            elif s == "uniform":
                results[s] = uniform_bound_audit(spec, max(2, n), qmax, scans={1: scan(1), max(2, n): scan(max(2, n))})
            elif s == "inequalities":
                est = {f"lambda_{k}": _est(scan(k)) for k in range(1, n + 1)}
                if n >= 2 and not scan(n).degenerate:
                    est[f"uniform_lambda_{n}"] = _est(scan(n), "uniform_lambda_n", qmax)
                results[s] = dict(inequality_audit(est), estimates=est)
                results[s].setdefault("passes", True)
            elif s == "identities":
                rep = bounds.threshold_report(max(2, n))
                results[s] = {"identities": rep, "passes": all(r.get("holds", True) for r in rep)}
        except (DegenerateHit, TooFewRecords) as e:
            results[s] = {"passes": None, "inconclusive": True, "reason": str(e)}
    verdicts = [r.get("passes") for r in results.values()]
    return {
        "spec": str(spec),
        "n": n,
        "Qmax": qmax,
        "suites": results,
        "passed": all(v is not False for v in verdicts),
        "failed": [k for k, r in results.items() if r.get("passes") is False],
    }


def cmd_verify(args):
    suites = SUITES if args.suite == "all" else tuple(args.suite.split(","))
    bad = [s for s in suites if s not in SUITES]
    if bad:
        raise UsageError(f"unknown suite(s): {', '.join(bad)}")
    rep = run_verify(args.xi, args.n, args.qmax, suites, workers=args.workers, use_cache=not args.no_cache,
                     lam=args.lam if args.lam is not None else 2, C=args.C)
    _emit(rep, args.json)
    return 0


CHECKS = ("classify", "hankel", "exponents", "prop42")


def build_report(header: dict, recs: list, checks=CHECKS) -> dict:
    spec = as_spec(header["spec"]) if header.get("spec") else None
    rows = []
    for r in recs:
        row = {"q": r.q, "exponent": r.exponent}
        if "classify" in checks:
            c = classify(r.coeffs, spec)
            row["on_curve"] = c.on_curve
            if c.on_curve:
                row["a_b"] = [c.a, c.b]
                row["divisible"] = c.divisible
        if "hankel" in checks and r.n >= 1:
            prof = rank_recurrence(r.coeffs)
            row["h"] = prof.h
            row["kernel"] = list(prof.kernel)
        rows.append(row)
    summary = {"records": len(recs)}
    if not recs:
        summary["verdict"] = "inconclusive"
        return {"header": header, "summary": summary, "rows": rows}
    off = [row["q"] for row in rows if row.get("on_curve") is False]
    if "classify" in checks:
        summary["q0"] = (off[-1] + 1) if off else recs[0].q
        summary["on_curve_past_q0"] = sum(1 for row in rows if row["q"] >= summary["q0"])
    if "prop42" in checks:
        fam = prop42_family(recs, qmin=1)
        summary.update(prop42_max_ratio=fam["prop42_max_ratio"], prop43_max_ratio=fam["prop43_max_ratio"])
    if "exponents" in checks:
        if len(recs) >= 3:
            summary["lambda_estimate"] = estimate_exponent(recs, "lambda_n").estimate
            if header.get("lambda") is None:
                summary["uniform_estimate"] = estimate_exponent(
                    recs, "uniform_lambda_n", qmax=header.get("Qmax")).estimate
        else:
            summary["lambda_estimate"] = None
    summary["verdict"] = "ok"
    return {"header": header, "summary": summary, "rows": rows}


def _report_text(rep: dict) -> str:
    h, s = rep["header"], rep["summary"]
    lines = [f"spec {h.get('spec')}  n={h.get('n')}  Qmax={h.get('Qmax')}  records={s['records']}"]
    if s["verdict"] == "inconclusive":
        lines.append("inconclusive: no records")
        return "\n".join(lines) + "\n"
    lines.append(f"{'q':>14} {'exponent':>10} {'curve':>6} {'h':>3}  kernel")
    for r in rep["rows"]:
        e = "-" if r["exponent"] is None else f"{r['exponent']:.4f}"
        curve = {True: "on", False: "off", None: "-"}[r.get("on_curve")]
        lines.append(f"{r['q']:>14} {e:>10} {curve:>6} {r.get('h', '-')!s:>3}  {r.get('kernel', '')}")
    for k in ("q0", "lambda_estimate", "uniform_estimate", "prop42_max_ratio", "prop43_max_ratio"):
        if k in s:
            v = s[k]
            lines.append(f"{k}: {v:.6g}" if isinstance(v, float) else f"{k}: {v}")
    return "\n".join(lines) + "\n"


def cmd_report(args):
    header, recs = records.read_records(args.record_file)
    checks = CHECKS if args.checks == "all" else tuple(args.checks.split(","))
    rep = build_report(header, recs, checks)
    sys.stdout.write(_report_text(rep))
    if args.json:
        _emit(rep, args.json)
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="dal", description="Simultaneous approximation to successive powers: scans, audits, bounds.")
    p.add_argument("--config", help="key=value file merged under the command-line flags")
    p.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def common(sp, *, xi=False, n=False, qmax=False):
        if xi:
            sp.add_argument("--xi", help="real number, e.g. golden, sqrt:2, liouville:w=5,base=2")
        if n:
            sp.add_argument("--n", type=int, default=2)
        if qmax:
            sp.add_argument("--qmax", type=_int, default=10**5)
        sp.add_argument("--no-cache", action="store_true")
        sp.add_argument("--json", help="write the JSON result here instead of stdout")

    sp = sub.add_parser("scan", help="best-record scan or good-approximation enumeration")
    common(sp, xi=True, n=True, qmax=True)
    sp.add_argument("--lambda", dest="lam", type=_frac)
    sp.add_argument("--C", type=_frac, default=Fraction(1))
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_scan, need_xi=True)

    sp = sub.add_parser("exponents", help="exponent estimates from a scan or record file")
    common(sp, xi=True, n=True, qmax=True)
    sp.add_argument("--mode", default="lambda_n", choices=LIMSUP_MODES + ("uniform_lambda_n",))
    sp.add_argument("--records")
    sp.add_argument("--window", type=int)
    sp.add_argument("--hmax", type=int, default=32)
    sp.set_defaults(func=cmd_exponents)

    sp = sub.add_parser("hankel", help="Hankel profile, recurrence kernel and DS data")
    common(sp, xi=True)
    sp.add_argument("--p")
    sp.add_argument("--records")
    sp.add_argument("--sizes")
    sp.set_defaults(func=cmd_hankel)

    sp = sub.add_parser("classify", help="Veronese or monomial-curve classification")
    common(sp, xi=True)
    sp.add_argument("--p")
    sp.add_argument("--records")
    sp.add_argument("--degrees")
    sp.add_argument("--lambda", dest="lam", type=_frac)
    sp.add_argument("--C", type=_frac, default=Fraction(1))
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("collapse", help="collapse audit of good approximations")
    common(sp, xi=True, n=True, qmax=True)
    sp.add_argument("--lambda", dest="lam", type=_frac, default=Fraction(2))
    sp.add_argument("--C", type=_frac, default=Fraction(1))
    sp.set_defaults(func=cmd_collapse, need_xi=True)

    sp = sub.add_parser("transfer", help="small forms, lifts and going-up witnesses")
    common(sp, xi=True, n=True, qmax=True)
    sp.add_argument("--action", choices=("form", "lift", "going-up"), default="lift")
    sp.add_argument("--k", type=int, default=2)
    sp.add_argument("--H", type=int, default=10)
    sp.add_argument("--mode", choices=("all", "lead", "cst"), default="all")
    sp.add_argument("--q", type=_int)
    sp.set_defaults(func=cmd_transfer, need_xi=True)

    sp = sub.add_parser("bounds", help="dimension bound tables and plots")
    common(sp, n=True)
    sp.add_argument("--grid", help="lo:hi:step with rationals, e.g. 1/3:2:1/100")
    sp.add_argument("--lambda", dest="lam", type=_frac)
    sp.add_argument("--csv")
    sp.add_argument("--svg")
    sp.add_argument("--thresholds", action="store_true")
    sp.set_defaults(func=cmd_bounds)

    sp = sub.add_parser("verify", help="aggregated audits for one real number")
    common(sp, xi=True, n=True, qmax=True)
    sp.add_argument("--suite", default="all")
    sp.add_argument("--lambda", dest="lam", type=_frac)
    sp.add_argument("--C", type=_frac, default=Fraction(1))
    sp.set_defaults(func=cmd_verify, need_xi=True)

    sp = sub.add_parser("catalog", help="export the catalog of test reals")
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_catalog)

    sp = sub.add_parser("report", help="summarise a record file")
    sp.add_argument("record_file")
    sp.add_argument("--checks", default="all")
    sp.add_argument("--json")
    sp.set_defaults(func=cmd_report)
    return p


def read_config(path) -> list[str]:
    """key=value lines as flag tokens; blank lines and # comments ignored."""
    tokens = []
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise UsageError(f"cannot read config {path}: {e}") from None
    for i, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{i}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        flag = "--" + key.replace("_", "-")
        if value.lower() in ("true", "yes", "on"):
            tokens.append(flag)
        elif value.lower() not in ("false", "no", "off"):
            tokens += [flag, value]
    return tokens


def _merge_config(argv: list[str]) -> list[str]:
    pre = _Parser(add_help=False)
    pre.add_argument("--config")
    known, rest = pre.parse_known_args(argv)
    if not known.config:
        return argv
    extra = read_config(known.config)
    # flags given later win, so config tokens go right after the subcommand
    for i, tok in enumerate(rest):
        if tok in SUBCOMMANDS:
            return rest[: i + 1] + extra + rest[i + 1 :]
    raise UsageError("no subcommand given")


def _fail(code: int, kind: str, err) -> int:
    obj = {"error": kind, "message": str(err), "exit_code": code}
    for attr in ("q", "coeffs", "searched"):
        v = getattr(err, attr, None)
        if v is not None:
            obj[attr] = list(v) if isinstance(v, tuple) else v
    sys.stderr.write(json.dumps(obj, sort_keys=True, default=str) + "\n")
    return code


def run(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        argv = _merge_config(argv)
        args = build_parser().parse_args(argv)
        if not getattr(args, "command", None):
            raise UsageError("a subcommand is required")
        if getattr(args, "need_xi", False) and not args.xi:
            raise UsageError("--xi is required")
        if getattr(args, "xi", None):
            parse_spec(args.xi)
        return args.func(args)
    except UsageError as e:
        return _fail(2, "usage", e)
    except (BudgetExceeded, PrecisionExhausted) as e:
        return _fail(4, type(e).__name__, e)
    except (PreconditionError, DegenerateHit, AlgebraicHit) as e:
        return _fail(3, type(e).__name__, e)
    except DalError as e:
        return _fail(3, type(e).__name__, e)


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
