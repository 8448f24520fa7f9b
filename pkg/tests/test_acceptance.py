"""Acceptance criteria, one test per criterion.

Each test records a PASS/FAIL line that the terminal summary prints (see
conftest.py).  Run standalone with ``python tests/test_acceptance.py``.
Criteria that cannot be met by a correct implementation are strict xfails.
"""

import functools
import itertools
import json
import math
import random
import sys
import time
from fractions import Fraction
from math import gcd

import pytest

from dal import bounds, records
from dal.approx import best_approx_scan, estimate_exponent, estimate_lambda
from dal.cli import run
from dal.hankel import (
    delta_profile,
    ds_family_audit,
    legal_minors,
    prop41_family,
    rank_recurrence,
    recurrence_family,
    recurrence_residuals,
    selection_det,
)
from dal.numbers import catalog, make_prescribed_lambda1
from dal.realnum import RealSpec, parse_spec
from dal.transfer import find_small_form, going_up_witness, inequality_audit, minkowski_lift
from dal.veronese import collapse_audit

RESULTS = []
CATALOG_Q = 10**6


def report(num, title, ok, detail, elapsed, limit=None):
    timed = limit is None or elapsed < limit
    verdict = "PASS" if ok and timed else "FAIL"
    line = f"[{verdict}] criterion {num:>2}: {title} ({elapsed:.1f}s) {detail}"
    RESULTS.append(line)
    return ok and timed


@functools.lru_cache(maxsize=None)
def catalog_scan(spec, n):
    return best_approx_scan(spec, n, CATALOG_Q)


def cofactor_det(M):
    if not M:
        return 1
    if len(M) == 1:
        return M[0][0]
    return sum((-1) ** c * M[0][c] * cofactor_det([r[:c] + r[c + 1:] for r in M[1:]])
               for c in range(len(M)) if M[0][c])


# ---------------------------------------------------------------------------


def test_criterion_01_exact_identities():
    t = time.perf_counter()
    bad = []
    for n in range(2, 11):
        lam = Fraction(2, n)
        pt = bounds.evaluate(n, lam)
        if not (pt.lower16 == pt.lower_ber == Fraction(2, n + 2)):
            bad.append(("lower16=ber", n))
    for n in range(3, 13):
        lo = Fraction(n + 4, 3 * n)
        for i in range(200):
            lam = lo + (3 - lo) * Fraction(i, 199)
            if bounds.evaluate(n, lam).upper23 != Fraction(2, n) / (1 + lam):
                bad.append(("upper23", n, lam))
    for n in range(1, 13):
        for m in range(1, n + 1):
            if bounds.lower_k(n, m, Fraction(1, m)) != Fraction(1, n - m + 1):
                bad.append(("lower_k", n, m))
    el = time.perf_counter() - t
    ok = report(1, "exact bound identities", not bad, f"violations={len(bad)}", el, 5)
    assert ok, bad[:5]


def test_criterion_02_bounds_sanity():
    t = time.perf_counter()
    bad = []
    for n in range(3, 13):
        lo = Fraction(1, n)
        prev = None
        for i in range(200):
            lam = lo + (3 - lo) * Fraction(i, 199)
            pt = bounds.evaluate(n, lam)
            vals = [pt.lower23] + ([pt.upper23] if pt.upper23 is not None else [])
            if any(not 0 <= v <= 1 for v in vals):
                bad.append(("range", n, lam))
            if pt.upper23 is not None and pt.lower23 > pt.upper23:
                bad.append(("cross", n, lam))
            if prev is not None:
                if pt.lower23 > prev.lower23:
                    bad.append(("lower monotone", n, lam))
                if pt.upper23 is not None and prev.upper23 is not None and pt.upper23 > prev.upper23:
                    bad.append(("upper monotone", n, lam))
            prev = pt
    el = time.perf_counter() - t
    ok = report(2, "bounds sanity on [1/n, 3]", not bad, f"violations={len(bad)}", el, 10)
    assert ok, bad[:5]


def test_criterion_03_hankel_oracle():
    t = time.perf_counter()
    rng = random.Random(20240603)
    bad = 0
    dets = 0
    for _ in range(10**4):
        n = rng.randint(2, 6)
        p = tuple(rng.randint(1, 10**6) for _ in range(n + 1))
        sizes = [m for m in range(2, n // 2 + 2)]
        prof = delta_profile(p, sizes)
        for (m, k), v in prof.minors.items():
            M = [[p[k - m + 1 + i + j] for j in range(m)] for i in range(m)]
            dets += 1
            bad += v != cofactor_det(M)
        for m in sizes:
            for cols in itertools.combinations(range(n - m + 2), m):
                dets += 1
                bad += selection_det(p, cols) != cofactor_det([list(p[c:c + m]) for c in cols])
        rec = rank_recurrence(p)
        a = rec.kernel
        bad += any(recurrence_residuals(p, a)) or not any(a) or functools.reduce(gcd, a) != 1
    el = time.perf_counter() - t
    ok = report(3, "Hankel determinants and kernels vs oracle", bad == 0, f"dets={dets} mismatches={bad}", el, 60)
    assert ok


def test_criterion_04_prop41_roundtrip():
    t = time.perf_counter()
    worst = 0.0
    failures = []
    used = 0
    for e in catalog():
        for n in (1, 2, 3):
            rep = prop41_family(catalog_scan(e.spec, n), e.spec, qmin=100, bound=8)
            used += rep["records"]
            if rep["records"]:
                worst = max(worst, rep["max_K1"], rep["max_K2"], rep["max_K_star"])
            if not rep["passes"]:
                failures.append((e.name, n))
    el = time.perf_counter() - t
    ok = report(4, "forward/converse constants <= 8", not failures and used > 0,
                f"records={used} worst={worst:.3f} failing={failures}", el)
    assert ok


def test_criterion_05_veronese_collapse():
    t = time.perf_counter()
    details = []
    ok = True
    for w in (5, 7, 9):
        rep = collapse_audit(parse_spec(f"liouville:w={w},base=2"), 2, 2, 1, 10**6)
        good = (rep["members"] > 0 and not rep["counterexamples"] and rep["all_on_curve_past_q0"]
                and rep["divisibility_ok"] and rep["displacement_ok"])
        ok &= good
        details.append(f"w={w}:members={rep['members']},q0={rep['q0']}")
    el = time.perf_counter() - t
    ok = report(5, "Veronese collapse for Liouville w=5,7,9", ok, " ".join(details), el, 600)
    assert ok


@pytest.mark.xfail(strict=True, reason="golden satisfies x^2 = x + 1, so its n=2 exponent equals the n=1 value, 1")
def test_criterion_06_exponent_estimation():
    t = time.perf_counter()
    g = RealSpec.golden()
    l1 = estimate_lambda(g, 1, 10**5).estimate
    l2 = estimate_lambda(g, 2, 10**5).estimate
    checks = {"golden n=1": (l1, 0.95 <= l1 <= 1.05), "golden n=2": (l2, 0.4 <= l2 <= 0.6)}
    for w in (2, 3, 6):
        est = estimate_lambda(make_prescribed_lambda1(w), 1, 10**6).estimate
        checks[f"prescribed w={w}"] = (est, abs(est - w) <= 0.25)
    el = time.perf_counter() - t
    ok = all(v[1] for v in checks.values())
    detail = " ".join(f"{k}={v[0]:.3f}{'' if v[1] else '(out)'}" for k, v in checks.items())
    ok = report(6, "exponent estimates", ok, detail, el, 600)
    assert ok


@pytest.mark.xfail(strict=True, reason="Liouville w=7,9 have no new n=3 record below 2^21, so their n=3 estimates at 1e6 are stale")
def test_criterion_07_inequality_audits():
    t = time.perf_counter()
    failing = []
    audited = 0
    for e in catalog():
        scans = {n: catalog_scan(e.spec, n) for n in (1, 2, 3)}
        if any(s.degenerate for s in scans.values()):
            continue
        est = {f"lambda_{n}": estimate_exponent(s).estimate for n, s in scans.items()}
        for n in (2, 3):
            est[f"uniform_lambda_{n}"] = estimate_exponent(scans[n], "uniform_lambda_n", qmax=CATALOG_Q).estimate
        rep = inequality_audit(est, tol=0.3, uniform_tol=0.2)
        if rep["skipped"]:
            continue
        audited += 1
        wanted = [c for c in rep["checks"]
                  if c["name"] in ("going_up k=1", "going_up k=2", "lambda_1 transfer n=2",
                                   "lambda_1 transfer n=3", "uniform bound n=2", "uniform bound n=3")]
        failing += [f"{e.name}:{c['name']}({c['margin']:.2f})" for c in wanted if not c["passes"]]
    el = time.perf_counter() - t
    ok = report(7, "transference inequalities on catalog", not failing and audited > 0,
                f"audited={audited} failing={failing}", el, 900)
    assert ok


def test_criterion_08_transfer_witnesses():
    t = time.perf_counter()
    notes = []
    ok = True
    cases = [("cbrt:2", 2, 4, H) for H in (10, 16, 32)] + [("liouville:w=5,base=2", 2, 3, 32)]
    for text, k, n, H in cases:
        spec = parse_spec(text)
        w = minkowski_lift(find_small_form(spec, k, H, "lead"), spec, n)
        good = any(w.v) and all(r == 0 for r in w.residuals) and w.passes
        ok &= good
        notes.append(f"{text}/H={H}:{'ok' if good else 'bad'}")
    spec = parse_spec("liouville:w=5,base=2")
    scan = best_approx_scan(spec, 1, 10**6)
    lam1 = estimate_exponent(scan).estimate
    _, new, _ = going_up_witness(spec, 1, scan[-1])
    need = (lam1 - 1) / 2 - 0.3
    ok &= new.n == 2 and new.exponent >= need
    notes.append(f"going-up exponent={new.exponent:.3f} need>={need:.3f}")
    el = time.perf_counter() - t
    ok = report(8, "lift and going-up witnesses", ok, " ".join(notes), el, 600)
    assert ok


def test_criterion_09_davenport_schmidt():
    t = time.perf_counter()
    rng = random.Random(12345)
    worst = 0.0
    bad = 0
    for _ in range(100):
        gen, windows = recurrence_family(rng, h_max=3, H_max=50, n_max=12)
        rep = ds_family_audit(gen, windows)
        for p in windows:
            prof = rank_recurrence(p)
            if not prof.ds_skipped and prof.Z == 0:
                bad += 1
        if rep["bounded"] is False:
            bad += 1
        if rep["ratios"]:
            worst = max(worst, rep["max_over_median"])
    el = time.perf_counter() - t
    ok = report(9, "ds_ratio bounded across 100 families", bad == 0, f"worst max/median={worst:.2f}", el, 60)
    assert ok


def _bytes(paths):
    return [p.read_bytes() for p in paths]


def test_criterion_10_determinism(tmp_path, capsys):
    t = time.perf_counter()
    outs = [tmp_path / f"{i}" for i in range(5)]

    def once():
        rc = [
            run(["scan", "--xi", "cbrt:2", "--n", "3", "--qmax", "100000", "--no-cache", "--out", str(outs[0])]),
            run(["bounds", "--n", "5", "--grid", "0.2:3:0.05", "--csv", str(outs[1]), "--svg", str(outs[2])]),
            run(["catalog", "--out", str(outs[3])]),
            run(["verify", "--suite", "prop41,identities", "--xi", "golden", "--n", "2", "--qmax", "10000"]),
        ]
        out = capsys.readouterr().out
        return rc, _bytes(outs[:4]), out

    rc1, b1, o1 = once()
    rc2, b2, o2 = once()
    header, recs = records.read_records(outs[0])
    records.write_records(outs[4], header, recs)
    roundtrip = outs[4].read_bytes() == outs[0].read_bytes()
    ok = rc1 == rc2 == [0, 0, 0, 0] and b1 == b2 and o1 == o2 and roundtrip
    el = time.perf_counter() - t
    ok = report(10, "byte-identical reruns and record round-trip", ok, f"roundtrip={roundtrip}", el)
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
