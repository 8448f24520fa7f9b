import math
from decimal import Decimal, getcontext
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dal.approx import (
    ApproxVector,
    best_approx_scan,
    estimate_exponent,
    estimate_w,
    good_approx_enum,
    grid_profile,
    min_form,
)
from dal.errors import AlgebraicHit, PreconditionError, TooFewRecords
from dal.numbers import catalog
from dal.realnum import RealSpec, parse_spec
from dal.veronese import classify

FIB = [1, 2, 3, 5, 8, 13, 21, 34, 55, 89]


def _decimal_value(text):
    getcontext().prec = 80
    if text == "golden":
        return (1 + Decimal(5).sqrt()) / 2
    if text == "sqrt:2":
        return Decimal(2).sqrt()
    if text == "cbrt:2":
        x = Decimal(2) ** (Decimal(1) / 3)
        for _ in range(5):
            x = x - (x**3 - 2) / (3 * x * x)
        return x
    raise KeyError(text)


def _brute_records(text, n, qmax):
    """Independent oracle: 80-digit decimals, ties within 1e-60 are not improvements."""
    x = _decimal_value(text)
    pw = [x**j for j in range(n + 1)]
    out, best = [], None
    for q in range(1, qmax + 1):
        rho = max(abs(q * pw[j] - (q * pw[j]).to_integral_value()) for j in range(1, n + 1))
        if best is None or rho < best - Decimal("1e-60"):
            best = rho
            out.append(q)
    return out


def test_golden_fibonacci_records():
    assert [r.q for r in best_approx_scan(RealSpec.golden(), 1, 100)] == FIB


@pytest.mark.parametrize("text,n,qmax", [("golden", 1, 3000), ("golden", 2, 2000), ("sqrt:2", 2, 2000),
                                         ("sqrt:2", 3, 2000), ("cbrt:2", 2, 3000), ("cbrt:2", 3, 3000)])
def test_scan_matches_brute_force(text, n, qmax):
    assert [r.q for r in best_approx_scan(parse_spec(text), n, qmax)] == _brute_records(text, n, qmax)


def test_rational_degenerate():
    res = best_approx_scan(parse_spec("rational:1/3"), 1, 10)
    assert res.degenerate and res.degenerate_q == 3
    assert res[-1].rho.hi == 0


def test_sqrt2_n2_records():
    res = best_approx_scan(RealSpec.sqrt(2), 2, 1000)
    assert res[-1].rho.hi < res[0].rho.lo
    # xi^2 = 2 is rational, so only ||q sqrt2|| matters and the exponent sits near 1
    tail = [r.exponent for r in res[-3:]]
    assert all(0.9 <= e <= 1.3 for e in tail)


@pytest.mark.parametrize("text", ["golden", "cbrt:2", "liouville:w=3,base=2", "cfrand:seed=3,bound=5"])
def test_best_record_monotone(text):
    for n in (1, 2, 3):
        res = best_approx_scan(parse_spec(text), n, 20000)
        for a, b in zip(res, res[1:]):
            assert b.q > a.q
            assert b.rho.hi < a.rho.lo


def test_scan_independent_of_workers():
    spec = parse_spec("cbrt:2")
    a = best_approx_scan(spec, 2, 300000, workers=1)
    b = best_approx_scan(spec, 2, 300000, workers=2)
    assert [r.to_json() for r in a] == [r.to_json() for r in b]


def test_record_json_roundtrip():
    for r in best_approx_scan(RealSpec.cbrt(2), 3, 5000):
        assert ApproxVector.from_json(r.to_json()) == r


def test_good_enum_examples():
    members = {v.q for v in good_approx_enum(RealSpec.golden(), 1, 1, 1, 100)}
    assert set(FIB[1:]) <= members
    assert [v.q for v in good_approx_enum(RealSpec.golden(), 2, 0, 1, 50)] == list(range(1, 51))


def test_good_enum_liouville_on_curve():
    # w = 3 gives lambda_2 = 1/2 < 1, so only small q qualify
    assert good_approx_enum(parse_spec("liouville:w=3,base=2"), 2, 1, 1, 10**6)
    members = good_approx_enum(parse_spec("liouville:w=7,base=2"), 2, 1, 1, 10**6)
    off = [v.q for v in members if not classify(v).on_curve]
    q0 = (off[-1] + 1) if off else 1
    assert all(classify(v).on_curve for v in members if v.q >= q0)
    assert any(v.q >= q0 for v in members)


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(["golden", "cbrt:2", "liouville:w=3,base=2"]), st.integers(1, 3),
       st.fractions(min_value=0, max_value=2, max_denominator=8), st.fractions(min_value=0, max_value=2, max_denominator=8))
def test_good_enum_antimonotone(text, n, a, b):
    lo, hi = min(a, b), max(a, b)
    spec = parse_spec(text)
    strong = {v.q for v in good_approx_enum(spec, n, hi, 1, 3000)}
    weak = {v.q for v in good_approx_enum(spec, n, lo, 1, 3000)}
    assert strong <= weak


def test_estimate_golden():
    res = best_approx_scan(RealSpec.golden(), 1, 10**5)
    assert 0.95 <= estimate_exponent(res).estimate <= 1.05


def test_estimate_prescribed_w3():
    res = best_approx_scan(parse_spec("prescribed:w=3"), 1, 10**6)
    assert estimate_exponent(res).estimate >= 2.8


def test_estimate_too_few():
    res = best_approx_scan(RealSpec.golden(), 1, 100)
    with pytest.raises(TooFewRecords):
        estimate_exponent(res[:1])
    with pytest.raises(PreconditionError):
        estimate_exponent(res, "nope")


def test_estimate_reproducible_from_records():
    res = best_approx_scan(RealSpec.cbrt(2), 2, 10**5)
    a = estimate_exponent(res)
    b = estimate_exponent([(q, Fraction(rho)) for q, rho in a.records])
    assert a.estimate == b.estimate


def test_uniform_below_limsup():
    for text in ("golden", "cbrt:2", "liouville:w=5,base=2"):
        res = best_approx_scan(parse_spec(text), 2, 10**5)
        hat = estimate_exponent(res, "uniform_lambda_n", qmax=10**5).estimate
        assert hat <= max(v for v in estimate_exponent(res).pointwise if v is not None) + 1e-9


def test_dirichlet_floor():
    for e in catalog():
        for n in (1, 2, 3):
            res = best_approx_scan(e.spec, n, 10**4)
            if res.degenerate or len(res) < 3:
                continue
            assert estimate_exponent(res).estimate >= 1 / n - 0.1, (e.name, n)


@pytest.mark.parametrize("text", ["golden", "cbrt:2", "quartic", "liouville:w=5,base=2", "cfrand:seed=9,bound=5"])
def test_grid_profile_monotone_in_n(text):
    spec = next(e.spec for e in catalog() if e.name == text) if text == "quartic" else parse_spec(text)
    grid = [10**k for k in range(1, 6)] + [3 * 10**k for k in range(1, 5)]
    grid.sort()
    prof = [grid_profile(best_approx_scan(spec, n, 10**5), grid) for n in (1, 2, 3, 4)]
    for lower, upper in zip(prof[1:], prof):
        for a, b in zip(lower, upper):
            if a is not None and b is not None:
                assert a <= b + 1e-12


def test_w_examples():
    w = estimate_w(RealSpec.sqrt(2), 2, 8)
    assert w.algebraic in ((-2, 0, 1), (2, 0, -1))
    with pytest.raises(AlgebraicHit):
        min_form(RealSpec.sqrt(2), 2, 5)
    w = estimate_w(RealSpec.cbrt(2), 2, 50)
    assert all(v.lo > 0 for _, _, v in w.ladder)
    assert 1.6 <= w.estimate.estimate <= 2.4
    w = estimate_w(RealSpec.golden(), 1, 64, "cst")
    assert 0.9 <= w.estimate.estimate <= 1.1
    # minimisers are convergent pairs
    assert [abs(c[1]) for _, c, _ in w.ladder][-3:] == [8, 13, 34]


@pytest.mark.parametrize("text,k,H", [("cbrt:2", 2, 32), ("golden", 1, 64), ("liouville:w=3,base=2", 2, 32),
                                      ("cfrand:seed=2,bound=5", 2, 16)])
def test_w_lead_below_all(text, k, H):
    spec = parse_spec(text)
    a, b = estimate_w(spec, k, H, "all"), estimate_w(spec, k, H, "lead")
    for (_, _, va), (_, _, vb) in zip(a.ladder, b.ladder):
        assert va.lo <= vb.hi
    assert b.estimate.estimate <= a.estimate.estimate + 1e-12


def test_min_form_brute_force():
    spec = RealSpec.cbrt(2)
    x = _decimal_value("cbrt:2")
    H = 6
    best = min(
        (abs(a0 + a1 * x + a2 * x * x), (a0, a1, a2))
        for a0 in range(-H, H + 1) for a1 in range(-H, H + 1) for a2 in range(-H, H + 1)
        if (a0, a1, a2) != (0, 0, 0)
    )
    coeffs, value = min_form(spec, 2, H)
    assert value.lo <= Fraction(best[0]) + Fraction(1, 10**50)
    assert Fraction(best[0]) - Fraction(1, 10**50) <= value.hi
    assert math.isclose(float(value.hi), float(best[0]), rel_tol=1e-9)
