import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dal.approx import best_approx_scan
from dal.errors import DegenerateHit, PreconditionError
from dal.realnum import RealSpec, parse_spec
from dal.veronese import (
    audit_tolerance,
    classify,
    classify_general,
    collapse_audit,
    divisibility_trace,
    uniform_bound_audit,
)


def test_classify_examples():
    c = classify((8, 12, 18, 27), RealSpec.rational(Fraction(3, 2)))
    assert c.on_curve and (c.a, c.b) == (3, 2) and c.divisible and c.distance.hi == 0
    c = classify((4, 6, 9, 13))
    assert not c.on_curve and c.fail_j == 2 and c.fail_delta == 3
    c = classify((16, 24, 36, 54))
    assert c.on_curve and (c.a, c.b) == (3, 2) and c.divisible


def test_interior_zero_diagnostic():
    c = classify((1, 0, 0, 1))
    assert not c.on_curve and c.diagnostic


def test_on_curve_exhaustive():
    for n in range(1, 6):
        for b in range(1, 21):
            for a in range(-20, 21):
                if math.gcd(a, b) != 1:
                    continue
                for t in (1, 2, 5):
                    p = tuple(t * a**j * b ** (n - j) for j in range(n + 1))
                    c = classify(p)
                    assert c.on_curve and (c.a, c.b) == (a, b) and c.divisible


@given(st.lists(st.integers(-10**4, 10**4), min_size=2, max_size=6), st.integers(1, 50),
       st.integers(1, 10**4))
def test_scale_covariance(tail, t, q):
    p = (q, *tail)
    c1, c2 = classify(p), classify(tuple(t * x for x in p))
    assert c1.on_curve == c2.on_curve
    if c1.on_curve:
        assert (c1.a, c1.b) == (c2.a, c2.b)
        assert c2.divisible == ((t * q) % c2.b ** (len(p) - 1) == 0)


@given(st.lists(st.integers(-10**4, 10**4), min_size=3, max_size=6), st.integers(1, 10**4))
def test_on_curve_implies_deltas_vanish(tail, q):
    p = (q, *tail)
    c = classify(p)
    if c.on_curve:
        assert all(p[j] * c.b**j == q * c.a**j for j in range(len(p)))


def test_classify_general_examples():
    c = classify_general((8, 12, 27), (1, 3))
    assert c.on_curve and (c.a, c.b) == (3, 2) and c.divisible
    for k in (1, 2, 3):
        q = 81 * k
        c = classify_general((q, q * 2 // 3, q * 4 // 9, q * 16 // 81), (1, 2, 4))
        assert c.on_curve and (c.a, c.b) == (2, 3)
    with pytest.raises(PreconditionError, match="gap"):
        classify_general((8, 12, 27), (1, 3), lam=1.5)
    assert not classify_general((8, 12, 28), (1, 3)).on_curve


def test_collapse_golden_empty_or_inconclusive():
    rep = collapse_audit(RealSpec.golden(), 2, 2, 1, 10**6)
    assert rep["members"] <= 2 and rep["inconclusive"] and not rep["counterexamples"]


def test_collapse_liouville_w7():
    rep = collapse_audit(parse_spec("liouville:w=7,base=2"), 2, 2, 1, 10**6)
    assert rep["members"] > 0 and not rep["counterexamples"]
    assert rep["all_on_curve_past_q0"] and rep["divisibility_ok"] and rep["displacement_ok"]
    assert not rep["inconclusive"]


def test_collapse_rational_degenerate():
    with pytest.raises(DegenerateHit):
        collapse_audit(RealSpec.rational(Fraction(1, 3)), 2, 2, 1, 100)


def test_collapse_precondition():
    with pytest.raises(PreconditionError):
        collapse_audit(RealSpec.golden(), 2, 1, 1, 100)


def test_uniform_bound_examples():
    rep = uniform_bound_audit(RealSpec.golden(), 2, 10**5)
    assert rep["passes"]
    rep = uniform_bound_audit(parse_spec("liouville:w=9,base=2"), 2, 10**6)
    assert rep["passes"]
    assert audit_tolerance(10**6) == pytest.approx(0.2)


def test_divisibility_trace_golden():
    q = best_approx_scan(RealSpec.golden(), 1, 100)[-1].q
    tr = divisibility_trace(RealSpec.golden(), q, 2, 1.5)
    assert tr["steps"] and tr["x"] >= 1
    for s in tr["steps"]:
        assert s["multiple_of_q_pow_j_minus_1"] or s["j"] > 1
    assert tr["chain_complete"] or tr["broken_at"] is not None
    with pytest.raises(PreconditionError):
        divisibility_trace(RealSpec.golden(), q, 2, 2.5)
