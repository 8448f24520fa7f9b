import math
from fractions import Fraction

import pytest

from dal.approx import ApproxVector, best_approx_scan, certify, default_bits, estimate_exponent
from dal.errors import AlgebraicHit, PreconditionError
from dal.realnum import CertifiedInterval, RealSpec, parse_spec
from dal.transfer import LinearForm, find_small_form, going_up_witness, inequality_audit, minkowski_lift

LIOU5 = "liouville:w=5,base=2"


def test_find_small_form_examples():
    with pytest.raises(AlgebraicHit):
        find_small_form(RealSpec.sqrt(2), 2, 5)
    f = find_small_form(RealSpec.cbrt(2), 2, 10, "lead")
    assert abs(f.coeffs[-1]) == f.H and f.value.lo > 0
    f = find_small_form(RealSpec.golden(), 1, 8)
    assert f.coeffs in ((-8, 5), (8, -5))


def test_lift_precondition():
    form = LinearForm((-3, 2), CertifiedInterval.point(0))
    with pytest.raises(PreconditionError):
        minkowski_lift(form, RealSpec.rational(Fraction(3, 2)), 3)


@pytest.mark.parametrize("text,k,n,H", [("cbrt:2", 2, 4, 10), (LIOU5, 2, 3, 32)])
def test_lift_witness(text, k, n, H):
    spec = parse_spec(text)
    form = find_small_form(spec, k, H, "lead")
    w = minkowski_lift(form, spec, n)
    assert any(w.v)
    assert all(r == 0 for r in w.residuals)
    assert w.passes, w.checks
    # same enumeration order on a rerun
    assert minkowski_lift(form, spec, n).v == w.v


def test_going_up_liouville():
    spec = parse_spec(LIOU5)
    scan = best_approx_scan(spec, 1, 10**6)
    lam1 = estimate_exponent(scan).estimate
    a, new, rep = going_up_witness(spec, 1, scan[-1])
    assert new.n == 2 and rep["orthogonal"]
    assert new.exponent >= (lam1 - 1) / 2 - 0.2


def test_going_up_golden_is_trivial():
    g = RealSpec.golden()
    rec = certify(g, 1, 89, default_bits(1, 89))
    a, new, rep = going_up_witness(g, 1, rec)
    assert new.q == abs(a[-1]) * 89
    assert new.exponent < 0.5


def test_going_up_rejects_exact_record():
    rec = ApproxVector((3, 1), CertifiedInterval.point(0))
    with pytest.raises(PreconditionError):
        going_up_witness(RealSpec.rational(Fraction(1, 3)), 1, rec)


def test_inequality_audit_examples():
    rep = inequality_audit({"lambda_1": 1.0, "lambda_2": 0.5})
    gu = next(c for c in rep["checks"] if c["name"] == "going_up k=1")
    assert gu["lhs"] == pytest.approx(3.0) and gu["rhs"] == pytest.approx(2.0) and gu["passes"]
    rep = inequality_audit({"lambda_1": 6.0, "lambda_3": 1.4})
    c = next(c for c in rep["checks"] if c["name"] == "lambda_1 transfer n=3")
    assert c["margin"] >= -0.2
    rep = inequality_audit({"lambda_1": math.inf, "lambda_2": math.inf})
    assert rep["skipped"]
    with pytest.raises(PreconditionError):
        inequality_audit({})


def test_telescoped_chain_from_going_up():
    spec = parse_spec(LIOU5)
    s1 = best_approx_scan(spec, 1, 10**6)
    lam1 = estimate_exponent(s1).estimate
    _, new, _ = going_up_witness(spec, 1, s1[-1])
    rep = inequality_audit({"lambda_1": lam1, "lambda_2": new.exponent})
    assert rep["passes"]
