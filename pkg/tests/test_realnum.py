import math
from decimal import Decimal, getcontext
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dal.errors import PreconditionError, RefineNeeded, SpecError
from dal.realnum import (
    CertifiedInterval,
    RealSpec,
    cf_convergents,
    cf_expansion,
    eval_real,
    iroot,
    nearest_int_certified,
    parse_spec,
)

SPECS = ["golden", "sqrt:2", "cbrt:2", "sqrt:7", "liouville:w=3,base=2", "algebraic:poly=x^4-x-1,lo=1,hi=2",
         "prescribed:w=3", "cfrand:seed=4,bound=5", "cf:1,2,2,...", "rational:22/7"]


def test_rational_is_exact():
    assert eval_real(parse_spec("rational:3/2"), 10) == CertifiedInterval.point(Fraction(3, 2))


def test_sqrt2_enclosure():
    iv = eval_real(RealSpec.sqrt(2), 20)
    assert iv.width <= Fraction(1, 2**20)
    assert iv.lo**2 <= 2 <= iv.hi**2


def test_liouville_partial_sums():
    iv = eval_real(parse_spec("liouville:w=3,base=2"), 60)
    head = Fraction(1, 2**3) + Fraction(1, 2**9) + Fraction(1, 2**27)
    # next term is 2^-81, far below the requested width
    assert iv.lo <= head + Fraction(1, 2**81) <= iv.hi
    assert iv.width <= Fraction(1, 2**60)


def test_decimal_oracle_for_surds():
    getcontext().prec = 80
    iv = eval_real(RealSpec.sqrt(7), 200)
    d = Decimal(7).sqrt()
    assert Fraction(iv.lo) <= Fraction(d) + Fraction(1, 10**75)
    assert Fraction(d) - Fraction(1, 10**75) <= iv.hi


@pytest.mark.parametrize("text", SPECS)
def test_nested_precision(text):
    spec = parse_spec(text)
    a, b = eval_real(spec, 40), eval_real(spec, 90)
    assert a.lo <= b.lo and b.hi <= a.hi or b.width <= a.width and a.overlaps(b)
    assert b.width <= Fraction(1, 2**90)


@pytest.mark.parametrize("text", SPECS)
def test_spec_text_roundtrip(text):
    spec = parse_spec(text)
    assert parse_spec(str(spec)) == spec
    assert parse_spec(str(spec).upper()) == spec


def test_spec_errors():
    with pytest.raises(SpecError):
        parse_spec("bogus:1")
    with pytest.raises(SpecError):
        parse_spec("algebraic:poly=x^2-2,lo=2,hi=3")  # no root in the interval
    with pytest.raises(SpecError):
        parse_spec("algebraic:poly=x^2-2,lo=-2,hi=2")  # two roots


def test_nearest_int_examples():
    m, d = nearest_int_certified(CertifiedInterval(Fraction("0.49"), Fraction("0.495")))
    assert m == 0 and d.subset_of(CertifiedInterval(Fraction("0.49"), Fraction("0.495")))
    m, d = nearest_int_certified(CertifiedInterval(Fraction("1.9"), Fraction("2.1")))
    assert m == 2 and d.subset_of(CertifiedInterval(Fraction(0), Fraction("0.1")))
    with pytest.raises(RefineNeeded):
        nearest_int_certified(CertifiedInterval(Fraction("0.4999"), Fraction("0.5001")))


@given(st.fractions(min_value=-100, max_value=100), st.fractions(min_value=0, max_value=Fraction(1, 3)))
def test_nearest_int_soundness(x, w):
    iv = CertifiedInterval(x, x + w)
    try:
        m, d = nearest_int_certified(iv)
    except RefineNeeded:
        # only allowed when some half-integer lies in the closed enclosure
        h = math.floor(x + Fraction(1, 2)) - Fraction(1, 2)
        assert any(iv.lo <= h + j <= iv.hi for j in (0, 1)) or iv.lo != iv.hi
        return
    for y in (iv.lo, iv.hi, (iv.lo + iv.hi) / 2):
        assert abs(y - m) <= Fraction(1, 2)
        assert d.contains(abs(y - m))


def test_convergent_examples():
    conv, flag = cf_convergents(RealSpec.golden(), 6)
    assert conv == [(1, 1), (2, 1), (3, 2), (5, 3), (8, 5), (13, 8)] and not flag
    conv, _ = cf_convergents(RealSpec.sqrt(2), 4)
    assert conv == [(1, 1), (3, 2), (7, 5), (17, 12)]
    conv, flag = cf_convergents(parse_spec("rational:3/2"), 10)
    assert conv == [(1, 1), (3, 2)] and flag


def _brute_cf(x: Fraction, count):
    out = []
    for _ in range(count):
        a = math.floor(x)
        out.append(a)
        if x == a:
            break
        x = 1 / (x - a)
    return out


@pytest.mark.parametrize("text", ["sqrt:2", "cbrt:2", "sqrt:7", "algebraic:poly=x^4-x-1,lo=1,hi=2"])
def test_cf_matches_brute_force(text):
    spec = parse_spec(text)
    iv = eval_real(spec, 600)
    qs, _ = cf_expansion(spec, 25)
    assert qs == _brute_cf(iv.lo, 25) == _brute_cf(iv.hi, 25)


@pytest.mark.parametrize("text", SPECS[:-1])
def test_convergent_identities(text):
    spec = parse_spec(text)
    conv, _ = cf_convergents(spec, 8)
    iv = eval_real(spec, 4 * conv[-1][1].bit_length() + 64)
    for (p0, q0), (p1, q1) in zip(conv, conv[1:]):
        assert abs(p1 * q0 - p0 * q1) == 1
    for p, q in conv:
        assert math.gcd(p, q) == 1
        assert abs(iv.mid - Fraction(p, q)) < Fraction(1, q * q)


@given(st.integers(min_value=0, max_value=10**40), st.integers(min_value=1, max_value=7))
def test_iroot(x, k):
    r = iroot(x, k)
    assert r**k <= x < (r + 1) ** k


@settings(max_examples=50)
@given(st.fractions(min_value=-5, max_value=5), st.fractions(min_value=-5, max_value=5),
       st.fractions(min_value=0, max_value=2), st.fractions(min_value=0, max_value=2))
def test_interval_arithmetic_encloses(a, b, wa, wb):
    A, B = CertifiedInterval(a, a + wa), CertifiedInterval(b, b + wb)
    for x in (a, a + wa):
        for y in (b, b + wb):
            assert (A + B).contains(x + y)
            assert (A - B).contains(x - y)
            assert (A * B).contains(x * y)


def test_precondition():
    with pytest.raises(PreconditionError):
        cf_convergents(RealSpec.golden(), 0)
