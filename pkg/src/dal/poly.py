"""Dense univariate polynomials over Q, coefficients stored low degree first."""

import re
from fractions import Fraction
from math import gcd

from .errors import SpecError

_TERM = re.compile(r"([+-]?)(\d*)(\*?x(?:\^(\d+))?)?")


def parse_poly(text):
    """Parse ``x^3-2x+1`` style text into an integer coefficient list."""
    s = text.replace(" ", "").replace("**", "^").lower()
    if not s:
        raise SpecError("empty polynomial")
    coeffs = {}
    pos = 0
    while pos < len(s):
        m = _TERM.match(s, pos)
        if not m or m.end() == pos:
            raise SpecError(f"cannot parse polynomial near {s[pos:]!r}")
        sign, digits, xpart, exp = m.groups()
        if not digits and not xpart:
            raise SpecError(f"cannot parse polynomial near {s[pos:]!r}")
        c = int(digits) if digits else 1
        if sign == "-":
            c = -c
        d = (int(exp) if exp else 1) if xpart else 0
        coeffs[d] = coeffs.get(d, 0) + c
        pos = m.end()
    out = [0] * (max(coeffs) + 1)
    for d, c in coeffs.items():
        out[d] = c
    return trim(out)


def format_poly(p):
    if not any(p):
        return "0"
    parts = []
    for d in range(len(p) - 1, -1, -1):
        c = p[d]
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if d == 0:
            body = str(a)
        else:
            body = ("" if a == 1 else str(a)) + ("x" if d == 1 else f"x^{d}")
        parts.append(sign + body)
    s = "".join(parts)
    return s[1:] if s.startswith("+") else s


def trim(p):
    p = list(p)
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return p


def degree(p):
    p = trim(p)
    return -1 if p == [0] else len(p) - 1


def peval(p, x):
    acc = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def sign_at(p, x):
    v = peval(p, Fraction(x))
    return (v > 0) - (v < 0)


def derivative(p):
    return trim([i * p[i] for i in range(1, len(p))] or [0])


def divmod_poly(a, b):
    a = [Fraction(c) for c in trim(a)]
    b = [Fraction(c) for c in trim(b)]
    if degree(b) < 0:
        raise ZeroDivisionError("polynomial division by zero")
    q = [Fraction(0)] * max(1, len(a) - len(b) + 1)
    r = a[:]
    db = len(b) - 1
    while degree(r) >= db and any(r):
        dr = len(r) - 1
        f = r[-1] / b[-1]
        q[dr - db] = f
        for i in range(len(b)):
            r[dr - db + i] -= f * b[i]
        r = trim(r[:-1] if len(r) > 1 else r)
    return trim(q), trim(r)


def primitive(p):
    """Scale to coprime integer coefficients with positive leading term."""
    p = trim(p)
    fr = [Fraction(c) for c in p]
    den = 1
    for c in fr:
        den = den * c.denominator // gcd(den, c.denominator)
    ints = [int(c * den) for c in fr]
    g = 0
    for c in ints:
        g = gcd(g, c)
    if g == 0:
        return [0]
    ints = [c // g for c in ints]
    if ints[-1] < 0:
        ints = [-c for c in ints]
    return ints


def gcd_poly(a, b):
    a, b = trim(a), trim(b)
    while degree(b) >= 0:
        _, r = divmod_poly(a, b)
        a, b = b, r
    if degree(a) < 0:
        return [0]
    return primitive(a)


def squarefree(p):
    g = gcd_poly(p, derivative(p))
    if degree(g) <= 0:
        return primitive(p)
    q, _ = divmod_poly(p, g)
    return primitive(q)


def mod_power(j, m):
    """Remainder of x^j modulo m, as a Fraction coefficient list."""
    r = [Fraction(1)]
    base = [Fraction(0), Fraction(1)]
    _, base = divmod_poly(base, m)
    e = j
    while e:
        if e & 1:
            _, r = divmod_poly(mul(r, base), m)
        e >>= 1
        if e:
            _, base = divmod_poly(mul(base, base), m)
    return r


def mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for k, y in enumerate(b):
                out[i + k] += x * y
    return trim(out)


def sturm_sequence(p):
    seq = [trim(p), derivative(p)]
    while degree(seq[-1]) > 0:
        _, r = divmod_poly(seq[-2], seq[-1])
        if degree(r) < 0:
            break
        seq.append([-c for c in r])
    return seq


def _variations(seq, x):
    signs = [s for s in (sign_at(f, x) for f in seq) if s]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_roots(p, lo, hi):
    """Number of distinct real roots of ``p`` in the half-open interval (lo, hi]."""
    if degree(p) <= 0:
        return 0
    seq = sturm_sequence(squarefree(p))
    return _variations(seq, lo) - _variations(seq, hi)
