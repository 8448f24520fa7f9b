"""Exact rationals, certified enclosures of described reals, continued fractions.

Every enclosure has exact rational endpoints; floating point never enters
here.  ``eval_real(spec, bits)`` is a pure function of its arguments and the
enclosures it returns are nested in ``bits``.
"""

from __future__ import annotations

import math
import random
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from . import poly
from .errors import PrecisionExhausted, PreconditionError, RefineNeeded, SpecError

Rational = Fraction

MAX_BITS = 1 << 16


# ---------------------------------------------------------------------------
# integer roots


def iroot(x: int, k: int) -> int:
    """floor(x ** (1/k)) for x >= 0."""
    if x < 0:
        raise ValueError("iroot of a negative number")
    if x < 2 or k == 1:
        return x
    if k == 2:
        return math.isqrt(x)
    r = 1 << -(-x.bit_length() // k)
    while True:
        s = ((k - 1) * r + x // r ** (k - 1)) // k
        if s >= r:
            break
        r = s
    while r ** k > x:
        r -= 1
    while (r + 1) ** k <= x:
        r += 1
    return r


def root_bounds(x: Fraction, k: int, bits: int = 64) -> tuple[Fraction, Fraction]:
    """Rational lo <= x**(1/k) <= hi with hi - lo <= 2**-bits * (1 + x**(1/k))."""
    x = Fraction(x)
    if x < 0:
        raise ValueError("root of a negative number")
    if x == 0:
        return Fraction(0), Fraction(0)
    scale = 1 << (bits * k)
    num = x.numerator * scale
    den = x.denominator
    # (x * 2^(bits k))^(1/k) = x^(1/k) 2^bits; bracket num/den between integer k-th powers
    lo = iroot(num // den, k)
    hi = lo if lo ** k * den == num else lo + 1
    return Fraction(lo, 1 << bits), Fraction(hi, 1 << bits)


def ceil_pow(q: int, e: Fraction) -> int:
    """ceil(q ** e) for integer q >= 1 and rational e >= 0."""
    e = Fraction(e)
    r, s = e.numerator, e.denominator
    target = q ** r
    m = iroot(target, s)
    return m if m ** s == target else m + 1


# ---------------------------------------------------------------------------
# intervals


@dataclass(frozen=True)
class CertifiedInterval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lo", Fraction(self.lo))
        object.__setattr__(self, "hi", Fraction(self.hi))
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, x) -> CertifiedInterval:
        return cls(Fraction(x), Fraction(x))

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def is_exact(self) -> bool:
        return self.lo == self.hi

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def contains(self, x) -> bool:
        return self.lo <= x <= self.hi

    def subset_of(self, other: CertifiedInterval) -> bool:
        return other.lo <= self.lo and self.hi <= other.hi

    def __add__(self, other):
        other = _as_interval(other)
        return CertifiedInterval(self.lo + other.lo, self.hi + other.hi)

    __radd__ = __add__

    def __neg__(self):
        return CertifiedInterval(-self.hi, -self.lo)

    def __sub__(self, other):
        return self + (-_as_interval(other))

    def __rsub__(self, other):
        return _as_interval(other) - self

    def __mul__(self, other):
        other = _as_interval(other)
        ps = (self.lo * other.lo, self.lo * other.hi, self.hi * other.lo, self.hi * other.hi)
        return CertifiedInterval(min(ps), max(ps))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _as_interval(other)
        if other.lo <= 0 <= other.hi:
            raise ZeroDivisionError("interval division by an interval containing 0")
        return self * CertifiedInterval(1 / other.hi, 1 / other.lo)

    def __abs__(self):
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        return CertifiedInterval(Fraction(0), max(-self.lo, self.hi))

    def __pow__(self, j: int):
        if j < 0:
            raise ValueError("negative interval power")
        if j == 0:
            return CertifiedInterval.point(1)
        if self.lo >= 0:
            return CertifiedInterval(self.lo ** j, self.hi ** j)
        if self.hi <= 0:
            a, b = self.hi ** j, self.lo ** j
            return CertifiedInterval(min(a, b), max(a, b))
        if j % 2:
            return CertifiedInterval(self.lo ** j, self.hi ** j)
        return CertifiedInterval(Fraction(0), max(-self.lo, self.hi) ** j)

    def certainly_lt(self, other) -> bool:
        return self.hi < _as_interval(other).lo

    def certainly_le(self, other) -> bool:
        return self.hi <= _as_interval(other).lo

    def overlaps(self, other) -> bool:
        other = _as_interval(other)
        return not (self.hi < other.lo or other.hi < self.lo)

    def __repr__(self):
        return f"[{self.lo}, {self.hi}]"


def _as_interval(x) -> CertifiedInterval:
    if isinstance(x, CertifiedInterval):
        return x
    return CertifiedInterval.point(x)


def nearest_int_certified(iv: CertifiedInterval) -> tuple[int, CertifiedInterval]:
    """Nearest integer m to the enclosed real x, and an enclosure of |x - m|.

    Raises RefineNeeded when the enclosure touches a half-integer and is not
    an exact point (the nearest integer is then undecidable at this width).
    """
    lo, hi = iv.lo, iv.hi
    if lo == hi:
        m = math.floor(lo + Fraction(1, 2))
        # exact half-integers round down
        if lo - math.floor(lo) == Fraction(1, 2):
            m = math.floor(lo)
        return m, CertifiedInterval.point(abs(lo - m))
    m_lo = math.floor(lo + Fraction(1, 2))
    m_hi = math.floor(hi + Fraction(1, 2))
    if m_lo != m_hi or hi - m_hi == Fraction(1, 2) or m_lo - lo == Fraction(1, 2):
        raise RefineNeeded(f"enclosure [{lo}, {hi}] straddles a half-integer")
    m = m_lo
    a, b = lo - m, hi - m
    if a >= 0:
        d = CertifiedInterval(a, b)
    elif b <= 0:
        d = CertifiedInterval(-b, -a)
    else:
        d = CertifiedInterval(Fraction(0), max(-a, b))
    return m, d


# ---------------------------------------------------------------------------
# real-number descriptions


@dataclass(frozen=True)
class RealSpec:
    """A finitely described real number.

    ``kind`` is one of rational, sqrt, cbrt, golden, quadratic, algebraic,
    liouville, cf, prescribed, cfrand; ``params`` is a kind-specific tuple.
    """

    kind: str
    params: tuple = ()

    @property
    def name(self) -> str:
        return str(self)

    def __str__(self):
        k, p = self.kind, self.params
        if k == "rational":
            r = p[0]
            return f"rational:{r.numerator}/{r.denominator}" if r.denominator != 1 else f"rational:{r.numerator}"
        if k in ("sqrt", "cbrt"):
            return f"{k}:{p[0]}"
        if k == "golden":
            return "golden"
        if k == "quadratic":
            return "quadratic:" + ",".join(str(x) for x in p)
        if k == "algebraic":
            coeffs, lo, hi = p
            return f"algebraic:poly={poly.format_poly(list(coeffs))},lo={_fmt(lo)},hi={_fmt(hi)}"
        if k == "liouville":
            w, base = p
            return f"liouville:w={_fmt(w)},base={base}"
        if k == "cf":
            quotients, periodic = p
            return "cf:" + ",".join(str(a) for a in quotients) + (",..." if periodic else "")
        if k == "prescribed":
            return f"prescribed:w={_fmt(p[0])}"
        if k == "cfrand":
            seed, bound = p
            return f"cfrand:seed={seed},bound={bound}"
        raise SpecError(f"unknown kind {k}")

    # constructors ---------------------------------------------------------

    @classmethod
    def rational(cls, x) -> RealSpec:
        return cls("rational", (Fraction(x),))

    @classmethod
    def sqrt(cls, k: int) -> RealSpec:
        if k < 0:
            raise SpecError("sqrt of a negative integer")
        return cls("sqrt", (int(k),))

    @classmethod
    def cbrt(cls, k: int) -> RealSpec:
        return cls("cbrt", (int(k),))

    @classmethod
    def golden(cls) -> RealSpec:
        return cls("golden", ())

    @classmethod
    def quadratic(cls, a: int, b: int, d: int, c: int) -> RealSpec:
        """(a + b sqrt(d)) / c."""
        if d < 0 or c == 0:
            raise SpecError("quadratic surd needs d >= 0 and c != 0")
        return cls("quadratic", (int(a), int(b), int(d), int(c)))

    @classmethod
    def algebraic(cls, coeffs, lo, hi) -> RealSpec:
        coeffs = tuple(poly.trim([int(c) for c in coeffs]))
        lo, hi = Fraction(lo), Fraction(hi)
        if poly.degree(list(coeffs)) < 1:
            raise SpecError("algebraic spec needs a non-constant polynomial")
        if not lo < hi:
            raise SpecError("isolating interval needs lo < hi")
        n_roots = poly.count_roots(list(coeffs), lo, hi) + (poly.sign_at(list(coeffs), lo) == 0)
        if n_roots != 1:
            raise SpecError(f"interval [{lo}, {hi}] holds {n_roots} roots, expected exactly one")
        return cls("algebraic", (coeffs, lo, hi))

    @classmethod
    def liouville(cls, w, base: int = 2) -> RealSpec:
        w = Fraction(w)
        if w <= 1:
            raise SpecError("liouville growth parameter must exceed 1")
        if base < 2:
            raise SpecError("liouville base must be at least 2")
        return cls("liouville", (w, int(base)))

    @classmethod
    def cf(cls, quotients, periodic: bool = False) -> RealSpec:
        quotients = tuple(int(a) for a in quotients)
        if not quotients:
            raise SpecError("empty continued fraction")
        if any(a < 1 for a in quotients[1:]):
            raise SpecError("partial quotients after the first must be positive")
        return cls("cf", (quotients, bool(periodic)))

    @classmethod
    def prescribed(cls, w) -> RealSpec:
        w = Fraction(w)
        if w <= 1:
            raise PreconditionError("prescribed exponent must exceed 1")
        return cls("prescribed", (w,))

    @classmethod
    def cfrand(cls, seed: int, bound: int) -> RealSpec:
        if bound < 1:
            raise SpecError("cfrand bound must be positive")
        return cls("cfrand", (int(seed), int(bound)))

    @property
    def is_cf_rule(self) -> bool:
        return self.kind in ("cf", "prescribed", "cfrand")


def _fmt(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _kv(body: str) -> dict:
    out = {}
    for part in body.split(","):
        if "=" not in part:
            raise SpecError(f"expected key=value, got {part!r}")
        k, v = part.split("=", 1)
        out[k] = v
    return out


def _frac(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise SpecError(f"bad number {text!r}") from exc


def parse_spec(text: str) -> RealSpec:
    """Parse the textual grammar, e.g. ``sqrt:2`` or ``liouville:w=3,base=2``."""
    s = re.sub(r"\s+", "", text).lower()
    kind, _, body = s.partition(":")
    try:
        if kind == "rational":
            return RealSpec.rational(_frac(body))
        if kind == "sqrt":
            return RealSpec.sqrt(int(body))
        if kind == "cbrt":
            return RealSpec.cbrt(int(body))
        if kind in ("golden", "phi"):
            return RealSpec.golden()
        if kind == "quadratic":
            a, b, d, c = (int(x) for x in body.split(","))
            return RealSpec.quadratic(a, b, d, c)
        if kind == "algebraic":
            kv = _kv(body)
            return RealSpec.algebraic(poly.parse_poly(kv["poly"]), _frac(kv["lo"]), _frac(kv["hi"]))
        if kind == "liouville":
            kv = _kv(body)
            return RealSpec.liouville(_frac(kv["w"]), int(kv.get("base", 2)))
        if kind == "cf":
            items = [x for x in body.split(",") if x]
            periodic = bool(items) and items[-1] == "..."
            if periodic:
                items = items[:-1]
            return RealSpec.cf([int(x) for x in items], periodic)
        if kind == "prescribed":
            return RealSpec.prescribed(_frac(_kv(body)["w"]))
        if kind == "cfrand":
            kv = _kv(body)
            return RealSpec.cfrand(int(kv.get("seed", 0)), int(kv.get("bound", 5)))
    except (KeyError, ValueError) as exc:
        if isinstance(exc, SpecError):
            raise
        raise SpecError(f"malformed spec {text!r}: {exc}") from exc
    raise SpecError(f"unknown spec kind in {text!r}")


def as_spec(x) -> RealSpec:
    return x if isinstance(x, RealSpec) else parse_spec(str(x))


# ---------------------------------------------------------------------------
# continued fraction quotient streams


class _QuotientStream:
    """Lazily generated partial quotients a_0, a_1, ... of a cf-rule spec."""

    def __init__(self, spec: RealSpec):
        self.spec = spec
        self._a: list[int] = []
        self._q = [0, 1]  # q_{-1}, q_0
        if spec.kind == "cf":
            quotients, periodic = spec.params
            self.length = None if periodic else len(quotients)
        else:
            self.length = None

    def get(self, k: int) -> int | None:
        """a_k, or None past the end of a finite expansion."""
        if self.length is not None and k >= self.length:
            return None
        while len(self._a) <= k:
            i = len(self._a)
            a = self._next(i)
            self._a.append(a)
            if i >= 1:
                self._q.append(a * self._q[-1] + self._q[-2])
        return self._a[k]

    def _next(self, i: int) -> int:
        kind, p = self.spec.kind, self.spec.params
        if kind == "cf":
            quotients, _ = p
            return quotients[i] if i < len(quotients) else quotients[-1]
        if kind == "prescribed":
            if i == 0:
                return 0
            # a_{k+1} = ceil(q_k^(w-1)), q_k the k-th convergent denominator
            qk = self._q[i]
            return ceil_pow(qk, p[0] - 1)
        if kind == "cfrand":
            seed, bound = p
            if i == 0:
                return 0
            return random.Random(f"cfrand:{seed}:{i}").randint(1, bound)
        raise SpecError(f"{self.spec} is not a cf-rule spec")


@lru_cache(maxsize=256)
def _stream(spec: RealSpec) -> _QuotientStream:
    return _QuotientStream(spec)


def cf_quotient(spec: RealSpec, k: int) -> int | None:
    return _stream(spec).get(k)


def _cf_interval(spec: RealSpec, bits: int) -> CertifiedInterval:
    eps = Fraction(1, 1 << bits)
    p_prev, q_prev = 1, 0
    a0 = cf_quotient(spec, 0)
    p, q = a0, 1
    k = 1
    while True:
        a = cf_quotient(spec, k)
        if a is None:
            return CertifiedInterval.point(Fraction(p, q))
        p_next, q_next = a * p + p_prev, a * q + q_prev
        # xi lies between consecutive convergents, at distance < 1/(q q_next)
        if Fraction(1, q * q_next) <= eps:
            # certify against the complete expansion: if the next quotient is the last one
            # the value is exactly p_next/q_next, still inside the bracket
            c1, c2 = Fraction(p, q), Fraction(p_next, q_next)
            return CertifiedInterval(min(c1, c2), max(c1, c2))
        p_prev, q_prev, p, q = p, q, p_next, q_next
        k += 1


# ---------------------------------------------------------------------------
# evaluation


def _liouville_exponents(w: Fraction):
    k = 1
    while True:
        yield k, math.ceil(w ** k)
        k += 1


def _liouville_interval(w: Fraction, base: int, bits: int) -> CertifiedInterval:
    eps = Fraction(1, 1 << bits)
    # past k0 the exponents strictly increase, so the tail after term K is < 2 base^-e_{K+1}
    k0 = 1
    while w ** k0 * (w - 1) < 2:
        k0 += 1
    s = Fraction(0)
    gen = _liouville_exponents(w)
    k, e = next(gen)
    while True:
        s += Fraction(1, base ** e)
        k_next, e_next = next(gen)
        if k >= k0:
            tail = Fraction(2, base ** e_next)
            if tail <= eps:
                return CertifiedInterval(s, s + tail)
        k, e = k_next, e_next


class _Bisection:
    """Deterministic, memoised bisection of an isolating interval."""

    def __init__(self, coeffs, lo, hi):
        self.p = list(coeffs)
        self.lo, self.hi = Fraction(lo), Fraction(hi)
        self.slo = poly.sign_at(self.p, self.lo)
        self.states = [(self.lo, self.hi)]

    def at(self, bits: int) -> CertifiedInterval:
        eps = Fraction(1, 1 << bits)
        i = 0
        while True:
            lo, hi = self._state(i)
            if lo == hi or hi - lo <= eps:
                return CertifiedInterval(lo, hi)
            i += 1

    def _state(self, i):
        while len(self.states) <= i:
            lo, hi = self.states[-1]
            if lo == hi:
                self.states.append((lo, hi))
                continue
            if self.slo == 0:
                self.states.append((lo, lo))
                continue
            mid = (lo + hi) / 2
            s = poly.sign_at(self.p, mid)
            if s == 0:
                self.states.append((mid, mid))
            elif s == self.slo:
                self.states.append((mid, hi))
            else:
                self.states.append((lo, mid))
        return self.states[i]


@lru_cache(maxsize=64)
def _bisector(spec: RealSpec) -> _Bisection:
    coeffs, lo, hi = spec.params
    return _Bisection(coeffs, lo, hi)


@lru_cache(maxsize=4096)
def eval_real(spec: RealSpec, bits: int) -> CertifiedInterval:
    """Certified enclosure of the described real with width <= 2**-bits."""
    if bits < 1:
        raise PreconditionError("bits must be >= 1")
    if bits > MAX_BITS:
        raise PrecisionExhausted(f"requested {bits} bits exceeds the cap {MAX_BITS}")
    k, p = spec.kind, spec.params
    if k == "rational":
        return CertifiedInterval.point(p[0])
    if k == "sqrt":
        return _sqrt_interval(p[0], bits)
    if k == "cbrt":
        m = p[0]
        sgn = -1 if m < 0 else 1
        r = iroot(abs(m) << (3 * bits), 3)
        if r ** 3 == abs(m) << (3 * bits):
            return CertifiedInterval.point(Fraction(sgn * r, 1 << bits))
        lo, hi = Fraction(r, 1 << bits), Fraction(r + 1, 1 << bits)
        return CertifiedInterval(lo, hi) if sgn > 0 else CertifiedInterval(-hi, -lo)
    if k == "golden":
        return (_sqrt_interval(5, bits + 1) + 1) * Fraction(1, 2)
    if k == "quadratic":
        a, b, d, c = p
        extra = max(0, abs(b).bit_length() - abs(c).bit_length() + 2)
        root = _sqrt_interval(d, bits + extra)
        return (root * b + a) * Fraction(1, c)
    if k == "algebraic":
        return _bisector(spec).at(bits)
    if k == "liouville":
        return _liouville_interval(p[0], p[1], bits)
    if spec.is_cf_rule:
        return _cf_interval(spec, bits)
    raise SpecError(f"cannot evaluate {spec}")


def _sqrt_interval(m: int, bits: int) -> CertifiedInterval:
    scaled = m << (2 * bits)
    r = math.isqrt(scaled)
    if r * r == scaled:
        return CertifiedInterval.point(Fraction(r, 1 << bits))
    return CertifiedInterval(Fraction(r, 1 << bits), Fraction(r + 1, 1 << bits))


# ---------------------------------------------------------------------------
# annihilating polynomials and powers


@lru_cache(maxsize=256)
def annihilating_polynomial(spec: RealSpec):
    """An integer polynomial vanishing at xi, or None when xi is not known algebraic."""
    k, p = spec.kind, spec.params
    if k == "rational":
        r = p[0]
        return (-r.numerator, r.denominator)
    if k == "sqrt":
        return (-p[0], 0, 1)
    if k == "cbrt":
        return (-p[0], 0, 0, 1)
    if k == "golden":
        return (-1, -1, 1)
    if k == "quadratic":
        a, b, d, c = p
        # (c x - a)^2 = b^2 d
        return tuple(poly.primitive([a * a - b * b * d, -2 * a * c, c * c]))
    if k == "algebraic":
        return tuple(p[0])
    if k == "cf":
        quotients, periodic = p
        pp, qq, ppm, qqm = quotients[0], 1, 1, 0
        body = quotients[1:-1] if periodic else quotients[1:]
        if not periodic and len(quotients) == 1:
            return (-quotients[0], 1)
        for a in body:
            pp, qq, ppm, qqm = a * pp + ppm, a * qq + qqm, pp, qq
        if not periodic:
            return tuple(poly.primitive([-pp, qq]))
        if len(quotients) == 1:
            # xi = [a; a, a, ...] satisfies xi^2 - a xi - 1 = 0
            a = quotients[0]
            return (-1, -a, 1)
        a = quotients[-1]
        # tail t = [a; a, ...] with t^2 - a t - 1 = 0 and xi = (pp t + ppm)/(qq t + qqm)
        # t = (ppm - qqm xi)/(qq xi - pp)
        u = [ppm, -qqm]  # numerator of t
        v = [-pp, qq]  # denominator of t
        expr = [x - y - z for x, y, z in zip(_pad(poly.mul(u, u), 3), _pad([a * c for c in poly.mul(u, v)], 3),
                                                _pad(poly.mul(v, v), 3))]
        return tuple(poly.primitive(expr))
    return None


def _pad(p, n):
    return list(p) + [0] * (n - len(p))


def is_root(coeffs, spec: RealSpec) -> bool:
    """Exact test whether the integer polynomial ``coeffs`` vanishes at xi."""
    coeffs = poly.trim(list(coeffs))
    if poly.degree(coeffs) < 0:
        return True
    if poly.degree(coeffs) == 0:
        return False
    m = annihilating_polynomial(spec)
    if m is None:
        return False
    m = list(m)
    g = poly.gcd_poly(coeffs, m)
    if poly.degree(g) < 1:
        return False
    msf = poly.squarefree(m)
    bits = 16
    while bits <= MAX_BITS:
        iv = eval_real(spec, bits)
        if iv.is_exact:
            return poly.peval(coeffs, iv.lo) == 0
        lo, hi = iv.lo, iv.hi
        # count roots in the closed interval [lo, hi]
        if poly.count_roots(msf, lo, hi) + (poly.sign_at(msf, lo) == 0) == 1:
            return poly.count_roots(g, lo, hi) + (poly.sign_at(g, lo) == 0) >= 1
        bits *= 2
    raise PrecisionExhausted("could not isolate xi among the roots of its polynomial")


@lru_cache(maxsize=4096)
def exact_power(spec: RealSpec, j: int):
    """xi**j as a Fraction when it is provably rational, else None."""
    if j == 0:
        return Fraction(1)
    m = annihilating_polynomial(spec)
    if m is None:
        return None
    r = poly.mod_power(j, list(m))
    if poly.degree(r) <= 0:
        # the annihilator may be reducible; confirm the constant is right
        c = Fraction(r[0])
        den = c.denominator
        if is_root([-c.numerator] + [0] * (j - 1) + [den], spec):
            return c
    return None


@lru_cache(maxsize=4096)
def eval_power(spec: RealSpec, j: int, bits: int) -> CertifiedInterval:
    """Enclosure of xi**j with width <= 2**-bits (exact when xi**j is rational)."""
    c = exact_power(spec, j)
    if c is not None:
        return CertifiedInterval.point(c)
    if j == 1:
        return eval_real(spec, bits)
    coarse = eval_real(spec, 8)
    mag = max(abs(coarse.lo), abs(coarse.hi)) + 1
    grow = j * mag ** (j - 1)
    extra = math.ceil(math.log2(grow)) + 2 if grow > 1 else 2
    b = bits + extra
    eps = Fraction(1, 1 << bits)
    while True:
        iv = eval_real(spec, min(b, MAX_BITS)) ** j
        if iv.width <= eps:
            return iv
        if b >= MAX_BITS:
            raise PrecisionExhausted("power enclosure did not tighten")
        b *= 2


# ---------------------------------------------------------------------------
# continued fractions


def cf_expansion(spec: RealSpec, count: int) -> tuple[list[int], bool]:
    """First ``count`` partial quotients and whether the expansion terminated early."""
    if spec.is_cf_rule:
        out = []
        for k in range(count):
            a = cf_quotient(spec, k)
            if a is None:
                return out, True
            out.append(a)
        # normalise a finite tail ending in 1 (e.g. [1;1] == [2])
        return out, False
    if spec.kind == "golden":
        return [1] * count, False
    bits = 64 + 8 * count
    while True:
        iv = eval_real(spec, bits)
        quotients, exhausted, complete = _cf_of_interval(iv, count)
        if complete:
            return quotients, exhausted
        bits *= 2
        if bits > MAX_BITS:
            raise PrecisionExhausted("continued fraction did not stabilise")


def _cf_of_interval(iv: CertifiedInterval, count: int):
    lo, hi = iv.lo, iv.hi
    out = []
    while len(out) < count:
        a_lo, a_hi = math.floor(lo), math.floor(hi)
        if a_lo != a_hi:
            return out, False, False
        out.append(a_lo)
        if lo == hi:
            if lo == a_lo:
                return out, True, True
            lo, hi = 1 / (lo - a_lo), 1 / (lo - a_lo)
            continue
        if lo == a_lo:
            return out, False, False
        lo, hi = 1 / (hi - a_lo), 1 / (lo - a_lo)
    return out, False, True


def convergents_from_quotients(quotients):
    p_prev, q_prev, p, q = 1, 0, None, None
    out = []
    for i, a in enumerate(quotients):
        if i == 0:
            p, q = a, 1
        else:
            p, q, p_prev, q_prev = a * p + p_prev, a * q + q_prev, p, q
        out.append((p, q))
    return out


def cf_convergents(spec: RealSpec, count: int) -> tuple[list[tuple[int, int]], bool]:
    """First ``count`` convergents p/q in lowest terms, plus an exhausted flag."""
    if count < 1:
        raise PreconditionError("count must be positive")
    quotients, exhausted = cf_expansion(spec, count)
    return convergents_from_quotients(quotients), exhausted
