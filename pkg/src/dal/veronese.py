"""Veronese-curve classification of approximation vectors and the collapse audits."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .approx import (
    ApproxVector,
    best_approx_scan,
    estimate_exponent,
    flog,
    good_approx_enum,
)
from .errors import DegenerateHit, PreconditionError, TooFewRecords
from .hankel import delta2
from .realnum import CertifiedInterval, as_spec, eval_real


@dataclass(frozen=True)
class CurveClassification:
    on_curve: bool
    a: int | None = None
    b: int | None = None
    fail_j: int | None = None
    fail_delta: int | None = None
    divisible: bool | None = None  # b^d | q
    distance: CertifiedInterval | None = None
    diagnostic: str = ""

    def to_json(self) -> dict:
        out = {"on_curve": self.on_curve}
        if self.on_curve:
            out.update(a=self.a, b=self.b, divisible=self.divisible)
            if self.distance is not None:
                out["distance_hi"] = float(self.distance.hi)
        else:
            out.update(fail_j=self.fail_j, fail_delta=self.fail_delta)
        if self.diagnostic:
            out["diagnostic"] = self.diagnostic
        return out


def _coeffs(p):
    return tuple(p.coeffs) if isinstance(p, ApproxVector) else tuple(int(x) for x in p)


def _distance(spec, a, b, bits=256):
    if spec is None:
        return None
    return abs(eval_real(as_spec(spec), bits) - Fraction(a, b))


def classify(p, spec=None) -> CurveClassification:
    """On the Veronese curve when p_j / p_0 = (a/b)^j for every j, with gcd(a, b) = 1."""
    p = _coeffs(p)
    q, n = p[0], len(p) - 1
    if q < 1:
        raise PreconditionError("p_0 must be positive")
    ds = delta2(p)
    for j, d in enumerate(ds, start=1):
        if d != 0:
            return CurveClassification(False, fail_j=j, fail_delta=d)
    r = Fraction(p[1], q) if n >= 1 else Fraction(0)
    a, b = r.numerator, r.denominator
    for j in range(1, n + 1):
        if p[j] * b**j != q * a**j:
            return CurveClassification(
                False,
                fail_j=j,
                fail_delta=0,
                diagnostic=f"all Delta vanish but p_{j}/p_0 != (a/b)^{j}: a zero coefficient breaks the ratio chain",
            )
    return CurveClassification(True, a, b, divisible=q % b**n == 0, distance=_distance(spec, a, b))


def _lt_power(x: Fraction, q: int, C: Fraction, e: Fraction) -> bool:
    """x < C q^-e exactly, for x >= 0 and rational e."""
    r, s = e.numerator, e.denominator
    lhs = x**s
    if r >= 0:
        return lhs * q**r < C**s
    return lhs < C**s * q ** (-r)


def _frac(x):
    return Fraction(str(x)) if isinstance(x, float) else Fraction(x)


def collapse_threshold(spec, n: int, lam, C) -> int:
    """q beyond which every |Delta_j| < 1 under max_j ||q xi^j|| <= C q^-lam.

    |Delta_j| <= (|p_{j-1}| + |p_j|)(1 + |xi|) C q^-lam and |p_j| <= q (|xi|^j + C),
    so q^(lam-1) > 2 M (1 + |xi|) C with M = max_j |xi|^j + C suffices.
    """
    xi = eval_real(as_spec(spec), 64)
    ax = float(max(abs(xi.lo), abs(xi.hi)))
    M = max(ax**j for j in range(n + 1)) + float(C)
    base = 2 * M * (1 + ax) * float(C)
    return max(1, math.ceil(base ** (1 / (float(lam) - 1)) * (1 + 1e-9)))


def collapse_audit(spec, n: int, lam, C=1, qmax: int = 10**6, *, workers: int = 1) -> dict:
    spec = as_spec(spec)
    lam, C = _frac(lam), _frac(C)
    if lam <= 1:
        raise PreconditionError("collapse needs lambda > 1")
    members = good_approx_enum(spec, n, lam, C, qmax, workers=workers)
    if members.degenerate:
        raise DegenerateHit(f"exact rho = 0 at q={members.degenerate_q}", q=members.degenerate_q)
    q0_proof = collapse_threshold(spec, n, lam, C)
    rows = []
    last_off = None
    for v in members:
        c = classify(v, spec)
        row = {"q": v.q, "p": list(v.coeffs[1:]), **c.to_json()}
        if c.on_curve:
            row["displacement_ok"] = _lt_power(c.distance.hi, v.q, C, 1 + lam)
            row["b_pow_n_divides_q"] = c.divisible
        else:
            last_off = v.q
        rows.append(row)
    q0 = (last_off + 1) if last_off is not None else (members[0].q if members else None)
    past = [r for r in rows if q0 is not None and r["q"] >= q0]
    counterexamples = [r for r in rows if not r["on_curve"] and r["q"] >= q0_proof]
    return {
        "spec": str(spec),
        "n": n,
        "lambda": str(lam),
        "C": str(C),
        "qmax": qmax,
        "members": len(rows),
        "q0": q0,
        "q0_proof": q0_proof,
        "inconclusive": not any(r["q"] >= q0_proof for r in rows),
        "all_on_curve_past_q0": all(r["on_curve"] for r in past),
        "divisibility_ok": all(r.get("b_pow_n_divides_q", False) for r in past),
        "displacement_ok": all(r.get("displacement_ok", False) for r in past),
        "counterexamples": counterexamples,
        "rows": rows,
    }


def classify_general(p, degrees, spec=None, lam=None, C=1) -> CurveClassification:
    """Classification against the monomial curve (x^d_1, ..., x^d_l), d_1 = 1.

    p = (q, p_1, ..., p_l) with p_j approximating q xi^(d_j).  The determinants
    p_{j-1}^(d_{j+1}-d_j) p_{j+1}^(d_j-d_{j-1}) - p_j^(d_{j+1}-d_{j-1})
    (with d_0 = 0, p_0 = q) are evaluated exactly for j = 1..l-1.
    """
    p = _coeffs(p)
    d = [0] + [int(x) for x in degrees]
    ell = len(d) - 1
    if len(p) != ell + 1:
        raise PreconditionError("need one coefficient per degree plus q")
    if d[1] != 1 or any(x >= y for x, y in zip(d[1:], d[2:])):
        raise PreconditionError("degrees must start at 1 and increase strictly")
    if lam is not None:
        lam = _frac(lam)
        for j in range(1, ell):
            gap = d[j + 1] - d[j]
            if not lam > gap:
                raise PreconditionError(f"lambda = {lam} does not exceed the gap d_{j + 1} - d_{j} = {gap}")
    q = p[0]
    if q < 1:
        raise PreconditionError("q must be positive")
    for j in range(1, ell):
        e, f = d[j + 1] - d[j], d[j] - d[j - 1]
        det = p[j - 1] ** e * p[j + 1] ** f - p[j] ** (e + f)
        if det != 0:
            return CurveClassification(False, fail_j=j, fail_delta=det)
    r = Fraction(p[1], q)
    a, b = r.numerator, r.denominator
    for j in range(1, ell + 1):
        if p[j] * b ** d[j] != q * a ** d[j]:
            return CurveClassification(
                False, fail_j=j, fail_delta=0, diagnostic=f"p_{j}/q != (a/b)^{d[j]} although all determinants vanish"
            )
    return CurveClassification(True, a, b, divisible=q % b ** d[ell] == 0, distance=_distance(spec, a, b))


def audit_tolerance(qmax: int) -> float:
    return 0.2 * math.log(10**6) / math.log(qmax)


def uniform_bound_audit(spec, n: int, qmax: int, *, scans=None, tol=None, workers: int = 1) -> dict:
    """lambda_hat_n (uniform) <= max(1/n, 1/lambda_1) + tolerance on measured values."""
    spec = as_spec(spec)
    if n < 2:
        raise PreconditionError("n must be at least 2")
    scans = scans or {}
    s1 = scans.get(1) or best_approx_scan(spec, 1, qmax, workers=workers)
    sn = scans.get(n) or best_approx_scan(spec, n, qmax, workers=workers)
    if s1.degenerate or sn.degenerate:
        raise DegenerateHit("exact rho = 0 during the audit scans")
    if len(s1) < 3 or len(sn) < 3:
        raise TooFewRecords("not enough records for the audit")
    lam1 = estimate_exponent(s1, "lambda_n").estimate
    hat = estimate_exponent(sn, "uniform_lambda_n", qmax=qmax).estimate
    tol = audit_tolerance(qmax) if tol is None else tol
    bound = max(1 / n, 1 / lam1)
    return {
        "spec": str(spec),
        "n": n,
        "qmax": qmax,
        "lambda1": lam1,
        "uniform_lambda_n": hat,
        "bound": bound,
        "tolerance": tol,
        "margin": bound + tol - hat,
        "passes": hat <= bound + tol,
    }


def divisibility_trace(spec, q: int, n: int, v_prime, *, x=None) -> dict:
    """Walk the chain q | x, q^2 | x, ... for a concrete good approximation p/q of xi.

    ``x`` defaults to the best simultaneous approximation denominator below
    X = q^v'.  At step j the determinant D_j = q^j x_j - p^j x is a multiple of
    q^(j-1) once q^(j-1) | x; the chain continues while D_j = 0.
    """
    spec = as_spec(spec)
    v_prime = float(v_prime)
    if not 1 < v_prime < n:
        raise PreconditionError("need 1 < v' < n")
    X = math.floor(q**v_prime)
    iv = eval_real(spec, 256)
    p = round(iv.mid * q)
    rho1 = abs(iv * q - p).hi
    if x is None:
        recs = best_approx_scan(spec, n, max(2, X - 1 if q**v_prime == X else X))
        if recs.degenerate:
            raise DegenerateHit("exact rho = 0 during the trace scan")
        x_vec = recs[-1]
    else:
        from .approx import certify, default_bits

        x_vec = certify(spec, n, x, default_bits(n, x))
    x = x_vec.q
    xs = x_vec.coeffs
    steps = []
    divides = True
    broken_at = None
    for j in range(1, n + 1):
        D = q**j * xs[j] - p**j * x
        step = {
            "j": j,
            "D": D,
            "multiple_of_q_pow_j_minus_1": D % q ** (j - 1) == 0,
            "below_q_pow_j_minus_1": abs(D) < q ** (j - 1) if j > 1 else abs(D) < 1,
            "q_pow_j_divides_x": x % q**j == 0,
        }
        steps.append(step)
        if divides and not (D == 0 and step["q_pow_j_divides_x"]):
            divides = False
            broken_at = j
    x_quality = -flog(x_vec.rho.hi) / math.log(X) if x_vec.rho.hi > 0 else math.inf
    return {
        "q": q,
        "p": p,
        "v": -flog(rho1) / math.log(q) if rho1 > 0 else math.inf,
        "v_prime": v_prime,
        "X": X,
        "x": x,
        "x_coeffs": list(xs[1:]),
        "x_exponent_vs_X": x_quality,
        "steps": steps,
        "chain_complete": divides,
        "broken_at": broken_at,
        "contradiction": divides and 1 <= x < q**n,
    }
