"""Explicit transference witnesses.

The lattice points whose existence follows from Minkowski's convex body
theorem are found here by exhaustive enumeration in a fixed order, then
every inequality they are supposed to satisfy is checked with exact
interval arithmetic.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

import numpy as np

from .approx import ApproxVector, certify, default_bits, flog, form_value, min_form
from .errors import BudgetExceeded, PrecisionExhausted, PreconditionError
from .realnum import MAX_BITS, CertifiedInterval, as_spec, eval_power, eval_real

LIFT_BUDGET = 10**8
AUDIT_TOL = 0.3


@dataclass(frozen=True)
class LinearForm:
    coeffs: tuple  # a_0..a_k
    value: CertifiedInterval
    mode: str = "all"

    @property
    def k(self) -> int:
        return len(self.coeffs) - 1

    @property
    def H(self) -> int:
        return max(abs(a) for a in self.coeffs)

    def to_json(self) -> dict:
        return {
            "coeffs": list(self.coeffs),
            "H": self.H,
            "mode": self.mode,
            "value_lo": str(self.value.lo),
            "value_hi": str(self.value.hi),
        }


@dataclass
class LiftWitness:
    v: tuple
    form: LinearForm
    n: int
    residuals: list
    checks: dict = field(default_factory=dict)
    searched: int = 0

    @property
    def passes(self) -> bool:
        return all(c["ok"] for c in self.checks.values())

    def to_json(self) -> dict:
        return {
            "v": list(self.v),
            "form": self.form.to_json(),
            "n": self.n,
            "residuals": self.residuals,
            "checks": self.checks,
            "searched": self.searched,
            "passes": self.passes,
        }


def find_small_form(spec, k: int, H: int, mode: str = "all") -> LinearForm:
    """Certified minimiser of |a_k xi^k + ... + a_0| over the constrained box of height <= H."""
    coeffs, value = min_form(spec, k, H, mode)
    return LinearForm(tuple(coeffs), value, mode)


def _cert_le_pow(x: CertifiedInterval, k: int, bound: CertifiedInterval):
    """Decide x^k <= bound; None when the enclosures do not yet separate."""
    if x.hi**k <= bound.lo:
        return True
    if x.lo**k > bound.hi:
        return False
    return None


def _power_table(spec, n, bits):
    return [CertifiedInterval.point(1)] + [eval_power(spec, j, bits) for j in range(1, n + 1)]


def minkowski_lift(form: LinearForm, spec, n: int, *, budget: int = LIFT_BUDGET) -> LiftWitness:
    """Integer v_0..v_n with |v_0 xi^j - v_j| <= |a_k|^((n-k)/k) rho^(1/k) for j <= k
    and a_0 v_i + ... + a_k v_{i+k} = 0 for 0 <= i <= n-k.

    v_0 runs upward from 1; the i = 0 relation bounds it by
    k H^(n/k) rho^((1-k)/k).  Coordinates v_{k+1}..v_n are forced by the
    recurrence and must come out integral.
    """
    spec = as_spec(spec)
    a = tuple(form.coeffs)
    k = len(a) - 1
    if not 2 <= k <= n:
        raise PreconditionError(f"need 2 <= k <= n, got k={k}, n={n}")
    ak = a[-1]
    H = max(abs(x) for x in a)
    if ak == 0 or abs(ak) != H:
        raise PreconditionError("the form must have a dominant leading coefficient (|a_k| = H)")
    if form.value.hi == 0:
        raise PreconditionError("the form vanishes at xi")
    bits = 128
    rho = abs(form_value(spec, list(a), bits))
    while rho.lo == 0:
        bits *= 2
        rho = abs(form_value(spec, list(a), bits))
    # T^k = |a_k|^(n-k) rho
    Tk = rho * (abs(ak) ** (n - k))
    T_f = math.exp((flog(rho.mid) + (n - k) * math.log(abs(ak))) / k)
    V0 = math.floor(k * H * T_f / float(rho.lo) * (1 + 1e-9)) + 1
    per_v0 = max(1, math.floor(2 * T_f) + 1) ** k
    if V0 * per_v0 > budget:
        raise BudgetExceeded(f"lift body needs about {V0 * per_v0} lattice points", searched=0)

    xs = [float(eval_power(spec, j, 64).mid) for j in range(1, k + 1)]
    searched = 0
    chunk = 1 << 16
    for start in range(1, V0 + 1, chunk):
        stop = min(V0 + 1, start + chunk)
        v0s = np.arange(start, stop, dtype=np.float64)
        if T_f < 0.5:
            ok = np.ones_like(v0s, dtype=bool)
            for x in xs:
                y = v0s * x
                d = np.abs(y - np.rint(y))
                ok &= d <= T_f * (1 + 1e-6) + np.abs(y) * 2.0**-48 + 1e-12
            cand = [int(v) for v in v0s[ok]]
            searched += len(v0s)
        else:
            cand = list(range(start, stop))
        for v0 in cand:
            for vs in _lift_candidates(spec, v0, k, T_f, bits):
                searched += 1
                full = _extend(a, (v0,) + vs, n)
                if full is None:
                    continue
                w = _check_lift(spec, form, a, full, n, rho, Tk, bits)
                if w is not None:
                    w.searched = searched
                    return w
    raise BudgetExceeded(f"no lift witness with v_0 <= {V0}", searched=searched)


def _lift_candidates(spec, v0, k, T_f, bits):
    ranges = []
    for j in range(1, k + 1):
        y = eval_power(spec, j, bits) * v0
        lo = math.ceil(y.lo - Fraction(T_f) * (1 + Fraction(1, 10**6)))
        hi = math.floor(y.hi + Fraction(T_f) * (1 + Fraction(1, 10**6)))
        ranges.append(range(lo, hi + 1))
    return itertools.product(*ranges)


def _extend(a, head, n):
    """Fill v_{k+1}..v_n from the recurrence; None if i = 0 fails or a value is non-integral."""
    k = len(a) - 1
    v = list(head)
    if sum(a[r] * v[r] for r in range(k + 1)) != 0:
        return None
    for i in range(1, n - k + 1):
        s = sum(a[r] * v[i + r] for r in range(k))
        if s % a[k]:
            return None
        v.append(-s // a[k])
    return tuple(v)


def _check_lift(spec, form, a, v, n, rho, Tk, bits):
    k = len(a) - 1
    H = max(abs(x) for x in a)
    v0 = v[0]
    b = bits
    while b <= MAX_BITS:
        pw = _power_table(spec, n, b)
        rho_b = abs(form_value(spec, list(a), b))
        Tk_b = rho_b * (abs(a[-1]) ** (n - k))
        disp = [abs(pw[j] * v0 - v[j]) for j in range(n + 1)]
        verdicts = [_cert_le_pow(disp[j], k, Tk_b) for j in range(1, k + 1)]
        if None in verdicts:
            b *= 2
            continue
        if not all(verdicts):
            return None
        break
    else:
        raise PrecisionExhausted("lift displacement undecidable")
    residuals = [sum(a[r] * v[i + r] for r in range(k + 1)) for i in range(n - k + 1)]
    T = math.exp((flog(rho_b.mid) + (n - k) * math.log(abs(a[-1]))) / k)
    checks = {}
    checks["displacement"] = {
        "ok": True,
        "ratios": [float(disp[j].hi) / T for j in range(1, k + 1)],
        "target": T,
    }
    checks["recurrence"] = {"ok": all(r == 0 for r in residuals)}
    # |rho v_0| <= k H^(n/k) rho^(1/k)  <=>  |v_0| <= k H^(n/k) rho^((1-k)/k)
    v0_bound = k * math.exp((n / k) * math.log(H) + ((1 - k) / k) * flog(rho_b.lo))
    checks["v0_bound"] = {"ok": abs(v0) <= v0_bound * (1 + 1e-12), "v0": v0, "bound": v0_bound,
                          "ratio": abs(v0) / v0_bound}
    # recursive bound on the tail displacements derived from the recurrence
    xi_abs = float(max(abs(pw[1].lo), abs(pw[1].hi)))
    D = [0.0] + [T] * k
    tail = []
    ok = True
    for i in range(1, n - k + 1):
        Di = (sum(abs(a[r]) * D[i + r] for r in range(k)) + float(rho_b.hi) * xi_abs**i * abs(v0)) / abs(a[-1])
        D.append(Di)
        actual = float(disp[i + k].hi)
        ok &= actual <= Di * (1 + 1e-9)
        tail.append({"index": i + k, "displacement": actual, "ratio_to_target": actual / T,
                     "derived_constant": Di / T})
    checks["tail"] = {"ok": ok, "entries": tail}
    return LiftWitness(tuple(v), form, n, residuals, checks)


# ---------------------------------------------------------------------------
# going up from dimension k to k + 1


def going_up_witness(spec, k: int, record: ApproxVector, *, budget: int = LIFT_BUDGET):
    """Integers a_0..a_k with a_0 q = a_1 p_1 + ... + a_k p_k, |a_j|^k <= q (j != h)
    and |a_1 e_1 + ... + a_k e_k|^k <= rho^k q, where e_j = q xi^j - p_j and
    rho = |e_h| = max_j |e_j|.

    Those are the proof's bounds with the record's pointwise exponent in
    place of lambda_k (then rho^(-1/(k lambda)) = q^(1/k)).  Among all
    witnesses with a_k != 0 the one of least height (then lexicographic) is
    used to build the dimension-(k+1) approximation with denominator a_k q.
    """
    spec = as_spec(spec)
    if record.n != k:
        raise PreconditionError(f"record has dimension {record.n}, expected {k}")
    if record.rho.hi == 0:
        raise PreconditionError("record has rho = 0")
    q, ps = record.q, record.coeffs[1:]
    if q < 2:
        raise PreconditionError("record denominator must exceed 1")
    bits = default_bits(k + 1, q * q) + 64
    e = [form_value(spec, [-ps[j - 1]] + [0] * (j - 1) + [q], bits) for j in range(1, k + 1)]
    mags = [abs(x) for x in e]
    h = max(range(k), key=lambda i: mags[i].hi) + 1
    rho = mags[h - 1]
    lam = -flog(rho.hi) / math.log(q)
    B = _iroot_floor(q, k)
    others = [j for j in range(1, k + 1) if j != h]
    total = (2 * B + 1) ** len(others)
    if total > budget:
        raise BudgetExceeded(f"going-up box has {total} points", searched=0)
    ph = ps[h - 1]
    g = gcd(ph, q)
    step = q // g
    rhs_bound = rho.hi**k * q
    found = []
    searched = 0
    for combo in itertools.product(range(-B, B + 1), repeat=len(others)):
        searched += 1
        s = sum(c * ps[j - 1] for c, j in zip(combo, others))
        if s % g:
            continue
        # a_h p_h = -s (mod q): a_h = t0 + t step
        t0 = (-(s // g) * pow(ph // g, -1, step)) % step if step > 1 else 0
        rest = sum((e[j - 1] * c for c, j in zip(combo, others)), CertifiedInterval.point(0))
        # |rest + a_h e_h| <= rho q^(1/k) forces a_h within (k B + ...) of -rest/e_h
        center = -rest.mid / e[h - 1].mid
        span = Fraction(B + 1) + (k - 1) * B
        lo = math.floor((center - span - t0) / step)
        hi = math.ceil((center + span - t0) / step)
        for t in range(lo, hi + 1):
            ah = t0 + t * step
            a = [0] * (k + 1)
            for c, j in zip(combo, others):
                a[j] = c
            a[h] = ah
            if not any(a[1:]):
                continue
            num = sum(a[j] * ps[j - 1] for j in range(1, k + 1))
            if num % q:
                continue
            a[0] = num // q
            if not any(combo):
                # only a_h survives: |a_h e_h| <= rho q^(1/k) is |a_h|^k <= q
                if abs(ah) ** k <= q:
                    found.append(tuple(a))
                continue
            val = abs(rest + e[h - 1] * ah)
            if val.hi**k <= rho.lo**k * q:
                found.append(tuple(a))
            elif val.lo**k <= rhs_bound:
                # undecided at this precision: recheck with more bits
                if _recheck_form(spec, a, ps, q, k, h):
                    found.append(tuple(a))
    if not found:
        raise BudgetExceeded("no going-up witness in the box", searched=searched)
    usable = [a for a in found if a[k] != 0]
    if not usable:
        raise PreconditionError("every witness has a_k = 0")
    a = min(usable, key=lambda t: (max(abs(x) for x in t), t))
    Q = abs(a[k]) * q
    new = certify(spec, k + 1, Q, default_bits(k + 1, Q))
    top = abs(form_value(spec, [-new.coeffs[k + 1]] + [0] * k + [Q], default_bits(k + 1, Q)))
    eps = (flog(top.hi) / math.log(q) - (1 / k - lam)) if top.hi > 0 else -math.inf
    form_val = abs(form_value(spec, [-a[0]] + list(a[1:]), bits))
    report = {
        "form": list(a),
        "h": h,
        "lambda_k": lam,
        "q": q,
        "new_q": Q,
        "new_p": list(new.coeffs[1:]),
        "new_exponent": new.exponent,
        "expected_exponent": (lam - 1 / k) / (1 + 1 / k),
        "eps_prime": eps,
        "a_h_exponent": (math.log(abs(a[h])) / math.log(q)) if a[h] else None,
        "form_value_hi": float(form_val.hi),
        "orthogonal": a[0] * q == sum(a[j] * ps[j - 1] for j in range(1, k + 1)),
        "witnesses": len(found),
        "searched": searched,
    }
    return a, new, report


def _recheck_form(spec, a, ps, q, k, h):
    b = 256
    while b <= MAX_BITS:
        e = [form_value(spec, [-ps[j - 1]] + [0] * (j - 1) + [q], b) for j in range(1, k + 1)]
        rho = abs(e[h - 1])
        val = abs(sum((e[j - 1] * a[j] for j in range(1, k + 1)), CertifiedInterval.point(0)))
        if val.hi**k <= rho.lo**k * q:
            return True
        if val.lo**k > rho.hi**k * q:
            return False
        b *= 2
    raise PrecisionExhausted("going-up bound undecidable")


def _iroot_floor(q, k):
    r = int(round(q ** (1 / k)))
    while r**k > q:
        r -= 1
    while (r + 1) ** k <= q:
        r += 1
    return r


# ---------------------------------------------------------------------------
# inequality audit


def inequality_audit(est: dict, tol: float = AUDIT_TOL, uniform_tol: float = 0.2) -> dict:
    """Check the transference inequalities on measured exponents.

    ``est`` maps names such as ``lambda_1``, ``lambda_2``, ``uniform_lambda_2``,
    ``w_2``, ``w_2_lead`` to floats (math.inf allowed).  Each inequality is
    reported with its margin; pass means margin >= -tol.
    """
    lam = {int(k.split("_")[1]): v for k, v in est.items() if k.startswith("lambda_")}
    hat = {int(k.split("_")[2]): v for k, v in est.items() if k.startswith("uniform_lambda_")}
    w = {int(k.split("_")[1]): v for k, v in est.items() if k.startswith("w_") and k.count("_") == 1}
    wl = {int(k.split("_")[1]): v for k, v in est.items() if k.startswith("w_") and k.endswith("_lead")}
    if not lam and not w:
        raise PreconditionError("no estimates supplied")
    if all(math.isinf(v) for v in list(lam.values()) + list(w.values())):
        return {"skipped": True, "note": "all estimates infinite; 1/inf is read as 0", "checks": []}
    checks = []

    def add(name, lhs, rhs, t=tol):
        if any(isinstance(x, float) and math.isnan(x) for x in (lhs, rhs)):
            return
        margin = lhs - rhs if not (math.isinf(lhs) and math.isinf(rhs)) else 0.0
        checks.append({"name": name, "lhs": lhs, "rhs": rhs, "margin": margin, "passes": margin >= -t})

    for k in sorted(lam):
        if k + 1 in lam:
            add(f"going_up k={k}", (k + 1) * (1 + lam[k + 1]), k * (1 + lam[k]))
    if 1 in lam:
        for n in sorted(lam):
            if n >= 2:
                add(f"lambda_1 transfer n={n}", lam[n], (lam[1] - n + 1) / n)
    for k in sorted(lam):
        for n in sorted(lam):
            if n > k >= 2:
                add(f"telescoped k={k} n={n}", lam[n], (k * lam[k] - n + k) / n)
    for k, wk in wl.items():
        for n in sorted(lam):
            if n >= k >= 2 and not math.isinf(wk):
                add(f"lead transfer k={k} n={n}", lam[n], (wk - n + k) / ((k - 1) * wk + n))
    for n, wn in w.items():
        if n in lam:
            rhs = 1 / (n - 1) if math.isinf(wn) and n > 1 else (wn / ((n - 1) * wn + n))
            add(f"khintchine n={n}", lam[n], rhs)
    if 1 in lam:
        for n, hv in hat.items():
            if n >= 2:
                bound = max(1 / n, 0.0 if math.isinf(lam[1]) else 1 / lam[1])
                add(f"uniform bound n={n}", bound, hv, uniform_tol)
    return {"skipped": False, "checks": checks, "passes": all(c["passes"] for c in checks)}
