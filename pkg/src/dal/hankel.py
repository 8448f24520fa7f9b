"""Hankel determinants, recurrence kernels and the Davenport-Schmidt audit."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from .approx import ApproxVector, flog, form_value
from .errors import PreconditionError
from .realnum import CertifiedInterval, as_spec, eval_real, root_bounds

COMPARABILITY = 8


# ---------------------------------------------------------------------------
# exact integer linear algebra


def bareiss_det(M) -> int:
    """Determinant of a square integer matrix by fraction-free elimination."""
    n = len(M)
    if n == 0:
        return 1
    A = [list(r) for r in M]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k][k] == 0:
            for i in range(k + 1, n):
                if A[i][k] != 0:
                    A[k], A[i] = A[i], A[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


def rank(M) -> int:
    """Exact rank of an integer matrix (fraction-free row reduction)."""
    A = [list(r) for r in M]
    if not A:
        return 0
    rows, cols = len(A), len(A[0])
    r = 0
    prev = 1
    for c in range(cols):
        piv = next((i for i in range(r, rows) if A[i][c] != 0), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        for i in range(r + 1, rows):
            for j in range(c + 1, cols):
                A[i][j] = (A[i][j] * A[r][c] - A[i][c] * A[r][j]) // prev
            A[i][c] = 0
        prev = A[r][c]
        r += 1
        if r == rows:
            break
    return r


def _primitive(v):
    g = 0
    for x in v:
        g = gcd(g, x)
    if g == 0:
        return tuple(v)
    v = [x // g for x in v]
    last = next(x for x in reversed(v) if x != 0)
    if last < 0:
        v = [-x for x in v]
    return tuple(v)


def nullspace(M):
    """Integer basis of the right kernel of M, one primitive vector per free column."""
    rows = len(M)
    cols = len(M[0]) if rows else 0
    A = [[Fraction(x) for x in r] for r in M]
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if A[i][c] != 0), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = 1 / A[r][c]
        A[r] = [x * inv for x in A[r]]
        for i in range(rows):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * cols
        v[f] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -A[i][f]
        den = 1
        for x in v:
            den = den * x.denominator // gcd(den, x.denominator)
        basis.append(_primitive([int(x * den) for x in v]))
    return basis


def _height(v):
    return max(abs(x) for x in v)


def min_height_kernel(basis, bound: int = 3):
    """Smallest-height primitive vector among small combinations of a kernel basis.

    Ties are broken lexicographically.  With a one-dimensional kernel this is
    simply the primitive generator.
    """
    if len(basis) == 1:
        return basis[0]
    best = None
    for coef in itertools.product(range(-bound, bound + 1), repeat=len(basis)):
        if not any(coef):
            continue
        v = [sum(c * b[i] for c, b in zip(coef, basis)) for i in range(len(basis[0]))]
        if not any(v):
            continue
        v = _primitive(v)
        key = (_height(v), v)
        if best is None or key < best:
            best = key
    return best[1]


# ---------------------------------------------------------------------------
# profiles


def _pvec(p):
    if isinstance(p, ApproxVector):
        return tuple(p.coeffs)
    return tuple(int(x) for x in p)


def hankel_matrix(p, m: int, k: int):
    n = len(p) - 1
    if m < 1 or k - m + 1 < 0 or k + m - 1 > n:
        raise PreconditionError(f"Hankel index (m={m}, k={k}) out of range for n={n}")
    return [[p[k - m + 1 + r + c] for c in range(m)] for r in range(m)]


def hankel_minor(p, m: int, k: int) -> int:
    return bareiss_det(hankel_matrix(_pvec(p), m, k))


def delta2(p):
    """Signed p_i^2 - p_{i-1} p_{i+1} for i = 1..n-1."""
    p = _pvec(p)
    return [p[i] * p[i] - p[i - 1] * p[i + 1] for i in range(1, len(p) - 1)]


def legal_minors(n: int, m: int):
    return [k for k in range(m - 1, n - m + 2)]


@dataclass
class HankelProfile:
    p: tuple
    n: int
    delta2: list
    minors: dict = field(default_factory=dict)
    h: int | None = None
    kernel: tuple | None = None
    kernel_dim: int | None = None
    Z: int | None = None
    ds_ratio: CertifiedInterval | None = None
    ds_skipped: bool = False

    @property
    def H(self):
        return None if self.kernel is None else _height(self.kernel)

    def to_json(self) -> dict:
        out = {
            "p": list(self.p),
            "n": self.n,
            "delta2": self.delta2,
            "minors": {f"{m},{k}": v for (m, k), v in sorted(self.minors.items())},
        }
        if self.h is not None:
            out.update(
                h=self.h,
                kernel=list(self.kernel),
                kernel_dim=self.kernel_dim,
                H=self.H,
                Z=self.Z,
                ds_ratio=None if self.ds_ratio is None else [float(self.ds_ratio.lo), float(self.ds_ratio.hi)],
                ds_skipped=self.ds_skipped,
            )
        return out


def delta_profile(p, sizes=(2, 3)) -> HankelProfile:
    """Every Hankel minor Delta_{m,k} for the requested sizes m, plus all Delta_{2,i}."""
    p = _pvec(p)
    n = len(p) - 1
    minors = {}
    for m in sizes:
        if m < 1 or 2 * m - 2 > n:
            raise PreconditionError(f"no legal Hankel minor of size {m} for n={n}")
        for k in legal_minors(n, m):
            minors[(m, k)] = hankel_minor(p, m, k)
    return HankelProfile(p, n, delta2(p), minors)


def P_matrix(p, h: int):
    """(h+1) x (n-h+1) matrix whose row r is (p_r, ..., p_{n-h+r})."""
    n = len(p) - 1
    return [[p[r + c] for c in range(n - h + 1)] for r in range(h + 1)]


def y_vectors(p, h: int):
    n = len(p) - 1
    return [tuple(p[i : i + h]) for i in range(n - h + 2)]


def z_value(p, h: int) -> int:
    """Max |det| over all h-subsets of y_i = (p_i..p_{i+h-1}), i = 0..n-h+1."""
    ys = y_vectors(p, h)
    z = 0
    for sel in itertools.combinations(range(len(ys)), h):
        z = max(z, abs(bareiss_det([ys[i] for i in sel])))
    return z


def rank_recurrence(p, sizes=()) -> HankelProfile:
    p = _pvec(p)
    if not any(p):
        raise PreconditionError("p must be nonzero")
    n = len(p) - 1
    prof = delta_profile(p, sizes) if sizes else HankelProfile(p, n, delta2(p))
    h = 1
    while True:
        P = P_matrix(p, h)
        if rank(P) <= h:
            break
        h += 1
    # left kernel of P_h: a with sum_r a_r p_{r+i} = 0 for all i
    PT = [list(col) for col in zip(*P)]
    basis = nullspace(PT)
    prof.h = h
    prof.kernel_dim = len(basis)
    prof.kernel = min_height_kernel(basis)
    span = n - 2 * h + 2
    prof.Z = z_value(p, h)
    if prof.Z == 0 or span < 1:
        prof.ds_skipped = True
    else:
        lo, hi = root_bounds(Fraction(prof.Z), span)
        H = prof.H
        prof.ds_ratio = CertifiedInterval(Fraction(H) / hi, Fraction(H) / lo)
    return prof


def recurrence_residuals(p, kernel):
    p = _pvec(p)
    h = len(kernel) - 1
    return [sum(a * p[i + j] for j, a in enumerate(kernel)) for i in range(len(p) - h)]


# ---------------------------------------------------------------------------
# audits


def _ratio(value: Fraction, q: int, e: float) -> float:
    """value * q^e as a float, computed in the log domain."""
    if value == 0:
        return 0.0
    return math.exp(flog(abs(value)) + e * math.log(q))


def _lambda_of(p: ApproxVector, lam):
    if lam is not None:
        return float(lam)
    e = p.exponent
    if e is None or math.isinf(e):
        raise PreconditionError("record has no finite pointwise exponent; pass lambda explicitly")
    return e


def prop41_roundtrip(p, spec=None, lam=None, C=1, bits: int = 256) -> dict:
    """Both directions of the Delta_2 characterisation of good approximations.

    Forward (needs ``spec``): measured K1 = max_i |p_i xi - p_{i+1}| q^lam and
    K2 = max_i |Delta_{2,i}| q^(lam-1), next to the constants the triangle
    inequality derives from C and |xi|.  Converse: xi* = p_1/p_0 and
    K* = max_j |q xi*^j - p_j| q^lam.  Without ``spec`` the tuple must be
    comparable: max|p_j| <= COMPARABILITY * min|p_j|.
    """
    vec = p if isinstance(p, ApproxVector) else None
    pv = _pvec(p)
    q, n = pv[0], len(pv) - 1
    if q < 1 or n < 1:
        raise PreconditionError("need q >= 1 and n >= 1")
    if spec is None:
        mags = [abs(x) for x in pv]
        if min(mags) == 0 or max(mags) > COMPARABILITY * min(mags):
            raise PreconditionError(
                f"comparability p_0 ~ ... ~ p_n violated beyond constant {COMPARABILITY}: {pv}"
            )
    C = Fraction(C)
    if lam is None and vec is None and spec is not None:
        from .approx import certify, default_bits

        vec = certify(as_spec(spec), n, q, default_bits(n, q))
        if vec.coeffs != pv:
            vec = None
    if lam is None:
        if vec is None:
            raise PreconditionError("lambda required for a standalone tuple")
        lam = _lambda_of(vec, None)
    lam = float(lam)
    report = {"p": list(pv), "lambda": lam, "C": str(C)}
    d2 = delta2(pv)
    if spec is not None:
        spec = as_spec(spec)
        xi = eval_real(spec, bits)
        axi = max(abs(xi.lo), abs(xi.hi))
        lin = [abs(xi * pv[i] - pv[i + 1]) for i in range(n)]
        comps = [abs(form_value(spec, [-pv[j]] + [0] * (j - 1) + [q], bits)) for j in range(1, n + 1)]
        rho_hi = max(c.hi for c in comps)
        hyp = _ratio(rho_hi, q, lam)
        K1 = max(_ratio(v.hi, q, lam) for v in lin)
        K2 = max((_ratio(Fraction(abs(d)), q, lam - 1) for d in d2), default=0.0)
        C1 = float(C) * (1 + float(axi))
        C2 = max(
            (C1 * (float(axi) ** (i - 1) + float(axi) ** i + 2 * float(C)) for i in range(1, n)),
            default=0.0,
        )
        report["forward"] = {
            "hypothesis_ratio": hyp,
            "hypothesis_holds": hyp <= float(C) * (1 + 1e-9),
            "K1": K1,
            "K2": K2,
            "C1_derived": C1,
            "C2_derived": C2,
            "passes": K1 <= C1 * (1 + 1e-9) and K2 <= C2 * (1 + 1e-9) if hyp <= float(C) * (1 + 1e-9) else None,
        }
    xs = Fraction(pv[1], q)
    resid = [abs(q * xs**j - pv[j]) for j in range(1, n + 1)]
    Kstar = max(_ratio(r, q, lam) for r in resid)
    report["converse"] = {
        "xi_star": f"{xs.numerator}/{xs.denominator}",
        "K_star": Kstar,
        "exact": all(r == 0 for r in resid),
    }
    return report


def prop42_audit(p, lam: float, sizes=None) -> dict:
    """max over legal (m,k) of |Delta_{m,k}| q^((m-1) lam - 1)."""
    pv = _pvec(p)
    q, n = pv[0], len(pv) - 1
    sizes = sizes or range(2, n // 2 + 2)
    worst = 0.0
    ratios = {}
    for m in sizes:
        if 2 * m - 2 > n:
            continue
        for k in legal_minors(n, m):
            d = hankel_minor(pv, m, k)
            r = _ratio(Fraction(d), q, (m - 1) * lam - 1)
            ratios[f"{m},{k}"] = r
            worst = max(worst, r)
    return {"max_ratio": worst, "ratios": ratios}


def selection_det(p, cols):
    """Determinant of the matrix with rows y_c = (p_c, ..., p_{c+m-1}) for c in cols."""
    pv = _pvec(p)
    m = len(cols)
    return bareiss_det([pv[c : c + m] for c in cols])


def prop43_audit(p, lam: float, sizes=None) -> dict:
    """Same bound for every selection of m of the vectors y_c (distinct c)."""
    pv = _pvec(p)
    q, n = pv[0], len(pv) - 1
    sizes = sizes or range(2, n // 2 + 2)
    worst = 0.0
    count = 0
    for m in sizes:
        for cols in itertools.combinations(range(n - m + 2), m):
            d = selection_det(pv, cols)
            worst = max(worst, _ratio(Fraction(d), q, (m - 1) * lam - 1))
            count += 1
    return {"max_ratio": worst, "selections": count}


def desnanot_jacobi_holds(p, k: int) -> bool:
    """Delta_{3,k} p_k = Delta_{2,k-1} Delta_{2,k+1} - Delta_{2,k}^2 (true determinants)."""
    pv = _pvec(p)
    return hankel_minor(pv, 3, k) * pv[k] == (
        hankel_minor(pv, 2, k - 1) * hankel_minor(pv, 2, k + 1) - hankel_minor(pv, 2, k) ** 2
    )


def small_polynomial(p, spec, lam=None, bits: int = 256):
    """The recurrence polynomial a_0 + ... + a_h x^h of p evaluated at xi.

    Returns (coeffs, value enclosure, H, ratio) where ratio is
    |Q(xi)| / (H q^(-1-lam)).
    """
    spec = as_spec(spec)
    pv = _pvec(p)
    prof = rank_recurrence(pv)
    coeffs = prof.kernel
    value = abs(form_value(spec, list(coeffs), bits))
    q = pv[0]
    H = prof.H
    if lam is None:
        vec = p if isinstance(p, ApproxVector) else None
        lam = _lambda_of(vec, None) if vec is not None else 0.0
    ratio = _ratio(value.hi / H, q, 1 + float(lam))
    return coeffs, value, H, ratio


# ---------------------------------------------------------------------------
# recurrence-generated families


def recurrence_family(rng, h_max: int = 3, H_max: int = 50, n_max: int = 12):
    """A fixed integer recurrence and windows p^(n) of growing length it generates.

    Sequences are sums of geometric progressions c_t a_t^i b_t^(n-i) with
    rational roots a_t/b_t, so the generating polynomial prod(b_t x - a_t)
    annihilates every window exactly.
    """
    while True:
        h = rng.randint(1, h_max)
        roots = set()
        while len(roots) < h:
            b = rng.randint(1, 4)
            a = rng.randint(-4, 4)
            if a != 0 and gcd(a, b) == 1:
                roots.add((a, b))
        roots = sorted(roots)
        gen = [1]
        for a, b in roots:
            gen = _mul(gen, [-a, b])
        gen = _primitive(gen)
        if _height(gen) <= H_max:
            break
    cs = [rng.randint(1, 5) for _ in roots]
    windows = []
    for n in range(2 * h, n_max + 1):
        p = tuple(sum(c * a**i * b ** (n - i) for c, (a, b) in zip(cs, roots)) for i in range(n + 1))
        windows.append(p)
    return gen, windows


def _mul(f, g):
    out = [0] * (len(f) + len(g) - 1)
    for i, x in enumerate(f):
        for j, y in enumerate(g):
            out[i + j] += x * y
    return out


def ds_family_audit(gen, windows) -> dict:
    ratios = []
    skipped = 0
    for p in windows:
        prof = rank_recurrence(p)
        if prof.ds_skipped or prof.ds_ratio is None:
            skipped += 1
            continue
        ratios.append(float(prof.ds_ratio.hi))
    if not ratios:
        return {"generator": list(gen), "ratios": [], "skipped": skipped, "bounded": None}
    med = sorted(ratios)[len(ratios) // 2] if len(ratios) % 2 else (
        sorted(ratios)[len(ratios) // 2 - 1] + sorted(ratios)[len(ratios) // 2]) / 2
    return {
        "generator": list(gen),
        "ratios": ratios,
        "skipped": skipped,
        "max_over_median": max(ratios) / med if med else math.inf,
        "bounded": (max(ratios) / med <= 10) if med else False,
    }


def prop41_family(records, spec, *, qmin: int = 100, bound: float = COMPARABILITY) -> dict:
    """prop41_roundtrip over every record with q >= qmin; constants compared with ``bound``."""
    rows = []
    for r in records:
        if r.q < qmin or r.rho.hi == 0:
            continue
        rep = prop41_roundtrip(r, spec)
        f, c = rep["forward"], rep["converse"]
        worst = max(f["K1"], f["K2"], c["K_star"])
        rows.append({"q": r.q, "K1": f["K1"], "K2": f["K2"], "K_star": c["K_star"], "passes": worst <= bound})
    return {
        "records": len(rows),
        "max_K1": max((r["K1"] for r in rows), default=None),
        "max_K2": max((r["K2"] for r in rows), default=None),
        "max_K_star": max((r["K_star"] for r in rows), default=None),
        "bound": bound,
        "passes": all(r["passes"] for r in rows),
        "rows": rows,
    }


def prop42_family(records, *, qmin: int = 100) -> dict:
    """Worst Hankel-minor and selection-determinant ratios over records, each at its own pointwise exponent."""
    w42 = w43 = 0.0
    used = 0
    for r in records:
        if r.q < qmin or r.rho.hi == 0 or r.exponent is None:
            continue
        used += 1
        w42 = max(w42, prop42_audit(r, r.exponent)["max_ratio"])
        if r.n <= 8:
            w43 = max(w43, prop43_audit(r, r.exponent)["max_ratio"])
    return {"records": used, "prop42_max_ratio": w42, "prop43_max_ratio": w43}
