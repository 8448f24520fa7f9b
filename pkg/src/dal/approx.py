"""Simultaneous-approximation scans and exponent estimation.

Scans over q = 1..Qmax run in two stages.  A vectorised float pass computes
max_j ||q xi^j|| with a rigorous error radius and keeps every q that could
possibly be a record (or a member, for ``good_approx_enum``).  Each survivor
is then certified with exact fixed-point integer arithmetic.  The float pass
only ever discards q that are provably irrelevant, so results are identical
to an all-exact scan.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import (
    AlgebraicHit,
    BudgetExceeded,
    PrecisionExhausted,
    PreconditionError,
    RefineNeeded,
    TooFewRecords,
)
from .realnum import (
    MAX_BITS,
    annihilating_polynomial,
    CertifiedInterval,
    RealSpec,
    as_spec,
    eval_power,
    exact_power,
    is_root,
)

CHUNK = 1 << 17
# relative error radius of the float pass; generous against the ~2^-51.4 actually needed
FLOAT_REL_ERR = 2.0 ** -48
FLOAT_LIMIT = 2.0 ** 48

LIMSUP_MODES = ("lambda_n", "w_n", "w_n_lead", "w_n_cst")
MODES = LIMSUP_MODES + ("uniform_lambda_n",)
BIAS_CONST = 4


def flog(x) -> float:
    """Natural log of a positive Fraction or int without float overflow."""
    x = Fraction(x)
    if x <= 0:
        return -math.inf
    return math.log(x.numerator) - math.log(x.denominator)


def default_bits(n: int, qmax: int) -> int:
    return math.ceil((n + 2) * math.log2(max(qmax, 2))) + 64


@dataclass(frozen=True)
class ApproxVector:
    """(q, p_1, ..., p_n) with certified rho = max_j |q xi^j - p_j|."""

    coeffs: tuple
    rho: CertifiedInterval

    @property
    def q(self) -> int:
        return self.coeffs[0]

    @property
    def n(self) -> int:
        return len(self.coeffs) - 1

    @property
    def exponent(self):
        """-log(rho_hi)/log(q); None for q = 1, inf for rho = 0."""
        if self.rho.hi == 0:
            return math.inf
        if self.q <= 1:
            return None
        return -flog(self.rho.hi) / math.log(self.q)

    def to_json(self) -> dict:
        e = self.exponent
        return {
            "q": self.q,
            "p": list(self.coeffs[1:]),
            "rho_lo": _fstr(self.rho.lo),
            "rho_hi": _fstr(self.rho.hi),
            "exponent": None if e is None else (None if math.isinf(e) else round(e, 12)),
        }

    @classmethod
    def from_json(cls, obj: dict) -> ApproxVector:
        return cls(
            (int(obj["q"]),) + tuple(int(x) for x in obj["p"]),
            CertifiedInterval(Fraction(obj["rho_lo"]), Fraction(obj["rho_hi"])),
        )


def _fstr(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


class ScanResult(list):
    """A list of ApproxVector records with scan metadata attached."""

    def __init__(self, items=(), *, spec=None, n=None, qmax=None, degenerate_q=None, params=None):
        super().__init__(items)
        self.spec = spec
        self.n = n
        self.qmax = qmax
        self.degenerate_q = degenerate_q
        self.params = params or {}

    @property
    def degenerate(self) -> bool:
        return self.degenerate_q is not None


# ---------------------------------------------------------------------------
# exact certification


class _PowerTable:
    """Fixed-point enclosures lo_j <= 2^B xi^j <= hi_j, or exact rationals."""

    def __init__(self, spec: RealSpec, n: int, bits: int):
        self.bits = bits
        self.half = 1 << (bits - 1)
        self.entries = []
        for j in range(1, n + 1):
            c = exact_power(spec, j)
            if c is not None:
                self.entries.append(("exact", c))
                continue
            iv = eval_power(spec, j, bits + 2)
            lo = math.floor(iv.lo * (1 << bits))
            hi = math.ceil(iv.hi * (1 << bits))
            self.entries.append(("fixed", (lo, hi)))

    def approx(self, q: int, js=None):
        """Nearest integers p_j and an enclosure of max_j |q xi^j - p_j|."""
        B = self.bits
        ps = []
        rlo = Fraction(0)
        rhi = Fraction(0)
        ilo = ihi = 0  # running max at scale 2^B for fixed entries
        for idx, (kind, val) in enumerate(self.entries):
            if js is not None and idx + 1 not in js:
                continue
            if kind == "exact":
                x = q * val
                m = math.floor(x + Fraction(1, 2))
                if x - math.floor(x) == Fraction(1, 2):
                    m = math.floor(x)
                d = abs(x - m)
                ps.append(m)
                rlo, rhi = max(rlo, d), max(rhi, d)
                continue
            lo, hi = val
            L, U = q * lo, q * hi
            m_lo = (L + self.half) >> B
            m_hi = (U + self.half) >> B
            if m_lo != m_hi or ((U + self.half) & ((1 << B) - 1)) == 0 and U != L:
                raise RefineNeeded("nearest integer undecidable")
            m = m_lo
            base = m << B
            a, b = L - base, U - base
            if a >= 0:
                dlo, dhi = a, b
            elif b <= 0:
                dlo, dhi = -b, -a
            else:
                dlo, dhi = 0, max(-a, b)
            ps.append(m)
            ilo, ihi = max(ilo, dlo), max(ihi, dhi)
        scale = Fraction(1, 1 << B)
        rlo = max(rlo, ilo * scale)
        rhi = max(rhi, ihi * scale)
        return ps, CertifiedInterval(rlo, rhi)


@lru_cache(maxsize=128)
def _table(spec: RealSpec, n: int, bits: int) -> _PowerTable:
    return _PowerTable(spec, n, bits)


def certify(spec: RealSpec, n: int, q: int, bits: int, *, need_positive=True, js=None) -> ApproxVector:
    """Certified ApproxVector for denominator q, refining precision as needed.

    With ``need_positive`` the precision is raised until the enclosure of rho
    either excludes 0 or is exactly 0.
    """
    b = bits
    while b <= MAX_BITS:
        try:
            ps, rho = _table(spec, n, b).approx(q, js)
        except RefineNeeded:
            b *= 2
            continue
        if need_positive and rho.lo == 0 and rho.hi > 0:
            b *= 2
            continue
        return ApproxVector((q,) + tuple(ps), rho)
    raise PrecisionExhausted(f"could not certify q={q} below {MAX_BITS} bits")


TIE_BITS = 2048


def _component(v: ApproxVector, j: int):
    c = [0] * (j + 1)
    c[0], c[j] = -v.coeffs[j], v.q
    return c


def _same_abs(spec, P, R) -> bool:
    """|P(xi)| == |R(xi)| exactly."""
    m = max(len(P), len(R))
    P = list(P) + [0] * (m - len(P))
    R = list(R) + [0] * (m - len(R))
    d = [x - y for x, y in zip(P, R)]
    s = [x + y for x, y in zip(P, R)]
    return (not any(d)) or (not any(s)) or is_root(d, spec) or is_root(s, spec)


def _argmax_component(spec, v: ApproxVector, bits: int):
    """Integer polynomial q x^j - p_j whose absolute value at xi equals rho exactly."""
    n = v.n
    while bits <= MAX_BITS:
        vals = [abs(form_value(spec, _component(v, j), bits)) for j in range(1, n + 1)]
        top = max(range(n), key=lambda i: vals[i].hi)
        P = _component(v, top + 1)
        if all(
            i == top or vals[i].certainly_lt(vals[top]) or _same_abs(spec, _component(v, i + 1), P)
            for i in range(n)
        ):
            return P
        bits *= 2
    raise PrecisionExhausted("could not isolate the dominant coordinate")


def _refine_pair(spec, n, a: ApproxVector, b: ApproxVector, bits):
    """Recertify two vectors until their rho enclosures separate.

    Returns (a, b, equal).  Exact ties are possible for algebraic xi (for
    sqrt 2 and n = 3, rho(2q) can equal rho(q)); past TIE_BITS they are
    decided through the dominant coordinate polynomials.
    """
    algebraic = annihilating_polynomial(spec) is not None
    while a.rho.overlaps(b.rho) and not (a.rho.is_exact and b.rho.is_exact):
        if algebraic and bits >= TIE_BITS:
            if _same_abs(spec, _argmax_component(spec, a, bits), _argmax_component(spec, b, bits)):
                return a, b, True
        bits *= 2
        if bits > MAX_BITS:
            raise PrecisionExhausted("rho values could not be separated")
        a = certify(spec, n, a.q, bits)
        b = certify(spec, n, b.q, bits)
    return a, b, a.rho == b.rho


# ---------------------------------------------------------------------------
# float prefilter


def _float_powers(spec: RealSpec, n: int):
    vals = []
    for j in range(1, n + 1):
        iv = eval_power(spec, j, 64)
        vals.append(float(iv.mid))
    return vals


def _rho_float(qs: np.ndarray, fpows):
    rho = np.zeros_like(qs)
    err = np.zeros_like(qs)
    for f in fpows:
        y = qs * f
        d = np.abs(y - np.rint(y))
        np.maximum(rho, d, out=rho)
        np.maximum(err, np.abs(y) * FLOAT_REL_ERR + 1e-300, out=err)
    return rho, err


def _record_candidates(args):
    a, b, fpows = args
    qs = np.arange(a, b, dtype=np.float64)
    rho, err = _rho_float(qs, fpows)
    upper = rho + err
    lower = rho - err
    prefix = np.minimum.accumulate(upper)
    excl = np.empty_like(prefix)
    excl[0] = np.inf
    excl[1:] = prefix[:-1]
    idx = np.nonzero(lower < excl)[0]
    return [int(a + i) for i in idx]


def _threshold_candidates(args):
    a, b, fpows, C, lam = args
    qs = np.arange(a, b, dtype=np.float64)
    rho, err = _rho_float(qs, fpows)
    with np.errstate(under="ignore", over="ignore"):
        thr = C * np.power(qs, -lam)
    idx = np.nonzero(rho - err <= thr * (1 + 1e-9) + 1e-300)[0]
    return [int(a + i) for i in idx]


def _const_candidates(args):
    a, b, fpows, thr = args
    qs = np.arange(a, b, dtype=np.float64)
    rho, err = _rho_float(qs, fpows)
    idx = np.nonzero(rho - err <= thr * (1 + 1e-9) + 1e-300)[0]
    return [int(a + i) for i in idx]


def _chunks(qmin, qmax, size=CHUNK):
    a = qmin
    while a <= qmax:
        b = min(qmax + 1, a + size)
        yield a, b
        a = b


def _run(fn, jobs, workers):
    """Map over jobs in order; output is independent of the worker count."""
    if workers and workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(fn, jobs))
    else:
        parts = [fn(j) for j in jobs]
    out = []
    for p in parts:
        out.extend(p)
    return out


def _float_ok(spec, n, qmax, fpows):
    return all(qmax * (abs(f) + 1) < FLOAT_LIMIT for f in fpows)


def candidate_denominators(spec, n, qmin, qmax, kind, *, C=None, lam=None, thr=None, workers=1, js=None):
    """Superset of the q in [qmin, qmax] relevant to a scan of the given kind."""
    fpows = _float_powers(spec, n)
    if js is not None:
        fpows = [fpows[j - 1] for j in js]
    if not _float_ok(spec, n, qmax, fpows):
        return list(range(qmin, qmax + 1))
    chunks = list(_chunks(qmin, qmax))
    if kind == "record":
        jobs = [(a, b, fpows) for a, b in chunks]
        return _run(_record_candidates, jobs, workers)
    if kind == "threshold":
        jobs = [(a, b, fpows, float(C), float(lam)) for a, b in chunks]
        return _run(_threshold_candidates, jobs, workers)
    if kind == "const":
        jobs = [(a, b, fpows, float(thr)) for a, b in chunks]
        return _run(_const_candidates, jobs, workers)
    raise ValueError(kind)


# ---------------------------------------------------------------------------
# scans


def best_approx_scan(spec, n: int, qmax: int, *, workers: int = 1, bits: int | None = None) -> ScanResult:
    """Best simultaneous-approximation records for q = 1..qmax.

    Returns exactly the q at which rho(q) = max_j ||q xi^j|| strictly beats
    every smaller q.  An exact rho = 0 stops the scan and is flagged through
    ``ScanResult.degenerate_q``.
    """
    spec = as_spec(spec)
    if n < 1:
        raise PreconditionError("n must be positive")
    if qmax < 2:
        raise PreconditionError("Qmax must be at least 2")
    bits = bits or default_bits(n, qmax)
    cands = candidate_denominators(spec, n, 1, qmax, "record", workers=workers)
    records: list[ApproxVector] = []
    best = None
    degenerate_q = None
    for q in cands:
        v = certify(spec, n, q, bits)
        if best is not None:
            v2, best2, equal = _refine_pair(spec, n, v, best, bits)
            if equal or not v2.rho.certainly_lt(best2.rho):
                continue
            v = v2
        records.append(v)
        best = v
        if v.rho.hi == 0:
            degenerate_q = q
            break
    return ScanResult(records, spec=spec, n=n, qmax=qmax, degenerate_q=degenerate_q,
                      params={"mode": "best"})


def _le_power(x: Fraction, q: int, C: Fraction, lam: Fraction) -> bool:
    """x <= C q^-lam, exactly, for x >= 0."""
    r, s = lam.numerator, lam.denominator
    lhs = x ** s
    if r >= 0:
        return lhs * q ** r <= C ** s
    return lhs <= C ** s * q ** (-r)


def good_approx_enum(spec, n: int, lam, C, qmax: int, *, workers: int = 1, bits: int | None = None) -> ScanResult:
    """All q <= qmax with max_j ||q xi^j|| <= C q^-lam."""
    spec = as_spec(spec)
    lam = Fraction(str(lam)) if isinstance(lam, float) else Fraction(lam)
    C = Fraction(str(C)) if isinstance(C, float) else Fraction(C)
    if lam < 0 or C <= 0:
        raise PreconditionError("need lambda >= 0 and C > 0")
    if qmax < 1:
        raise PreconditionError("Qmax must be positive")
    bits = bits or default_bits(n, qmax)
    cands = candidate_denominators(spec, n, 1, qmax, "threshold", C=C, lam=lam, workers=workers)
    out = []
    degenerate_q = None
    for q in cands:
        b = bits
        while True:
            v = certify(spec, n, q, b, need_positive=False)
            if _le_power(v.rho.hi, q, C, lam):
                out.append(v)
                if v.rho.hi == 0 and degenerate_q is None:
                    degenerate_q = q
                break
            if not _le_power(v.rho.lo, q, C, lam):
                break
            b *= 2
            if b > MAX_BITS:
                raise PrecisionExhausted(f"membership of q={q} undecidable")
    return ScanResult(out, spec=spec, n=n, qmax=qmax, degenerate_q=degenerate_q,
                      params={"mode": "good", "lambda": lam, "C": C})


# ---------------------------------------------------------------------------
# exponent estimation


@dataclass
class ExponentEstimate:
    mode: str
    records: list  # (q, rho_hi)
    pointwise: list  # -log rho / log q
    secant: list  # log-ratio against the previous record
    values: list  # per-record value the estimate is taken over
    estimate: float
    window: int
    spread: float
    qmax: int | None = None
    notes: list = field(default_factory=list)

    def to_json(self) -> dict:
        def r(x):
            return None if x is None else (x if math.isinf(x) else round(x, 12))

        return {
            "mode": self.mode,
            "estimate": r(self.estimate),
            "window": self.window,
            "spread": r(self.spread),
            "records": [[q, _fstr(rho)] for q, rho in self.records],
            "pointwise": [r(x) for x in self.pointwise],
            "secant": [r(x) for x in self.secant],
            "values": [r(x) for x in self.values],
            "notes": self.notes,
        }


def _as_record(r):
    if isinstance(r, ApproxVector):
        return r.q, r.rho.hi, r.rho.lo
    q, rho = r[0], r[1]
    if isinstance(rho, CertifiedInterval):
        return q, rho.hi, rho.lo
    return q, Fraction(rho), Fraction(rho)


def estimate_exponent(records, mode: str = "lambda_n", window: int | None = None,
                      qmax: int | None = None, *, bias_correct: bool = True) -> ExponentEstimate:
    """Tail estimate of an exponent from best records.

    Limsup-type modes take the max over the tail window of a bias-corrected
    pointwise value.  The pointwise value -log rho / log q carries an
    O(1/log q) bias from the implied constant.  The secant (log-ratio slope
    against the previous record) cancels that bias but is unstable when
    records crowd together, so it is only allowed to lower the pointwise
    value by at most log(BIAS_CONST)/log q.
    The uniform mode takes the min over the window of -log rho_i / log q_{i+1}
    (rho_i stays the best value until the next record q_{i+1}; the last record
    is measured against ``qmax``).
    """
    if mode not in MODES:
        raise PreconditionError(f"unknown mode {mode}")
    recs = [_as_record(r) for r in records]
    if len(recs) < 3:
        raise TooFewRecords(f"need at least 3 records, got {len(recs)}")
    for (q1, h1, _), (q2, h2, _) in zip(recs, recs[1:]):
        if not q2 > q1:
            raise PreconditionError("records must be strictly increasing in q")
    pointwise, secant = [], []
    prev = None
    for q, hi, lo in recs:
        if hi == 0:
            pw = math.inf
        elif q <= 1:
            pw = None
        else:
            pw = -flog(hi) / math.log(q)
        pointwise.append(pw)
        if prev is None or hi == 0:
            secant.append(None if hi != 0 else math.inf)
        else:
            pq, phi, plo = prev
            # conservative: previous rho at its lower end, this rho at its upper end
            secant.append((flog(plo) - flog(hi)) / math.log(q / pq) if plo > 0 else None)
        prev = (q, hi, lo)
    if mode == "uniform_lambda_n":
        values = []
        for i, (q, hi, lo) in enumerate(recs):
            nxt = recs[i + 1][0] if i + 1 < len(recs) else qmax
            if nxt is None or nxt <= 1:
                values.append(None)
            elif hi == 0:
                values.append(math.inf)
            else:
                values.append(-flog(hi) / math.log(nxt))
    else:
        values = []
        for (q, _, _), pw, sc in zip(recs, pointwise, secant):
            if not bias_correct or pw is None or sc is None or math.isinf(pw):
                values.append(pw)
                continue
            # remove at most a constant factor BIAS_CONST from rho, never add
            values.append(min(pw, max(sc, pw - math.log(BIAS_CONST) / math.log(q))))
    w = window or max(1, math.ceil(math.sqrt(len(recs))))
    tail = [v for v in values[-w:] if v is not None]
    if not tail:
        tail = [v for v in values if v is not None]
    if not tail:
        raise TooFewRecords("no record carries a usable exponent")
    est = min(tail) if mode == "uniform_lambda_n" else max(tail)
    finite = [v for v in tail if not math.isinf(v)]
    spread = (max(finite) - min(finite)) if finite else 0.0
    return ExponentEstimate(mode, [(q, hi) for q, hi, _ in recs], pointwise, secant, values,
                            est, w, spread, qmax)


def grid_profile(records, grid) -> list:
    """-log(min_{q <= Q} rho(q)) / log Q for each Q in ``grid`` (None before the first record).

    On a common grid the profile for n + 1 never exceeds the one for n,
    because rho_{n+1}(q) >= rho_n(q) for every q.
    """
    recs = [_as_record(r) for r in records]
    out = []
    for Q in grid:
        best = None
        for q, hi, _ in recs:
            if q > Q:
                break
            best = hi
        if best is None or Q <= 1:
            out.append(None)
        else:
            out.append(math.inf if best == 0 else -flog(best) / math.log(Q))
    return out


def estimate_lambda(spec, n: int, qmax: int, *, uniform: bool = False, workers: int = 1, scan=None):
    scan = scan if scan is not None else best_approx_scan(spec, n, qmax, workers=workers)
    if scan.degenerate:
        e = ExponentEstimate("uniform_lambda_n" if uniform else "lambda_n",
                             [(v.q, v.rho.hi) for v in scan], [], [], [], math.inf, 0, 0.0, qmax,
                             notes=[f"degenerate hit at q={scan.degenerate_q}"])
        return e
    return estimate_exponent(scan, "uniform_lambda_n" if uniform else "lambda_n", qmax=qmax)


# ---------------------------------------------------------------------------
# small integer polynomials at xi


def _constraint(mode, xs):
    """Allowed |x_0| range (a, b) given x_1..x_k, or None if the vector is excluded."""
    return None


def min_form(spec, k: int, H: int, mode: str = "all", *, budget: int = 20_000_000):
    """Certified minimum of |x_k xi^k + ... + x_0| over nonzero integer vectors of height <= H.

    mode ``lead`` requires |x_k| >= |x_i| for all i; mode ``cst`` requires
    |x_0| >= |x_i| for all i.  Returns (coeffs x_0..x_k, value enclosure).
    Raises AlgebraicHit when some vector in the box vanishes exactly at xi.
    """
    spec = as_spec(spec)
    if k < 1 or H < 1:
        raise PreconditionError("need k >= 1 and H >= 1")
    if mode not in ("all", "lead", "cst"):
        raise PreconditionError(f"unknown mode {mode}")
    size = (2 * H + 1) ** k
    if size > budget:
        raise BudgetExceeded(f"box of {size} vectors exceeds budget {budget}", searched=0)
    fp = np.array(_float_powers(spec, k))
    if np.any(np.abs(fp) * H * (k + 1) > FLOAT_LIMIT):
        raise BudgetExceeded("box too large for certified float prefilter")
    rows = _form_rows(fp, k, H, mode)
    if rows is None:
        raise PreconditionError("no admissible vector in the box")
    X, val, err = rows
    upper = np.min(val + err)
    keep = np.nonzero(val - err <= upper)[0]
    cands = [tuple(int(c) for c in X[i]) for i in keep]
    return _certify_min(spec, cands)


def _form_rows(fp, k, H, mode):
    rng = np.arange(-H, H + 1, dtype=np.int64)
    out_X, out_val, out_err = [], [], []
    mags = np.abs(fp)
    for top in range(-H, H + 1):
        # x_k = top; remaining x_1..x_{k-1} vectorised
        if k > 1:
            grids = np.meshgrid(*([rng] * (k - 1)), indexing="ij")
            rest = np.stack([g.ravel() for g in grids], axis=1)
        else:
            rest = np.zeros((1, 0), dtype=np.int64)
        xs = np.concatenate([rest, np.full((rest.shape[0], 1), top, dtype=np.int64)], axis=1)
        # canonical sign: first nonzero among x_1..x_k positive
        nz = xs != 0
        has = nz.any(axis=1)
        first = np.where(has, nz.argmax(axis=1), 0)
        lead_sign = xs[np.arange(xs.shape[0]), first]
        ok = (lead_sign > 0) | ~has
        absx = np.abs(xs)
        M = absx.max(axis=1)
        if mode == "lead":
            ok &= absx[:, -1] >= M
            lo_abs = np.zeros_like(M)
            hi_abs = absx[:, -1]
        elif mode == "cst":
            lo_abs = M
            hi_abs = np.full_like(M, H)
        else:
            lo_abs = np.zeros_like(M)
            hi_abs = np.full_like(M, H)
        xs, lo_abs, hi_abs, has = xs[ok], lo_abs[ok], hi_abs[ok], has[ok]
        if xs.shape[0] == 0:
            continue
        y = xs.astype(np.float64) @ fp
        scale = np.abs(xs).astype(np.float64) @ mags
        t = -y
        fl = np.floor(t)
        for sgn in (1, -1):
            for off in (0, 1):
                c = fl + off
                if sgn > 0:
                    x0 = np.clip(c, lo_abs, hi_abs)
                else:
                    x0 = np.clip(c, -hi_abs, -lo_abs)
                # an all-zero x_1..x_k needs x_0 != 0 and positive (canonical sign)
                bad = ~has & (x0 <= 0)
                x0 = np.where(~has, np.maximum(lo_abs, 1), x0)
                valid = ~(bad & (np.maximum(lo_abs, 1) > hi_abs))
                v = np.abs(y + x0)
                e = (scale + np.abs(x0) + 1) * FLOAT_REL_ERR
                full = np.concatenate([x0[:, None].astype(np.int64), xs], axis=1)
                out_X.append(full[valid])
                out_val.append(v[valid])
                out_err.append(e[valid])
    if not out_X:
        return None
    return np.concatenate(out_X), np.concatenate(out_val), np.concatenate(out_err)


def form_value(spec: RealSpec, coeffs, bits: int) -> CertifiedInterval:
    acc = CertifiedInterval.point(coeffs[0])
    for i, c in enumerate(coeffs[1:], start=1):
        if c:
            acc = acc + eval_power(spec, i, bits + abs(c).bit_length() + 4) * c
    return acc


def _height(c):
    return max(abs(x) for x in c)


def _certify_min(spec, cands):
    cands = sorted(set(cands), key=lambda c: (_height(c), c))
    bits = 96
    roots = []
    vals = {}
    for c in cands:
        b = bits
        while True:
            iv = form_value(spec, c, b)
            if not iv.contains(0):
                vals[c] = abs(iv)
                break
            if iv.is_exact or is_root(c, spec):
                roots.append(c)
                break
            b *= 2
            if b > MAX_BITS:
                raise PrecisionExhausted(f"cannot separate form {c} from zero")
    if roots:
        best = min(roots, key=lambda c: (_height(c), c))
        raise AlgebraicHit(f"polynomial {best} vanishes at {spec}", coeffs=best)
    best = None
    for c in cands:
        if best is None:
            best = c
            continue
        a, b_ = vals[c], vals[best]
        bb = bits
        while a.overlaps(b_) and not (a.is_exact and b_.is_exact):
            # equal values mean c -/+ best vanishes at xi
            diff = tuple(x - y for x, y in zip(c, best))
            summ = tuple(x + y for x, y in zip(c, best))
            if is_root(diff, spec) or is_root(summ, spec):
                break
            bb *= 2
            if bb > MAX_BITS:
                raise PrecisionExhausted("minimum could not be certified")
            a, b_ = abs(form_value(spec, c, bb)), abs(form_value(spec, best, bb))
            vals[c], vals[best] = a, b_
        if a.certainly_lt(b_):
            best = c
    return best, vals[best]


def w_ladder(Hmax: int):
    hs = []
    h = 2
    while h < Hmax:
        hs.append(h)
        h *= 2
    hs.append(Hmax)
    return hs


@dataclass
class WEstimate:
    mode: str
    ladder: list  # (H, coeffs, value)
    estimate: ExponentEstimate | None
    algebraic: tuple | None = None

    def to_json(self):
        return {
            "mode": self.mode,
            "ladder": [{"H": H, "coeffs": list(c), "value_hi": _fstr(v.hi)} for H, c, v in self.ladder],
            "estimate": None if self.estimate is None else self.estimate.to_json(),
            "algebraic": None if self.algebraic is None else list(self.algebraic),
        }


def estimate_w(spec, k: int, Hmax: int, mode: str = "all") -> WEstimate:
    """Minima of |P(xi)| over a geometric ladder of heights and the resulting exponent series.

    An exact zero sets ``algebraic`` to the vanishing coefficient vector
    (xi is algebraic of degree <= k); callers that want an exception can
    check it.
    """
    spec = as_spec(spec)
    if k < 1:
        raise PreconditionError("k must be positive")
    tag = {"all": "w_n", "lead": "w_n_lead", "cst": "w_n_cst"}[mode]
    ladder = []
    for H in w_ladder(Hmax):
        try:
            c, v = min_form(spec, k, H, mode)
        except AlgebraicHit as hit:
            return WEstimate(tag, ladder, None, algebraic=tuple(hit.coeffs))
        ladder.append((H, c, v))
    # plain series -log(min_H)/log H over the ladder: a constrained minimum is never
    # smaller than the unconstrained one at the same H, so lead <= all holds term by term
    est = None
    if len(ladder) >= 3:
        est = estimate_exponent([(H, v) for H, _, v in ladder], tag, bias_correct=False)
    return WEstimate(tag, ladder, est)
