"""Closed-form Hausdorff-dimension bounds for the sets {xi : lambda_n(xi) >= lambda}.

Everything is exact: inputs are coerced to Fraction and every formula is a
rational function of lambda.  ``INF`` stands for lambda = +infinity, where all
dimension formulas are 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import PreconditionError

INF = math.inf
CSV_HEADER = "n,lambda,jb,lower16,lower17,lower_ber,lower23,k_star,upper23,h_star,tight"
EPS = Fraction(1, 1000)


def as_lambda(x):
    if x is INF or (isinstance(x, float) and math.isinf(x)) or (isinstance(x, str) and x.strip().lower() in ("inf", "+inf")):
        return INF
    if isinstance(x, float):
        return Fraction(str(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    return Fraction(x)


def _clip(x: Fraction) -> Fraction:
    return min(Fraction(1), max(Fraction(0), x))


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


# individual formulas, unclipped


def jb(w) -> Fraction:
    """Jarnik-Besicovitch: dim {w_1 >= w} = 2/(1+w)."""
    w = as_lambda(w)
    return Fraction(0) if w is INF else Fraction(2) / (1 + w)


def bernik(n: int, w) -> Fraction:
    """dim {w_n >= w} = (n+1)/(w+1) for w >= n."""
    w = as_lambda(w)
    return Fraction(0) if w is INF else Fraction(n + 1) / (w + 1)


def bdvv(lam) -> Fraction:
    """Exact dimension for n = 2 and 1/2 <= lambda <= 1."""
    lam = as_lambda(lam)
    if lam is INF or not Fraction(1, 2) <= lam <= 1:
        raise PreconditionError("formula holds for 1/2 <= lambda <= 1 only")
    return (2 - lam) / (1 + lam)


def lower_k(n: int, k: int, lam) -> Fraction:
    """(k+1)(1-(k-1)lambda) / ((n-k+1)(1+lambda)), the k-th lower bound."""
    lam = as_lambda(lam)
    if lam is INF:
        return Fraction(0)
    return (k + 1) * (1 - (k - 1) * lam) / ((n - k + 1) * (1 + lam))


def upper_h(n: int, h: int, lam) -> Fraction:
    """(h+1)(1-(h-1)lambda) / ((n-2h+2)(1+lambda)), the h-th upper branch."""
    lam = as_lambda(lam)
    if lam is INF:
        return Fraction(0)
    return (h + 1) * (1 - (h - 1) * lam) / ((n - 2 * h + 2) * (1 + lam))


def m_index(n: int, lam) -> int:
    lam = as_lambda(lam)
    half = (n + 1) // 2
    if lam is INF:
        return min(1, half)
    return min(1 + math.floor(1 / lam), half)


def upper_valid(n: int, lam) -> bool:
    lam = as_lambda(lam)
    return lam is INF or lam > Fraction(1, _ceil_div(n + 1, 2))


@dataclass(frozen=True)
class BoundPoint:
    n: int
    lam: Fraction | float
    jb: Fraction
    lower16: Fraction
    lower17: Fraction
    lower17_valid: bool
    lower_ber: Fraction
    lower_ber_valid: bool
    lower23: Fraction
    k_star: int
    upper23: Fraction | None
    h_star: int | None
    m: int
    tight: bool

    @property
    def upper_valid(self) -> bool:
        return self.upper23 is not None

    def csv_row(self) -> str:
        def f(x, ok=True):
            return "" if x is None or not ok else str(x)

        return ",".join(
            [
                str(self.n),
                "inf" if self.lam is INF else str(self.lam),
                f(self.jb),
                f(self.lower16),
                f(self.lower17, self.lower17_valid),
                f(self.lower_ber, self.lower_ber_valid),
                f(self.lower23),
                str(self.k_star),
                f(self.upper23),
                f(self.h_star),
                "1" if self.tight else "0",
            ]
        )

    def to_json(self) -> dict:
        s = lambda x: None if x is None else str(x)  # noqa: E731
        return {
            "n": self.n,
            "lambda": "inf" if self.lam is INF else str(self.lam),
            "jb": s(self.jb),
            "lower16": s(self.lower16),
            "lower17": s(self.lower17) if self.lower17_valid else None,
            "lower_ber": s(self.lower_ber) if self.lower_ber_valid else None,
            "lower23": s(self.lower23),
            "k_star": self.k_star,
            "upper23": s(self.upper23),
            "h_star": self.h_star,
            "m": self.m,
            "tight": self.tight,
        }


def evaluate(n: int, lam) -> BoundPoint:
    n = int(n)
    if n < 1:
        raise PreconditionError("n must be positive")
    lam = as_lambda(lam)
    if lam is not INF and lam < Fraction(1, n):
        raise PreconditionError(f"lambda = {lam} is below the Dirichlet exponent 1/{n}")
    zero = Fraction(0)
    m = m_index(n, lam)
    if lam is INF:
        return BoundPoint(n, lam, zero, zero, zero, False, zero, False, zero, 1, zero, 1, m, True)

    ks = [lower_k(n, k, lam) for k in range(1, n + 1)]
    best = max(ks)
    k_star = ks.index(best) + 1
    lower23 = _clip(best)

    upper, h_star = None, None
    if upper_valid(n, lam):
        hs = [upper_h(n, h, lam) for h in range(1, m + 1)]
        top = max(hs)
        h_star = hs.index(top) + 1
        upper = _clip(top)

    l17_ok = n == 1 or lam < Fraction(1, n - 1)
    ber_ok = n >= 2 and lam < Fraction(3, 2 * n - 1)
    return BoundPoint(
        n=n,
        lam=lam,
        jb=_clip(jb(lam)),
        lower16=_clip(Fraction(2) / (n * (1 + lam))),
        lower17=_clip((n + 1) * (1 - lam * (n - 1)) / (1 + lam)),
        lower17_valid=l17_ok,
        lower_ber=_clip(Fraction(n + 1) / (lam + 1) - (n - 1)),
        lower_ber_valid=ber_ok,
        lower23=lower23,
        k_star=k_star,
        upper23=upper,
        h_star=h_star,
        m=m,
        tight=upper is not None and upper == lower23,
    )


# crossovers


def _lin(n, kind, i):
    """(a, b) with (1+lambda) * branch_i(lambda) = a + b lambda."""
    if kind == "k":
        c = Fraction(i + 1, n - i + 1)
    else:
        c = Fraction(i + 1, n - 2 * i + 2)
    return c, -c * (i - 1)


def crossover(n: int, kind: str, i: int, j: int) -> Fraction | None:
    """Exact lambda where branches i and j of the lower ("k") or upper ("h") family meet."""
    a1, b1 = _lin(n, kind, i)
    a2, b2 = _lin(n, kind, j)
    if b1 == b2:
        return None
    return (a2 - a1) / (b1 - b2)


@dataclass(frozen=True)
class Threshold:
    kind: str
    value: Fraction
    left: Fraction | None = None
    right: Fraction | None = None
    before: int | None = None
    after: int | None = None

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "value": str(self.value),
            "left": None if self.left is None else str(self.left),
            "right": None if self.right is None else str(self.right),
            "before": self.before,
            "after": self.after,
        }


@dataclass
class BoundCurve:
    n: int
    grid: list
    points: list
    thresholds: list = field(default_factory=list)
    tight_from: Fraction | None = None
    tight_identity_from: Fraction | None = None

    def csv(self) -> str:
        return CSV_HEADER + "\n" + "".join(p.csv_row() + "\n" for p in self.points)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "points": len(self.points),
            "lambda_lo": str(self.grid[0]),
            "lambda_hi": str(self.grid[-1]),
            "thresholds": [t.to_json() for t in self.thresholds],
            "tight_from": None if self.tight_from is None else str(self.tight_from),
            "tight_identity_from": None if self.tight_identity_from is None else str(self.tight_identity_from),
            "note": "true dimension between the bounds is unknown outside the tight region",
        }


def grid(lo, hi, step) -> list:
    lo, hi, step = as_lambda(lo), as_lambda(hi), as_lambda(step)
    if step <= 0 or not lo < hi:
        raise PreconditionError("need lo < hi and step > 0")
    out, x = [], lo
    while x <= hi:
        out.append(x)
        x += step
    if out[-1] != hi:
        out.append(hi)
    return out


def curve(n: int, lo, hi, step) -> BoundCurve:
    lo = as_lambda(lo)
    if n < 1 or lo < Fraction(1, n):
        raise PreconditionError(f"lambda_lo must be at least 1/{n}")
    g = grid(lo, hi, step)
    pts = [evaluate(n, x) for x in g]
    ths = []
    for a, b in zip(pts, pts[1:]):
        if a.k_star != b.k_star:
            v = crossover(n, "k", a.k_star, b.k_star)
            ths.append(Threshold("k_argmax", v, a.lam, b.lam, a.k_star, b.k_star))
        if a.h_star is not None and b.h_star is not None and a.h_star != b.h_star:
            v = crossover(n, "h", a.h_star, b.h_star)
            ths.append(Threshold("h_argmax", v, a.lam, b.lam, a.h_star, b.h_star))
    bounds = {
        "lower17_validity": Fraction(1, n - 1) if n > 1 else None,
        "lower_ber_validity": Fraction(3, 2 * n - 1) if n > 1 else None,
        "upper23_validity": Fraction(1, _ceil_div(n + 1, 2)),
    }
    for kind, v in bounds.items():
        if v is not None and g[0] <= v <= g[-1]:
            left = max((x for x in g if x <= v), default=None)
            right = min((x for x in g if x > v), default=None)
            ths.append(Threshold(kind, v, left, right))
    ths.sort(key=lambda t: (t.value, t.kind))

    tight_from = None
    i = len(pts)
    while i > 0 and pts[i - 1].tight:
        i -= 1
    if i < len(pts):
        tight_from = pts[i].lam
        if i > 0:
            for t in ths:
                if t.kind.endswith("argmax") and t.left == pts[i - 1].lam and t.right == pts[i].lam:
                    tight_from = t.value
    ident = Fraction(n + 4, 3 * n) if n >= 3 else None
    return BoundCurve(n, g, pts, ths, tight_from, ident)


# identities


def _check_around(t, pred):
    return {str(x): pred(x) for x in (t - EPS, t, t + EPS)}


def threshold_report(n: int) -> list[dict]:
    if n < 2:
        raise PreconditionError("n must be at least 2")
    out = []
    if n == 2:
        out.append({"identity": "branch_crossover", "skipped": True,
                    "note": "m = 1 for n = 2, so the h = 2 branch is absent"})
    else:
        t = Fraction(n + 4, 3 * n)

        def iff(x):
            return (upper_h(n, 1, x) >= upper_h(n, 2, x)) == (x >= t)

        checks = _check_around(t, iff)
        out.append({
            "identity": "branch_crossover",
            "threshold": str(t),
            "value_at_threshold": str(upper_h(n, 1, t)),
            "branches_equal_at_threshold": upper_h(n, 1, t) == upper_h(n, 2, t),
            "checks": checks,
            "holds": all(checks.values()) and upper_h(n, 1, t) == upper_h(n, 2, t),
        })
    t = Fraction(2, n)
    p = evaluate(n, t)
    eq = p.lower16 == p.lower_ber == Fraction(2, n + 2)
    out.append({
        "identity": "lower16_equals_lower_ber",
        "threshold": str(t),
        "value_at_threshold": str(p.lower16),
        "differences": {str(x): str(Fraction(n + 1) / (x + 1) - (n - 1) - Fraction(2) / (n * (1 + x)))
                        for x in (t - EPS, t, t + EPS)},
        "holds": eq,
    })
    rows = []
    for m in range(1, n + 1):
        t = Fraction(1, m)
        v = lower_k(n, m, t)
        lo, hi = lower_k(n, m, t - EPS), lower_k(n, m, t + EPS)
        rows.append({"m": m, "value": str(v), "holds": v == Fraction(1, n - m + 1) and lo > v > hi})
    out.append({"identity": "lower_k_at_reciprocal", "rows": rows, "holds": all(r["holds"] for r in rows)})
    return out


# piecewise claims for small n, re-derived rather than trusted

_CLAIMS = [
    # (n, side, lo, hi, formula, lo_closed, hi_closed)
    (3, "lower", Fraction(1, 3), Fraction(3, 5), lambda x: 2 * (1 - x) / (1 + x), True, True),
    (3, "lower", Fraction(3, 5), Fraction(7, 9), lambda x: Fraction(2) / (3 * (1 + x)), False, True),
    (3, "upper", Fraction(1, 3), Fraction(1, 2), lambda x: Fraction(1), True, True),
    (3, "upper", Fraction(1, 2), Fraction(7, 9), lambda x: 3 * (1 - x) / (1 + x), False, True),
    (3, "exact", Fraction(7, 9), Fraction(3), lambda x: Fraction(2) / (3 * (1 + x)), True, True),
    (4, "lower", Fraction(1, 4), Fraction(3, 7), lambda x: (2 - 3 * x) / (1 + x), True, True),
    (4, "lower", Fraction(3, 7), Fraction(1, 2), lambda x: (1 - x) / (1 + x), False, True),
    (4, "lower", Fraction(1, 2), Fraction(2, 3), lambda x: Fraction(1) / (2 * (1 + x)), False, True),
    (4, "upper", Fraction(1, 4), Fraction(1, 2), lambda x: Fraction(1), True, True),
    (4, "upper", Fraction(1, 2), Fraction(2, 3), lambda x: 3 * (1 - x) / (2 * (1 + x)), False, True),
    (4, "exact", Fraction(2, 3), Fraction(3), lambda x: Fraction(1) / (2 * (1 + x)), True, True),
]


def _best_lower(p: BoundPoint) -> Fraction:
    vals = [p.lower23]
    if p.lower_ber_valid:
        vals.append(p.lower_ber)
    return max(vals)


def piecewise_claims_audit(step=Fraction(1, 200)) -> list[dict]:
    """Compare tabulated piecewise bounds for n = 3, 4 with the closed forms."""
    out = []
    for n, side, lo, hi, f, lo_c, hi_c in _CLAIMS:
        bad = []
        for x in grid(lo, hi, step):
            if (x == lo and not lo_c) or (x == hi and not hi_c):
                continue
            p = evaluate(n, x)
            claim = f(x)
            lower = _best_lower(p)
            upper = p.upper23 if p.upper23 is not None else Fraction(1)
            if side == "lower":
                ok = claim == lower
            elif side == "upper":
                ok = claim == upper
            else:
                ok = claim == lower == upper
            if not ok:
                bad.append({"lambda": str(x), "claimed": str(claim), "lower": str(lower), "upper": str(upper)})
        out.append({
            "n": n,
            "side": side,
            "range": [str(lo), str(hi)],
            "consistent": not bad,
            "discrepancies": len(bad),
            "first": bad[0] if bad else None,
        })
    return out


# plotting


_SERIES = [
    ("jb", "#888888", lambda p: p.jb),
    ("lower16", "#1f77b4", lambda p: p.lower16),
    ("lower17", "#2ca02c", lambda p: p.lower17 if p.lower17_valid else None),
    ("lower_ber", "#9467bd", lambda p: p.lower_ber if p.lower_ber_valid else None),
    ("lower23", "#ff7f0e", lambda p: p.lower23),
    ("upper23", "#d62728", lambda p: p.upper23),
]


def svg(c: BoundCurve, width: int = 640, height: int = 400) -> str:
    ml, mr, mt, mb = 60, 120, 30, 50
    x0, x1 = float(c.grid[0]), float(c.grid[-1])
    pw, ph = width - ml - mr, height - mt - mb

    def X(x):
        return ml + (float(x) - x0) / (x1 - x0) * pw

    def Y(y):
        return mt + (1 - float(y)) * ph

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{ml}" y1="{mt + ph}" x2="{ml + pw}" y2="{mt + ph}" stroke="black"/>',
        f'<line x1="{ml}" y1="{mt}" x2="{ml}" y2="{mt + ph}" stroke="black"/>',
        f'<text x="{ml + pw / 2:.1f}" y="{height - 12}" text-anchor="middle" font-size="13">lambda</text>',
        f'<text x="16" y="{mt + ph / 2:.1f}" text-anchor="middle" font-size="13" '
        f'transform="rotate(-90 16 {mt + ph / 2:.1f})">dimension bound</text>',
        f'<text x="{ml + pw / 2:.1f}" y="18" text-anchor="middle" font-size="13">n = {c.n}</text>',
    ]
    for i in range(5):
        y = i / 4
        lines.append(f'<text x="{ml - 6}" y="{Y(y) + 4:.1f}" text-anchor="end" font-size="11">{y:.2f}</text>')
        xv = x0 + (x1 - x0) * i / 4
        lines.append(f'<text x="{X(xv):.1f}" y="{mt + ph + 16}" text-anchor="middle" font-size="11">{xv:.3f}</text>')
    if c.tight_from is not None:
        tx = X(c.tight_from)
        lines.append(f'<rect x="{tx:.2f}" y="{mt}" width="{ml + pw - tx:.2f}" height="{ph}" fill="#eeeeee"/>')
        lines.append(f'<text x="{tx + 4:.2f}" y="{mt + 14}" font-size="11">tight from {c.tight_from}</text>')
    for idx, (name, color, get) in enumerate(_SERIES):
        segs, cur = [], []
        for p in c.points:
            v = get(p)
            if v is None:
                if cur:
                    segs.append(cur)
                cur = []
            else:
                cur.append(f"{X(p.lam):.2f},{Y(v):.2f}")
        if cur:
            segs.append(cur)
        for s in segs:
            lines.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{" ".join(s)}"/>')
        ly = mt + 10 + 18 * idx
        lines.append(f'<line x1="{width - mr + 10}" y1="{ly}" x2="{width - mr + 30}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        lines.append(f'<text x="{width - mr + 34}" y="{ly + 4}" font-size="11">{name}</text>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
