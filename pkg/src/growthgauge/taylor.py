"""Taylor polynomials, remainder bounds and radius-of-convergence estimates.

Coefficients come straight from the definition, ``a_k = f^(k)(x0) / k!``:
each derivative is differentiated symbolically, the center is substituted
exactly, and the result is kept as a ``Fraction`` whenever it folds to a
rational (``exp`` at 0 gives exactly ``1/k!``).  Everything else is an mpmath
number at the working precision.
"""

from dataclasses import dataclass
from fractions import Fraction
import math

from . import expr as E
from .calculus import Evaluator, _context, _to_mpf, derivatives, evaluate_mpf
from .config import DEFAULT_PRECISION
from .errors import DomainError, NegativeM, OrderTooLarge

__all__ = [
    "TaylorSeries", "RadiusEstimate", "RadiusConfig", "taylor_series",
    "eval_truncated", "lagrange_bound", "empirical_remainder", "radius_ratio",
    "radius_root", "paper_xlogx_series_ratio", "grid_sup", "remainder_table",
    "TAYLOR_N_MAX",
]

TAYLOR_N_MAX = 64


@dataclass(frozen=True)
class TaylorSeries:
    """Truncated series ``sum a_k (x - center)^k`` for ``k = 0..order``."""

    center: Fraction
    order: int
    coefficients: tuple
    source: E.Expr
    variable: str = "x"
    precision: int = DEFAULT_PRECISION

    def __post_init__(self):
        if len(self.coefficients) != self.order + 1:
            raise ValueError("expected %d coefficients, got %d"
                             % (self.order + 1, len(self.coefficients)))

    def is_exact(self, k):
        return isinstance(self.coefficients[k], Fraction)

    def float_coefficients(self):
        return [float(a) for a in self.coefficients]


def taylor_series(f, v, x0, n, n_max=TAYLOR_N_MAX, precision=DEFAULT_PRECISION):
    if n < 0:
        raise ValueError("order must be non-negative")
    if n > n_max:
        raise OrderTooLarge("order %d exceeds n_max=%d" % (n, n_max))
    center = Fraction(x0)
    at = E.Const(center)
    coefs = []
    for k, d in enumerate(derivatives(f, v, n)):
        value = E.substitute(d, v, at)
        if isinstance(value, E.Const):
            coefs.append(value.value / math.factorial(k))
            continue
        try:
            coefs.append(evaluate_mpf(value, {}, precision) / math.factorial(k))
        except DomainError as err:
            raise DomainError("order-%d derivative undefined at %s=%s: %s"
                              % (k, v, center, err), point=float(center)) from None
    return TaylorSeries(center, n, tuple(coefs), E.canonicalize(f), v, precision)


def _truncated_mpf(s, x):
    ctx = _context(s.precision)
    t = _to_mpf(ctx, Fraction(x)) - _to_mpf(ctx, s.center)
    acc = ctx.zero
    for a in reversed(s.coefficients):
        acc = acc * t + _to_mpf(ctx, a)
    return acc


def eval_truncated(s, x):
    """Horner evaluation of the Taylor polynomial at ``x``."""
    return float(_truncated_mpf(s, x))


def lagrange_bound(M, n, x, x0):
    """``M |x - x0|^(n+1) / (n+1)!``, the remainder bound when ``|f^(n+1)| <= M``."""
    if M < 0:
        raise NegativeM("M must be non-negative, got %r" % (M,))
    return M * abs(x - x0) ** (n + 1) / math.factorial(n + 1)


def empirical_remainder(f, s, x):
    """``|f(x) - T_n(x)|`` computed at the series' working precision."""
    fx = evaluate_mpf(f, {s.variable: Fraction(x)}, s.precision)
    return float(abs(fx - _truncated_mpf(s, x)))


def grid_sup(e, v, lo, hi, num=65, precision=DEFAULT_PRECISION):
    """Max of ``|e|`` over ``num`` evenly spaced points of ``[lo, hi]``."""
    ev = Evaluator(e, precision)
    lo, hi = Fraction(lo), Fraction(hi)
    best = 0.0
    for i in range(num):
        x = lo + (hi - lo) * i / (num - 1) if num > 1 else lo
        best = max(best, abs(float(ev({v: x}))))
    return best


def remainder_table(f, s, points, M=None, num=65):
    """Rows ``(x, f(x), T_n(x), |R_n(x)|, bound)`` for plotting or CSV export.

    Without an explicit ``M`` the bound uses the grid sup of ``|f^(n+1)|`` over
    the hull of the center and all requested points.
    """
    points = [Fraction(p) for p in points]
    if M is None and points:
        higher = None
        for higher in derivatives(f, s.variable, s.order + 1):
            pass
        lo = min(points + [s.center])
        hi = max(points + [s.center])
        M = grid_sup(higher, s.variable, lo, hi, num, s.precision)
    rows = []
    for x in points:
        fx = float(evaluate_mpf(f, {s.variable: x}, s.precision))
        rows.append({
            "x": float(x),
            "f": fx,
            "T": eval_truncated(s, x),
            "R": empirical_remainder(f, s, x),
            "bound": lagrange_bound(M, s.order, float(x), float(s.center)),
        })
    return rows, M


# ---------------------------------------------------------------------------
# radius of convergence
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RadiusConfig:
    stabilize_tol: float = 1e-3
    window: int = 5
    monotone_window: int = 10
    divergence_threshold: float = 1e6
    # growth from the start of the tail half to its end that counts as unbounded
    growth_factor: float = 1.5


@dataclass(frozen=True)
class RadiusEstimate:
    method: str
    sequence: tuple  # (k, r_k) pairs
    verdict: str  # "infinite" | "finite" | "inconclusive"
    value: float = None
    skipped_indices: tuple = ()

    def values(self):
        return [r for _, r in self.sequence]

    def to_json(self):
        return {
            "method": self.method,
            "verdict": self.verdict,
            "value": self.value,
            "sequence": [[k, float(r)] for k, r in self.sequence],
            "skipped_indices": list(self.skipped_indices),
        }


def _verdict(values, cfg, finite_value):
    if len(values) < cfg.window:
        return "inconclusive", None
    vals = [float(r) for r in values]
    last = vals[-cfg.window:]
    ref = abs(last[-1])
    if ref > 0 and max(last) - min(last) <= cfg.stabilize_tol * ref:
        return "finite", finite_value(vals)
    mono = vals[-cfg.monotone_window:]
    increasing = all(b >= a for a, b in zip(mono, mono[1:])) and mono[-1] > mono[0]
    if increasing:
        mid = vals[len(vals) // 2]
        if vals[-1] >= cfg.divergence_threshold or (mid > 0 and vals[-1] / mid >= cfg.growth_factor):
            return "infinite", math.inf
    return "inconclusive", None


def _check_order(s):
    if s.order < 4:
        raise ValueError("radius estimates need order >= 4, got %d" % s.order)


def _tail_mostly_skipped(skipped, n):
    tail_start = n // 2
    tail = [k for k in skipped if k >= tail_start]
    return len(tail) > (n - tail_start) / 2


def radius_ratio(s, config=None):
    """Ratio-test sequence ``|a_k / a_(k+1)|`` and its verdict.

    Indices where either coefficient vanishes are skipped and recorded.
    """
    _check_order(s)
    cfg = config or RadiusConfig()
    a = s.coefficients
    seq, skipped = [], []
    for k in range(s.order):
        if a[k] == 0 or a[k + 1] == 0:
            skipped.append(k)
            continue
        if isinstance(a[k], Fraction) and isinstance(a[k + 1], Fraction):
            seq.append((k, abs(a[k] / a[k + 1])))
        else:
            ctx = _context(s.precision)
            seq.append((k, abs(_to_mpf(ctx, a[k]) / _to_mpf(ctx, a[k + 1]))))
    if not seq or _tail_mostly_skipped(skipped, s.order):
        return RadiusEstimate("ratio", tuple(seq), "inconclusive", None, tuple(skipped))
    verdict, value = _verdict([r for _, r in seq], cfg, lambda vals: vals[-1])
    return RadiusEstimate("ratio", tuple(seq), verdict, value, tuple(skipped))


def radius_root(s, config=None):
    """Root-test sequence ``|a_k|^(-1/k)``; lim inf taken over the tail half."""
    _check_order(s)
    cfg = config or RadiusConfig()
    ctx = _context(s.precision)
    seq, skipped = [], []
    for k in range(1, s.order + 1):
        ak = s.coefficients[k]
        if ak == 0:
            skipped.append(k)
            continue
        seq.append((k, ctx.power(abs(_to_mpf(ctx, ak)), ctx.mpf(-1) / k)))
    if not seq or _tail_mostly_skipped(skipped, s.order):
        return RadiusEstimate("root", tuple(seq), "inconclusive", None, tuple(skipped))

    def liminf(vals):
        return min(vals[len(vals) // 2:])

    verdict, value = _verdict([r for _, r in seq], cfg, liminf)
    seq = tuple((k, float(r)) for k, r in seq)
    return RadiusEstimate("root", seq, verdict, value, tuple(skipped))


def paper_xlogx_series_ratio(x, n):
    """Consecutive-term ratio ``(n+1) / (n (x-1)/x)`` of the log-series form of x ln x.

    That series, ``x ln x = sum_{n>=1} x ((x-1)/x)^n / n``, needs ``x > 1/2``.
    """
    if x <= 0.5:
        raise DomainError("the expansion requires x > 1/2, got %r" % (x,), point=x)
    if n < 1:
        raise ValueError("term index starts at 1")
    q = (x - 1) / x
    if q == 0:
        return math.inf
    return abs((n + 1) / (n * q))
