"""Differentiation, evaluation, a finite-difference oracle and limit probing.

Derivatives are built through the canonicalizing constructors of
:mod:`growthgauge.expr`, so every result is already in canonical form.
Products are expanded over sums only where the derivative introduces the
sum (the differentiated factor or the chain-rule factor); that keeps
repeated derivatives in sum-of-monomials shape instead of nesting product
rules inside each other.

Evaluation runs on mpmath at a configurable precision.  Results that
overflow a double come back as ``inf``; they are not errors.
"""

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
import math

import mpmath

from . import expr as E
from .config import DEFAULT_PRECISION, ProbeConfig
from .errors import (DomainError, ExpressionTooLarge, NonUnivariate,
                     OrderTooLarge, UnboundVariable)

__all__ = [
    "differentiate", "derivatives", "nth_derivative", "evaluate", "evaluate_mpf",
    "Evaluator", "finite_difference", "limit_probe", "Limit", "LimitVerdict",
    "N_MAX", "MAX_NODES",
]

N_MAX = 10
MAX_NODES = 100_000
# exp(u) for |u| beyond this is reported as inf / 0 without computing it
_EXP_CAP = 1e18


# ---------------------------------------------------------------------------
# differentiation
# ---------------------------------------------------------------------------

def _terms(e):
    return e.args if isinstance(e, E.Add) else (e,)


def _expand(*factors):
    """Product of ``factors`` distributed over any top-level sums among them."""
    partial = [()]
    for f in factors:
        partial = [p + (t,) for p in partial for t in _terms(f)]
    return [E.mul(*p) for p in partial]


def differentiate(e, v):
    """Derivative of ``e`` with respect to the variable named ``v``."""
    memo = {}

    def d(node):
        if v not in node.free:
            return E.ZERO
        got = memo.get(node)
        if got is not None:
            return got
        if isinstance(node, E.Var):
            out = E.ONE
        elif isinstance(node, E.Add):
            out = E.add(*[d(a) for a in node.args])
        elif isinstance(node, E.Mul):
            terms = []
            args = node.args
            for i, f in enumerate(args):
                df = d(f)
                if df == E.ZERO:
                    continue
                others = args[:i] + args[i + 1:]
                terms.extend(E.mul(*others, t) for t in _terms(df))
            out = E.add(*terms)
        elif isinstance(node, E.Pow):
            u, w = node.base, node.exp
            if v not in w.free:
                # power rule; avoids routing x**(1/2) through ln(x)
                out = E.add(*_expand(w, E.power(u, E.add(w, E.MINUS_ONE)), d(u)))
            elif v not in u.free:
                out = E.add(*_expand(node, E.ln(u), d(w)))
            else:
                out = E.add(*_expand(node, d(w), E.ln(u)),
                            *_expand(node, w, d(u), E.power(u, E.MINUS_ONE)))
        elif isinstance(node, E.Exp):
            out = E.add(*_expand(node, d(node.arg)))
        elif isinstance(node, E.Ln):
            out = E.add(*_expand(d(node.arg), E.power(node.arg, E.MINUS_ONE)))
        else:
            raise TypeError("cannot differentiate %r" % (node,))
        memo[node] = out
        return out

    return d(e)


def derivatives(e, v, n, max_nodes=MAX_NODES):
    """Yield ``e, e', ..., e^(n)``; raise ExpressionTooLarge past ``max_nodes``."""
    cur = E.canonicalize(e)
    yield cur
    for k in range(1, n + 1):
        cur = differentiate(cur, v)
        if cur.size > max_nodes:
            raise ExpressionTooLarge(
                "derivative of order %d has %d nodes (limit %d)" % (k, cur.size, max_nodes))
        yield cur


def nth_derivative(e, v, n, n_max=N_MAX, max_nodes=MAX_NODES):
    if n < 0:
        raise ValueError("derivative order must be non-negative")
    if n > n_max:
        raise OrderTooLarge("order %d exceeds n_max=%d" % (n, n_max))
    out = None
    for out in derivatives(e, v, n, max_nodes):
        pass
    return out


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _context(bits):
    ctx = mpmath.MPContext()
    ctx.prec = bits
    return ctx


def _to_mpf(ctx, value):
    if isinstance(value, Fraction):
        return ctx.mpf(value.numerator) / value.denominator
    if isinstance(value, int):
        return ctx.mpf(value)
    return ctx.mpf(value)


class Evaluator:
    """Evaluate one expression repeatedly at a fixed precision.

    Constant subtrees are evaluated once and reused across calls.
    """

    def __init__(self, e, precision=DEFAULT_PRECISION):
        self.expr = e
        self.ctx = _context(precision)
        self._const_cache = {}

    def __call__(self, bindings):
        ctx = self.ctx
        env = {k: _to_mpf(ctx, val) for k, val in bindings.items()}
        missing = self.expr.free - env.keys()
        if missing:
            raise UnboundVariable("unbound variable(s): %s" % ", ".join(sorted(missing)))
        return self._eval(self.expr, env, {})

    def _eval(self, e, env, memo):
        if not e.free:
            got = self._const_cache.get(e)
            if got is None:
                got = self._compute(e, env, memo)
                self._const_cache[e] = got
            return got
        got = memo.get(e)
        if got is None:
            got = self._compute(e, env, memo)
            memo[e] = got
        return got

    def _compute(self, e, env, memo):
        ctx = self.ctx
        if isinstance(e, E.Const):
            return _to_mpf(ctx, e.value)
        if isinstance(e, E.Var):
            return env[e.name]
        if isinstance(e, E.Add):
            return ctx.fsum(self._eval(a, env, memo) for a in e.args)
        if isinstance(e, E.Mul):
            out = ctx.one
            for a in e.args:
                out = out * self._eval(a, env, memo)
            return out
        if isinstance(e, E.Exp):
            return self._exp(self._eval(e.arg, env, memo))
        if isinstance(e, E.Ln):
            a = self._eval(e.arg, env, memo)
            if not a > 0:
                raise DomainError("ln of non-positive value %s" % ctx.nstr(a, 8))
            return ctx.ln(a)
        if isinstance(e, E.Pow):
            b = self._eval(e.base, env, memo)
            if isinstance(e.exp, E.Const) and e.exp.value.denominator == 1:
                k = e.exp.value.numerator
                if b == 0 and k < 0:
                    raise DomainError("division by zero")
                return b ** k
            w = self._eval(e.exp, env, memo)
            if b < 0:
                raise DomainError("negative base %s with non-integer exponent"
                                  % ctx.nstr(b, 8))
            if b == 0:
                if w > 0:
                    return ctx.zero
                raise DomainError("zero base with non-positive exponent")
            if ctx.isinf(b):
                return b if w > 0 else (ctx.zero if w < 0 else ctx.one)
            return self._exp(w * ctx.ln(b))
        raise TypeError("cannot evaluate %r" % (e,))

    def _exp(self, a):
        ctx = self.ctx
        if ctx.isnan(a):
            return a
        if a > _EXP_CAP:
            return ctx.inf
        if a < -_EXP_CAP:
            return ctx.zero
        return ctx.exp(a)


def evaluate_mpf(e, bindings, precision=DEFAULT_PRECISION):
    return Evaluator(e, precision)(bindings)


def evaluate(e, bindings, precision=DEFAULT_PRECISION):
    """Value of ``e`` under ``bindings``, computed at ``precision`` bits.

    Returns a float; overflow gives ``inf``.  Raises UnboundVariable or
    DomainError (ln of a non-positive value, negative base with non-integer
    exponent, division by zero).
    """
    return float(evaluate_mpf(e, bindings, precision))


# ---------------------------------------------------------------------------
# finite differences
# ---------------------------------------------------------------------------

def finite_difference(e, v, n, x, h, precision=256):
    """Central-difference estimate of the n-th derivative at ``x``.

    Uses the order-n central stencil ``sum_k (-1)^k C(n,k) f(x + (n/2 - k) h) / h^n``
    (error O(h^2)).  Precision doubles, up to 1024 bits, while the stencil sum
    has cancelled more than half of the working bits.
    """
    if not 0 <= n <= 4:
        raise ValueError("finite_difference supports orders 0..4, got %d" % n)
    bits = max(precision, 64)
    xq = Fraction(x) if not isinstance(x, Fraction) else x
    hq = Fraction(h) if not isinstance(h, Fraction) else h
    while True:
        ev = Evaluator(e, bits)
        ctx = ev.ctx
        total = ctx.zero
        scale = ctx.zero
        for k in range(n + 1):
            c = (-1) ** k * math.comb(n, k)
            point = xq + (Fraction(n, 2) - k) * hq
            fk = ev({v: point})
            total += c * fk
            scale += abs(c * fk)
        cancelled = scale != 0 and abs(total) < scale * ctx.ldexp(1, -(bits // 2))
        if not cancelled or bits >= 1024 or ctx.isinf(scale):
            break
        bits = min(bits * 2, 1024)
    return float(total / _to_mpf(ctx, hq) ** n)


# ---------------------------------------------------------------------------
# limits at +infinity
# ---------------------------------------------------------------------------

class Limit(str, Enum):
    FINITE = "finite"
    PLUS_INFINITY = "plus_infinity"
    MINUS_INFINITY = "minus_infinity"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class LimitVerdict:
    kind: Limit
    value: float = None
    trace: tuple = ()

    @property
    def is_infinite(self):
        return self.kind in (Limit.PLUS_INFINITY, Limit.MINUS_INFINITY)

    def to_json(self):
        return {"kind": self.kind.value, "value": _json_float(self.value),
                "trace": [[x, _json_float(y)] for x, y in self.trace]}


def _json_float(v):
    if v is None:
        return None
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    if math.isnan(v):
        return "nan"
    return v


def judge_tail(values, config):
    """Classify the tail of a probe sequence (shared with the boundedness scan)."""
    w = config.window
    tail = values[-w:]
    finite = [abs(y) for y in values if math.isfinite(y)]
    scale = max(finite) if finite else 0.0
    if all(math.isfinite(y) for y in tail):
        tol = config.stabilize_tol * scale
        if all(abs(b - a) <= tol for a, b in zip(tail, tail[1:])):
            last = tail[-1]
            return Limit.FINITE, (0.0 if abs(last) <= tol else last)
    signs = {math.copysign(1.0, y) for y in tail if y != 0 and not math.isnan(y)}
    if len(signs) == 1 and all(y != 0 and not math.isnan(y) for y in tail):
        sign = signs.pop()
        kind = Limit.PLUS_INFINITY if sign > 0 else Limit.MINUS_INFINITY
        mags = [abs(y) for y in tail]
        if mags[-1] >= config.divergence_threshold:
            return kind, math.copysign(math.inf, sign)
        monotone = all(b >= a for a, b in zip(mags, mags[1:]))
        if monotone and any(b > a for a, b in zip(mags, mags[1:])):
            return kind, math.copysign(math.inf, sign)
    return Limit.INCONCLUSIVE, None


def limit_probe(e, v, config=None):
    """Estimate ``lim_{v -> inf} e`` by evaluating on a geometric grid."""
    config = config or ProbeConfig()
    extra = e.free - {v}
    if extra:
        raise NonUnivariate("limit_probe needs %s as the only free variable, found %s"
                            % (v, ", ".join(sorted(extra))))
    ev = Evaluator(e, config.precision)
    trace = []
    for x in config.points():
        try:
            y = float(ev({v: Fraction(x)}))
        except DomainError as err:
            raise DomainError("%s at %s=%r" % (err, v, x), point=x) from None
        trace.append((x, y))
    kind, value = judge_tail([y for _, y in trace], config)
    return LimitVerdict(kind, value, tuple(trace))
