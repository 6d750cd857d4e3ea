"""Derivative-boundedness scan on ``[x_min, inf)``.

For each order ``n`` the derivative is sampled on a geometric sup grid that
starts at ``x_min`` and on the limit-probe grid.  An order is *bounded* when
its tail settles to a finite value and the grid sup is finite; it is
*unbounded* when the tail diverges or the grid sup overflows.

The bounding order is the first order whose derivative is bounded and decays
to zero at infinity.  That choice gives ``y**2 -> 3`` and ``x -> 2``, and
``n`` then serves as a polynomial degree: ``f^(n) -> 0`` implies
``f = o(x**n)``.  All verdicts are numerical evidence, not proofs.
"""

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
import math

from .calculus import Evaluator, Limit, LimitVerdict, derivatives, judge_tail, _json_float
from .config import AnalysisConfig
from .errors import DomainError, GrowthGaugeError, LimitExceeded, NonUnivariate
from .syntax import format_expr

__all__ = ["Status", "OrderVerdict", "BoundednessReport", "order_verdict",
           "find_bounding_order", "sup_grid", "check_domain"]


class Status(str, Enum):
    BOUNDED = "bounded"
    UNBOUNDED = "unbounded"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class OrderVerdict:
    order: int
    sup_estimate: float
    tail: LimitVerdict
    status: Status
    M: float = None
    # sign of f^(n) at x_min, used for the alternating-sign observation
    sign_at_start: int = 0
    reason: str = ""

    @property
    def vanishing(self):
        return self.status is Status.BOUNDED and self.tail.value == 0

    def to_json(self):
        return {
            "n": self.order,
            "sup": _json_float(self.sup_estimate),
            "tail": self.tail.to_json() if self.tail else None,
            "status": self.status.value,
            "M": _json_float(self.M),
            "vanishing": self.vanishing,
            "reason": self.reason,
        }


@dataclass
class BoundednessReport:
    function: object
    variable: str
    x_min: float
    verdicts: list
    bounding_order: int = None
    alternating_sign_note: bool = False
    probe_end: float = None
    numerical_evidence_only: bool = True

    def all_unbounded(self, n_max):
        return len(self.verdicts) == n_max and all(
            v.status is Status.UNBOUNDED for v in self.verdicts)

    def to_json(self):
        return {
            "function": format_expr(self.function),
            "variable": self.variable,
            "x_min": self.x_min,
            "domain": [self.x_min, self.probe_end],
            "verdicts": [v.to_json() for v in self.verdicts],
            "bounding_order": self.bounding_order,
            "flags": {
                "alternating_sign": self.alternating_sign_note,
                "numerical_evidence_only": self.numerical_evidence_only,
            },
        }


def sup_grid(x_min, config):
    """Geometric grid from ``x_min`` to the last limit probe, ``sup_density`` points per factor."""
    probe = config.probe
    end = probe.start * probe.factor ** probe.steps
    ratio = probe.factor ** (1.0 / config.sup_density)
    count = max(1, math.ceil(math.log(end / x_min) / math.log(ratio)))
    return [x_min * ratio ** j for j in range(count + 1)]


def _sign(y):
    if y > 0:
        return 1
    if y < 0:
        return -1
    return 0


def _evaluator_at(e, v, precision):
    ev = Evaluator(e, precision)

    def at(x):
        try:
            return float(ev({v: Fraction(x)}))
        except DomainError as err:
            raise DomainError("%s at %s=%r" % (err, v, x), point=x) from None
    return at


def check_domain(f, v, x_min, config):
    """Raise DomainError unless ``f`` itself evaluates on the whole sup grid.

    A derivative can be finite where ``f`` is undefined (``ln(x - 2)`` below 2).
    """
    at = _evaluator_at(f, v, config.probe.precision)
    for x in sup_grid(x_min, config):
        at(x)


def order_verdict(f, v, n, x_min=None, config=None, derivative=None):
    """Boundedness verdict for the n-th derivative of ``f`` on ``[x_min, inf)``.

    ``derivative`` may pass a precomputed ``f^(n)``; the domain check on ``f``
    is then left to the caller.
    """
    config = config or AnalysisConfig()
    x_min = config.x_min if x_min is None else x_min
    if n < 1:
        raise ValueError("order must be at least 1")
    if derivative is None:
        check_domain(f, v, x_min, config)
        for derivative in derivatives(f, v, n):
            pass
    extra = derivative.free - {v}
    if extra:
        raise NonUnivariate("free variables other than %s: %s" % (v, ", ".join(sorted(extra))))
    at = _evaluator_at(derivative, v, config.probe.precision)
    grid_values = [at(x) for x in sup_grid(x_min, config)]
    sign = _sign(grid_values[0])
    trace = tuple((x, at(x)) for x in config.probe.points())
    kind, value = judge_tail([y for _, y in trace], config.probe)
    tail = LimitVerdict(kind, value, trace)
    mags = [abs(y) for y in grid_values] + [abs(y) for _, y in trace]
    overflow = any(math.isinf(m) for m in mags)
    sup = max((m for m in mags if not math.isnan(m)), default=math.nan)
    if tail.is_infinite or overflow:
        return OrderVerdict(n, sup, tail, Status.UNBOUNDED, None, sign)
    if kind is Limit.FINITE and math.isfinite(sup):
        M = max(sup, abs(value)) * config.safety_factor
        return OrderVerdict(n, sup, tail, Status.BOUNDED, M, sign)
    return OrderVerdict(n, sup, tail, Status.INCONCLUSIVE, None, sign,
                        "tail neither settled nor diverged")


def _alternates(verdicts, run=3):
    streak = 1
    for prev, cur in zip(verdicts, verdicts[1:]):
        ok = (prev.status is Status.UNBOUNDED and cur.status is Status.UNBOUNDED
              and prev.sign_at_start * cur.sign_at_start < 0)
        streak = streak + 1 if ok else 1
        if streak >= run:
            return True
    return False


def find_bounding_order(f, v, x_min=None, n_max=None, config=None):
    """Scan orders ``1..n_max``; stop at the first bounded, decaying derivative.

    With ``config.full`` set every order is computed regardless.  Errors at an
    order are recorded as an inconclusive verdict carrying the reason.
    """
    config = config or AnalysisConfig()
    x_min = config.x_min if x_min is None else x_min
    n_max = config.n_max if n_max is None else n_max
    extra = f.free - {v}
    if extra:
        raise NonUnivariate("free variables other than %s: %s" % (v, ", ".join(sorted(extra))))
    verdicts = []
    bounding = None
    probe = config.probe
    try:
        check_domain(f, v, x_min, config)
    except DomainError as err:
        reason = "DomainError: function undefined on the domain: %s" % err
        verdicts = [OrderVerdict(n, math.nan, None, Status.INCONCLUSIVE, reason=reason)
                    for n in range(1, n_max + 1)]
        return BoundednessReport(f, v, x_min, verdicts,
                                 probe_end=probe.start * probe.factor ** probe.steps)
    gen = derivatives(f, v, n_max)
    next(gen)
    for n in range(1, n_max + 1):
        try:
            d = next(gen)
            verdict = order_verdict(f, v, n, x_min, config, derivative=d)
        except NonUnivariate:
            raise
        except GrowthGaugeError as err:
            verdicts.append(OrderVerdict(n, math.nan, None, Status.INCONCLUSIVE,
                                         reason="%s: %s" % (type(err).__name__, err)))
            if isinstance(err, LimitExceeded):
                break
            continue
        verdicts.append(verdict)
        if bounding is None and verdict.vanishing:
            bounding = n
            if not config.full:
                break
    return BoundednessReport(
        function=f, variable=v, x_min=x_min, verdicts=verdicts,
        bounding_order=bounding, alternating_sign_note=_alternates(verdicts),
        probe_end=probe.start * probe.factor ** probe.steps)
