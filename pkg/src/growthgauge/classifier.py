"""Final verdicts, the multivariate reduction, and closed-form fixture oracles.

A function is a *polynomial-time candidate* when some derivative order is
bounded and decays on the probe domain, and *not polynomial time* when every
order up to ``n_max`` diverges.  For several variables each one is analysed
with the others pinned to constants; one non-polynomial dimension makes the
whole function non-polynomial.
"""

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
import math

from . import expr as E
from .boundedness import find_bounding_order
from .config import AnalysisConfig
from .errors import NoClosedForm, NonUnivariate, NoVariables, UnboundVariable
from .syntax import format_expr, parse

__all__ = [
    "Verdict", "Classification", "classify_univariate", "classify_multivariate",
    "classify", "FIXTURES", "fixture", "oracle_nth_derivative", "pochhammer",
    "pochhammer_side_condition", "EXPECTED_PARTITION",
]


class Verdict(str, Enum):
    CANDIDATE = "PolynomialTimeCandidate"
    NOT_POLYNOMIAL = "NotPolynomialTime"
    INCONCLUSIVE = "Inconclusive"

    @property
    def exit_code(self):
        return {"PolynomialTimeCandidate": 0, "NotPolynomialTime": 1, "Inconclusive": 2}[self.value]


@dataclass
class Classification:
    verdict: Verdict
    degree_estimate: int = None
    per_variable: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    def to_json(self):
        return {
            "verdict": self.verdict.value,
            "degree_estimate": self.degree_estimate,
            "per_variable": {k: r.to_json() for k, r in self.per_variable.items()},
            "notes": list(self.notes),
        }


_EVIDENCE_NOTE = ("numerical evidence only: derivative bounds come from grid probing, "
                  "not from a proof")
_DEGREE_NOTE = ("degree_estimate is the first derivative order that is bounded and decays; "
                "f^(n) -> 0 implies f = o(x^n)")

FIXTURES = {
    "exp_x": "exp(x)",
    "two_pow_x": "2^x",
    "two_pow_sqrt_x": "2^sqrt(x)",
    "x_pow_log2_x": "x^log2(x)",
    "x_log_x": "x*log(x)",
    "two_pow_log2_x": "2^log2(x)",
    "two_pow_log2_log2_x": "2^log2(log2(x))",
}

EXPECTED_PARTITION = {
    "exp_x": Verdict.NOT_POLYNOMIAL,
    "two_pow_x": Verdict.NOT_POLYNOMIAL,
    "two_pow_sqrt_x": Verdict.NOT_POLYNOMIAL,
    "x_pow_log2_x": Verdict.NOT_POLYNOMIAL,
    "x_log_x": Verdict.CANDIDATE,
    "two_pow_log2_x": Verdict.CANDIDATE,
    "two_pow_log2_log2_x": Verdict.CANDIDATE,
}

_FIXTURE_NOTES = {
    "two_pow_sqrt_x": ("2^sqrt(x) grows slower than any exponential; its label follows "
                       "mechanically from the unbounded derivatives and is not a proven "
                       "lower bound"),
}


def fixture(fid):
    return parse(FIXTURES[fid])


def _matching_fixture(f):
    for fid, text in FIXTURES.items():
        if parse(text) == f:
            return fid
    return None


def classify_univariate(f, v="x", config=None):
    config = config or AnalysisConfig()
    extra = f.free - {v}
    if extra:
        raise NonUnivariate("expected only %s free, found %s" % (v, ", ".join(sorted(extra))))
    report = find_bounding_order(f, v, config.x_min, config.n_max, config)
    if report.bounding_order is not None:
        verdict = Verdict.CANDIDATE
    elif report.all_unbounded(config.n_max):
        verdict = Verdict.NOT_POLYNOMIAL
    else:
        verdict = Verdict.INCONCLUSIVE
    notes = [_EVIDENCE_NOTE]
    if verdict is Verdict.CANDIDATE:
        notes.append(_DEGREE_NOTE)
    if report.alternating_sign_note:
        notes.append("derivative signs at x_min alternate across consecutive unbounded orders")
    fid = _matching_fixture(f)
    if fid in _FIXTURE_NOTES:
        notes.append(_FIXTURE_NOTES[fid])
    return Classification(verdict, report.bounding_order, {v: report}, notes)


def classify_multivariate(f, variables, config=None):
    """Classify each variable with the others fixed at every ``config.fix_values`` constant."""
    config = config or AnalysisConfig()
    variables = list(variables)
    if not variables:
        raise NoVariables("at least one variable is required")
    missing = f.free - set(variables)
    if missing:
        raise UnboundVariable("free variable(s) not listed: %s" % ", ".join(sorted(missing)))
    if len(variables) == 1:
        return classify_univariate(f, variables[0], config)

    per_var, verdicts, degrees = {}, {}, []
    notes = [_EVIDENCE_NOTE]
    for v in variables:
        results = []
        for c in config.fix_values:
            g = f
            for other in variables:
                if other != v:
                    g = E.substitute(g, other, E.const(c))
            results.append(classify_univariate(g, v, config))
        per_var[v] = results[0].per_variable[v]
        kinds = {r.verdict for r in results}
        if len(kinds) == 1:
            verdicts[v] = kinds.pop()
        else:
            verdicts[v] = Verdict.INCONCLUSIVE
            notes.append("%s: verdict depends on the fixed values %s"
                         % (v, ", ".join(str(c) for c in config.fix_values)))
        degrees.extend(r.degree_estimate for r in results if r.degree_estimate is not None)

    if any(k is Verdict.NOT_POLYNOMIAL for k in verdicts.values()):
        verdict = Verdict.NOT_POLYNOMIAL
    elif all(k is Verdict.CANDIDATE for k in verdicts.values()):
        verdict = Verdict.CANDIDATE
        notes.append(_DEGREE_NOTE)
    else:
        verdict = Verdict.INCONCLUSIVE
    degree = max(degrees) if verdict is Verdict.CANDIDATE else None
    return Classification(verdict, degree, per_var, notes)


def classify(f, variables=None, config=None):
    """Dispatch on the number of variables; ``f`` may be text or a tree."""
    if isinstance(f, str):
        f = parse(f)
    if variables is None:
        variables = sorted(f.free) or ["x"]
    return classify_multivariate(f, variables, config)


# ---------------------------------------------------------------------------
# closed-form oracles
# ---------------------------------------------------------------------------

def pochhammer(xi, n):
    """Rising factorial ``xi (xi+1) ... (xi+n-1)``; 1 for ``n == 0``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    out = 1
    for k in range(n):
        out = out * (xi + k)
    return out


def pochhammer_side_condition(x, tol=1e-6):
    """True when ``x ln 2`` and ``ln x`` are separated by more than ``tol``."""
    return abs(x * math.log(2) - math.log(x)) > tol


_X = E.Var("x")
_LN2 = E.ln(E.const(2))


def _closed_forms():
    x = _X
    L = E.log2(x)
    return {
        "exp_x": (lambda n: n >= 0, lambda n: E.exp(x)),
        "two_pow_x": (lambda n: n >= 0,
                      lambda n: E.power(E.const(2), x) * _LN2 ** n),
        "two_pow_sqrt_x": (lambda n: n == 1,
                           lambda n: E.power(E.const(2), E.sqrt(x) - 1) * _LN2 / E.sqrt(x)),
        "x_pow_log2_x": (lambda n: n >= 0,
                         lambda n: E.const((-1) ** n) * E.power(x, L - n)
                         * pochhammer(-L, n)),
        "x_log_x": (lambda n: n in (1, 2),
                    lambda n: E.ln(x) + x * (1 / x) if n == 1 else 1 / x),
        "two_pow_log2_x": (lambda n: n == 1, lambda n: E.ONE),
        "two_pow_log2_log2_x": (lambda n: n >= 1,
                                lambda n: E.const((-1) ** (n - 1) * math.factorial(n - 1))
                                / (E.power(x, E.const(n)) * _LN2)),
    }


def oracle_nth_derivative(fid, n):
    """Reference closed form of the n-th derivative of fixture ``fid``."""
    forms = _closed_forms()
    if fid not in forms:
        raise NoClosedForm("unknown fixture %r" % fid)
    available, build = forms[fid]
    if not available(n):
        raise NoClosedForm("no closed form for %s at order %d" % (fid, n))
    return build(n)
