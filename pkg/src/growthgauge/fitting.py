"""Empirical pathway: runtime samples -> best-fit growth family -> verdict.

Each family ``c * phi(x)`` is fitted in log space, where the scale enters
linearly: ``log c = mean(log s - log phi(x))``.  For ``x_pow_a`` the exponent
enters linearly too, so it is the least-squares slope of ``log s`` against
``log x`` clamped to ``[0.5, 8]``; the objective is a convex quadratic in ``a``,
so clamping gives the constrained optimum.  Fits are ranked by log-space RMSE.
Residuals under ``1e-9`` count as exact ties, and ties go to the family with
fewer parameters.
"""

import csv
import io
import json
import math
from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from . import expr as E
from .classifier import classify_univariate
from .config import AnalysisConfig
from .errors import (InsufficientRange, NonPositiveValue, SampleParseError,
                     TooFewSamples)
from .syntax import format_expr

__all__ = ["RuntimeSample", "ModelFit", "FAMILIES", "load_samples", "fit_models",
           "classify_empirical", "family_expr", "MIN_SAMPLES"]

MIN_SAMPLES = 5
MIN_RANGE = 4.0
A_BOUNDS = (0.5, 8.0)
_TIE = 1e-9
_NEAR_TIE = 0.10


@dataclass(frozen=True)
class RuntimeSample:
    size: int
    seconds: float


@dataclass(frozen=True)
class ModelFit:
    family: str
    scale: float
    shape: float
    residual: float
    expr: E.Expr
    log_scale: float = 0.0

    def to_json(self):
        return {
            "family": self.family,
            "scale": self.scale,
            "shape": self.shape,
            "residual": self.residual,
            "expr": format_expr(self.expr),
        }


# ---------------------------------------------------------------------------
# loading
# ---------------------------------------------------------------------------

def _read_text(source):
    if isinstance(source, bytes):
        return source.decode("utf-8")
    if isinstance(source, str):
        return source
    data = source.read()
    return data.decode("utf-8") if isinstance(data, bytes) else data


def _size(raw, line):
    try:
        value = float(raw)
    except (TypeError, ValueError):
        raise SampleParseError("size %r is not a number" % (raw,), line) from None
    if not math.isfinite(value) or value != int(value):
        raise SampleParseError("size %r is not an integer" % (raw,), line)
    if value < 1:
        raise NonPositiveValue("size must be a positive integer, got %r" % (raw,), line)
    return int(value)


def _seconds(raw, line):
    try:
        value = float(raw)
    except (TypeError, ValueError):
        raise SampleParseError("seconds %r is not a number" % (raw,), line) from None
    if not math.isfinite(value):
        raise SampleParseError("seconds %r is not finite" % (raw,), line)
    if value <= 0:
        raise NonPositiveValue("seconds must be positive, got %r" % (raw,), line)
    return value


def _rows_csv(text):
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or [h.strip() for h in header] != ["size", "seconds"]:
        raise SampleParseError("header must be 'size,seconds'", 1)
    for row in reader:
        if not row or all(not cell.strip() for cell in row):
            continue
        line = reader.line_num
        if len(row) != 2:
            raise SampleParseError("expected 2 columns, got %d" % len(row), line)
        yield _size(row[0].strip(), line), _seconds(row[1].strip(), line)


def _rows_json(text):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        raise SampleParseError(err.msg, err.lineno) from None
    if not isinstance(data, list):
        raise SampleParseError("expected a JSON array of {size, seconds} objects", 1)
    for i, item in enumerate(data):
        if not isinstance(item, dict) or "size" not in item or "seconds" not in item:
            raise SampleParseError("item %d lacks size/seconds" % i)
        if isinstance(item["size"], bool) or isinstance(item["seconds"], bool):
            raise SampleParseError("item %d: booleans are not numbers" % i)
        yield _size(item["size"], None), _seconds(item["seconds"], None)


def load_samples(source, format="csv"):
    """Parse CSV (``size,seconds`` header) or a JSON array into sorted samples.

    Duplicate sizes are merged into one sample at their mean runtime.
    """
    text = _read_text(source)
    if format == "csv":
        rows = list(_rows_csv(text))
    elif format == "json":
        rows = list(_rows_json(text))
    else:
        raise ValueError("format must be 'csv' or 'json', got %r" % (format,))
    by_size = defaultdict(list)
    for size, seconds in rows:
        by_size[size].append(seconds)
    return [RuntimeSample(size, sum(v) / len(v)) for size, v in sorted(by_size.items())]


# ---------------------------------------------------------------------------
# families
# ---------------------------------------------------------------------------

def _log_phi(name, x, a=None):
    lx = np.log(x)
    if name == "constant":
        return np.zeros_like(x)
    if name == "log_x":
        return np.log(lx) if np.all(x > 1) else None
    if name == "x":
        return lx
    if name == "x_log_x":
        return lx + np.log(lx) if np.all(x > 1) else None
    if name == "x_pow_a":
        return a * lx
    if name == "x_pow_log_x":
        return lx ** 2
    if name == "two_pow_sqrt_x":
        return np.sqrt(x) * math.log(2)
    if name == "two_pow_x":
        return x * math.log(2)
    if name == "exp_x":
        return x
    raise KeyError(name)


# (name, number of fitted parameters)
FAMILIES = (
    ("constant", 1), ("log_x", 1), ("x", 1), ("x_log_x", 1), ("x_pow_a", 2),
    ("x_pow_log_x", 1), ("two_pow_sqrt_x", 1), ("two_pow_x", 1), ("exp_x", 1),
)
_PARAMS = dict(FAMILIES)
_ORDER = {name: i for i, (name, _) in enumerate(FAMILIES)}


def family_expr(name, a=None, x="x"):
    """The unscaled growth form ``phi`` as an expression."""
    v = E.Var(x)
    forms = {
        "constant": lambda: E.ONE,
        "log_x": lambda: E.ln(v),
        "x": lambda: v,
        "x_log_x": lambda: v * E.ln(v),
        "x_pow_a": lambda: E.power(v, E.const(float(a))),
        "x_pow_log_x": lambda: E.power(v, E.ln(v)),
        "two_pow_sqrt_x": lambda: E.power(E.const(2), E.sqrt(v)),
        "two_pow_x": lambda: E.power(E.const(2), v),
        "exp_x": lambda: E.exp(v),
    }
    return forms[name]()


def _scaled(log_c, phi):
    c = math.exp(log_c) if -690 < log_c < 690 else None
    if c is not None and c > 0:
        return E.const(c) * phi
    return E.exp(E.const(log_c)) * phi


def _fit_family(name, x, y):
    def residual_at(a):
        lp = _log_phi(name, x, a)
        log_c = float(np.mean(y - lp))
        r = y - lp - log_c
        return float(np.sqrt(np.mean(r * r))), log_c

    a = None
    if name == "x_pow_a":
        slope = float(np.polyfit(np.log(x), y, 1)[0])
        a = min(max(slope, A_BOUNDS[0]), A_BOUNDS[1])
    if _log_phi(name, x, a if a is not None else 1.0) is None:
        return None
    residual, log_c = residual_at(a)
    scale = math.exp(log_c) if log_c < 709 else math.inf
    return ModelFit(name, scale, a, residual, _scaled(log_c, family_expr(name, a)), log_c)


def _rank_key(fit):
    return (max(fit.residual, _TIE), _PARAMS[fit.family], _ORDER[fit.family])


def fit_models(samples):
    """Fit every family and return them ranked best first.

    Data whose runtimes are all equal (within 1e-12) only admits the
    constant family.
    """
    if len(samples) < MIN_SAMPLES:
        raise TooFewSamples("need at least %d samples, got %d" % (MIN_SAMPLES, len(samples)))
    x = np.array([s.size for s in samples], dtype=float)
    secs = np.array([s.seconds for s in samples], dtype=float)
    if x.max() / x.min() < MIN_RANGE:
        raise InsufficientRange("sizes must span at least a %gx range, got %gx"
                                % (MIN_RANGE, x.max() / x.min()))
    y = np.log(secs)
    if np.ptp(secs) <= 1e-12 * max(1.0, float(np.max(np.abs(secs)))):
        return [_fit_family("constant", x, y)]
    fits = [f for f in (_fit_family(name, x, y) for name, _ in FAMILIES) if f is not None]
    return sorted(fits, key=_rank_key)


def classify_empirical(samples, config=None, fits=None):
    """Classify the top-ranked fitted family as if it were the runtime function.

    ``fits`` may pass an already computed ranking from :func:`fit_models`.
    """
    config = config or AnalysisConfig()
    fits = fits or fit_models(samples)
    top = fits[0]
    result = classify_univariate(top.expr, "x", config)
    notes = ["best-fit family %s stands in for the runtime function (log-space RMSE %.3g)"
             % (top.family, top.residual)]
    if len(fits) == 1:
        notes.append("low confidence: runtimes are constant, only the constant family applies")
    else:
        runner = fits[1]
        if runner.residual <= top.residual * (1 + _NEAR_TIE) + _TIE:
            notes.append("low confidence: runner-up %s fits within 10%% (RMSE %.3g)"
                         % (runner.family, runner.residual))
    if len(samples) < 2 * MIN_SAMPLES:
        notes.append("low confidence: only %d samples" % len(samples))
    result.notes = notes + result.notes
    return result
