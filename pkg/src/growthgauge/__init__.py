"""Growth-class analysis of complexity functions via derivative boundedness and Taylor series."""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .expr import Expr, canonicalize, from_json, to_json
from .syntax import format_expr, parse
from .calculus import (Limit, LimitVerdict, differentiate, evaluate, finite_difference,
                       limit_probe, nth_derivative)
from .config import AnalysisConfig, ProbeConfig
from .taylor import (TaylorSeries, eval_truncated, lagrange_bound, radius_ratio, radius_root,
                     taylor_series)
from .boundedness import BoundednessReport, Status, find_bounding_order
from .classifier import Classification, Verdict, classify
from .fitting import ModelFit, RuntimeSample, classify_empirical, fit_models, load_samples
