"""Tunables shared by the analysis modules."""

import os
from dataclasses import dataclass, field, replace

DEFAULT_PRECISION = 128
X_MIN = 1 + 2 ** -10


def default_precision():
    """Working precision in bits; ``GG_PRECISION_BITS`` overrides the default."""
    raw = os.environ.get("GG_PRECISION_BITS")
    if not raw:
        return DEFAULT_PRECISION
    bits = int(raw)
    if not 64 <= bits <= 1024:
        raise ValueError("GG_PRECISION_BITS must be in [64, 1024], got %d" % bits)
    return bits


@dataclass(frozen=True)
class ProbeConfig:
    """Geometric probe grid ``start * factor**k, k = 0..steps`` and its verdict rules."""

    start: float = 4.0
    factor: float = 2.0
    steps: int = 60
    stabilize_tol: float = 1e-6
    window: int = 5
    divergence_threshold: float = 1e300
    precision: int = DEFAULT_PRECISION

    def __post_init__(self):
        if self.factor <= 1:
            raise ValueError("probe factor must exceed 1")
        if self.steps < 10:
            raise ValueError("at least 10 probe steps are required")
        if self.start <= 0:
            raise ValueError("probe start must be positive")
        if not 64 <= self.precision <= 1024:
            raise ValueError("precision must be in [64, 1024] bits")

    def points(self):
        return [self.start * self.factor ** k for k in range(self.steps + 1)]


@dataclass(frozen=True)
class AnalysisConfig:
    n_max: int = 8
    x_min: float = X_MIN
    probe: ProbeConfig = field(default_factory=ProbeConfig)
    # sup-grid points per probe-factor step, starting at x_min
    sup_density: int = 4
    safety_factor: float = 1.01
    full: bool = False
    fix_values: tuple = (2, 10)
    output_format: str = "json"

    def __post_init__(self):
        if self.n_max < 1:
            raise ValueError("n_max must be at least 1")
        if self.sup_density < 1:
            raise ValueError("sup_density must be at least 1")

    def with_(self, **changes):
        return replace(self, **changes)
