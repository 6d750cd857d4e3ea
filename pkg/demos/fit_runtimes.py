"""Fit synthetic timings of an n log n routine and classify the winner.

Timings get 1% multiplicative noise; the top fits and the verdict are printed.
"""

import math
import random

from growthgauge.fitting import RuntimeSample, classify_empirical, fit_models

rng = random.Random(1)
samples = [RuntimeSample(n, 3e-8 * n * math.log(n) * (1 + rng.uniform(-0.01, 0.01)))
           for n in (2 ** k for k in range(6, 17))]

fits = fit_models(samples)
for f in fits[:4]:
    shape = "" if f.shape is None else " a=%.3f" % f.shape
    print("%-15s scale=%.4g rmse=%.4g%s" % (f.family, f.scale, f.residual, shape))

c = classify_empirical(samples, fits=fits)
print("verdict:", c.verdict.value)
for note in c.notes[:3]:
    print("  -", note)
