"""Verdicts for the seven reference functions and two multivariate ones."""

from growthgauge import classify
from growthgauge.classifier import FIXTURES

for fid, text in FIXTURES.items():
    c = classify(text)
    print("%-20s %-16s %-24s degree %s" % (fid, text, c.verdict.value, c.degree_estimate))

for text in ["x*2^y", "x*ln(x) + y^2"]:
    c = classify(text)
    orders = {v: r.bounding_order for v, r in c.per_variable.items()}
    print("%-37s %-24s per variable %s" % (text, c.verdict.value, orders))
