"""Ratio and root estimates of the radius of convergence."""

from growthgauge.syntax import parse
from growthgauge.taylor import radius_ratio, radius_root, taylor_series

for text in ["exp(x)", "2^x", "1/(1-x)", "1/(3-x)", "ln(1+x)"]:
    s = taylor_series(parse(text), "x", 0, 40)
    for est in (radius_ratio(s), radius_root(s)):
        value = "" if est.value is None else " %.4g" % est.value
        print("%-9s %-5s %s%s" % (text, est.method, est.verdict, value))
