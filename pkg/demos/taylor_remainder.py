"""Taylor polynomial of 2^x at 0 and how the remainder sits under its bound."""

from growthgauge.syntax import parse
from growthgauge.taylor import remainder_table, taylor_series

f = parse("2^x")
s = taylor_series(f, "x", 0, 5)
for k, a in enumerate(s.coefficients):
    print("a_%d = %.10g" % (k, float(a)))

rows, M = remainder_table(f, s, ["0.25", "0.5", "0.75", "1"])
print("M = %.6g (grid sup of the 6th derivative on [0, 1])" % M)
for r in rows:
    print("x=%-5g  |R| = %.3e  <=  %.3e" % (r["x"], r["R"], r["bound"]))
