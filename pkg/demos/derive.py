"""Parse a few expressions, print their canonical form and first derivatives."""

from growthgauge import nth_derivative, parse
from growthgauge.syntax import format_expr

for text in ["x*log(x)", "2^sqrt(x)", "x^log2(x)", "(x + 1)^3 - x^3"]:
    f = parse(text)
    print(text, "->", format_expr(f))
    for n in (1, 2):
        print("   d%d: %s" % (n, format_expr(nth_derivative(f, "x", n))))
