"""Scan derivative orders until one is bounded and decays at infinity."""

from growthgauge.boundedness import find_bounding_order
from growthgauge.syntax import parse

for text in ["x*log(x)", "2^log2(log2(x))", "x^3 - x", "2^sqrt(x)"]:
    r = find_bounding_order(parse(text), "x")
    print(text)
    for v in r.verdicts:
        M = "" if v.M is None else "  M=%.4g" % v.M
        print("   order %d: %s, tail %s%s" % (v.order, v.status.value, v.tail.kind.value, M))
    print("   bounding order:", r.bounding_order)
