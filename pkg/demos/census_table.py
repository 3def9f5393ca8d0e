"""The eleven answer-set types of the flagship tuple (4,5,2).

Enumerates every weighted tape path, groups concrete unordered answer
sets by their symbolic role pattern (demand d, side information s1/s2,
interference i1/i2), and prints per-set probability, set count, and the
probability accounting that sums to one. Also reports the sub-packet
appearance probabilities, including the independently derived value for
five sub-packets.
"""

from fractions import Fraction

from pirpsi import SchemeParams, answer_appearance_probability, answer_set_census, canonical_pair
from pirpsi.census_golden import (
    APPEARANCE_5_REFERENCE,
    compare_appearance,
    compare_census,
)

params = SchemeParams(4, 5, 2, 3, 2)
ws = canonical_pair(params)
report = answer_set_census(ws, params)

print("answer-set census for N=%d K=%d M=%d, conditioned on W=%d S=%s"
      % (params.N, params.K, params.M, ws.W, list(ws.S)))
print()
header = ("type", "signature", "per-set probability", "sets", "total")
print("%-5s %-62s %-20s %6s  %s" % header)
total = Fraction(0)
for idx, row in enumerate(report.rows):
    sig = " | ".join(row.signature_strings())
    print("%-5d %-62s %-20s %6d  %s"
          % (idx, sig, row.per_set_probability, row.set_count, row.total_probability))
    total += row.total_probability
print()
print("probability accounting: %s" % total)
assert total == 1

ok, diffs = compare_census(report)
print("matches the recorded golden table: %s" % ("yes" if ok else "NO"))
for d in diffs:
    print("  " + d)

print()
print("appearance probability of one concrete answer set, by sub-packet count:")
three = answer_appearance_probability((1, 1, 1, 0, 0), ws, params)
four = answer_appearance_probability((1, 1, 1, 1, 0), ws, params)
five = answer_appearance_probability((1, 1, 1, 1, 1), ws, params)
print("  3 sub-packets: %s" % three)
print("  4 sub-packets: %s" % four)
print("  5 sub-packets: %s (published reference prints %s)" % (five, APPEARANCE_5_REFERENCE))
ok, lines = compare_appearance(three, four, five)
for line in lines:
    print("  " + line)
assert ok
