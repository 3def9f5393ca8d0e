"""Why no single server learns anything: exact query distributions.

For the smallest interesting tuple (N=2, K=3, M=1) this enumerates every
weighted random-tape path twice, once conditioned on (W=1, S={2}) and once
on (W=3, S={1}), and prints the two server-0 query distributions side by
side. They are identical, entry for entry, and match the closed form.
"""

from fractions import Fraction

from pirpsi import (
    DemandSideInfo,
    SchemeParams,
    closed_form_query_prob,
    exact_query_distribution,
    support_size,
)

params = SchemeParams(2, 3, 1, 1, 2)
pair_a = DemandSideInfo(1, (2,))
pair_b = DemandSideInfo(3, (1,))

dist_a = exact_query_distribution(pair_a, 0, params)
dist_b = exact_query_distribution(pair_b, 0, params)

print("parameters: N=%d K=%d M=%d, queries live in [0:%d]^%d"
      % (params.N, params.K, params.M, params.N - 1, params.K))
print()
print("%-12s %-18s %-18s %s" % ("query", "P(. | W=1,S={2})", "P(. | W=3,S={1})", "closed form"))
for v in sorted(set(dist_a.masses) | set(dist_b.masses)):
    pa = dist_a.masses.get(v, Fraction(0))
    pb = dist_b.masses.get(v, Fraction(0))
    cf = closed_form_query_prob(support_size(v), params)
    print("%-12s %-18s %-18s %s" % (str(list(v)), pa, pb, cf))
    assert pa == pb == cf

print()
print("same table for every server and every (W,S) pair, so a single")
print("query reveals nothing about which message is wanted or known.")

total = dist_a.total()
print("sanity: total mass = %s" % total)
assert total == Fraction(1)
