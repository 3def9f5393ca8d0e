"""Exact rational probability machinery for the query scheme.

The retrieval protocol draws a pair (I, J) controlling how many side
information and interference messages enter the first coded sum, and a
bit theta controlling the mixing pattern. The pair weights are built from
integer coefficients m_coeff(i, j). Everything in this module is exact:
integers and fractions.Fraction only, no floating point.

The verify_* functions check, by direct exact evaluation on concrete
parameter tuples, the combinatorial identities that the scheme's
correctness rests on. They return structured reports so the CLI can show
both sides of any failed identity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .core import SchemeParams


def binom(n: int, k: int) -> int:
    """Binomial coefficient with the convention C(n, k) = 0 for k < 0 or k > n."""
    if k < 0 or k > n:
        return 0
    return math.comb(n, k)


def m_coeff(i: int, j: int, params: SchemeParams) -> int:
    """Integer coefficient m_{i,j} underlying the pair distribution.

    Defined for 0 <= i <= M and 0 <= j <= K-M-1, extended to j = K-M for
    i = M only (that single extra value is what the telescoping identity
    and the full-support query probability need):

      m_{0,0} = 1
      m_{i,j} = 0                       for 1 <= i+j <= M
      m_{i,j} = sum_{k=0}^{i+j-M-1} (-1)^k C(M+k-1, k) (N-1)^{i+j-M-k}
                                        for M+1 <= i+j <= K
    """
    N, K, M = params.N, params.K, params.M
    if not 0 <= i <= M:
        raise ValueError("i out of range [0:%d]: i=%d" % (M, i))
    if not 0 <= j <= K - M:
        raise ValueError("j out of range [0:%d]: j=%d" % (K - M, j))
    if j == K - M and i != M:
        raise ValueError("j=%d is admitted only for i=M=%d, got i=%d" % (j, M, i))
    s = i + j
    if s == 0:
        return 1
    if s <= M:
        return 0
    return sum(
        (-1) ** k * binom(M + k - 1, k) * (params.N - 1) ** (s - M - k)
        for k in range(s - M)
    )


def p_ij(i: int, j: int, params: SchemeParams, m_fn: Callable = m_coeff) -> Fraction:
    """Probability of selecting the pair (i, j), exact."""
    K, M = params.K, params.M
    if not 0 <= i <= M:
        raise ValueError("i out of range [0:%d]: i=%d" % (M, i))
    if not 0 <= j <= K - M - 1:
        raise ValueError("j out of range [0:%d]: j=%d" % (K - M - 1, j))
    num = binom(M, i) * binom(K - M - 1, j) * m_fn(i, j, params)
    return Fraction(num, params.N ** (K - M - 1))


def p_theta_zero(I: int, params: SchemeParams) -> Fraction:
    """Probability that theta = 0 given the selected I, exact: (M-I)/(M-I+1)."""
    if not 0 <= I <= params.M:
        raise ValueError("I out of range [0:%d]: I=%d" % (params.M, I))
    return Fraction(params.M - I, params.M - I + 1)


@dataclass(frozen=True)
class PijTable:
    """The full pair distribution for one parameter tuple.

    entries maps every (i, j) with 0 <= i <= M, 0 <= j <= K-M-1 to its exact
    probability. branches lists only the nonzero entries as
    ((i, j), numerator) pairs over the common denominator N^(K-M-1);
    the enumerator and the sampler both draw from that list.
    branch_values and branch_nums hold the same data split into parallel
    tuples for the draw hot path.
    """

    params: SchemeParams
    entries: dict
    branches: tuple
    branch_values: tuple
    branch_nums: tuple
    denominator: int

    @classmethod
    def compute(cls, params: SchemeParams, m_fn: Callable = m_coeff) -> "PijTable":
        K, M = params.K, params.M
        den = params.N ** (K - M - 1)
        entries = {}
        branches = []
        for i in range(M + 1):
            for j in range(K - M):
                num = binom(M, i) * binom(K - M - 1, j) * m_fn(i, j, params)
                entries[(i, j)] = Fraction(num, den)
                if num != 0:
                    branches.append(((i, j), num))
        values = tuple(pair for pair, _ in branches)
        nums = tuple(num for _, num in branches)
        return cls(params, entries, tuple(branches), values, nums, den)


@dataclass(frozen=True)
class DistributionReport:
    """Result of checking that the pair probabilities form a distribution."""

    params: SchemeParams
    passed: bool
    total: Fraction
    negative_entries: tuple = ()

    def describe(self) -> str:
        if self.passed:
            return "pair distribution valid: all entries >= 0, total = 1"
        parts = ["pair distribution INVALID: total = %s" % self.total]
        for (i, j), val in self.negative_entries:
            parts.append("  negative entry (%d, %d) = %s" % (i, j, val))
        return "\n".join(parts)


def verify_pij_distribution(params: SchemeParams, m_fn: Callable = m_coeff) -> DistributionReport:
    """Check non-negativity and exact sum 1 of the full pair table."""
    table = PijTable.compute(params, m_fn)
    negative = tuple(
        (key, val) for key, val in sorted(table.entries.items()) if val < 0
    )
    total = sum(table.entries.values(), Fraction(0))
    passed = not negative and total == 1
    return DistributionReport(params, passed, total, negative)


@dataclass(frozen=True)
class IdentityReport:
    """Both sides of one exactly evaluated identity."""

    name: str
    passed: bool
    lhs: Fraction
    rhs: Fraction
    detail: str = ""

    def describe(self) -> str:
        status = "ok" if self.passed else "FAILED"
        msg = "%s %s: lhs = %s, rhs = %s" % (self.name, status, self.lhs, self.rhs)
        if self.detail:
            msg += " (%s)" % self.detail
        return msg


def verify_summij(params: SchemeParams, j: int, m_fn: Callable = m_coeff) -> IdentityReport:
    """Telescoping identity linking column j of the coefficients to m_{M,j+1}.

    sum_{i=(M-j+1)+}^{M} (C(M,i)(N-1) - C(M,i-1)) m_{i,j} = m_{M,j+1}
    for 1 <= j <= K-M-1.
    """
    N, K, M = params.N, params.K, params.M
    if not 1 <= j <= K - M - 1:
        raise ValueError("j out of range [1:%d]: j=%d" % (K - M - 1, j))
    lo = max(M - j + 1, 0)
    lhs = sum(
        (binom(M, i) * (N - 1) - binom(M, i - 1)) * m_fn(i, j, params)
        for i in range(lo, M + 1)
    )
    rhs = m_fn(M, j + 1, params)
    return IdentityReport(
        "summij(j=%d)" % j,
        lhs == rhs,
        Fraction(lhs),
        Fraction(rhs),
        "params=%s" % (params.as_tuple(),),
    )


def verify_poly_identity(n: int, poly_coeffs: Sequence[Fraction]) -> IdentityReport:
    """Alternating binomial sum against a polynomial of degree < n.

    sum_{k=0}^{n} (-1)^k C(n,k) P(k) = 0 exactly, where P is given by its
    coefficient list (constant term first). Raises if deg(P) >= n.
    """
    if n < 1:
        raise ValueError("n must be >= 1, got %d" % n)
    coeffs = list(poly_coeffs)
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    degree = len(coeffs) - 1 if coeffs else 0
    if degree >= n:
        raise ValueError("polynomial degree %d must be < n=%d" % (degree, n))

    def poly(k: int) -> Fraction:
        acc = Fraction(0)
        kp = 1
        for c in coeffs:
            acc += c * kp
            kp *= k
        return acc

    lhs = sum(((-1) ** k) * binom(n, k) * poly(k) for k in range(n + 1))
    return IdentityReport("poly_identity(n=%d)" % n, lhs == 0, Fraction(lhs), Fraction(0))


def verify_alternating_identity(j: int, params: SchemeParams) -> IdentityReport:
    """Alternating product-of-binomials sum that underlies the telescoping step.

    sum_{k=(j-M)+}^{j} (-1)^k C(M, j-k) C(M+k-1, k) = 0 for 1 <= j <= K-M-1.
    """
    K, M = params.K, params.M
    if not 1 <= j <= K - M - 1:
        raise ValueError("j out of range [1:%d]: j=%d" % (K - M - 1, j))
    lo = max(j - M, 0)
    lhs = sum(
        (-1) ** k * binom(M, j - k) * binom(M + k - 1, k) for k in range(lo, j + 1)
    )
    return IdentityReport(
        "alternating_identity(j=%d)" % j,
        lhs == 0,
        Fraction(lhs),
        Fraction(0),
        "params=%s" % (params.as_tuple(),),
    )


def lemma_grid() -> tuple:
    """Parameter tuples the identity checks run over by default.

    Every valid (N,K,M) with N <= 6 and K <= 8; L = N-1 and q = 2 fill the
    fields the identities never touch.
    """
    grid = []
    for n in range(2, 7):
        for k in range(2, 9):
            for m in range(1, min(n - 1, k - 1) + 1):
                grid.append(SchemeParams(n, k, m, n - 1, 2))
    return tuple(grid)


def corrupted_m_coeff(delta: int = 1) -> Callable:
    """Deliberately wrong coefficient function, used as a negative control.

    Adds delta to m_{M,1} so that distribution and identity checks must fail.
    """

    def bad(i: int, j: int, params: SchemeParams) -> int:
        val = m_coeff(i, j, params)
        if i == params.M and j == 1:
            return val + delta
        return val

    return bad
