"""Exact audits of the scheme by weighted exhaustive enumeration.

Every audit here replays the full query-generation procedure over every
possible draw path with exact rational weights (see randomness), so the
verified statements are identities, not statistical estimates:

  - privacy: the per-server query distribution is one and the same
    distribution for every (demand, side-information) conditioning pair and
    every server, assigns equal mass to all vectors of equal support size,
    and that mass matches an independently computed closed form;
  - recoverability: decoding returns the demand message on every draw path
    for pseudorandom message fills;
  - rate: the exact expected download implies a rate equal to capacity;
  - census: answer profiles group into types with uniform per-outcome mass,
    matching an externally tabulated reference for (4,5,2).

A Monte Carlo audit cross-validates the exact results from seeded samples.
Enumeration cost is estimated up front; audits refuse to start above a
configurable branch budget instead of running unboundedly.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional

from .core import (
    DemandSideInfo,
    MessageStore,
    QueryVector,
    SchemeParams,
    support_size,
)
from .distributions import PijTable, binom, m_coeff
from .protocol import _assemble, _session_context, path_denominator, run_session
from .randomness import SamplerSource, enumerate_paths

DEFAULT_BUDGET = 10 ** 8


class BudgetExceeded(RuntimeError):
    """Raised when an audit's estimated branch count exceeds its budget."""

    def __init__(self, what: str, estimate: int, budget: int):
        self.what = what
        self.estimate = estimate
        self.budget = budget
        super().__init__(
            "%s needs an estimated %d enumeration branches, over the budget of %d"
            % (what, estimate, budget)
        )


def estimate_enumeration_cost(params: SchemeParams) -> int:
    """Upper bound on enumeration branches for one conditioning pair.

    Follows the draw structure: schedule and shuffle permutations, mask
    value products, and per size-pair the subset, ordering and bit choices
    (the bit counted as 2 even where one side is degenerate).
    """
    N, K, M = params.N, params.K, params.M
    table = PijTable.compute(params)
    inner = 0
    for (i, j), _num in table.branches:
        inner += (
            binom(M, i)
            * math.factorial(i)
            * binom(K - M - 1, j)
            * (N - 1) ** j
            * 2
        )
    return math.factorial(N - 1) * (N - 1) ** M * inner * math.factorial(N)


def exact_path_count(params: SchemeParams) -> int:
    """Exact number of enumerated paths for one conditioning pair.

    Like estimate_enumeration_cost but with the dropout bit counted as a
    single branch where its distribution is degenerate (kept size = M).
    """
    N, K, M = params.N, params.K, params.M
    table = PijTable.compute(params)
    inner = 0
    for (i, j), _num in table.branches:
        inner += (
            binom(M, i)
            * math.factorial(i)
            * binom(K - M - 1, j)
            * (N - 1) ** j
            * (1 if i == M else 2)
        )
    return math.factorial(N - 1) * (N - 1) ** M * inner * math.factorial(N)


def canonical_pair(params: SchemeParams) -> DemandSideInfo:
    """The lexicographically first conditioning pair: W=1, S={2..M+1}."""
    return DemandSideInfo(1, tuple(range(2, params.M + 2)))


def all_pairs(params: SchemeParams):
    """Every (W,S) conditioning pair, in deterministic lexicographic order."""
    indices = range(1, params.K + 1)
    for w in indices:
        rest = [i for i in indices if i != w]
        for s in itertools.combinations(rest, params.M):
            yield DemandSideInfo(w, s)


def pair_count(params: SchemeParams) -> int:
    return params.K * binom(params.K - 1, params.M)


def _pair_masses(ws: DemandSideInfo, params: SchemeParams) -> tuple:
    """Integer query-vector masses per server for one conditioning pair.

    Returns (masses, D): masses[n] maps each query vector to its weight
    numerator over the common denominator D; numerators per server sum
    to exactly D.
    """
    ctx = _session_context(ws, params)
    D = path_denominator(params)
    masses = [dict() for _ in range(params.N)]

    def fn(src):
        return _assemble(ctx, params, src)[0]

    for queries, num in enumerate_paths(fn, D):
        for d, v in zip(masses, queries):
            d[v] = d.get(v, 0) + num
    return tuple(masses), D


@lru_cache(maxsize=None)
def _canonical_masses(n: int, k: int, m: int) -> tuple:
    """Cached per-server masses for the canonical pair of (N,K,M).

    The query distribution involves neither L nor q, so the cache is keyed
    on (N,K,M) only and shared by all audits over one process lifetime.
    """
    params = SchemeParams(n, k, m, n - 1, 2)
    return _pair_masses(canonical_pair(params), params)


@dataclass(frozen=True)
class QueryDistribution:
    """Exact query distribution of one server under one conditioning pair."""

    params: SchemeParams
    server: int
    ws: DemandSideInfo
    masses: dict

    def total(self) -> Fraction:
        return sum(self.masses.values(), Fraction(0))

    def support_profile(self) -> dict:
        """Map support size -> (vector count, common mass), for inspection."""
        by_size: dict = {}
        for v, mass in self.masses.items():
            by_size.setdefault(support_size(v), []).append(mass)
        return {
            s: (len(group), group[0] if len(set(group)) == 1 else None)
            for s, group in sorted(by_size.items())
        }


def exact_query_distribution(
    ws: DemandSideInfo,
    n: int,
    params: SchemeParams,
    budget: int = DEFAULT_BUDGET,
) -> QueryDistribution:
    """Exact distribution of server n's query vector under (W,S) = ws."""
    if not 0 <= n < params.N:
        raise ValueError("server index %d out of range [0:%d)" % (n, params.N))
    estimate = estimate_enumeration_cost(params)
    if estimate > budget:
        raise BudgetExceeded("exact_query_distribution%s" % (params.as_tuple(),), estimate, budget)
    masses, D = _pair_masses(ws, params)
    return QueryDistribution(
        params, n, ws, {v: Fraction(num, D) for v, num in sorted(masses[n].items())}
    )


def closed_form_query_prob(s: int, params: SchemeParams) -> Fraction:
    """Per-vector query probability as a function of support size alone."""
    N, K, M = params.N, params.K, params.M
    if not 0 <= s <= K:
        raise ValueError("support size %d out of range [0:%d]" % (s, K))
    if s == 0:
        return Fraction(1, N ** (K - M))
    if s <= M:
        return Fraction(0)
    return Fraction(m_coeff(M, s - M, params), N ** (K - M) * (N - 1) ** s)


@dataclass(frozen=True)
class PrivacyReport:
    """Outcome of the four-part exact privacy audit for one parameter tuple."""

    params: SchemeParams
    passed: bool
    pairs_checked: int
    servers: int
    distinct_vectors: int
    size_profile: tuple  # (s, vector count, mass, closed form, ok) per size
    completeness_ok: bool
    cross_pair_ok: bool
    cross_server_ok: bool
    uniform_ok: bool
    closed_form_ok: bool
    budget_estimate: int
    failures: tuple = ()

    def describe(self) -> str:
        p = self.params
        lines = [
            "privacy audit: N=%d K=%d M=%d L=%d q=%d" % (p.N, p.K, p.M, p.L, p.q),
            "conditioning pairs checked: %d" % self.pairs_checked,
            "servers compared: %d" % self.servers,
            "distinct query vectors per server: %d" % self.distinct_vectors,
            "estimated branches per pair: %d" % self.budget_estimate,
            "per-support-size query mass:",
        ]
        for s, count, mass, closed, ok in self.size_profile:
            lines.append(
                "  s=%d vectors=%d mass=%s closed_form=%s %s"
                % (s, count, mass, closed, "ok" if ok else "MISMATCH")
            )
        lines.append("check completeness (each distribution sums to 1): %s" % _pf(self.completeness_ok))
        lines.append("check identical across conditioning pairs: %s" % _pf(self.cross_pair_ok))
        lines.append("check identical across servers: %s" % _pf(self.cross_server_ok))
        lines.append("check uniform within support size: %s" % _pf(self.uniform_ok))
        lines.append("check matches closed form: %s" % _pf(self.closed_form_ok))
        for f in self.failures:
            lines.append("failure: %s" % f)
        lines.append("result: %s" % _pf(self.passed))
        return "\n".join(lines)

    def table_rows(self) -> tuple:
        header = ("s", "vectors", "mass", "closed_form", "ok")
        rows = [
            (str(s), str(count), str(mass), str(closed), "ok" if ok else "mismatch")
            for s, count, mass, closed, ok in self.size_profile
        ]
        return header, rows


def _pf(ok: bool) -> str:
    return "pass" if ok else "FAIL"


def check_privacy(params: SchemeParams, budget: int = DEFAULT_BUDGET) -> PrivacyReport:
    """Verify the privacy condition exactly for one parameter tuple.

    Four checks over exhaustive enumeration: (a) each server's query
    distribution is identical across every (W,S) conditioning pair,
    (b) within any support size all vectors carry equal mass, (c) that
    mass equals closed_form_query_prob, (d) all servers share one
    distribution. Distributions for non-canonical pairs are compared and
    discarded one at a time to bound memory.
    """
    per_pair = estimate_enumeration_cost(params)
    npairs = pair_count(params)
    if per_pair * npairs > budget:
        raise BudgetExceeded("check_privacy%s" % (params.as_tuple(),), per_pair * npairs, budget)

    N, K, M = params.N, params.K, params.M
    ref_masses, D = _canonical_masses(N, K, M)
    failures: list = []

    completeness_ok = True
    for n, masses in enumerate(ref_masses):
        if sum(masses.values()) != D:
            completeness_ok = False
            failures.append("canonical pair, server %d: masses do not sum to 1" % n)

    cross_server_ok = True
    for n in range(1, N):
        if ref_masses[n] != ref_masses[0]:
            cross_server_ok = False
            failures.append(_first_diff("server %d vs server 0" % n, ref_masses[n], ref_masses[0], D))

    cross_pair_ok = True
    canonical = canonical_pair(params)
    for ws in all_pairs(params):
        if ws == canonical:
            continue
        masses, _ = _pair_masses(ws, params)
        for n in range(N):
            if sum(masses[n].values()) != D:
                completeness_ok = False
                failures.append("pair %s, server %d: masses do not sum to 1" % (_ws_str(ws), n))
            if masses[n] != ref_masses[n]:
                cross_pair_ok = False
                failures.append(
                    _first_diff("pair %s vs canonical, server %d" % (_ws_str(ws), n), masses[n], ref_masses[n], D)
                )
        if len(failures) >= 10:
            break

    by_size: dict = {}
    for v, num in ref_masses[0].items():
        by_size.setdefault(support_size(v), {}).setdefault(num, []).append(v)

    uniform_ok = True
    closed_form_ok = True
    size_profile = []
    for s in sorted(by_size):
        groups = by_size[s]
        count = sum(len(vs) for vs in groups.values())
        if len(groups) != 1:
            uniform_ok = False
            failures.append("support size %d carries %d distinct masses" % (s, len(groups)))
            mass = Fraction(min(groups), D)
        else:
            mass = Fraction(next(iter(groups)), D)
        closed = closed_form_query_prob(s, params)
        want_count = binom(K, s) * (N - 1) ** s
        if mass != closed:
            closed_form_ok = False
            failures.append("support size %d mass %s != closed form %s" % (s, mass, closed))
        if count != want_count:
            closed_form_ok = False
            failures.append(
                "support size %d has %d vectors, expected %d" % (s, count, want_count)
            )
        ok = len(groups) == 1 and mass == closed and count == want_count
        size_profile.append((s, count, mass, closed, ok))

    for s in [0] + list(range(M + 1, K + 1)):
        if s not in by_size and closed_form_query_prob(s, params) != 0:
            closed_form_ok = False
            failures.append("support size %d expected but absent from enumeration" % s)
    for s in by_size:
        if closed_form_query_prob(s, params) == 0:
            closed_form_ok = False
            failures.append("support size %d present but closed form assigns 0" % s)

    passed = completeness_ok and cross_pair_ok and cross_server_ok and uniform_ok and closed_form_ok
    return PrivacyReport(
        params=params,
        passed=passed,
        pairs_checked=npairs,
        servers=N,
        distinct_vectors=len(ref_masses[0]),
        size_profile=tuple(size_profile),
        completeness_ok=completeness_ok,
        cross_pair_ok=cross_pair_ok,
        cross_server_ok=cross_server_ok,
        uniform_ok=uniform_ok,
        closed_form_ok=closed_form_ok,
        budget_estimate=per_pair,
        failures=tuple(failures[:10]),
    )


def _ws_str(ws: DemandSideInfo) -> str:
    return "W=%d S={%s}" % (ws.W, ",".join(str(s) for s in ws.S))


def _first_diff(label: str, got: dict, want: dict, D: int) -> str:
    for v in sorted(set(got) | set(want)):
        g, w = got.get(v, 0), want.get(v, 0)
        if g != w:
            return "%s: vector %s has mass %s, expected %s" % (
                label, v, Fraction(g, D), Fraction(w, D),
            )
    return "%s: distributions differ" % label


def answer_appearance_probability(
    v: QueryVector,
    ws: DemandSideInfo,
    params: SchemeParams,
    budget: int = DEFAULT_BUDGET,
) -> Fraction:
    """Exact probability that some server's query equals v in one session.

    The N queries of a session are pairwise distinct, so the appearance
    events are disjoint and the probability is the sum of the per-server
    masses of v.
    """
    if len(v) != params.K:
        raise ValueError("vector length %d does not match K=%d" % (len(v), params.K))
    estimate = estimate_enumeration_cost(params)
    if estimate > budget:
        raise BudgetExceeded("answer_appearance_probability%s" % (params.as_tuple(),), estimate, budget)
    if ws == canonical_pair(params):
        masses, D = _canonical_masses(params.N, params.K, params.M)
    else:
        masses, D = _pair_masses(ws, params)
    return sum((Fraction(m.get(tuple(v), 0), D) for m in masses), Fraction(0))


def capacity(params: SchemeParams) -> Fraction:
    """Highest achievable rate for the parameter tuple, in exact form."""
    N, K, M = params.N, params.K, params.M
    top = N ** (K - M) - N ** (K - M - 1)
    return Fraction(top, N ** (K - M) - 1)


def expected_download_symbols(params: SchemeParams, budget: int = DEFAULT_BUDGET) -> Fraction:
    """Exact expected number of downloaded symbols per session."""
    estimate = estimate_enumeration_cost(params)
    if estimate > budget:
        raise BudgetExceeded("expected_download_symbols%s" % (params.as_tuple(),), estimate, budget)
    masses, D = _canonical_masses(params.N, params.K, params.M)
    zero = (0,) * params.K
    nonzero = sum(Fraction(D - m.get(zero, 0), D) for m in masses)
    return nonzero * params.subpacket_len


def exact_rate(params: SchemeParams, budget: int = DEFAULT_BUDGET) -> Fraction:
    """Message length over exact expected download, from enumeration."""
    return Fraction(params.L) / expected_download_symbols(params, budget)


@dataclass(frozen=True)
class RateReport:
    params: SchemeParams
    rate: Fraction
    capacity: Fraction
    expected_download: Fraction
    passed: bool

    def describe(self) -> str:
        p = self.params
        return "\n".join([
            "rate audit: N=%d K=%d M=%d L=%d q=%d" % (p.N, p.K, p.M, p.L, p.q),
            "exact expected downloaded symbols: %s" % self.expected_download,
            "exact rate: %s" % self.rate,
            "capacity: %s" % self.capacity,
            "result: %s" % _pf(self.passed),
        ])


def check_rate(params: SchemeParams, budget: int = DEFAULT_BUDGET) -> RateReport:
    """Verify that the enumerated exact rate equals capacity."""
    download = expected_download_symbols(params, budget)
    rate = Fraction(params.L) / download
    cap = capacity(params)
    return RateReport(params, rate, cap, download, rate == cap)


# --- census ---------------------------------------------------------------


def _pattern(v: QueryVector, ws: DemandSideInfo, interference: tuple) -> tuple:
    """Role pattern of one query vector relative to the conditioning pair.

    (demand present, positions into sorted S, positions into sorted
    interference); positions are 1-based slots, so patterns are comparable
    across sessions regardless of the concrete message indices.
    """
    demand = v[ws.W - 1] != 0
    side = tuple(k for k, idx in enumerate(ws.S, start=1) if v[idx - 1])
    noise = tuple(k for k, idx in enumerate(interference, start=1) if v[idx - 1])
    return (demand, side, noise)


def pattern_string(pattern: tuple) -> str:
    demand, side, noise = pattern
    parts = []
    if demand:
        parts.append("d")
    parts.extend("s%d" % k for k in side)
    parts.extend("i%d" % k for k in noise)
    return "+".join(parts) if parts else "-"


@dataclass(frozen=True)
class CensusRow:
    """One answer-profile type: signature, per-outcome mass, outcome count.

    signature is the sorted multiset of the role patterns of the N
    equation vectors. kept_size, interference_size and dropout identify
    the generating branch (dropout is None where the bit is immaterial,
    i.e. kept_size = 0). set_count is the number of distinct
    (schedule, side mask, interference mask) outcomes in the branch; each
    carries the same probability, reported as per_set_probability.
    """

    signature: tuple
    kept_size: int
    interference_size: int
    dropout: Optional[int]
    per_set_probability: Fraction
    set_count: int

    @property
    def total_probability(self) -> Fraction:
        return self.per_set_probability * self.set_count

    def signature_strings(self) -> tuple:
        return tuple(pattern_string(p) for p in self.signature)


@dataclass(frozen=True)
class CensusReport:
    params: SchemeParams
    ws: DemandSideInfo
    rows: tuple
    total_mass: Fraction
    uniform_within_type: bool
    passed: bool
    budget_estimate: int
    failures: tuple = ()

    def describe(self) -> str:
        p = self.params
        lines = [
            "answer census: N=%d K=%d M=%d L=%d q=%d  %s" % (p.N, p.K, p.M, p.L, p.q, _ws_str(self.ws)),
            "types: %d" % len(self.rows),
        ]
        for i, row in enumerate(self.rows):
            lines.append(
                "  type %d: {%s}  per-set %s  sets %d"
                % (i, ", ".join(row.signature_strings()), row.per_set_probability, row.set_count)
            )
        lines.append("total probability: %s" % self.total_mass)
        lines.append("uniform probability within each type: %s" % _pf(self.uniform_within_type))
        for f in self.failures:
            lines.append("failure: %s" % f)
        lines.append("result: %s" % _pf(self.passed))
        return "\n".join(lines)

    def table_rows(self) -> tuple:
        header = ("type", "signature", "kept", "interference", "dropout", "per_set_probability", "set_count")
        rows = []
        for i, row in enumerate(self.rows):
            rows.append((
                str(i),
                " | ".join(row.signature_strings()),
                str(row.kept_size),
                str(row.interference_size),
                "-" if row.dropout is None else str(row.dropout),
                str(row.per_set_probability),
                str(row.set_count),
            ))
        return header, rows


def answer_set_census(
    ws: DemandSideInfo,
    params: SchemeParams,
    budget: int = DEFAULT_BUDGET,
) -> CensusReport:
    """Group one pair's answer profiles into types with exact probabilities.

    An outcome is one choice of (sub-packet schedule, side-information mask
    values, interference mask values) within a branch (kept size and set,
    interference size and set, dropout bit); the server shuffle, the
    dropout-subset ordering, and the bit itself where it is immaterial are
    marginalized. Branches with matching role-pattern signatures are one
    type. Within a type every outcome must carry equal probability; types
    whose branch has zero probability are materialized with mass 0 rather
    than dropped, so the census lists every structurally reachable type.
    """
    estimate = estimate_enumeration_cost(params)
    if estimate > budget:
        raise BudgetExceeded("answer_set_census%s" % (params.as_tuple(),), estimate, budget)
    ws.check(params)
    interference = ws.interference(params)
    ctx = _session_context(ws, params)
    D = path_denominator(params)
    N = params.N

    cells: dict = {}
    reps: dict = {}

    def fn(src):
        return _assemble(ctx, params, src)

    for (queries, draws), num in enumerate_paths(fn, D, keep_zero_bernoulli=True):
        perm0, side_vals, kept_n, mix_n, kept, _drop, mix, mix_vals, theta, shuffle = draws
        branch = (kept_n, mix_n, kept, mix, theta if kept_n else None)
        cell = (perm0, side_vals, mix_vals)
        key = (branch, cell)
        cells[key] = cells.get(key, 0) + num
        if branch not in reps:
            ordered = [None] * N
            for server, eq in enumerate(shuffle):
                ordered[eq] = queries[server]
            reps[branch] = tuple(ordered)

    by_branch: dict = {}
    for (branch, _cell), num in cells.items():
        by_branch.setdefault(branch, []).append(num)

    failures: list = []
    uniform = True
    rows = []
    total = Fraction(0)
    for branch in sorted(by_branch, key=_branch_sort_key):
        nums = by_branch[branch]
        kept_n, mix_n, _kept, _mix, theta = branch
        if len(set(nums)) != 1:
            uniform = False
            failures.append(
                "branch kept=%d interference=%d dropout=%s: unequal outcome masses"
                % (kept_n, mix_n, theta)
            )
        signature = tuple(sorted(_pattern(v, ws, interference) for v in reps[branch]))
        per_set = Fraction(nums[0], D)
        rows.append(CensusRow(
            signature=signature,
            kept_size=kept_n,
            interference_size=mix_n,
            dropout=theta,
            per_set_probability=per_set,
            set_count=len(nums),
        ))
        total += per_set * len(nums)

    passed = uniform and total == 1
    if total != 1:
        failures.append("census masses sum to %s, not 1" % total)
    return CensusReport(
        params=params,
        ws=ws,
        rows=tuple(rows),
        total_mass=total,
        uniform_within_type=uniform,
        passed=passed,
        budget_estimate=estimate,
        failures=tuple(failures[:10]),
    )


def _branch_sort_key(branch: tuple) -> tuple:
    kept_n, mix_n, kept, mix, theta = branch
    return (kept_n + mix_n, kept_n, mix_n, kept, mix, -1 if theta is None else theta)


# --- recoverability -------------------------------------------------------


@dataclass(frozen=True)
class RecoverabilityReport:
    params: SchemeParams
    mode: str
    pairs: int
    fills: int
    sessions: int
    successes: int
    seed: int
    passed: bool
    failures: tuple = ()

    def describe(self) -> str:
        p = self.params
        lines = [
            "recoverability audit: N=%d K=%d M=%d L=%d q=%d" % (p.N, p.K, p.M, p.L, p.q),
            "mode: %s" % self.mode,
            "conditioning pairs: %d" % self.pairs,
            "message fills per pair: %d" % self.fills,
            "sessions run: %d" % self.sessions,
            "demand recovered: %d/%d" % (self.successes, self.sessions),
            "seed: %d" % self.seed,
        ]
        for f in self.failures:
            lines.append("failure: %s" % f)
        lines.append("result: %s" % _pf(self.passed))
        return "\n".join(lines)


def check_recoverability(
    params: SchemeParams,
    fills: int = 20,
    seed: int = 0,
    mode: str = "auto",
    exhaustive_cap: int = 500_000,
    samples: int = 2000,
) -> RecoverabilityReport:
    """Verify that decoding returns the demand message, over all pairs.

    mode "exhaustive" runs every draw path for every conditioning pair and
    every seeded message fill; "sampled" runs `samples` seeded sessions per
    pair instead; "auto" picks exhaustive when the session count stays
    within exhaustive_cap.
    """
    if fills < 1:
        raise ValueError("fills must be >= 1, got %d" % fills)
    npairs = pair_count(params)
    exhaustive_sessions = exact_path_count(params) * npairs * fills
    if mode == "auto":
        mode = "exhaustive" if exhaustive_sessions <= exhaustive_cap else "sampled"
    if mode not in ("exhaustive", "sampled"):
        raise ValueError("mode must be auto, exhaustive, or sampled, got %r" % mode)

    stores = [MessageStore.random(params, seed + f) for f in range(fills)]
    sessions = successes = 0
    failures: list = []
    D = path_denominator(params)

    for p_idx, ws in enumerate(all_pairs(params)):
        want_index = ws.W
        if mode == "exhaustive":
            for store in stores:
                want = store[want_index]
                for result, _num in enumerate_paths(
                    lambda src: run_session(ws, params, store, src), D
                ):
                    sessions += 1
                    if result.recovered == want:
                        successes += 1
                    elif len(failures) < 5:
                        failures.append(
                            "pair %s: decode mismatch on tape %s"
                            % (_ws_str(ws), result.tape.describe())
                        )
        else:
            rng = SamplerSource(seed + 7919 * (p_idx + 1))
            per_pair = max(1, samples // fills) * fills
            for t in range(per_pair):
                store = stores[t % fills]
                result = run_session(ws, params, store, rng)
                sessions += 1
                if result.recovered == store[want_index]:
                    successes += 1
                elif len(failures) < 5:
                    failures.append(
                        "pair %s: decode mismatch on tape %s"
                        % (_ws_str(ws), result.tape.describe())
                    )

    return RecoverabilityReport(
        params=params,
        mode=mode,
        pairs=npairs,
        fills=fills,
        sessions=sessions,
        successes=successes,
        seed=seed,
        passed=successes == sessions and sessions > 0,
        failures=tuple(failures),
    )


# --- Monte Carlo ----------------------------------------------------------


@dataclass(frozen=True)
class MonteCarloReport:
    params: SchemeParams
    ws: DemandSideInfo
    trials: int
    seed: int
    decode_successes: int
    mean_download_symbols: float
    empirical_rate: float
    exact_rate: Optional[Fraction]
    tv_distance: Optional[float]
    tv_limit: Optional[float]
    passed: bool

    def describe(self) -> str:
        p = self.params
        lines = [
            "monte carlo audit: N=%d K=%d M=%d L=%d q=%d  %s" % (p.N, p.K, p.M, p.L, p.q, _ws_str(self.ws)),
            "trials: %d  seed: %d" % (self.trials, self.seed),
            "decode successes: %d/%d" % (self.decode_successes, self.trials),
            "mean downloaded symbols: %.6f" % self.mean_download_symbols,
            "empirical rate: %.6f" % self.empirical_rate,
        ]
        if self.exact_rate is not None:
            lines.append("exact rate: %s (= %.6f)" % (self.exact_rate, float(self.exact_rate)))
        if self.tv_distance is not None:
            lines.append("TV distance, pooled queries vs exact: %.6f" % self.tv_distance)
            lines.append("TV tolerance at these trial counts: %.6f" % self.tv_limit)
        else:
            lines.append("TV distance: skipped (exact reference over budget)")
        lines.append("result: %s" % _pf(self.passed))
        return "\n".join(lines)


def monte_carlo_audit(
    params: SchemeParams,
    ws: Optional[DemandSideInfo] = None,
    trials: int = 10 ** 5,
    seed: int = 0,
    budget: int = DEFAULT_BUDGET,
    tv_threshold: float = 0.01,
) -> MonteCarloReport:
    """Sampled cross-check of the exact audits.

    Runs seeded end-to-end sessions against one seeded message store and
    compares the pooled empirical query distribution (all servers' queries
    of all trials) against the exact enumerated distribution, alongside
    empirical download rate and decode success. The pass verdict covers
    decode success on every trial plus, when the exact reference fits the
    budget, the TV distance staying under the larger of tv_threshold and a
    sample-size-aware tolerance: the exact bound on the expected TV of a
    faithful sampler, sum_v sqrt(p_v (1 - p_v) / pool) / 2, plus a
    concentration tail that a faithful sampler exceeds with probability
    under 10^-6 (TV moves at most N/pool per resampled session, so the
    exceedance probability is exp(-2 t^2 trials)). Small runs therefore
    pass on sampling noise alone; large runs bind at tv_threshold.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1, got %d" % trials)
    if ws is None:
        ws = canonical_pair(params)
    ws.check(params)
    store = MessageStore.random(params, seed ^ 0x5EED)
    rng = SamplerSource(seed)
    want = store[ws.W]

    counts: Counter = Counter()
    successes = 0
    downloaded = 0
    for _ in range(trials):
        result = run_session(ws, params, store, rng)
        successes += result.recovered == want
        downloaded += result.downloaded_symbols
        counts.update(result.queries)

    mean_download = downloaded / trials
    empirical_rate = params.L * trials / downloaded if downloaded else math.inf

    exact: Optional[Fraction] = None
    tv: Optional[float] = None
    tv_limit: Optional[float] = None
    if estimate_enumeration_cost(params) <= budget:
        masses, D = _canonical_masses(params.N, params.K, params.M)
        pool = trials * params.N
        diff = Fraction(0)
        mean_bound = 0.0
        exact_masses = masses[0]
        for v in set(counts) | set(exact_masses):
            emp = Fraction(counts.get(v, 0), pool)
            ex = Fraction(exact_masses.get(v, 0), D)
            diff += abs(emp - ex)
            p = exact_masses.get(v, 0) / D
            mean_bound += math.sqrt(p * (1 - p) / pool)
        tv = float(diff / 2)
        tail = math.sqrt(math.log(10 ** 6) / (2 * trials))
        tv_limit = mean_bound / 2 + tail
        exact = exact_rate(params, budget)

    passed = successes == trials and (tv is None or tv < max(tv_threshold, tv_limit))
    return MonteCarloReport(
        params=params,
        ws=ws,
        trials=trials,
        seed=seed,
        decode_successes=successes,
        mean_download_symbols=mean_download,
        empirical_rate=empirical_rate,
        exact_rate=exact,
        tv_distance=tv,
        tv_limit=tv_limit,
        passed=passed,
    )


def default_audit_grid() -> tuple:
    """The default parameter tuples audited by the command-line front end.

    Every valid (N,K,M) with N <= 4 and K <= 6, with L = N-1 and
    q in {2, 3}; covers every closed-form case branch (support size 0,
    M+1, strictly between, and K).
    """
    grid = []
    for n in (2, 3, 4):
        for k in range(2, 7):
            for m in range(1, min(n - 1, k - 1) + 1):
                for q in (2, 3):
                    grid.append(SchemeParams(n, k, m, n - 1, q))
    return tuple(grid)
