"""Exact audit machinery: privacy, census, rate, recoverability, sampling."""

from fractions import Fraction

import pytest

from pirpsi import census_golden
from pirpsi.auditor import (
    BudgetExceeded,
    all_pairs,
    answer_appearance_probability,
    answer_set_census,
    canonical_pair,
    capacity,
    check_privacy,
    check_rate,
    check_recoverability,
    closed_form_query_prob,
    default_audit_grid,
    estimate_enumeration_cost,
    exact_path_count,
    exact_query_distribution,
    exact_rate,
    expected_download_symbols,
    monte_carlo_audit,
    pair_count,
)
from pirpsi.core import DemandSideInfo, SchemeParams

P452 = SchemeParams(4, 5, 2, 3, 2)
P231 = SchemeParams(2, 3, 1, 1, 2)


def test_capacity_values():
    assert capacity(P452) == Fraction(16, 21)
    assert capacity(P231) == Fraction(2, 3)
    assert capacity(SchemeParams(3, 4, 1, 2, 2)) == Fraction(9, 13)
    # K = M+1: everything but the demand is side information
    assert capacity(SchemeParams(3, 3, 2, 2, 2)) == 1
    assert capacity(SchemeParams(2, 2, 1, 1, 2)) == 1
    assert capacity(SchemeParams(4, 3, 2, 3, 5)) == 1


def test_closed_form_values_452():
    want = {0: Fraction(1, 64), 1: 0, 2: 0, 3: Fraction(1, 576), 4: Fraction(1, 1728), 5: Fraction(1, 864)}
    for s, val in want.items():
        assert closed_form_query_prob(s, P452) == val
    with pytest.raises(ValueError, match="support size"):
        closed_form_query_prob(6, P452)
    with pytest.raises(ValueError, match="support size"):
        closed_form_query_prob(-1, P452)


def test_closed_form_covers_all_sizes():
    # non-negative everywhere; zero exactly on [1:M] (and possibly inside)
    for p in default_audit_grid():
        for s in range(p.K + 1):
            val = closed_form_query_prob(s, p)
            assert val >= 0
            if 1 <= s <= p.M:
                assert val == 0


def test_pair_enumeration():
    pairs = list(all_pairs(P231))
    assert len(pairs) == pair_count(P231) == 6
    assert pairs[0] == canonical_pair(P231)
    assert len(set(pairs)) == 6


def test_exact_query_distribution_small():
    dist = exact_query_distribution(canonical_pair(P231), 0, P231)
    assert dist.total() == 1
    assert dist.masses[(0, 0, 0)] == Fraction(1, 4)
    profile = dist.support_profile()
    assert profile[0] == (1, Fraction(1, 4))
    assert profile[2] == (3, Fraction(1, 4))
    with pytest.raises(ValueError, match="server index"):
        exact_query_distribution(canonical_pair(P231), 2, P231)


def test_check_privacy_small_tuples():
    for p in (P231, SchemeParams(3, 4, 2, 2, 2), SchemeParams(2, 4, 1, 1, 2)):
        report = check_privacy(p)
        assert report.passed, report.describe()
        assert report.pairs_checked == pair_count(p)
        assert not report.failures


def test_privacy_budget_refusal():
    big = SchemeParams(6, 8, 5, 5, 2)
    with pytest.raises(BudgetExceeded) as info:
        check_privacy(big)
    assert info.value.estimate > info.value.budget
    # small budget refuses even tiny tuples
    with pytest.raises(BudgetExceeded):
        check_privacy(P231, budget=1)


def test_estimate_bounds_exact_path_count():
    for p in default_audit_grid():
        assert exact_path_count(p) <= estimate_enumeration_cost(p)


def test_rate_small_tuples():
    assert expected_download_symbols(P231) == Fraction(3, 2)
    assert exact_rate(P231) == Fraction(2, 3)
    r = check_rate(SchemeParams(3, 4, 1, 2, 2))
    assert r.passed and r.rate == Fraction(9, 13)


def test_census_231():
    report = answer_set_census(canonical_pair(P231), P231)
    assert report.passed
    assert report.total_mass == 1
    assert len(report.rows) == 3
    nonzero = [r for r in report.rows if r.per_set_probability > 0]
    assert len(nonzero) == 2
    assert {r.per_set_probability for r in nonzero} == {Fraction(1, 2)}
    zero = [r for r in report.rows if r.per_set_probability == 0]
    assert zero[0].dropout == 0  # materialized, never drawn


def test_census_golden_452():
    report = answer_set_census(canonical_pair(P452), P452)
    assert report.passed
    ok, diffs = census_golden.compare_census(report)
    assert ok, diffs
    # per-type mass accounting closes exactly
    assert sum(r.total_probability for r in report.rows) == 1


def test_census_detects_fixture_mismatch():
    report = answer_set_census(canonical_pair(P231), P231)
    ok, diffs = census_golden.compare_census(report)
    assert not ok
    assert any("missing type" in d for d in diffs)


def test_appearance_values_452():
    ws = canonical_pair(P452)
    three = answer_appearance_probability((1, 1, 1, 0, 0), ws, P452)
    four = answer_appearance_probability((1, 1, 1, 1, 0), ws, P452)
    five = answer_appearance_probability((1, 1, 1, 1, 1), ws, P452)
    ok, lines = census_golden.compare_appearance(three, four, five)
    assert ok, lines
    # appearance = servers x per-vector mass, since queries are distinct
    assert five == 4 * closed_form_query_prob(5, P452)
    assert five != census_golden.APPEARANCE_5_REFERENCE
    assert any("informational" in line for line in lines)
    with pytest.raises(ValueError, match="vector length"):
        answer_appearance_probability((1, 1), ws, P452)


def test_recoverability_exhaustive_small():
    report = check_recoverability(P231, fills=3, seed=2, mode="exhaustive")
    assert report.passed
    assert report.sessions == exact_path_count(P231) * pair_count(P231) * 3
    assert report.successes == report.sessions


def test_recoverability_sampled_and_auto():
    sampled = check_recoverability(P452, fills=2, seed=0, mode="sampled", samples=20)
    assert sampled.passed and sampled.mode == "sampled"
    auto = check_recoverability(P231, fills=1, mode="auto")
    assert auto.mode == "exhaustive"
    big = check_recoverability(SchemeParams(4, 6, 3, 3, 2), fills=1, mode="auto", samples=10)
    assert big.mode == "sampled" and big.passed
    with pytest.raises(ValueError, match="fills"):
        check_recoverability(P231, fills=0)
    with pytest.raises(ValueError, match="mode"):
        check_recoverability(P231, mode="bogus")


def test_monte_carlo_small():
    report = monte_carlo_audit(P231, trials=3000, seed=8)
    assert report.passed
    assert report.decode_successes == 3000
    assert report.tv_distance is not None and report.tv_limit is not None
    assert report.tv_distance < report.tv_limit
    with pytest.raises(ValueError, match="trials"):
        monte_carlo_audit(P231, trials=0)


def test_monte_carlo_determinism():
    a = monte_carlo_audit(P231, trials=500, seed=3)
    b = monte_carlo_audit(P231, trials=500, seed=3)
    assert a.describe() == b.describe()


def test_monte_carlo_skips_exact_over_budget():
    report = monte_carlo_audit(P231, trials=200, seed=1, budget=1)
    assert report.tv_distance is None
    assert report.exact_rate is None
    assert report.passed  # decode-only verdict
    assert "skipped" in report.describe()


def test_default_audit_grid_shape():
    grid = default_audit_grid()
    assert len(grid) == 52
    assert P452 in grid
    assert all(p.L == p.N - 1 and p.q in (2, 3) for p in grid)
    # covers every closed-form case branch: s=0, s=M+1, M+1<s<K, s=K
    assert any(p.K > p.M + 2 for p in grid)


def test_privacy_report_table_rows():
    report = check_privacy(P231)
    header, rows = report.table_rows()
    assert header[0] == "s"
    assert len(rows) == 2
