"""Exact checks of the pair-weight coefficients and their identities."""

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from pirpsi.core import SchemeParams
from pirpsi.distributions import (
    PijTable,
    binom,
    corrupted_m_coeff,
    lemma_grid,
    m_coeff,
    p_ij,
    p_theta_zero,
    verify_alternating_identity,
    verify_pij_distribution,
    verify_poly_identity,
    verify_summij,
)

P452 = SchemeParams(4, 5, 2, 3, 2)


def test_binom_convention():
    assert binom(5, 2) == 10
    assert binom(5, -1) == 0
    assert binom(3, 4) == 0


def test_m_coeff_values_452():
    # base, forced-zero band, the nonzero band, and the i=M extension point
    assert m_coeff(0, 0, P452) == 1
    assert m_coeff(1, 0, P452) == 0
    assert m_coeff(0, 1, P452) == 0
    assert m_coeff(0, 2, P452) == 0
    assert m_coeff(1, 2, P452) == 3
    assert m_coeff(2, 1, P452) == 3
    assert m_coeff(2, 2, P452) == 3
    assert m_coeff(2, 3, P452) == 18
    with pytest.raises(ValueError, match="admitted only for i=M"):
        m_coeff(0, 3, P452)


def test_m_coeff_edge_zero_for_two_servers():
    # the closed form can vanish inside its own domain
    p = SchemeParams(2, 4, 1, 1, 2)
    assert m_coeff(1, 2, p) == 0


def test_pij_table_452():
    table = PijTable.compute(P452)
    want = {
        (0, 0): Fraction(1, 16),
        (1, 2): Fraction(6, 16),
        (2, 1): Fraction(6, 16),
        (2, 2): Fraction(3, 16),
    }
    nonzero = {k: v for k, v in table.entries.items() if v}
    assert nonzero == want
    assert set(table.branch_values) == set(want)
    assert table.denominator == 4 ** 2
    assert sum(table.entries.values()) == 1


def test_p_ij_matches_table():
    table = PijTable.compute(P452)
    for key, val in table.entries.items():
        assert p_ij(key[0], key[1], P452) == val


def test_p_theta_zero_values():
    assert p_theta_zero(0, P452) == Fraction(2, 3)
    assert p_theta_zero(1, P452) == Fraction(1, 2)
    assert p_theta_zero(2, P452) == 0


def test_distribution_valid_on_lemma_grid():
    grid = lemma_grid()
    assert len(grid) == 85
    for p in grid:
        assert verify_pij_distribution(p).passed, p


def test_distribution_negative_control():
    r = verify_pij_distribution(P452, corrupted_m_coeff(1))
    assert not r.passed
    assert r.total != 1
    r = verify_pij_distribution(P452, corrupted_m_coeff(-50))
    assert not r.passed
    assert r.negative_entries


def test_summij_identity_grid():
    for p in lemma_grid():
        for j in range(1, p.K - p.M):
            assert verify_summij(p, j).passed, (p, j)


def test_summij_negative_control():
    assert not verify_summij(P452, 1, corrupted_m_coeff(1)).passed


def test_summij_rejects_bad_j():
    with pytest.raises(ValueError, match="j out of range"):
        verify_summij(P452, 0)
    with pytest.raises(ValueError, match="j out of range"):
        verify_summij(P452, 3)


def test_alternating_identity_grid():
    for p in lemma_grid():
        for j in range(1, p.K - p.M):
            assert verify_alternating_identity(j, p).passed, (p, j)


def test_poly_identity_monomials():
    for n in range(1, 13):
        for i in range(n):
            assert verify_poly_identity(n, [0] * i + [1]).passed, (n, i)


@given(
    st.integers(min_value=1, max_value=10),
    st.data(),
)
def test_poly_identity_random_polynomials(n, data):
    # any polynomial of degree < n is annihilated by the alternating sum
    coeffs = data.draw(
        st.lists(
            st.fractions(max_denominator=20),
            min_size=0,
            max_size=n,
        )
    )
    assert verify_poly_identity(n, coeffs).passed


def test_poly_identity_rejects_high_degree():
    with pytest.raises(ValueError, match="degree"):
        verify_poly_identity(2, [0, 0, 1])


def test_reports_describe():
    assert "valid" in verify_pij_distribution(P452).describe()
    assert "ok" in verify_summij(P452, 1).describe()
    bad = verify_pij_distribution(P452, corrupted_m_coeff(2)).describe()
    assert "INVALID" in bad
