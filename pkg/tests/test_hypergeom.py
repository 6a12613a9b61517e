from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, strategies as st

from qwprio.errors import DataError
from qwprio.hypergeom import connectivity_pvalue, enrichment_pvalue, sf


def brute_tail(population, successes, draws, x):
    """Exact P(X >= x) by summing the hypergeometric pmf in rationals."""
    total = Fraction(0)
    for i in range(x, min(successes, draws) + 1):
        total += Fraction(comb(successes, i) * comb(population - successes, draws - i),
                          comb(population, draws))
    return total


def test_oracle_self_check():
    # 1 - C(8,3)/C(10,3) = 1 - 56/120
    assert brute_tail(10, 2, 3, 1) == Fraction(8, 15)


def test_connectivity_example():
    assert connectivity_pvalue(10, 2, 3, 1) == pytest.approx(8 / 15, abs=1e-15)


def test_zero_links_is_one():
    assert connectivity_pvalue(10, 2, 3, 0) == 1.0


def test_enrichment_examples():
    assert enrichment_pvalue(10, 2, 3, 0) == 1.0
    assert enrichment_pvalue(10, 2, 3, 1) == pytest.approx(8 / 15, abs=1e-15)
    assert enrichment_pvalue(20, 5, 4, 4) == pytest.approx(5 / 4845, rel=1e-12)


@pytest.mark.parametrize("args", [(10, 11, 3, 1), (10, 2, 3, 3), (10, 2, 3, -1), (10, 2.5, 3, 1)])
def test_enrichment_rejects_inconsistent_counts(args):
    with pytest.raises(DataError):
        enrichment_pvalue(*args)


def test_deep_tail_does_not_underflow():
    # ~1e-400 in linear space; the log-space value stays finite
    from qwprio.hypergeom import log_sf
    lp = log_sf(300, 17000, 300, 300)
    assert -2000 < lp < -900


@given(st.integers(1, 60).flatmap(lambda n: st.tuples(
    st.just(n), st.integers(0, n), st.integers(0, n)).flatmap(
        lambda t: st.tuples(st.just(t[0]), st.just(t[1]), st.just(t[2]),
                            st.integers(0, min(t[1], t[2]))))))
def test_matches_brute_force(case):
    n, succ, draws, x = case
    assert sf(x, n, succ, draws) == pytest.approx(float(brute_tail(n, succ, draws, x)),
                                                  abs=1e-12)


@given(st.integers(2, 50), st.integers(1, 10), st.integers(1, 20))
def test_monotone_in_overlap(n, s, k):
    s, k = min(s, n), min(k, n)
    # below the support minimum the tail is identically 1
    lo = max(0, k - (n - s))
    values = [connectivity_pvalue(n, s, k, ks) for ks in range(lo, min(s, k) + 1)]
    assert values[0] == 1.0
    assert all(0 < v <= 1 for v in values)
    assert all(a > b for a, b in zip(values, values[1:]))
