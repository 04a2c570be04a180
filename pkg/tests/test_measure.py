import itertools
import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from evenpow.errors import CapacityError, ConfigError
from evenpow.exact import iter_powers, scan_exact
from evenpow.measure import (
    ENUMERATION_LIMIT,
    FIXED_ONE,
    FRAC_BITS,
    LOG10_2_FIXED,
    MULTIPLICITY_BOUND,
    build_B_d,
    d_of_k,
    fixed_to_decimal,
    heuristic_expected_count,
    measure_B_d,
    phase_from_decimal,
    prefixes,
    summability,
)

LN10 = math.log(10)


def mp_floor_kc(k, dps=80):
    """Floor of k*log10(2) with a margin check at high precision."""
    if k == 0:
        return 0
    with mpmath.workdps(dps):
        x = k * mpmath.log10(2)
        f = int(mpmath.floor(x))
        assert 1e-40 < x - f < 1 - 1e-40
        return f


def unmerged(d):
    """Oracle: every allowed d-digit prefix P with its interval."""
    out = []
    for first in range(1, 5):
        for rest in itertools.product(range(5), repeat=d - 1):
            p = int(str(first) + "".join(map(str, rest)))
            out.append((math.log10(p) - (d - 1), math.log10(p + 1) - (d - 1), p))
    return out


def test_stored_constant():
    with mpmath.workdps(120):
        assert LOG10_2_FIXED == int(mpmath.floor(mpmath.log10(2) * mpmath.mpf(2) ** FRAC_BITS))
    assert MULTIPLICITY_BOUND == 4


@pytest.mark.parametrize("k, d", [(0, 1), (10, 4), (10**15, 301029995663982)])
def test_d_of_k_examples(k, d):
    assert d_of_k(k) == d


def test_d_of_k_large_matches_mpmath():
    assert d_of_k(10**15) == mp_floor_kc(10**15) + 1


@given(st.integers(0, 10**18))
def test_d_of_k_property(k):
    assert d_of_k(k) == mp_floor_kc(k) + 1


def test_digit_count_law():
    for k, x in iter_powers(2000):
        assert x.digit_count() == d_of_k(k)


def test_d_of_k_fails_loudly_when_unresolvable():
    # a k so large that the error window covers the whole unit interval
    with pytest.raises(ArithmeticError):
        d_of_k(FIXED_ONE)


def test_phase_parsing():
    assert phase_from_decimal("0") == 0
    assert phase_from_decimal("0.5") == FIXED_ONE // 2
    assert fixed_to_decimal(FIXED_ONE // 4) == "0.25"
    x = 123456789 * 2**150
    assert phase_from_decimal(fixed_to_decimal(x)) == x
    for bad in ("1", "-0.1", "abc", "1.5"):
        with pytest.raises(ConfigError):
            phase_from_decimal(bad)


def test_build_depth_one():
    s = build_B_d(1)
    assert len(s) == 4
    assert s.lo[0] == 0.0
    assert s.hi[-1] == pytest.approx(math.log10(5), abs=1e-15)
    assert np.all(s.hi[:-1] == s.lo[1:])


def test_build_depth_two_against_unmerged():
    s = build_B_d(2)
    assert len(s) == 4
    raw = unmerged(2)
    assert len(raw) == 20
    assert s.measure == pytest.approx(math.fsum(hi - lo for lo, hi, _ in raw), abs=1e-13)
    blocks = [(10, 14), (20, 24), (30, 34), (40, 44)]
    for (lo, hi), (a, b) in zip(zip(s.lo, s.hi), blocks):
        assert lo == pytest.approx(math.log10(a) - 1, abs=1e-15)
        assert hi == pytest.approx(math.log10(b + 1) - 1, abs=1e-15)


def test_build_depth_three():
    s = build_B_d(3)
    assert len(s) == 20
    assert s.measure < build_B_d(2).measure
    assert s.measure == pytest.approx(math.fsum(hi - lo for lo, hi, _ in unmerged(3)), abs=1e-13)


@pytest.mark.parametrize("d", range(1, ENUMERATION_LIMIT + 1))
def test_intervals_sorted_disjoint_counts(d):
    s = build_B_d(d)
    assert len(s) == (4 if d == 1 else 4 * 5 ** (d - 2))
    assert np.all(s.lo < s.hi)
    assert np.all(s.hi[:-1] <= s.lo[1:])
    assert s.lo[0] >= 0 and s.hi[-1] <= math.log10(5) + 1e-15


def test_enumeration_limit():
    with pytest.raises(CapacityError):
        build_B_d(ENUMERATION_LIMIT + 1)
    with pytest.raises(ConfigError):
        build_B_d(0)


@pytest.mark.parametrize("d", range(2, ENUMERATION_LIMIT + 1))
def test_telescoping_identity(d):
    p = prefixes(d).astype(np.float64)
    direct = math.fsum(np.log1p(1 / p) / LN10)
    assert build_B_d(d).measure == pytest.approx(direct, rel=1e-12)


@pytest.mark.parametrize("d", range(1, 9))
def test_nesting(d):
    outer, inner = build_B_d(d), build_B_d(d + 1)
    i = np.searchsorted(outer.lo, inner.lo, side="right") - 1
    assert np.all(i >= 0)
    assert np.all(inner.lo >= outer.lo[i])
    assert np.all(inner.hi <= outer.hi[i] + 1e-15)


def test_measure_examples():
    r1 = measure_B_d(1)
    assert r1.exact_measure == pytest.approx(math.log10(5), abs=1e-12)
    assert math.fsum(math.log10((p + 1) / p) for p in range(1, 5)) == pytest.approx(r1.exact_measure, abs=1e-14)
    assert r1.decay_rate is None
    assert r1.upper_bound == pytest.approx(4 / LN10)

    r2 = measure_B_d(2)
    assert r2.exact_measure == pytest.approx(math.log10(945 / 384), abs=1e-12)
    assert r2.exact_measure == pytest.approx(math.log10(1.5 * 1.25 * (7 / 6) * 1.125), abs=1e-12)
    assert r2.exact_measure == pytest.approx(0.391100584141732, abs=1e-12)

    r4 = measure_B_d(4)
    assert r4.exact_measure <= 2**-1 / LN10
    assert r4.upper_bound == pytest.approx(0.217147240951626, abs=1e-12)


def test_measures_match_mpmath_prefix_sums():
    # frozen from 60-digit prefix sums
    frozen = [0.698970004336019, 0.391100584141732, 0.198310260573014, 0.0992978785680936, 0.0496561014182555]
    for d, want in enumerate(frozen, 1):
        assert measure_B_d(d).exact_measure == pytest.approx(want, abs=1e-14)


@pytest.mark.parametrize("d", range(1, ENUMERATION_LIMIT + 1))
def test_bound_dominance(d):
    r = measure_B_d(d)
    assert 0 < r.exact_measure < r.upper_bound
    assert r.upper_bound == 2.0 ** (3 - d) / LN10


@pytest.mark.parametrize("d", range(5, ENUMERATION_LIMIT + 1))
def test_decay_rate_near_half(d):
    assert abs(measure_B_d(d).decay_rate - 0.5) < 0.05


@pytest.mark.parametrize("d", range(2, ENUMERATION_LIMIT + 1))
def test_decay_rate_below_one(d):
    assert measure_B_d(d).decay_rate < 1


def test_membership_matches_digits():
    le4 = set(scan_exact(31).le4_p)
    for k in range(1, 31):
        f = float(Fraction(k * LOG10_2_FIXED % FIXED_ONE, FIXED_ONE))
        assert (f in build_B_d(d_of_k(k))) == (k in le4), k


def _geometric_tail(d_from):
    total, d = 0.0, d_from
    while True:
        term = MULTIPLICITY_BOUND * 2.0 ** (3 - d) / LN10
        if term < 1e-18:
            return total
        total += term
        d += 1


def test_summability_depth_one():
    r = summability(1)
    assert r.partial_sum == pytest.approx(4 * math.log10(5), abs=1e-12)
    assert r.tail_bound == pytest.approx(16 / LN10, abs=1e-12)
    assert r.tail_bound == pytest.approx(_geometric_tail(2), rel=1e-12)


def test_summability_depth_eight():
    r = summability(8)
    direct = 4 * math.fsum(measure_B_d(d).exact_measure for d in range(1, 9))
    assert r.partial_sum == pytest.approx(direct, rel=1e-14)
    assert r.tail_bound == pytest.approx(_geometric_tail(9), rel=1e-12)
    # frozen from a 40-digit merged-prefix sum; note it exceeds 5.5
    assert r.total_bound == pytest.approx(5.9774251000213955, abs=1e-12)


def test_summability_monotone():
    reports = [summability(d) for d in range(1, ENUMERATION_LIMIT + 1)]
    for a, b in zip(reports, reports[1:]):
        assert b.partial_sum >= a.partial_sum
        assert b.tail_bound < a.tail_bound
        assert b.total_bound <= a.total_bound
    assert len(reports[-1].per_d_measures) == ENUMERATION_LIMIT


def test_summability_bounds_actual_sum():
    # brute force sum over k of m(B_d(k)) while d(k) stays enumerable
    ks = [k for k in range(1, 200) if d_of_k(k) <= ENUMERATION_LIMIT]
    brute = math.fsum(measure_B_d(d_of_k(k)).exact_measure for k in ks)
    assert brute <= summability(ENUMERATION_LIMIT).total_bound


def test_heuristic_paper_geometric():
    v = heuristic_expected_count("paper_geometric")
    assert 4.30 <= v <= 4.34
    assert abs(v - 4.32) < 0.02
    assert 0.812 / (1 - 0.812) == pytest.approx(4.32, abs=0.005)


def test_heuristic_exact_dk():
    v = heuristic_expected_count("exact_dk")
    assert 2.0 <= v <= 5.0
    # frozen from a 60-digit direct sum over k < 400
    assert v == pytest.approx(3.0714285711624793, abs=1e-11)
    ratio = heuristic_expected_count("paper_geometric") / v
    assert 0.5 < ratio < 2


def test_heuristic_unknown_mode():
    with pytest.raises(ConfigError):
        heuristic_expected_count("bogus")
