"""Patch counting against naive oracles, witnesses, and growth estimators."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from aperiodic_lab.counting import (
    ComplexitySeries,
    check_equivalence,
    complexity,
    entropy_estimate,
    exponent_estimate,
    morse_hedlund_check,
)
from aperiodic_lab.derivation import PointingRule
from aperiodic_lab.errors import (
    InsufficientDataError,
    RangeOverlapError,
    UnsupportedDimensionError,
)

from conftest import word_config


def naive_count_1d(cells, r):
    seen = set()
    for i in range(len(cells) - r + 1):
        seen.add(tuple(cells[i : i + r]))
    return len(seen)


def naive_count_2d(cells, r):
    h, w = cells.shape
    seen = set()
    for i in range(h - r + 1):
        for j in range(w - r + 1):
            seen.add(cells[i : i + r, j : j + r].tobytes())
    return len(seen)


@settings(max_examples=40, deadline=None)
@given(
    data=st.lists(st.integers(0, 2), min_size=6, max_size=60),
    rmax=st.integers(1, 5),
)
def test_count_matches_naive_1d(data, rmax):
    cells = np.array(data, dtype=np.uint8)
    config = word_config("abc", "".join("abc"[v] for v in data))
    series = complexity(config, min(rmax, len(data)))
    for r in series.rs():
        assert series.count(r) == naive_count_1d(cells, r)


@settings(max_examples=25, deadline=None)
@given(
    seed=st.integers(0, 10_000),
    h=st.integers(4, 12),
    w=st.integers(4, 12),
    rmax=st.integers(1, 4),
)
def test_count_matches_naive_2d(seed, h, w, rmax):
    from aperiodic_lab.symbolic import Alphabet, Configuration

    rng = np.random.default_rng(seed)
    cells = rng.integers(0, 2, size=(h, w), dtype=np.uint8)
    config = Configuration(2, Alphabet(("0", "1")), cells)
    series = complexity(config, min(rmax, h, w))
    for r in series.rs():
        assert series.count(r) == naive_count_2d(cells, r)


def test_fibonacci_counts(fib_config):
    series = complexity(fib_config, 30)
    for n in range(1, 31):
        assert series.count(n) == n + 1
        assert series.is_certified(n)


def test_certification_cutoff(fibonacci_rule):
    from aperiodic_lab.symbolic import certify_language, expand

    config = expand(fibonacci_rule, "a", 10)
    certify_language(fibonacci_rule, config, 6)
    series = complexity(config, 10)
    assert series.certified_rs() == [1, 2, 3, 4, 5, 6]
    assert set(series.rs()) == set(range(1, 11))


def test_pointed_certification_shrinks(fibonacci_rule):
    """A pointing of radius k costs 2k of certified range."""
    from aperiodic_lab.symbolic import certify_language, expand

    config = expand(fibonacci_rule, "a", 12)
    certify_language(fibonacci_rule, config, 10)
    assert config.certified_radius == 10
    mark_a = PointingRule.mark_symbol(config.alphabet, "a")
    widened = PointingRule(
        dimension=1,
        radius=2,
        name="a-with-margin",
        alphabet=config.alphabet,
        fn=lambda pattern: config.alphabet.symbols[int(pattern[2])] == "a",
    )
    full = complexity(config, 10)
    p0 = complexity(config, 10, pointing=mark_a)
    p2 = complexity(config, 10, pointing=widened)
    assert max(full.certified_rs()) == 10
    assert max(p0.certified_rs()) == 10
    assert max(p2.certified_rs()) == 10 - 2 * 2
    for r in range(1, 11):
        assert p0.count(r) <= full.count(r)


def test_pointed_counts_naive(fib_config):
    """Counting only patches anchored at letter a, checked by brute force."""
    mark_a = PointingRule.mark_symbol(fib_config.alphabet, "a")
    series = complexity(fib_config, 6, pointing=mark_a)
    cells = fib_config.cells
    for r in range(1, 7):
        seen = {
            tuple(cells[i : i + r])
            for i in range(len(cells) - r + 1)
            if cells[i] == fib_config.alphabet.index("a")
        }
        assert series.count(r) == len(seen)


def test_equivalence_identity_witness():
    p = ComplexitySeries.synthetic(lambda r: r + 1, range(1, 21))
    w = check_equivalence(p, p, (2, 18))
    assert w.passed
    assert w.constants["C1"] == w.constants["C2"] == 1.0
    assert w.constants["m"] == w.constants["M"] == 1.0
    assert all(s >= 0 for s in w.slack.values())


def test_equivalence_scaled_series():
    p1 = ComplexitySeries.synthetic(lambda r: 4 * (r + 1), range(1, 41))
    p2 = ComplexitySeries.synthetic(lambda r: r + 1, range(1, 41))
    w = check_equivalence(p1, p2, (2, 30))
    assert w.passed
    assert w.constants["C2"] >= 4.0
    assert w.constants["C1"] <= 4.0


def test_equivalence_additive_form():
    p1 = ComplexitySeries.synthetic(lambda r: r + 3, range(1, 31))
    p2 = ComplexitySeries.synthetic(lambda r: r + 1, range(1, 31))
    w = check_equivalence(p1, p2, (3, 25), form="additive")
    assert w.passed
    assert w.constants["a"] <= 4 and w.constants["b"] <= 4


def test_equivalence_honest_failure():
    """Exponential vs linear growth admits no witness; the report keeps the
    best constants found and a negative worst slack."""
    p1 = ComplexitySeries.synthetic(lambda r: 2.0**r, range(1, 21))
    p2 = ComplexitySeries.synthetic(lambda r: r + 1.0, range(1, 21))
    w = check_equivalence(p1, p2, (2, 18))
    assert not w.passed
    assert min(w.slack.values()) < 0
    assert "C2" in w.constants


def test_equivalence_range_overlap_error():
    p1 = ComplexitySeries.synthetic(lambda r: r + 1, range(1, 6))
    p2 = ComplexitySeries.synthetic(lambda r: r + 1, range(20, 30))
    with pytest.raises(RangeOverlapError):
        check_equivalence(p1, p2, (2, 25))


def test_entropy_full_shift_synthetic():
    p = ComplexitySeries.synthetic(lambda r: 2.0**r, range(1, 41))
    rep = entropy_estimate(p, 1)
    assert rep.at_r == 40
    assert abs(rep.value - math.log(2)) < 1e-12
    assert rep.trend_decreasing  # constant counts as non-increasing


def test_entropy_needs_data():
    p = ComplexitySeries.synthetic(lambda r: 2.0**r, range(1, 4))
    with pytest.raises(InsufficientDataError):
        entropy_estimate(p, 1)


def test_entropy_fibonacci_trend(fib_config):
    series = complexity(fib_config, 30)
    rep = entropy_estimate(series, 1)
    assert rep.trend_decreasing
    assert rep.value < 0.2


def test_exponent_on_polynomial_series():
    p = ComplexitySeries.synthetic(lambda r: (r + 1) ** 2, range(1, 65))
    alpha = exponent_estimate(p, (8, 64))
    assert 1.9 < alpha < 2.05


def test_exponent_insufficient_range():
    p = ComplexitySeries.synthetic(lambda r: r + 1, range(1, 6))
    with pytest.raises(InsufficientDataError):
        exponent_estimate(p, (1, 5))


def test_mh_periodic_witness():
    config = word_config("ab", "ab" * 16, certified_radius=8)
    series = complexity(config, 8)
    verdict = morse_hedlund_check(series)
    assert verdict.witness_n == 2
    assert verdict.periodicity_detected


def test_mh_no_witness_fibonacci(fib_config):
    series = complexity(fib_config, 30)
    verdict = morse_hedlund_check(series)
    assert verdict.witness_n is None
    assert verdict.rmax_checked == 30


def test_mh_rejects_2d(tm2d_config):
    series = complexity(tm2d_config, 4)
    with pytest.raises(UnsupportedDimensionError):
        morse_hedlund_check(series)


def test_series_csv_roundtrip():
    p = ComplexitySeries.synthetic(lambda r: r + 1, range(1, 9))
    p.set_entry(9, 10, certified=False)
    q = ComplexitySeries.from_csv(p.to_csv())
    assert q.rs() == p.rs()
    assert q.certified_rs() == p.certified_rs()
    assert all(q.value(r) == p.value(r) for r in p.rs())
