"""Substitution rules, expansion, and language certification."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from aperiodic_lab.errors import CapacityError, FormatError
from aperiodic_lab.symbolic import (
    Alphabet,
    Configuration,
    SubstitutionRule,
    certify_language,
    expand,
    primitivity_check,
)


def test_alphabet_membership_and_index():
    ab = Alphabet(("a", "b", "c"))
    assert "b" in ab
    assert "z" not in ab
    assert ab.index("c") == 2
    assert len(ab) == 3


def test_alphabet_rejects_duplicates():
    with pytest.raises(FormatError):
        Alphabet(("a", "a"))


def test_fibonacci_lengths(fibonacci_rule):
    # expansion lengths follow the Fibonacci recurrence
    lengths = [expand(fibonacci_rule, "a", k).n_cells for k in range(8)]
    assert lengths == [1, 2, 3, 5, 8, 13, 21, 34]


def test_fibonacci_level5_word(fibonacci_rule):
    config = expand(fibonacci_rule, "a", 5)
    word = "".join(config.alphabet.symbols[i] for i in config.cells)
    assert word == "abaababaabaab"


def test_thue_morse_word(thue_morse_rule):
    config = expand(thue_morse_rule, "0", 4)
    word = "".join(config.alphabet.symbols[i] for i in config.cells)
    assert word == "0110100110010110"


def test_expansion_prefix_consistency(fibonacci_rule):
    """For a rule whose image of the seed starts with the seed, deeper
    expansions extend shallower ones."""
    prev = expand(fibonacci_rule, "a", 3).cells
    for k in range(4, 9):
        cur = expand(fibonacci_rule, "a", k).cells
        assert np.array_equal(cur[: len(prev)], prev)
        prev = cur


def test_2d_expansion_shape(tm2d_rule, chair_rule):
    assert expand(tm2d_rule, "0", 3).shape == (8, 8)
    assert expand(chair_rule, "se", 4).shape == (16, 16)


def test_2d_block_layout(tm2d_rule):
    config = expand(tm2d_rule, "0", 1)
    assert config.cells.tolist() == [[0, 1], [1, 0]]
    config = expand(tm2d_rule, "0", 2)
    assert config.cells.tolist() == [
        [0, 1, 1, 0],
        [1, 0, 0, 1],
        [1, 0, 0, 1],
        [0, 1, 1, 0],
    ]


def test_expand_rejects_negative_levels(fibonacci_rule):
    with pytest.raises(FormatError):
        expand(fibonacci_rule, "a", -1)


def test_expand_cell_cap(fibonacci_rule):
    with pytest.raises(CapacityError):
        expand(fibonacci_rule, "a", 40, cell_cap=1000)


def test_certify_language_monotone(fibonacci_rule):
    config = expand(fibonacci_rule, "a", 10)
    r1 = certify_language(fibonacci_rule, config, 5)
    assert r1 == 5
    r2 = certify_language(fibonacci_rule, config, 60)
    assert r2 >= r1
    assert config.certified_radius == r2


def test_certify_language_needs_matching_provenance(fibonacci_rule, thue_morse_rule):
    config = expand(thue_morse_rule, "0", 6)
    with pytest.raises(FormatError):
        certify_language(fibonacci_rule, config, 4)


def test_primitivity(fibonacci_rule, chair_rule):
    rep = primitivity_check(fibonacci_rule)
    assert rep.primitive and rep.power == 2
    rep = primitivity_check(chair_rule)
    assert rep.primitive and rep.power == 2


def test_non_primitive_rule():
    ab = Alphabet(("a", "b"))
    rule = SubstitutionRule(ab, 1, {"a": ("a", "a"), "b": ("b", "b")})
    rep = primitivity_check(rule)
    assert not rep.primitive
    assert rep.power is None


def test_rule_validates_images():
    ab = Alphabet(("a", "b"))
    with pytest.raises(FormatError):
        SubstitutionRule(ab, 1, {"a": ("a", "z"), "b": ("a",)})
    with pytest.raises(FormatError):
        SubstitutionRule(ab, 1, {"a": ("a", "b")})  # image for b missing


def test_rule_2d_images_must_be_rectangular():
    ab = Alphabet(("0", "1"))
    with pytest.raises(FormatError):
        SubstitutionRule(ab, 2, {"0": (("0", "1"),), "1": (("1",), ("0",))})


@settings(max_examples=30, deadline=None)
@given(levels=st.integers(min_value=0, max_value=8), seed=st.sampled_from(["0", "1"]))
def test_tm_abelianization_balance(thue_morse_rule, levels, seed):
    """Every expansion of either seed has equal symbol counts at even levels
    of length, which for this rule means exactly length/2 each from level 1 on."""
    config = expand(thue_morse_rule, seed, levels)
    counts = np.bincount(config.cells, minlength=2)
    if levels >= 1:
        assert counts[0] == counts[1]
    assert counts.sum() == 2**levels


@settings(max_examples=20, deadline=None)
@given(levels=st.integers(min_value=1, max_value=6))
def test_chair_symbol_counts_match_abelianization(chair_rule, levels):
    config = expand(chair_rule, "se", levels)
    counts = np.bincount(config.cells.ravel(), minlength=4)
    m = chair_rule.abelianization()
    vec = np.zeros(4, dtype=np.int64)
    vec[chair_rule.alphabet.index("se")] = 1
    expected = np.linalg.matrix_power(m, levels) @ vec
    assert np.array_equal(counts, expected)
