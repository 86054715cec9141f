"""Block codes, local derivability round trips, and pointing rules."""

import numpy as np
import pytest

from aperiodic_lab.derivation import (
    BlockCode,
    PointingRule,
    apply_code,
    apply_pointing,
    mld_check,
    parse_pattern_key,
    pattern_key,
    union_pointing,
)
from aperiodic_lab.errors import (
    IncompleteTableError,
    InsufficientWindowError,
    NotRelativelyDenseError,
)
from aperiodic_lab.symbolic import Alphabet, certify_language, expand

from conftest import word_config


def symbols_of(config):
    return "".join(config.alphabet.symbols[i] for i in config.cells)


def two_gram_code(config):
    """Radius-1 code mapping each letter to the pair (self, right neighbor)."""
    pairs = sorted(
        {
            config.alphabet.symbols[a] + config.alphabet.symbols[b]
            for a, b in zip(config.cells, config.cells[1:])
        }
    )
    out = Alphabet(tuple(pairs))

    def fn(pattern):
        s = config.alphabet.symbols
        return s[int(pattern[1])] + s[int(pattern[2])]

    return BlockCode.from_function(config, 1, fn, out, name="two-gram"), out


def test_pattern_key_roundtrip():
    ab = Alphabet(("a", "b", "c"))
    cells = np.array([[0, 2], [1, 1]], dtype=np.uint8)
    key = pattern_key(cells, ab)
    assert key == "a,c;b,b"
    assert np.array_equal(parse_pattern_key(key, ab, 2), cells)


def test_relabel_code(fib_config):
    xy = Alphabet(("x", "y"))
    code = BlockCode.from_function(
        fib_config,
        0,
        lambda p: "xy"[int(p.ravel()[0])],
        xy,
        name="relabel",
    )
    recoded = apply_code(fib_config, code)
    assert recoded.alphabet.symbols == ("x", "y")
    assert recoded.n_cells == fib_config.n_cells
    assert recoded.certified_radius == fib_config.certified_radius
    assert symbols_of(recoded) == symbols_of(fib_config).replace("a", "x").replace("b", "y")


def test_two_gram_code_on_fibonacci(fib_config):
    code, out = two_gram_code(fib_config)
    assert out.symbols == ("aa", "ab", "ba")
    recoded = apply_code(fib_config, code)
    assert recoded.n_cells == fib_config.n_cells - 2
    assert recoded.certified_radius == fib_config.certified_radius - 1
    # spot check: abaab -> ab,ba,aa,ab anchored one cell in
    head = symbols_of(fib_config)[:5]
    assert head == "abaab"
    assert [out.symbols[i] for i in recoded.cells[:3]] == ["ba", "aa", "ab"]


def test_apply_code_requires_certified_margin(fibonacci_rule):
    config = expand(fibonacci_rule, "a", 8)  # never certified
    xy = Alphabet(("x", "y"))
    code = BlockCode.from_function(config, 1, lambda p: "x", xy)
    with pytest.raises(InsufficientWindowError):
        apply_code(config, code)


def test_code_table_is_total_over_window_only(fib_config):
    code, out = two_gram_code(fib_config)
    bb = np.array([1, 1, 1], dtype=np.uint8)  # pattern bb never occurs
    with pytest.raises(IncompleteTableError):
        code.output_index(bb)


def test_mld_roundtrip_fibonacci(fib_config):
    code, out = two_gram_code(fib_config)
    back = BlockCode.from_function(
        apply_code(fib_config, code),
        0,
        lambda p: out.symbols[int(p.ravel()[0])][0],
        fib_config.alphabet,
        name="first-letter",
    )
    rep = mld_check(fib_config, code, back)
    assert rep.mld
    assert rep.total_radius == 1
    assert rep.failing_cell is None


def test_mld_detects_collapse(fib_config):
    """A code that forgets the letter cannot be locally inverted."""
    one = Alphabet(("z",))
    collapse = BlockCode.from_function(fib_config, 0, lambda p: "z", one)
    back = BlockCode.from_function(
        apply_code(fib_config, collapse),
        1,
        lambda p: "a",
        fib_config.alphabet,
    )
    rep = mld_check(fib_config, collapse, back)
    assert not rep.mld
    assert rep.failing_cell is not None


def test_mark_symbol_mask(fib_config):
    mark_b = PointingRule.mark_symbol(fib_config.alphabet, "b")
    mask = mark_b.mark_mask(fib_config)
    assert mask.dtype == bool
    assert np.array_equal(mask, fib_config.cells == fib_config.alphabet.index("b"))


def test_mark_all_and_union(fib_config):
    ab = fib_config.alphabet
    everything = PointingRule.mark_all(ab)
    union = union_pointing(
        PointingRule.mark_symbol(ab, "a"), PointingRule.mark_symbol(ab, "b")
    )
    m1 = everything.mark_mask(fib_config)
    m2 = union.mark_mask(fib_config)
    assert m1.all()
    assert np.array_equal(m1, m2)


def test_union_of_different_radii(fib_config):
    ab = fib_config.alphabet
    wide = PointingRule(
        dimension=1,
        radius=1,
        name="b-after-a",
        alphabet=ab,
        fn=lambda p: ab.symbols[int(p[0])] == "a" and ab.symbols[int(p[1])] == "b",
    )
    union = union_pointing(PointingRule.mark_symbol(ab, "a"), wide)
    assert union.radius == 1
    mask = union.mark_mask(fib_config)
    cells = fib_config.cells
    inner = slice(1, len(cells) - 1)
    expected = (cells == 0) | np.concatenate(
        ([False], (cells[:-2] == 0) & (cells[1:-1] == 1), [False])
    )
    assert np.array_equal(mask[inner], expected[inner])


def test_apply_pointing_measures_lattice(fib_config):
    mark_b = PointingRule.mark_symbol(fib_config.alphabet, "b")
    pset = apply_pointing(fib_config, mark_b)
    assert pset.n_marks == int((fib_config.cells == 1).sum())
    assert pset.discreteness == 2.0  # bb never occurs, bab does
    assert pset.covering == 1        # a-runs have length at most 2
    assert pset.points().shape == (pset.n_marks, 1)


def test_apply_pointing_rejects_sparse_marks():
    config = word_config("ab", "a" * 50 + "b" + "a" * 50, certified_radius=3)
    mark_b = PointingRule.mark_symbol(config.alphabet, "b")
    with pytest.raises(NotRelativelyDenseError):
        apply_pointing(config, mark_b, density_cap=10)


def test_apply_pointing_no_marks():
    config = word_config("ab", "aaaa", certified_radius=1)
    mark_b = PointingRule.mark_symbol(config.alphabet, "b")
    with pytest.raises(NotRelativelyDenseError):
        apply_pointing(config, mark_b)


def test_pointing_2d(tm2d_config):
    mark0 = PointingRule.mark_symbol(tm2d_config.alphabet, "0", dimension=2)
    pset = apply_pointing(tm2d_config, mark0)
    assert pset.coords.shape[1] == 2
    assert pset.discreteness == 1.0
    assert pset.covering == 1
