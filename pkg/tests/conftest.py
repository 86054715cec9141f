import numpy as np
import pytest

from aperiodic_lab import certify
from aperiodic_lab.symbolic import Alphabet, Configuration, certify_language, expand


@pytest.fixture(scope="session")
def fibonacci_rule():
    return certify.fixture_rule("fibonacci")


@pytest.fixture(scope="session")
def thue_morse_rule():
    return certify.fixture_rule("thue_morse")


@pytest.fixture(scope="session")
def periodic_rule():
    return certify.fixture_rule("periodic_ab")


@pytest.fixture(scope="session")
def tm2d_rule():
    return certify.fixture_rule("thue_morse_2d")


@pytest.fixture(scope="session")
def chair_rule():
    return certify.fixture_rule("chair")


@pytest.fixture(scope="session")
def fib_config(fibonacci_rule):
    """Fibonacci word, long enough to certify patches through radius 30."""
    config = expand(fibonacci_rule, "a", 17)
    certify_language(fibonacci_rule, config, 30)
    assert config.certified_radius >= 30
    return config


@pytest.fixture(scope="session")
def tm_config(thue_morse_rule):
    config = expand(thue_morse_rule, "0", 12)
    certify_language(thue_morse_rule, config, 25)
    assert config.certified_radius >= 25
    return config


@pytest.fixture(scope="session")
def tm2d_config(tm2d_rule):
    config = expand(tm2d_rule, "0", 5)
    certify_language(tm2d_rule, config, 8)
    return config


def word_config(symbols, word, certified_radius=0):
    """1d configuration straight from a string of single-letter symbols."""
    ab = Alphabet(tuple(symbols))
    cells = np.array([ab.index(ch) for ch in word], dtype=np.uint8)
    return Configuration(
        dimension=1,
        alphabet=ab,
        cells=cells,
        certified_radius=certified_radius,
    )
