"""Expand substitution rules, certify their patch language, and count patches.

Walks through the three bundled one-dimensional rules and one 2d rule,
printing the complexity series each produces and what the p(n) <= n
periodicity test says about them.
"""

import numpy as np

from aperiodic_lab import (
    certify,
    certify_language,
    complexity,
    expand,
    morse_hedlund_check,
    primitivity_check,
)


def show_rule(name, seed, levels, rmax):
    rule = certify.fixture_rule(name)
    prim = primitivity_check(rule)
    config = expand(rule, seed, levels)
    certified = certify_language(rule, config, rmax)
    print(f"\n== {name} (seed {seed!r}, {levels} levels) ==")
    print(f"window {config.shape}, primitive: {prim.primitive} (power {prim.power})")
    print(f"patch language certified through radius {certified}")

    series = complexity(config, certified)
    rs = series.rs()
    print("r     :", " ".join(f"{r:4d}" for r in rs[:12]))
    print("p(r)  :", " ".join(f"{series.count(r):4d}" for r in rs[:12]))

    if config.dimension == 1:
        verdict = morse_hedlund_check(series)
        if verdict.witness_n is None:
            print(f"no p(n) <= n witness up to n = {verdict.rmax_checked}: "
                  "consistent with an aperiodic word")
        else:
            print(f"p(n) <= n at n = {verdict.witness_n}: the word is periodic")


def main():
    show_rule("fibonacci", "a", 17, 30)
    show_rule("thue_morse", "0", 12, 20)
    show_rule("periodic_ab", "a", 8, 20)
    show_rule("thue_morse_2d", "0", 6, 8)

    # the fibonacci counts follow the n + 1 line exactly
    rule = certify.fixture_rule("fibonacci")
    config = expand(rule, "a", 17)
    certify_language(rule, config, 30)
    series = complexity(config, 30)
    assert all(series.count(n) == n + 1 for n in range(1, 31))
    print("\nfibonacci p(n) = n + 1 holds for n = 1..30")


if __name__ == "__main__":
    main()
