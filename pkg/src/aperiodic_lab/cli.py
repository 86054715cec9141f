"""Command-line front end: generate, analyze, compare, certify.

Exit codes: 0 success, 1 a certification suite ran but failed, 2 usage,
3 data or precondition problems, 4 missing bundled fixtures, 5 internal
invariant violations.  Reports are canonical JSON on stdout (byte-identical
for identical inputs and seed); wall-clock timings go to stderr so they
never perturb report bytes.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import __version__, certify, formats
from .counting import (
    check_equivalence,
    complexity,
    entropy_estimate,
    exponent_estimate,
    morse_hedlund_check,
)
from .derivation import apply_code
from .errors import AperiodicLabError, FixtureError, FormatError
from .recurrence import linear_repetitivity_check, repetitivity
from .symbolic import certify_language, expand

EXIT_OK = 0
EXIT_SUITE_FAILED = 1
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_FIXTURE = 4
EXIT_INTERNAL = 5


def _worker_cap(n_tasks: int) -> int:
    raw = os.environ.get("APERIODIC_LAB_THREADS", "")
    try:
        cap = int(raw) if raw else 4
    except ValueError:
        raise FormatError(f"APERIODIC_LAB_THREADS must be an integer, got {raw!r}") from None
    return max(1, min(cap, n_tasks))


def _emit(report: dict, out: str | None) -> None:
    text = formats.dump_json(report)
    if out:
        Path(out).write_text(text)
    sys.stdout.write(text)


def cmd_generate(args) -> int:
    rule = formats.load_rule(args.rulefile)
    if args.seed_symbol not in rule.alphabet:
        sys.stderr.write(
            f"error: seed symbol {args.seed_symbol!r} is not in the alphabet "
            f"{list(rule.alphabet.symbols)}\n"
        )
        return EXIT_USAGE
    config = expand(rule, args.seed_symbol, args.levels)
    if args.certify:
        certify_language(rule, config, args.certify)
    formats.save_config(config, args.out)
    sys.stderr.write(
        f"wrote {config.n_cells} cells "
        f"(certified radius {config.certified_radius}) to {args.out}\n"
    )
    return EXIT_OK


def cmd_analyze(args) -> int:
    config = formats.load_config(args.configfile)
    inputs = {"config": formats.sha256_file(args.configfile)}
    pointing = None
    if args.pointing:
        pointing = formats.load_pointing(args.pointing)
        inputs["pointing"] = formats.sha256_file(args.pointing)
    if args.code:
        code = formats.load_code(args.code)
        inputs["code"] = formats.sha256_file(args.code)
        config = apply_code(config, code)
    outdir = Path(args.out_dir)
    outdir.mkdir(parents=True, exist_ok=True)

    report = {"version": __version__, "inputs": inputs, "sections": {}}
    failed = False
    results = {}
    durations = {}

    def timed(name, thunk):
        def run():
            t0 = time.perf_counter()
            try:
                return thunk()
            finally:
                durations[name] = time.perf_counter() - t0
        return run

    heavy = []
    if args.complexity:
        heavy.append(("complexity",
                      timed("complexity", lambda: complexity(config, args.complexity,
                                                             pointing=pointing))))
    if args.repetitivity:
        heavy.append(("repetitivity",
                      timed("repetitivity", lambda: repetitivity(config, args.repetitivity,
                                                                 pointing=pointing))))
    if heavy:
        with ThreadPoolExecutor(max_workers=_worker_cap(len(heavy))) as pool:
            futures = [(name, pool.submit(thunk)) for name, thunk in heavy]
        for name, fut in futures:
            try:
                results[name] = fut.result()
                report["sections"][name] = {"status": "ok"}
            except AperiodicLabError as exc:
                failed = True
                report["sections"][name] = {"status": "error", "message": str(exc)}
            sys.stderr.write(f"{name}: {durations.get(name, 0.0):.3f}s\n")

    if "complexity" in results:
        series = results["complexity"]
        path = outdir / "complexity.csv"
        formats.save_series(series, path)
        report["sections"]["complexity"]["csv"] = path.name
        report["sections"]["complexity"]["max_certified_r"] = max(
            series.certified_rs(), default=0
        )
    if "repetitivity" in results:
        series = results["repetitivity"]
        path = outdir / "repetitivity.csv"
        formats.save_series(series, path)
        report["sections"]["repetitivity"]["csv"] = path.name
        if len(series.certified_rs()) >= 4:
            lr = linear_repetitivity_check(series)
            report["sections"]["repetitivity"]["lambda_hat"] = lr.lambda_hat
            report["sections"]["repetitivity"]["lr_consistent"] = lr.lr_consistent

    def need_complexity():
        if "complexity" not in results:
            raise FormatError("this section needs --complexity RMAX in the same run")
        return results["complexity"]

    def entropy_section():
        rep = entropy_estimate(need_complexity(), config.dimension)
        return {"value": rep.value, "at_r": rep.at_r,
                "trend_decreasing": rep.trend_decreasing}

    def exponent_section():
        lo, hi = args.exponent
        return {"alpha": exponent_estimate(need_complexity(), (lo, hi)),
                "range": [lo, hi]}

    def mh_section():
        verdict = morse_hedlund_check(need_complexity())
        return {
            "witness_n": verdict.witness_n,
            "rmax_checked": verdict.rmax_checked,
            "verdict": "no-witness" if verdict.witness_n is None
                       else f"witness n={verdict.witness_n}",
        }

    for name, enabled, thunk in (
        ("entropy", args.entropy, entropy_section),
        ("exponent", args.exponent is not None, exponent_section),
        ("mh", args.mh, mh_section),
    ):
        if not enabled:
            continue
        try:
            report["sections"][name] = {"status": "ok", **thunk()}
        except AperiodicLabError as exc:
            failed = True
            report["sections"][name] = {"status": "error", "message": str(exc)}

    _emit(report, args.report)
    return EXIT_DATA if failed else EXIT_OK


def cmd_compare(args) -> int:
    s1 = formats.load_series(args.series1)
    s2 = formats.load_series(args.series2)
    witness = check_equivalence(s1, s2, tuple(args.range), form=args.form)
    report = {
        "version": __version__,
        "inputs": {
            "series1": formats.sha256_file(args.series1),
            "series2": formats.sha256_file(args.series2),
        },
        "witness": witness.to_json_dict(),
    }
    _emit(report, args.report)
    return EXIT_OK if witness.passed else EXIT_SUITE_FAILED


def cmd_certify(args) -> int:
    report = certify.run_suite(args.suite, seed=args.seed)
    report["version"] = __version__
    _emit(report, args.report)
    return EXIT_OK if report["passed"] else EXIT_SUITE_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aperiodic-lab",
        description="complexity / repetitivity / deformation analysis of substitution subshifts",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="expand a substitution rule to a configuration file")
    g.add_argument("rulefile")
    g.add_argument("seed_symbol")
    g.add_argument("levels", type=int)
    g.add_argument("-o", "--out", required=True)
    g.add_argument("--certify", type=int, default=0, metavar="RMAX",
                   help="also certify the patch language up to this radius")
    g.set_defaults(fn=cmd_generate)

    a = sub.add_parser("analyze", help="run counting/recurrence sections on a configuration")
    a.add_argument("configfile")
    a.add_argument("--complexity", type=int, default=0, metavar="RMAX")
    a.add_argument("--repetitivity", type=int, default=0, metavar="RMAX")
    a.add_argument("--pointing", metavar="FILE")
    a.add_argument("--code", metavar="FILE", help="apply this block code before analysis")
    a.add_argument("--entropy", action="store_true")
    a.add_argument("--exponent", nargs=2, type=int, metavar=("RMIN", "RMAX"))
    a.add_argument("--mh", action="store_true", help="Morse-Hedlund periodicity check")
    a.add_argument("--out-dir", default=".", help="directory for CSV outputs")
    a.add_argument("--report", metavar="FILE", help="also write the JSON report here")
    a.set_defaults(fn=cmd_analyze)

    c = sub.add_parser("compare", help="search an equivalence witness between two series files")
    c.add_argument("series1")
    c.add_argument("series2")
    c.add_argument("--form", choices=("multiplicative", "additive"), default="multiplicative")
    c.add_argument("--range", nargs=2, type=int, required=True, metavar=("RMIN", "RMAX"))
    c.add_argument("--report", metavar="FILE")
    c.set_defaults(fn=cmd_compare)

    t = sub.add_parser("certify", help="run a bundled certification suite")
    t.add_argument("suite", choices=certify.SUITES)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--report", metavar="FILE")
    t.set_defaults(fn=cmd_certify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    t0 = time.perf_counter()
    try:
        code = args.fn(args)
    except FixtureError as exc:
        sys.stderr.write(f"fixture error: {exc}\n")
        return EXIT_FIXTURE
    except FileNotFoundError as exc:
        sys.stderr.write(f"missing file: {exc}\n")
        return EXIT_DATA
    except AperiodicLabError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_DATA
    except Exception as exc:  # noqa: BLE001 - last-resort mapping to exit 5
        sys.stderr.write(f"internal error: {type(exc).__name__}: {exc}\n")
        return EXIT_INTERNAL
    sys.stderr.write(f"total: {time.perf_counter() - t0:.3f}s\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
