"""Command-line front end.

Subcommands: ``play`` runs a game and writes its trace, ``verify`` checks a
trace, ``extract`` appends a clique certificate to a trace, ``ramsey``
exercises the colouring tools, and ``iso`` inspects the back-and-forth map.

Exit codes: 0 success, 1 verification or runtime failure, 2 usage error.
A ``--config FILE`` of ``key=value`` lines may supply defaults for any
flag (keys use the flag's name with dashes or underscores); explicit flags
win over the file.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from . import analysis
from .breakers import make_breaker
from .dense_orders import DOMAIN_ORDERS, BackAndForth, Partition
from .engine import (IllegalMove, TraceFormatError, config_digest, parse_trace, replay,
                     run_game)
from .maker import MakerConfig, QStrategy
from .rationals import format_rational

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
CHECKS = ("legality", "maker", "pairing", "disjointness", "certificate")


class UsageError(Exception):
    """Bad input that the parser itself could not catch (exit 2)."""


@dataclass(frozen=True)
class RunConfig:
    maker: str
    breaker: str
    turns: int
    seed: int
    out: str
    threshold: int = 3
    m_max: int = 8
    budget: int = 64

    def digest(self, maker_config: MakerConfig) -> str:
        # the output path is left out so that the same run written to two
        # places gives byte-identical files
        return config_digest(self.maker, maker_config.describe(), self.breaker, str(self.turns),
                             str(self.seed), str(self.threshold), str(self.m_max), str(self.budget))


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"{text} must be >= 1")
    return value


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)  # flags accept "3", "1/2" or "0.25"
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qgame", description="Maker-Breaker games on the rationals.")
    parser.add_argument("--config", metavar="FILE", help="key=value defaults; flags win")
    sub = parser.add_subparsers(dest="command", required=True)

    play = sub.add_parser("play", help="run one game and write its trace")
    play.add_argument("--maker", default="q-strategy", choices=[QStrategy.identifier])
    play.add_argument("--breaker", default="random:0",
                      help="random:<seed>, pairing or blocking")
    play.add_argument("--turns", type=_positive, required=True)
    play.add_argument("--seed", type=int, default=0)
    play.add_argument("--out", default="-", help="trace path, '-' for stdout")
    play.add_argument("--threshold", type=_positive, default=3)
    play.add_argument("--m-max", type=_positive, default=8)
    play.add_argument("--budget", type=_positive, default=64)
    play.add_argument("--dump-stream", type=_positive, metavar="N",
                      help="also print the first N stream values to stderr")

    verify = sub.add_parser("verify", help="check a trace")
    verify.add_argument("--in", dest="inp", metavar="PATH")
    verify.add_argument("--checks", default="all",
                        help=f"comma list from {', '.join(CHECKS)}, or 'all'")
    verify.add_argument("--bound", type=_positive, default=10_000,
                        help="pairs examined by the disjointness check")

    extract = sub.add_parser("extract", help="extract a clique and append its certificate")
    extract.add_argument("--in", dest="inp", metavar="PATH", required=True)
    extract.add_argument("--out", metavar="PATH", help="defaults to rewriting --in")
    extract.add_argument("--m-max", type=_positive, default=8)
    extract.add_argument("--threshold", type=_positive, default=3)

    ramsey = sub.add_parser("ramsey", help="index colouring and dense monochromatic subsets")
    mode = ramsey.add_mutually_exclusive_group(required=True)
    mode.add_argument("--prefix", type=_positive, metavar="N")
    mode.add_argument("--dense-subset", metavar="ORACLE",
                      help="all-blue, all-red or denominator-parity")
    ramsey.add_argument("--count", type=_positive, default=8)
    ramsey.add_argument("--budget", type=_positive, default=64)

    iso = sub.add_parser("iso", help="inspect the isomorphism Q x Q -> (0,1)")
    what = iso.add_mutually_exclusive_group(required=True)
    what.add_argument("--forward", nargs=2, type=_rational, metavar=("X", "Y"))
    what.add_argument("--backward", type=_rational, metavar="R")
    what.add_argument("--class-of", type=_rational, metavar="R")
    iso.add_argument("--order", choices=DOMAIN_ORDERS, default="diagonal")
    return parser


def load_config_file(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for no, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise UsageError(f"{path}:{no}: expected key=value")
            values[key.strip().replace("-", "_")] = value.strip()
    return values


def _apply_config(parser: argparse.ArgumentParser, argv: Sequence[str]) -> None:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    try:
        values = load_config_file(known.config)
    except OSError as exc:
        raise UsageError(f"cannot read config: {exc}") from None
    subparsers = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    known_keys = {a.dest for p in subparsers.choices.values() for a in p._actions}
    unknown = set(values) - known_keys
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
    for p in subparsers.choices.values():
        mine = {a.dest for a in p._actions}
        defaults = {k: v for k, v in values.items() if k in mine}
        for action in p._actions:
            if action.dest in defaults:
                action.required = False
        p.set_defaults(**defaults)


# ---------------------------------------------------------------------------
# commands


def cmd_play(args) -> int:
    run = RunConfig(args.maker, args.breaker, args.turns, args.seed, args.out,
                    args.threshold, args.m_max, args.budget)
    config = MakerConfig()
    try:
        breaker = make_breaker(run.breaker, config)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    trace = run_game(QStrategy(config), breaker, run.turns, run.seed, digest=run.digest(config))
    text = trace.to_text()
    if run.out == "-":
        sys.stdout.write(text)
    else:
        try:
            with open(run.out, "w", encoding="ascii", newline="\n") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"error: cannot write {run.out}: {exc}", file=sys.stderr)
            return EXIT_FAIL
    if args.dump_stream:
        values = config.stream.prefix(args.dump_stream)
        print("stream " + " ".join(map(str, values)), file=sys.stderr)
    if trace.aborted:
        print(f"aborted: {trace.aborted}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def _read_text(path: str) -> str:
    try:
        with open(path, encoding="ascii") as fh:
            return fh.read()
    except (OSError, UnicodeDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None


def _select_checks(spec: str, trace, text: Optional[str]) -> list[str]:
    if spec == "all":
        if trace is None:
            return ["disjointness"]
        chosen = ["legality"]
        if trace.maker == QStrategy.identifier:
            chosen.append("maker")
        if trace.breaker == "pairing":
            chosen.append("pairing")
        if text is not None and analysis.read_certificate(text) is not None:
            chosen.append("certificate")
        return chosen
    chosen = [c.strip() for c in spec.split(",") if c.strip()]
    bad = [c for c in chosen if c not in CHECKS]
    if bad or not chosen:
        raise UsageError(f"unknown check(s): {', '.join(bad) or spec!r}; choose from {', '.join(CHECKS)}")
    return chosen


def cmd_verify(args) -> int:
    text = _read_text(args.inp) if args.inp else None
    trace = None
    report = analysis.Report()
    if text is not None:
        try:
            trace = parse_trace(text)
        except TraceFormatError as exc:
            report.fail(f"unreadable trace: {exc}")
            sys.stdout.write(report.text())
            return EXIT_FAIL
    checks = _select_checks(args.checks, trace, text)
    if trace is None and any(c != "disjointness" for c in checks):
        raise UsageError("--in is required for trace checks")
    for check in checks:
        if check == "legality":
            part = analysis.verify_trace(text)
        elif check == "maker":
            if trace.maker != QStrategy.identifier:
                raise UsageError(f"trace Maker is {trace.maker!r}, the maker check needs q-strategy")
            part = analysis.verify_maker_strategy(trace)
        elif check == "pairing":
            if trace.breaker != "pairing":
                raise UsageError(f"trace Breaker is {trace.breaker!r}, the pairing check needs pairing")
            part = analysis.verify_pairing(trace)
        elif check == "disjointness":
            part = analysis.pair_disjointness(args.bound)
        else:
            cert = analysis.read_certificate(text)
            if cert is None:
                raise UsageError("the trace carries no certificate section")
            try:
                state = replay(trace)
            except (IllegalMove, TraceFormatError) as exc:
                part = analysis.Report([f"cannot replay: {exc}"])
            else:
                part = analysis.check_certificate(cert, state)
        report.extend(part, prefix=f"{check}: ")
    sys.stdout.write(report.text())
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_extract(args) -> int:
    text = _read_text(args.inp)
    try:
        trace = parse_trace(text)
    except TraceFormatError as exc:
        raise UsageError(f"unreadable trace: {exc}") from None
    if trace.maker != QStrategy.identifier:
        raise UsageError(f"trace Maker is {trace.maker!r}; extraction needs q-strategy")
    try:
        state = replay(trace)
    except (IllegalMove, TraceFormatError) as exc:
        print(f"error: cannot replay: {exc}", file=sys.stderr)
        return EXIT_FAIL
    cert = analysis.extract_clique(state, m_max=args.m_max, threshold=args.threshold)
    out = args.out or args.inp
    try:
        with open(out, "w", encoding="ascii", newline="\n") as fh:
            fh.write(analysis.append_certificate(text, cert))
    except OSError as exc:
        print(f"error: cannot write {out}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    print(f"m={cert.m} threshold={cert.threshold}")
    print("clique " + " ".join(format_rational(v) for v in cert.vertices))
    return EXIT_OK if cert.m >= 1 else EXIT_FAIL


def cmd_ramsey(args) -> int:
    if args.prefix is not None:
        blue = analysis.max_mono_clique_prefix(args.prefix, "blue")
        red = analysis.max_mono_clique_prefix(args.prefix, "red")
        print(f"{blue} {red}")
        return EXIT_OK
    try:
        oracle = analysis.builtin_oracle(args.dense_subset)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    result = analysis.mono_dense_subset(oracle, args.count, args.budget)
    if result.inconclusive:
        print(f"inconclusive after {result.queries} queries")
        return EXIT_FAIL
    print(f"case {result.case} colour={result.colour.value} queries={result.queries}")
    for r in result.elements:
        print(format_rational(r))
    return EXIT_OK


def cmd_iso(args) -> int:
    iso = BackAndForth(args.order)
    if args.forward is not None:
        print(format_rational(iso.iso_forward(tuple(args.forward))))
    elif args.backward is not None:
        if not 0 < args.backward < 1:
            raise UsageError("the isomorphism maps onto (0,1); R must lie strictly inside")
        x, y = iso.iso_backward(args.backward)
        print(f"{format_rational(x)} {format_rational(y)}")
    else:
        if not 0 < args.class_of < 1:
            raise UsageError("classes partition (0,1); R must lie strictly inside")
        print(format_rational(Partition(iso).class_of(args.class_of).label))
    return EXIT_OK


COMMANDS = {"play": cmd_play, "verify": cmd_verify, "extract": cmd_extract,
            "ramsey": cmd_ramsey, "iso": cmd_iso}


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        _apply_config(parser, argv)
    except UsageError as exc:
        print(f"qgame: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse reports usage errors this way
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"qgame {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
