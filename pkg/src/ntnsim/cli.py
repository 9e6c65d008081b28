"""Command-line entry point: ``ntnsim {calibrate,budget,run,sweep}``.

Exit codes: 0 success, 1 validation or calibration failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import io
import logging
import sys
from typing import Sequence

from . import engine, linkbudget, report, scenario
from .errors import ConfigurationError, DomainError, ScenarioNotFoundError

log = logging.getLogger("ntnsim")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _rates(text: str) -> list[float]:
    try:
        rates = [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid rate list {text!r}") from None
    if not rates:
        raise argparse.ArgumentTypeError("rate list is empty")
    return rates


def _add_common(p: argparse.ArgumentParser, multi: bool = False) -> None:
    if multi:
        p.add_argument("--scenario", action="append", metavar="ID|PATH",
                       help="preset id (sc1, sc4, sc6, sc9) or config file; repeatable")
    else:
        p.add_argument("--scenario", required=True, metavar="ID|PATH",
                       help="preset id (sc1, sc4, sc6, sc9) or config file")
    p.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                   help="override a configuration key after loading; repeatable")


def _add_run_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--duration", type=float, default=engine.DEFAULT_DURATION_S, help="run length in s (default 10)")
    p.add_argument("--warmup", type=float, default=engine.DEFAULT_WARMUP_S, help="excluded start-up in s (default 1)")
    p.add_argument("--packet-size", type=int, default=engine.DEFAULT_PACKET_SIZE,
                   help="application payload bytes (default 1500)")
    p.add_argument("--out", help="write CSV here instead of standard output")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ntnsim", description="5G NR-NTN downlink link budget and simulator")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to standard error")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("calibrate", help="check presets against the reference FSPL/SNR")
    _add_common(p, multi=True)
    p.add_argument("--all", action="store_true", help="check every built-in preset")

    p = sub.add_parser("budget", help="print the downlink budget decomposition")
    _add_common(p)
    p.add_argument("--out", help="also write the budget as CSV")

    p = sub.add_parser("run", help="simulate one source rate")
    _add_common(p)
    p.add_argument("--rate", type=float, help="source rate in Mbps (required)")
    _add_run_args(p)

    p = sub.add_parser("sweep", help="simulate a list of source rates")
    _add_common(p, multi=True)
    p.add_argument("--rates", type=_rates, required=True, help="comma-separated source rates in Mbps")
    p.add_argument("--parallel", type=int, default=1, help="worker processes for sweep points (default 1)")
    _add_run_args(p)
    return parser


def _load(name: str, overrides: list[str]) -> scenario.ScenarioConfig:
    return scenario.get(name, scenario.parse_overrides(overrides))


def _emit_csv(reports: list[report.SweepReport], out: str | None) -> None:
    if out:
        report.write_csv(reports, out)
        log.info("wrote %s", out)
    else:
        buf = io.StringIO()
        report.write_rows(reports, buf)
        sys.stdout.write(buf.getvalue())


def cmd_calibrate(args: argparse.Namespace) -> int:
    names = list(args.scenario or [])
    if args.all:
        names = list(scenario.BUILTIN_IDS) + [n for n in names if n not in scenario.BUILTIN_IDS]
    if not names:
        raise UsageError("calibrate needs --all or --scenario")
    ok = True
    for name in names:
        resolved = scenario.resolve(_load(name, args.overrides))
        try:
            rep = report.validate_calibration(resolved)
        except DomainError as exc:
            print(f"error: {exc}", file=sys.stderr)
            ok = False
            continue
        print(rep.line())
        ok &= rep.passed
    return EXIT_OK if ok else EXIT_FAIL


def cmd_budget(args: argparse.Namespace) -> int:
    resolved = scenario.resolve(_load(args.scenario, args.overrides))
    title = f"downlink budget: {resolved.id}"
    sys.stdout.write(linkbudget.format_budget(resolved.budget, title))
    print(f"  {'capacity':<18}{resolved.capacity_bps / 1e6:>12.3f}  Mbps")
    print(f"  {'one_way_delay':<18}{resolved.one_way_delay_s * 1e3:>12.3f}  ms")
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(linkbudget.budget_csv(resolved.budget))
    return EXIT_OK


def cmd_run(args: argparse.Namespace) -> int:
    resolved = scenario.resolve(_load(args.scenario, args.overrides))
    if args.rate is None:
        raise UsageError("run needs --rate")
    m = engine.run(resolved, args.rate * 1e6, args.duration, args.packet_size, args.warmup)
    rep = report.SweepReport.from_sweep(resolved.id, [(args.rate * 1e6, m)])
    if args.out:
        report.write_csv(rep, args.out)
        print(
            f"{resolved.id}: R={args.rate:g} Mbps throughput={m.throughput_bps / 1e6:.3f} Mbps "
            f"pdr={m.pdr:.4f} latency mean={m.latency_ms.mean:.3f} ms p95={m.latency_ms.p95:.3f} ms",
            file=sys.stderr,
        )
    else:
        _emit_csv([rep], None)
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    names = args.scenario or []
    if not names:
        raise UsageError("sweep needs at least one --scenario")
    rates_bps = [r * 1e6 for r in args.rates]
    reports = []
    for name in names:
        resolved = scenario.resolve(_load(name, args.overrides))
        log.info("sweeping %s over %d rates", resolved.id, len(rates_bps))
        results = engine.sweep(
            resolved, rates_bps, args.duration, args.packet_size, args.warmup, parallel=args.parallel
        )
        reports.append(report.SweepReport.from_sweep(resolved.id, results))
    _emit_csv(reports, args.out)
    if args.out:
        for rep in reports:
            sys.stderr.write(report.format_sweep(rep))
    return EXIT_OK


COMMANDS = {"calibrate": cmd_calibrate, "budget": cmd_budget, "run": cmd_run, "sweep": cmd_sweep}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return COMMANDS[args.command](args)
    except (ScenarioNotFoundError, UsageError) as exc:
        print(f"ntnsim: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConfigurationError as exc:
        print(f"ntnsim: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except DomainError as exc:
        print(f"ntnsim: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"ntnsim: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
