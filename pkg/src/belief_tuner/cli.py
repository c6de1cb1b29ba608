"""Command-line front end.

Subcommands: query, recommend, envelope, bound, serve, selftest.
Machine-readable output goes to stdout, diagnostics to stderr. Exit
codes: 0 success, 1 constraint or validation failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

from . import bounds
from .errors import (BeliefTunerError, FormatError, UnknownElement,
                     ValidationError, ZeroEvidenceProbability)
from .inference import posterior
from .network import Event, Network, parse_network
from .querylang import parse_constraint, parse_evidence, resolve_events
from .tuning import Recommendation, constraint_margin, solve

ENV_SEED = "BELIEF_TUNER_SEED"

ENVELOPE_HEADER = ("p,delta_plus_outer,delta_plus_inner,"
                   "delta_minus_outer,delta_minus_inner")


class _Usage(Exception):
    pass


def _load_network(path: str) -> Network:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise _Usage(f"cannot read network file: {exc}") from None
    return parse_network(text)


def _parse_event(spec: str) -> Event:
    if spec.count("=") != 1:
        raise _Usage(f"event {spec!r} must look like VAR=STATE")
    name, _, state = spec.partition("=")
    if not name or not state:
        raise _Usage(f"event {spec!r} must look like VAR=STATE")
    return Event(name.strip(), state.strip())


def _format_param(rec: Recommendation) -> str:
    return rec.param.describe()


def _cmd_query(args) -> int:
    net = _load_network(args.network)
    try:
        evidence = parse_evidence(args.evidence)
        event = _parse_event(args.target)
        for name, state in evidence.items():
            net.state_index(name, state)
        net.state_index(event.variable, event.state)
    except (FormatError, UnknownElement) as exc:
        raise _Usage(str(exc)) from None
    value = posterior(net, event, evidence)
    print(f"{value:.6f}")
    return 0


def _cmd_recommend(args) -> int:
    net = _load_network(args.network)
    try:
        evidence = parse_evidence(args.evidence)
        constraint = parse_constraint(args.constraint)
        resolve_events(net, constraint, evidence)
    except (FormatError, UnknownElement) as exc:
        raise _Usage(str(exc)) from None

    margin = constraint_margin(net, evidence, constraint)
    recs = solve(net, evidence, constraint) if margin < 0 else []

    if args.format == "csv":
        print("parameter,current,suggested,delta,log_odds_distance")
        for r in recs:
            print(f"{_format_param(r)},{r.current_tau:.6f},{r.new_tau:.6f},"
                  f"{r.minimal_delta:+.6f},{_fmt_lodd(r.log_odds_distance)}")
    else:
        rows = [(_format_param(r), f"{r.current_tau:.6f}", f"{r.new_tau:.6f}",
                 f"{r.minimal_delta:+.6f}", _fmt_lodd(r.log_odds_distance))
                for r in recs]
        _print_table(("parameter", "current", "suggested", "delta",
                      "log_odds_distance"), rows)

    if margin >= 0:
        print("constraint already satisfied", file=sys.stderr)
        return 0
    if not recs:
        print("no single parameter change can enforce the constraint",
              file=sys.stderr)
        return 1
    return 0


def _fmt_lodd(value: float) -> str:
    return "inf" if math.isinf(value) else f"{value:.6f}"


def _print_table(header: tuple[str, ...], rows: list[tuple[str, ...]]) -> None:
    widths = [len(h) for h in header]
    for row in rows:
        widths = [max(w, len(c)) for w, c in zip(widths, row)]
    for line in (header, *rows):
        print("  ".join(c.ljust(w) for c, w in zip(line, widths)).rstrip())


def _cmd_envelope(args) -> int:
    try:
        low, _, high = args.band.partition(":")
        band_low, band_high = float(low), float(high)
    except ValueError:
        raise _Usage(f"band {args.band!r} must look like LOW:HIGH") from None
    if not (0.0 < args.step < 1.0):
        raise _Usage(f"step {args.step!r} does not fit inside (0, 1)")
    grid = []
    k = 1
    while k * args.step < 1.0 - 1e-12:
        grid.append(round(k * args.step, 12))
        k += 1
    try:
        points = bounds.envelope(args.q0, band_low, band_high, grid)
    except ValidationError as exc:
        raise _Usage(str(exc)) from None
    print(ENVELOPE_HEADER)
    for pt in points:
        print(f"{pt.p:.6f},{pt.delta_plus_outer:.6f},{pt.delta_plus_inner:.6f},"
              f"{pt.delta_minus_outer:.6f},{pt.delta_minus_inner:.6f}")
    return 0


def _cmd_bound(args) -> int:
    try:
        if args.mode == "derivative":
            _need(args, "q", "p")
            print(f"{bounds.derivative_bound(args.q, args.p):.6f}")
        elif args.mode == "factor":
            _need(args, "q", "p")
            print(f"{bounds.sensitivity_factor(args.q, args.p):.6f}")
        elif args.mode == "interval":
            _need(args, "q", "p", "p_new")
            budget = bounds.log_odds_distance(args.p, args.p_new)
            iv = bounds.query_interval(args.q, budget)
            print(f"[{iv.low:.6f}, {iv.high:.6f}]")
        else:  # root-change
            _need(args, "prior", "posterior", "target")
            value = bounds.exact_root_change(args.prior, args.posterior,
                                             args.target)
            print(f"{value:.6f}")
    except ValidationError as exc:
        raise _Usage(str(exc)) from None
    return 0


def _need(args, *names: str) -> None:
    for name in names:
        if getattr(args, name) is None:
            flag = "--" + name.replace("_", "-")
            raise _Usage(f"{flag} is required for --{args.mode}")


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port,
                log_level="warning")
    return 0


def _cmd_selftest(args) -> int:
    from .selftest import run_selftest

    seed = int(os.environ.get(ENV_SEED, "0"))
    return 0 if run_selftest(seed, out=sys.stdout) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="belief-tuner",
        description="Query, tune and bound the parameters of a discrete "
                    "belief network.")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-e", "--evidence", default="",
                        help="comma-separated VAR=STATE pairs")
    common.add_argument("--format", choices=("text", "csv"), default="text")

    p = sub.add_parser("query", parents=[common],
                       help="print a posterior probability")
    p.add_argument("-n", "--network", required=True)
    p.add_argument("-t", "--target", required=True, metavar="VAR=STATE")
    p.set_defaults(func=_cmd_query)

    p = sub.add_parser("recommend", parents=[common],
                       help="list parameter changes enforcing a constraint")
    p.add_argument("-n", "--network", required=True)
    p.add_argument("-c", "--constraint", required=True,
                   help="e.g. 'P(fire=true) >= 0.5'")
    p.set_defaults(func=_cmd_recommend)

    p = sub.add_parser("envelope",
                       help="emit permissible-change envelopes as CSV")
    p.add_argument("--q0", type=float, required=True)
    p.add_argument("--band", required=True, metavar="LOW:HIGH")
    p.add_argument("--step", type=float, default=0.01)
    p.set_defaults(func=_cmd_envelope)

    p = sub.add_parser("bound", help="evaluate one of the analytic bounds")
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--derivative", dest="mode", action="store_const",
                      const="derivative")
    mode.add_argument("--factor", dest="mode", action="store_const",
                      const="factor")
    mode.add_argument("--interval", dest="mode", action="store_const",
                      const="interval")
    mode.add_argument("--root-change", dest="mode", action="store_const",
                      const="root-change")
    p.add_argument("-q", type=float)
    p.add_argument("-p", type=float)
    p.add_argument("--p-new", dest="p_new", type=float)
    p.add_argument("--prior", type=float)
    p.add_argument("--posterior", type=float)
    p.add_argument("--target", type=float)
    p.set_defaults(func=_cmd_bound)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--port", type=int, default=8374)
    p.add_argument("--host", default="127.0.0.1")
    p.set_defaults(func=_cmd_serve)

    p = sub.add_parser("selftest",
                       help="run randomized consistency checks "
                            f"(seeded via {ENV_SEED})")
    p.set_defaults(func=_cmd_selftest)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _Usage as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ZeroEvidenceProbability as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (FormatError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except BeliefTunerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
