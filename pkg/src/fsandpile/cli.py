"""``fsandpile`` command line.

Exit codes: ``decide`` returns 0 for NO and 10 for YES; ``verify`` returns 0
when no trial failed and 3 otherwise; 1 always means an error.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

from . import deciders, gadgets
from .core import Query, decide_fspp, stabilize
from .errors import FSPPError
from .generate import GenSpec, generate
from .gridio import parse_config, render, serialize_config
from .reductions import compose
from .verify import subjects, verify

log = logging.getLogger("fsandpile")

EXIT_NO, EXIT_YES, EXIT_ERROR, EXIT_FAILURES = 0, 10, 1, 3


def _default_seed() -> int:
    raw = os.environ.get("FSPP_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        raise FSPPError(f"FSPP_SEED must be an integer, got {raw!r}") from None


def _read(path: str):
    text = sys.stdin.read() if path == "-" else open(path).read()
    return parse_config(text)


def _query(args) -> Query:
    return Query(_read(args.file), tuple(args.cell))


def cmd_simulate(args):
    final, trace = stabilize(_read(args.file))
    print(render(trace) if args.trace else render(final))
    print(f"steps: {trace.steps}")


def cmd_decide(args):
    q = _query(args)
    method = args.method
    name = deciders.special_decider(q.config.values())
    if method == "special" and name is None:
        raise FSPPError(f"no special decider covers values {sorted(q.config.values())}")
    if method == "sim" or name is None:
        answer = decide_fspp(q)[0]
        used = "sim"
    else:
        answer = deciders.DECIDERS[name][1](q)
        used = name
    log.info("decided with %s", used)
    print("YES" if answer else "NO")
    return EXIT_YES if answer else EXIT_NO


def cmd_reduce(args):
    reduced = compose(args.reduction, _query(args), args.data_dir)
    x, y = reduced.cell
    sys.stdout.write(f"# reduction {reduced.reduction}\n# question {x} {y}\n")
    sys.stdout.write(serialize_config(reduced.config))


def cmd_verify(args):
    if args.subject == "list":
        print("\n".join(sorted(subjects())))
        return 0
    seed = _default_seed() if args.seed is None else args.seed
    report = verify(
        args.subject,
        trials=args.trials,
        max_size=tuple(args.max_size),
        seed=seed,
        exhaustive=args.exhaustive,
        workers=args.workers,
        data_dir=args.data_dir,
    )
    print(report.to_json(timing=args.timing))
    log.info("%s: %d/%d failures in %.2fs", report.subject, len(report.failures), report.trials, report.wall_time)
    return 0 if report.ok else EXIT_FAILURES


def cmd_gen(args):
    seed = _default_seed() if args.seed is None else args.seed
    allowed = sorted({int(c) for c in args.allowed})
    if args.weights:
        ws = [int(w) for w in args.weights.split(",")]
        if len(ws) != len(allowed):
            raise FSPPError(f"{len(ws)} weights given for {len(allowed)} allowed values")
        weights = dict(zip(allowed, ws))
    else:
        weights = {a: 1 for a in allowed}
    sys.stdout.write(serialize_config(generate(GenSpec(args.width, args.height, allowed, weights, seed))))


def cmd_render(args):
    config = _read(args.file)
    if args.trace:
        print(render(stabilize(config)[1]))
    else:
        print(render(config))


def cmd_diode(args):
    print(gadgets.truth_table_json())


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fsandpile", description="Freezing sandpile prediction toolkit.")
    p.add_argument("-v", "--verbose", action="store_true", help="log to stderr")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS, help="log to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    def with_file(sp):
        sp.add_argument("file", help="grid file, or - for stdin")

    def with_cell(sp):
        sp.add_argument("--cell", nargs=2, type=int, metavar=("X", "Y"), required=True, help="bottom-left origin")

    sp = sub.add_parser("simulate", parents=[common], help="stabilize a configuration")
    with_file(sp)
    sp.add_argument("--trace", action="store_true", help="print firing times instead of the final grid")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("decide", parents=[common], help="does the questioned cell ever fire?")
    with_file(sp)
    with_cell(sp)
    sp.add_argument("--method", choices=("auto", "sim", "special"), default="auto")
    sp.set_defaults(func=cmd_decide)

    sp = sub.add_parser("reduce", parents=[common], help="apply a reduction or a '+'-joined chain")
    with_file(sp)
    with_cell(sp)
    sp.add_argument("--reduction", required=True)
    sp.add_argument("--data-dir", default=None)
    sp.set_defaults(func=cmd_reduce)

    sp = sub.add_parser("verify", parents=[common], help="check a subject against simulation (subject 'list' lists them)")
    sp.add_argument("subject")
    sp.add_argument("--trials", type=int, default=200)
    sp.add_argument("--max-size", nargs=2, type=int, default=(6, 6), metavar=("W", "H"))
    sp.add_argument("--seed", type=int, default=None, help="defaults to $FSPP_SEED, else 0")
    sp.add_argument("--exhaustive", action="store_true", help="enumerate every configuration of size W x H")
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--data-dir", default=None)
    sp.add_argument("--timing", action="store_true", help="include wall time in the JSON report")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("gen", parents=[common], help="random configuration")
    sp.add_argument("--width", type=int, required=True)
    sp.add_argument("--height", type=int, required=True)
    sp.add_argument("--allowed", default="01234")
    sp.add_argument("--weights", default=None, help="comma separated, one per allowed value")
    sp.add_argument("--seed", type=int, default=None, help="defaults to $FSPP_SEED, else 0")
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("render", parents=[common], help="ASCII view of a grid file")
    with_file(sp)
    sp.add_argument("--trace", action="store_true")
    sp.set_defaults(func=cmd_render)

    sp = sub.add_parser("diode", parents=[common], help="truth table of the value-2 diode block as JSON")
    sp.set_defaults(func=cmd_diode)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        rc = args.func(args)
    except (FSPPError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    return rc or 0


if __name__ == "__main__":
    sys.exit(main())
