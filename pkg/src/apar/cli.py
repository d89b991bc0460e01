"""Command-line entry point: ``apar graph|run|worker|bench``."""
from __future__ import annotations

import argparse
import logging
import os
import sys
import time

from . import kernels
from .bench import run_bench, write_csv
from .depgraph import summary, to_dot
from .errors import AparError
from .interp import DEFAULT_MAX_DEPTH, run_sequential
from .net.local import LocalTransport
from .net.tcp import DEFAULT_PORT, HANDSHAKE_TIMEOUT, TcpCoordinator, run_worker
from .runtime import compile_source
from .sched import SchedState
from .values import render

log = logging.getLogger("apar")

_LOG_LEVELS = {"off": logging.CRITICAL + 1, "info": logging.INFO, "trace": logging.DEBUG}


def _setup_logging() -> None:
    level = os.environ.get("APAR_LOG", "off").lower()
    if level not in _LOG_LEVELS:
        level = "off"
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(name)s: %(message)s"))
    root = logging.getLogger("apar")
    root.handlers[:] = [handler]
    root.setLevel(_LOG_LEVELS[level])
    root.propagate = False


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def cmd_graph(args) -> int:
    compiled = compile_source(_read(args.file), args.entry)
    sys.stdout.write(summary(compiled.graph))
    if args.dot:
        with open(args.dot, "w", encoding="utf-8") as fh:
            fh.write(to_dot(compiled.graph))
    return 0


def cmd_run(args) -> int:
    compiled = compile_source(_read(args.file), args.entry)
    t0 = time.perf_counter()
    if args.seq:
        res = run_sequential(compiled.program, args.entry, args.max_depth)
        value, output, workers = res.final, res.output, 1
    elif args.mode == "local":
        transport = LocalTransport(args.workers, args.max_depth)
        res = transport.run(SchedState(compiled.graph), compiled.program)
        value, output, workers = res.value, res.output, args.workers
    else:
        coordinator = TcpCoordinator(args.listen, args.min_workers, args.timeout)
        print(f"listening on {coordinator.address[0]}:{coordinator.address[1]}", file=sys.stderr)
        res = coordinator.run(SchedState(compiled.graph), compiled.program)
        value, output = res.value, res.output
        workers = len({e.worker for e in res.trace if e.worker is not None})
    wall_ms = (time.perf_counter() - t0) * 1000.0
    sys.stdout.write(output)
    print(f"result={render(value)} tasks={len(compiled.graph)} workers={workers} "
          f"wall_ms={wall_ms:.1f}")
    return 0


def cmd_worker(args) -> int:
    return run_worker(args.connect, timeout=args.timeout)


def cmd_bench(args) -> int:
    try:
        workers = [int(w) for w in args.workers.split(",") if w.strip()]
    except ValueError:
        raise SystemExit(f"apar bench: bad --workers list {args.workers!r}")
    if args.tasks < 1 or args.size < 1 or not workers or min(workers) < 1:
        raise SystemExit("apar bench: --tasks, --size and every worker count must be >= 1")
    print(f"kernel backend: {kernels.BACKEND}", file=sys.stderr)
    rows = run_bench(args.tasks, args.size, workers, args.reps)
    if args.csv:
        write_csv(rows, args.csv)
    for r in rows:
        print(",".join(str(x) for x in r.as_list()))
    return 0


def _positive(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {n}")
    return n


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="apar", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("graph", help="print the dependency graph of an entry function")
    p.add_argument("file")
    p.add_argument("--entry", default="main")
    p.add_argument("--dot", metavar="PATH", help="also write Graphviz DOT to PATH")
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("run", help="execute a program")
    p.add_argument("file")
    p.add_argument("--entry", default="main")
    p.add_argument("--workers", type=_positive, default=1)
    p.add_argument("--mode", choices=("local", "serve"), default="local")
    p.add_argument("--listen", default=f"127.0.0.1:{DEFAULT_PORT}")
    p.add_argument("--min-workers", type=_positive, default=1)
    p.add_argument("--timeout", type=float, default=HANDSHAKE_TIMEOUT,
                   help="seconds to wait for workers to join (serve mode)")
    p.add_argument("--seq", action="store_true", help="use the sequential interpreter")
    p.add_argument("--max-depth", type=_positive, default=DEFAULT_MAX_DEPTH)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("worker", help="serve tasks for a coordinator")
    p.add_argument("--connect", default=f"127.0.0.1:{DEFAULT_PORT}")
    p.add_argument("--timeout", type=float, default=HANDSHAKE_TIMEOUT)
    p.set_defaults(func=cmd_worker)

    p = sub.add_parser("bench", help="time the matrix benchmark across worker counts")
    p.add_argument("--tasks", type=int, default=8)
    p.add_argument("--size", type=int, default=256)
    p.add_argument("--workers", default="1,2,4,8")
    p.add_argument("--csv", metavar="PATH")
    p.add_argument("--reps", type=_positive, default=1)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except AparError as err:
        print(f"apar {args.command}: {err}", file=sys.stderr)
        return 1
    except OSError as err:
        print(f"apar {args.command}: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
