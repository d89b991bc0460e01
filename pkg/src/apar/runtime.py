"""Glue from source text to a finished run."""
from __future__ import annotations

from dataclasses import dataclass

from .depgraph import DepGraph, build_graph
from .lang import Program, parse, resolve
from .net.local import LocalTransport
from .sched import RunResult, SchedState


@dataclass(frozen=True)
class Compiled:
    program: Program
    symbols: dict
    graph: DepGraph


def compile_source(source: str, entry: str = "main") -> Compiled:
    program = parse(source)
    symbols = resolve(program)
    return Compiled(program, symbols, build_graph(program, entry, symbols))


def run_local(compiled: Compiled, workers: int) -> RunResult:
    return LocalTransport(workers).run(SchedState(compiled.graph), compiled.program)
