"""Greedy input-ready coordinator.

``SchedState`` is a single-owner state machine.  Transports feed it worker
joins and task results; every feed returns the new ``Assignment``s to send.
Whenever a task is ready and a worker is idle, the lowest ready task id is
paired with the lowest idle worker id.
"""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass
from typing import Optional

from .depgraph import DepGraph, TaskNode
from .errors import EvalError, SchedulerError
from .interp import Interpreter
from .lang import BinOp, Call, If, Purity, Quote, Tuple, Var, contains_call
from .values import UNIT, Value

log = logging.getLogger("apar.sched")


class Phase(enum.Enum):
    BLOCKED = "blocked"
    READY = "ready"
    RUNNING = "running"
    DONE = "done"


class EventKind(enum.Enum):
    WORKER_JOINED = "joined"
    DISPATCHED = "dispatched"
    COMPLETED = "completed"
    FINISHED = "finished"


@dataclass(frozen=True)
class SchedEvent:
    seq: int
    kind: EventKind
    task: Optional[int] = None
    worker: Optional[int] = None

    def __str__(self):
        parts = [f"#{self.seq}", self.kind.value]
        if self.task is not None:
            parts.append(f"task={self.task}")
        if self.worker is not None:
            parts.append(f"worker={self.worker}")
        return " ".join(parts)


@dataclass(frozen=True)
class Assignment:
    task: int
    worker: int
    expr: object  # task RHS with every variable replaced by a Quote


def substitute(expr, values: dict):
    """Replace variables with quoted values so the expression stands alone."""
    if isinstance(expr, Var):
        return Quote(values[expr.name], expr.pos)
    if isinstance(expr, Tuple):
        return Tuple(tuple(substitute(x, values) for x in expr.elements), expr.pos)
    if isinstance(expr, Call):
        return Call(expr.callee, tuple(substitute(a, values) for a in expr.args), expr.pos)
    if isinstance(expr, If):
        return If(substitute(expr.cond, values), substitute(expr.then, values),
                  substitute(expr.else_, values), expr.pos)
    if isinstance(expr, BinOp):
        return BinOp(expr.op, substitute(expr.lhs, values), substitute(expr.rhs, values), expr.pos)
    return expr


class SchedState:
    """Task lifecycle, worker pool, binder store and event trace.

    With ``fold_inline`` (the default), tasks whose right-hand side contains
    no call are evaluated by the coordinator the moment they are paired with
    a worker, instead of being shipped.  They still produce a Dispatched and
    a Completed event so traces account for every task.
    """

    def __init__(self, graph: DepGraph, fold_inline: bool = True):
        self.graph = graph
        self.fold_inline = fold_inline
        self.phase: dict[int, Phase] = {n.id: Phase.BLOCKED for n in graph.nodes}
        self.running_on: dict[int, int] = {}
        self.results: dict[int, Value] = {}
        self.values: dict[str, Value] = {}
        self.world_done = -1
        self.workers: dict[int, Optional[int]] = {}  # worker -> task or None when idle
        self.trace: list[SchedEvent] = []
        self.output_parts: list[str] = []
        self._remaining = {n.id: len(n.sources()) for n in graph.nodes}
        self._users: dict[int, list[int]] = {n.id: [] for n in graph.nodes}
        for n in graph.nodes:
            for s in n.sources():
                self._users[s].append(n.id)
        self._ready: list[int] = []
        self._folding: list[tuple[int, int]] = []
        for n in graph.nodes:
            if self._remaining[n.id] == 0:
                self._promote(n.id)
        self._folder = Interpreter()
        if not graph.nodes:
            self._emit(EventKind.FINISHED)

    # bookkeeping

    def _emit(self, kind: EventKind, task=None, worker=None) -> None:
        ev = SchedEvent(len(self.trace), kind, task, worker)
        self.trace.append(ev)
        log.debug("%s", ev)

    def _promote(self, task: int) -> None:
        self.phase[task] = Phase.READY
        self._ready.append(task)
        self._ready.sort()

    def node(self, task: int) -> TaskNode:
        return self.graph.nodes[task]

    @property
    def output(self) -> str:
        return "".join(self.output_parts)

    def ready_tasks(self) -> list[int]:
        return list(self._ready)

    def idle_workers(self) -> list[int]:
        return sorted(w for w, t in self.workers.items() if t is None)

    def is_complete(self) -> bool:
        return len(self.results) == len(self.graph.nodes)

    def final_result(self) -> tuple[Value, str]:
        if not self.is_complete():
            raise SchedulerError("run is not complete")
        if not self.graph.nodes:
            return UNIT, ""
        return self.results[len(self.graph.nodes) - 1], self.output

    # events

    def on_worker_join(self, worker: int) -> list[Assignment]:
        if worker in self.workers:
            raise SchedulerError(f"worker {worker} is already registered")
        self.workers[worker] = None
        self._emit(EventKind.WORKER_JOINED, worker=worker)
        return self.dispatch()

    def on_result(self, worker: int, task: int, value: Value, printed: str = "") -> list[Assignment]:
        self._complete(worker, task, value, printed)
        return self.dispatch()

    def _complete(self, worker, task, value, printed) -> None:
        if self.phase.get(task) is not Phase.RUNNING:
            state = self.phase.get(task)
            raise SchedulerError(
                f"result for task {task} which is {state.value if state else 'unknown'}")
        if self.running_on[task] != worker:
            raise SchedulerError(
                f"result for task {task} from worker {worker}, "
                f"but it runs on worker {self.running_on[task]}")
        node = self.node(task)
        self.phase[task] = Phase.DONE
        del self.running_on[task]
        self.results[task] = value
        if node.binds_name is not None:
            self.values[node.binds_name] = value
        if node.purity is Purity.EFFECTFUL:
            self.world_done = self.graph.world_chain.index(task)
        if printed:
            self.output_parts.append(printed)
        self.workers[worker] = None
        self._emit(EventKind.COMPLETED, task, worker)
        for u in self._users[task]:
            self._remaining[u] -= 1
            if self._remaining[u] == 0:
                self._promote(u)
        if self.is_complete():
            self._emit(EventKind.FINISHED)

    def dispatch(self) -> list[Assignment]:
        """Pair ready tasks with idle workers until one side runs out.

        Folded tasks are completed one at a time, and pairing resumes after
        each, because a completion can ready more tasks.
        """
        shipped: list[Assignment] = []
        while True:
            idle = self.idle_workers()
            while self._ready and idle:
                task = self._ready.pop(0)
                worker = idle.pop(0)
                node = self.node(task)
                missing = node.sources() - set(self.results)
                if missing:
                    raise SchedulerError(
                        f"task {task} is ready with unmet dependencies {sorted(missing)}")
                self.phase[task] = Phase.RUNNING
                self.running_on[task] = worker
                self.workers[worker] = task
                self._emit(EventKind.DISPATCHED, task, worker)
                if self.fold_inline and not contains_call(node.rhs):
                    self._folding.append((task, worker))
                else:
                    shipped.append(Assignment(task, worker, substitute(node.rhs, self.values)))
            if not self._folding:
                return shipped
            task, worker = self._folding.pop(0)
            try:
                value, _ = self._folder.evaluate(self.node(task).rhs, self.values)
            except EvalError as err:
                raise EvalError(f"statement {task}: {err}") from None
            self._complete(worker, task, value, "")


@dataclass(frozen=True)
class RunResult:
    value: Value
    output: str
    trace: tuple
