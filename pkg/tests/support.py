"""Shared test machinery: random programs, a trace checker and a scheduler
driver that completes tasks in random order."""
from __future__ import annotations

import random

from apar.depgraph import DepGraph
from apar.lang import Purity
from apar.net.task import TaskRunner
from apar.sched import EventKind, RunResult, SchedState

HELPERS = """\
step :: Int -> Int -> Int
step a b = a * 3 + b - 1

sumto :: Int -> Int
sumto n = if n then n + sumto (n - 1) else 0

emit :: Int -> IO Int
emit v = do
    print v
    let w = v * 2
    step w 1
"""


def random_program(rng: random.Random, min_effects: int = 3, max_stmts: int = 12) -> str:
    """A main do-block mixing pure lets, effectful binds and prints."""
    n = rng.randint(max(4, min_effects + 1), max_stmts)
    effect_slots = set(rng.sample(range(n), min_effects))
    lines = []
    names: list[str] = []

    def operand():
        if names and rng.random() < 0.7:
            return rng.choice(names)
        return str(rng.randint(0, 50))

    for i in range(n):
        name = f"v{i}"
        if i in effect_slots or rng.random() < 0.2:
            r = rng.random()
            if r < 0.4:
                lines.append(f"{name} <- emit ({operand()} + {operand()})")
                names.append(name)
            elif r < 0.55:
                lines.append(f"{name} <- semantic_analysis")
                names.append(name)
            else:
                lines.append(f"print ({operand()}, {operand()})")
        else:
            r = rng.random()
            if r < 0.3:
                rhs = f"step {operand()} {operand()}"
            elif r < 0.5:
                rhs = f"sumto {rng.randint(0, 30)} + {operand()}"
            elif r < 0.7:
                rhs = f"if {operand()} - 3 then {operand()} else {operand()} * 2"
            else:
                rhs = f"{operand()} * {operand()} - {operand()}"
            lines.append(f"let {name} = {rhs}")
            names.append(name)
    lines.append("print (" + ", ".join(names[-3:] or ["0"]) + ")")
    body = "\n".join("    " + l for l in lines)
    return HELPERS + "\nmain :: IO ()\nmain = do\n" + body + "\n"


def check_trace(graph: DepGraph, trace) -> list[str]:
    """Every scheduler safety property, checked by replaying the trace."""
    problems = []
    nodes = {n.id: n for n in graph.nodes}
    deps = {n.id: n.sources() for n in graph.nodes}
    completed: set[int] = set()
    dispatched: dict[int, int] = {}
    busy: dict[int, int] = {}
    joined: set[int] = set()
    effect_order = []
    finished = 0

    for i, ev in enumerate(trace):
        if ev.seq != i:
            problems.append(f"event {i} has seq {ev.seq}")
        if finished:
            problems.append(f"event {ev} after Finished")
        if ev.kind is EventKind.WORKER_JOINED:
            if ev.worker in joined:
                problems.append(f"worker {ev.worker} joined twice")
            joined.add(ev.worker)
        elif ev.kind is EventKind.DISPATCHED:
            t, w = ev.task, ev.worker
            if t in dispatched:
                problems.append(f"task {t} dispatched twice")
            if not deps[t] <= completed:
                problems.append(f"task {t} dispatched before {sorted(deps[t] - completed)}")
            if w not in joined:
                problems.append(f"dispatch to unregistered worker {w}")
            if w in busy:
                problems.append(f"worker {w} given task {t} while running {busy[w]}")
            dispatched[t] = w
            busy[w] = t
            if len(busy) > len(joined):
                problems.append(f"{len(busy)} running with {len(joined)} workers")
        elif ev.kind is EventKind.COMPLETED:
            t, w = ev.task, ev.worker
            if dispatched.get(t) != w:
                problems.append(f"task {t} completed by {w} but dispatched to {dispatched.get(t)}")
            if t in completed:
                problems.append(f"task {t} completed twice")
            completed.add(t)
            busy.pop(w, None)
            if nodes[t].purity is Purity.EFFECTFUL:
                effect_order.append(t)
        elif ev.kind is EventKind.FINISHED:
            finished += 1
        # greedy non-idling: work and an idle worker means the next event dispatches
        ready = [t for t in nodes if t not in dispatched and deps[t] <= completed]
        idle = joined - set(busy)
        if ready and idle and i + 1 < len(trace):
            if trace[i + 1].kind is not EventKind.DISPATCHED:
                problems.append(f"idle worker and ready task after {ev}, next is {trace[i + 1]}")
        if ready and idle and i + 1 == len(trace):
            problems.append("trace ends with ready work and idle workers")

    if set(dispatched) != set(nodes) or completed != set(nodes):
        problems.append("not every task was dispatched and completed exactly once")
    if finished != 1:
        problems.append(f"{finished} Finished events")
    if effect_order != list(graph.world_chain):
        problems.append(f"effects completed in {effect_order}, expected {list(graph.world_chain)}")
    return problems


def simulate(compiled, workers: int, rng: random.Random, late_joins: bool = True) -> RunResult:
    """Drive the scheduler with results arriving in random order.

    With ``late_joins`` only worker 0 is present at the start and the rest
    join at random moments.
    """
    state = SchedState(compiled.graph)
    runner = TaskRunner(compiled.program)
    running = []
    to_join = list(range(workers))
    first = 1 if late_joins else workers
    for w in to_join[:first]:
        running.extend(state.on_worker_join(w))
    to_join = to_join[first:]
    while running or (to_join and not state.is_complete()):
        if to_join and (not running or rng.random() < 0.3):
            running.extend(state.on_worker_join(to_join.pop(0)))
            continue
        a = running.pop(rng.randrange(len(running)))
        value, printed = runner.run(a.expr)
        running.extend(state.on_result(a.worker, a.task, value, printed))
    value, output = state.final_result()
    return RunResult(value, output, tuple(state.trace))
