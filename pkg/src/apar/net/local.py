"""Deterministic in-process transport.

Each worker is a dedicated thread, so tasks really run concurrently (the
compiled kernels release the GIL).  Results are handed to the scheduler
strictly in dispatch order, whatever order the threads finish in, which
makes the event trace a function of the graph and worker count alone.
"""
from __future__ import annotations

from collections import deque
from concurrent.futures import ThreadPoolExecutor

from ..errors import EvalError
from ..interp import DEFAULT_MAX_DEPTH
from ..lang import Program
from ..sched import RunResult, SchedState
from .task import TaskRunner


class LocalTransport:
    def __init__(self, num_workers: int, max_depth: int = DEFAULT_MAX_DEPTH):
        if num_workers < 1:
            raise ValueError(f"need at least one worker, got {num_workers}")
        self.num_workers = num_workers
        self.max_depth = max_depth

    def run(self, state: SchedState, program: Program) -> RunResult:
        runner = TaskRunner(program, self.max_depth)
        pools = [ThreadPoolExecutor(1, thread_name_prefix=f"apar-worker-{w}")
                 for w in range(self.num_workers)]
        inflight: deque = deque()

        def submit(assignments):
            for a in assignments:
                inflight.append((a, pools[a.worker].submit(runner.run, a.expr)))

        try:
            for w in range(self.num_workers):
                submit(state.on_worker_join(w))
            while inflight:
                a, fut = inflight.popleft()
                try:
                    value, printed = fut.result()
                except EvalError as err:
                    raise EvalError(f"statement {a.task}: {err}") from None
                submit(state.on_result(a.worker, a.task, value, printed))
        finally:
            for pool in pools:
                pool.shutdown(wait=True, cancel_futures=True)
        value, output = state.final_result()
        return RunResult(value, output, tuple(state.trace))


def local_transport(num_workers: int) -> LocalTransport:
    return LocalTransport(num_workers)
