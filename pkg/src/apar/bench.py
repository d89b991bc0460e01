"""Matrix benchmark: K independent multiply-and-checksum tasks of size n.

Each configuration gets one untimed warm-up run before its timed runs.
"""
from __future__ import annotations

import csv
import os
import statistics
import time
from dataclasses import dataclass

from .interp import run_sequential
from .runtime import compile_source, run_local

CSV_COLUMNS = ["mode", "workers", "tasks", "size", "wall_ms", "result_checksum"]
CSV_NOTE = ("# seq = single-thread reference interpreter; "
            "local workers=1 is the scheduling-overhead reference in place of an SMP baseline")


def benchmark_source(tasks: int, size: int) -> str:
    if tasks < 1 or size < 1:
        raise ValueError("tasks and size must be at least 1")
    lines = ["main :: IO ()", "main = do"]
    for i in range(1, tasks + 1):
        lines.append(f"    let c{i} = checksum (matMul (genMatrix {i} {size} {size}) "
                     f"(genMatrix {1000 + i} {size} {size}))")
    lines.append("    let total = " + " + ".join(f"c{i}" for i in range(1, tasks + 1)))
    lines.append("    print total")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class BenchRow:
    mode: str
    workers: int
    tasks: int
    size: int
    wall_ms: float
    result_checksum: int

    def as_list(self) -> list:
        return [self.mode, self.workers, self.tasks, self.size,
                f"{self.wall_ms:.3f}", self.result_checksum]


def _timed(fn, reps: int) -> tuple[float, str]:
    fn()  # warm-up
    times = []
    output = ""
    for _ in range(reps):
        t0 = time.perf_counter()
        output = fn()
        times.append((time.perf_counter() - t0) * 1000.0)
    return statistics.median(times), output


def run_bench(tasks: int, size: int, workers: list[int], reps: int = 1) -> list[BenchRow]:
    """Sequential baseline then one local run per worker count."""
    compiled = compile_source(benchmark_source(tasks, size))
    rows = []
    ms, out = _timed(lambda: run_sequential(compiled.program).output, reps)
    rows.append(BenchRow("seq", 1, tasks, size, ms, int(out)))
    for w in workers:
        ms, out = _timed(lambda: run_local(compiled, w).output, reps)
        rows.append(BenchRow("local", w, tasks, size, ms, int(out)))
    if len({r.result_checksum for r in rows}) != 1:
        raise RuntimeError("benchmark runs disagree on the result checksum")
    return rows


def write_csv(rows: list[BenchRow], path) -> None:
    tmp = f"{path}.tmp"
    try:
        with open(tmp, "w", newline="") as fh:
            fh.write(CSV_NOTE + "\n")
            w = csv.writer(fh)
            w.writerow(CSV_COLUMNS)
            for r in rows:
                w.writerow(r.as_list())
        os.replace(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.remove(tmp)


def read_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(line for line in fh if not line.startswith("#")))
