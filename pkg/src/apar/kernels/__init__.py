"""Deterministic builtin functions that program tasks call.

The hot loops (random matrix generation, wrapping matrix multiply, checksum)
come from the compiled ``_ckernels`` extension when it is importable, and
from ``_pykernels`` otherwise.  Set ``APAR_PURE_PYTHON=1`` to force the
fallback.  Both backends produce bit-identical results.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Callable

from ..errors import KernelError
from ..values import (
    UNIT, VInt, VMatrix, VSummary, Value, kind_name, render, wrap64,
)
from . import _pykernels

if os.environ.get("APAR_PURE_PYTHON"):
    _backend = _pykernels
else:
    try:
        from . import _ckernels as _backend
    except ImportError:
        _backend = _pykernels

BACKEND: str = _backend.NAME

MAX_DIM = 16384


def splitmix64_next(state: int) -> tuple[int, int]:
    """Advance a splitmix64 state; returns ``(new_state, output)``."""
    return _backend.splitmix64_next(state & 0xFFFFFFFFFFFFFFFF)


def gen_matrix(seed: int, rows: int, cols: int) -> VMatrix:
    if not (1 <= rows <= MAX_DIM and 1 <= cols <= MAX_DIM):
        raise KernelError(f"genMatrix: dimensions must be in 1..{MAX_DIM}, got {rows}x{cols}")
    return VMatrix(rows, cols, _backend.gen_matrix(seed & 0xFFFFFFFFFFFFFFFF, rows, cols))


def mat_mul(a: VMatrix, b: VMatrix) -> VMatrix:
    if a.cols != b.rows:
        raise KernelError(f"matMul: dimension mismatch {a.shape} x {b.shape}")
    return VMatrix(a.rows, b.cols, _backend.mat_mul(a.data, a.rows, a.cols, b.data, b.cols))


def checksum(m: VMatrix) -> int:
    return _backend.checksum(m.data)


def _expect(name: str, v: Value, cls: type) -> None:
    if not isinstance(v, cls):
        want = {VInt: "Int", VMatrix: "Matrix", VSummary: "Summary"}[cls]
        raise KernelError(f"{name}: expected {want}, got {kind_name(v)}")


@dataclass(frozen=True)
class Builtin:
    """One entry of the builtin table.

    ``impl`` takes the evaluated arguments and returns the result value
    together with any text the call printed.
    """

    name: str
    signature: str
    arity: int
    effectful: bool
    impl: Callable[..., tuple[Value, str]]

    def call(self, args) -> tuple[Value, str]:
        return self.impl(*args)


def _gen_matrix(seed, rows, cols):
    for v in (seed, rows, cols):
        _expect("genMatrix", v, VInt)
    return gen_matrix(seed.value, rows.value, cols.value), ""


def _mat_mul(a, b):
    _expect("matMul", a, VMatrix)
    _expect("matMul", b, VMatrix)
    return mat_mul(a, b), ""


def _checksum(m):
    _expect("checksum", m, VMatrix)
    return VInt(checksum(m)), ""


def _print(v):
    return UNIT, render(v) + "\n"


# Stand-ins for the worked example's elided function bodies.  The numbers
# are arbitrary but fixed so runs are reproducible.
def _clean_files():
    return VSummary(42, checksum(gen_matrix(0, 8, 8))), ""


def _complex_evaluation(s):
    _expect("complex_evaluation", s, VSummary)
    return VInt(wrap64(s.count + s.digest)), ""


def _semantic_analysis():
    return VInt(7), ""


BUILTINS: dict[str, Builtin] = {
    b.name: b
    for b in (
        Builtin("genMatrix", "Int -> Int -> Int -> Matrix", 3, False, _gen_matrix),
        Builtin("matMul", "Matrix -> Matrix -> Matrix", 2, False, _mat_mul),
        Builtin("checksum", "Matrix -> Int", 1, False, _checksum),
        Builtin("print", "a -> IO ()", 1, True, _print),
        Builtin("clean_files", "IO Summary", 0, True, _clean_files),
        Builtin("complex_evaluation", "Summary -> Int", 1, False, _complex_evaluation),
        Builtin("semantic_analysis", "IO Int", 0, True, _semantic_analysis),
    )
}
