"""Runtime values.

Every value is immutable and hashable so it can be shared between the
coordinator and worker threads without copying.  Matrices keep their cells
as a packed ``bytes`` buffer of native 64-bit signed integers, which the
compiled kernels read directly.
"""
from __future__ import annotations

from array import array
from dataclasses import dataclass
from typing import Iterable, Union

INT64_MIN = -(1 << 63)
INT64_MAX = (1 << 63) - 1
MASK64 = (1 << 64) - 1


def wrap64(x: int) -> int:
    """Reduce an integer to two's-complement 64-bit range."""
    x &= MASK64
    return x - (1 << 64) if x > INT64_MAX else x


@dataclass(frozen=True)
class VInt:
    value: int

    def __post_init__(self):
        if not INT64_MIN <= self.value <= INT64_MAX:
            raise ValueError(f"integer out of 64-bit range: {self.value}")


@dataclass(frozen=True)
class VUnit:
    pass


UNIT = VUnit()


@dataclass(frozen=True)
class VTuple:
    items: tuple


@dataclass(frozen=True)
class VMatrix:
    rows: int
    cols: int
    data: bytes

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError(f"matrix dimensions must be positive: {self.rows}x{self.cols}")
        if len(self.data) != self.rows * self.cols * 8:
            raise ValueError("matrix buffer does not match its dimensions")

    @classmethod
    def from_cells(cls, rows: int, cols: int, cells: Iterable[int]) -> VMatrix:
        return cls(rows, cols, array("q", cells).tobytes())

    @classmethod
    def from_rows(cls, rows: list[list[int]]) -> VMatrix:
        return cls.from_cells(len(rows), len(rows[0]), (c for r in rows for c in r))

    @property
    def cells(self) -> tuple[int, ...]:
        return tuple(memoryview(self.data).cast("q"))

    def to_rows(self) -> list[list[int]]:
        cells = self.cells
        return [list(cells[i * self.cols:(i + 1) * self.cols]) for i in range(self.rows)]

    @property
    def shape(self) -> str:
        return f"{self.rows}x{self.cols}"

    def __repr__(self):
        return f"VMatrix({self.rows}x{self.cols})"


@dataclass(frozen=True)
class VSummary:
    count: int
    digest: int


Value = Union[VInt, VUnit, VTuple, VMatrix, VSummary]


def kind_name(v: Value) -> str:
    return {
        VInt: "Int", VUnit: "()", VTuple: "tuple", VMatrix: "Matrix", VSummary: "Summary",
    }[type(v)]


def matrix_checksum(m: VMatrix) -> int:
    return wrap64(sum(memoryview(m.data).cast("q")))


def render(v: Value) -> str:
    """Canonical text form used by ``print``."""
    if isinstance(v, VInt):
        return str(v.value)
    if isinstance(v, VUnit):
        return "()"
    if isinstance(v, VTuple):
        return "(" + ", ".join(render(x) for x in v.items) + ")"
    if isinstance(v, VMatrix):
        return f"Matrix[{v.rows}x{v.cols};checksum={matrix_checksum(v)}]"
    if isinstance(v, VSummary):
        return f"Summary{{count={v.count},digest={v.digest}}}"
    raise TypeError(f"not a runtime value: {v!r}")
