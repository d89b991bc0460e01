"""Length-prefixed JSON frames.

A frame is a 4-byte big-endian payload length followed by a UTF-8 JSON
object.  ``"type"`` is always the first key and the remaining keys follow
the field order of the message class, so encoding is byte-deterministic.
"""
from __future__ import annotations

import json
import struct
from dataclasses import dataclass, fields
from typing import Union

from ..errors import CodecError, FrameTooLargeError
from ..lang import BinOp, Call, If, Lit, Quote, Tuple, Var
from ..values import INT64_MAX, INT64_MIN, UNIT, VInt, VMatrix, VSummary, VTuple, VUnit

PROTOCOL_VERSION = 1
MAX_FRAME = (1 << 31) - 1
_HEADER = struct.Struct(">I")


@dataclass(frozen=True)
class Hello:
    protocol_version: int


@dataclass(frozen=True)
class HelloAck:
    worker_id: int


@dataclass(frozen=True)
class Assign:
    task_id: int
    expr: object
    program_digest: int


@dataclass(frozen=True)
class Result:
    task_id: int
    value: object
    printed: str


@dataclass(frozen=True)
class LoadProgram:
    program_source: str


@dataclass(frozen=True)
class Shutdown:
    pass


@dataclass(frozen=True)
class ProtoError:
    message: str


Message = Union[Hello, HelloAck, Assign, Result, LoadProgram, Shutdown, ProtoError]

_TYPES = {
    "hello": Hello, "hello_ack": HelloAck, "assign": Assign, "result": Result,
    "load_program": LoadProgram, "shutdown": Shutdown, "proto_error": ProtoError,
}
_NAMES = {cls: name for name, cls in _TYPES.items()}


def fnv1a64(data: bytes) -> int:
    h = 0xCBF29CE484222325
    for byte in data:
        h = ((h ^ byte) * 0x100000001B3) & 0xFFFFFFFFFFFFFFFF
    return h


# -- values and expressions as JSON ------------------------------------------

def value_to_json(v) -> dict:
    if isinstance(v, VInt):
        return {"t": "int", "v": v.value}
    if isinstance(v, VUnit):
        return {"t": "unit"}
    if isinstance(v, VTuple):
        return {"t": "tuple", "items": [value_to_json(x) for x in v.items]}
    if isinstance(v, VMatrix):
        return {"t": "matrix", "rows": v.rows, "cols": v.cols,
                "cells": memoryview(v.data).cast("q").tolist()}
    if isinstance(v, VSummary):
        return {"t": "summary", "count": v.count, "digest": v.digest}
    raise CodecError(f"cannot encode value {v!r}")


def _int(obj, key, lo=INT64_MIN, hi=INT64_MAX) -> int:
    try:
        x = obj[key]
    except (KeyError, TypeError):
        raise CodecError(f"missing field '{key}'") from None
    if type(x) is not int or not lo <= x <= hi:
        raise CodecError(f"field '{key}' must be an integer in [{lo}, {hi}]")
    return x


def _str(obj, key) -> str:
    try:
        x = obj[key]
    except (KeyError, TypeError):
        raise CodecError(f"missing field '{key}'") from None
    if not isinstance(x, str):
        raise CodecError(f"field '{key}' must be a string")
    return x


def _list(obj, key) -> list:
    try:
        x = obj[key]
    except (KeyError, TypeError):
        raise CodecError(f"missing field '{key}'") from None
    if not isinstance(x, list):
        raise CodecError(f"field '{key}' must be a list")
    return x


def value_from_json(obj):
    tag = obj.get("t") if isinstance(obj, dict) else None
    if tag == "int":
        return VInt(_int(obj, "v"))
    if tag == "unit":
        return UNIT
    if tag == "tuple":
        return VTuple(tuple(value_from_json(x) for x in _list(obj, "items")))
    if tag == "matrix":
        rows, cols = _int(obj, "rows", 1), _int(obj, "cols", 1)
        cells = _list(obj, "cells")
        if len(cells) != rows * cols:
            raise CodecError("matrix cell count does not match its dimensions")
        try:
            return VMatrix.from_cells(rows, cols, cells)
        except (TypeError, OverflowError):
            raise CodecError("matrix cells must be 64-bit integers") from None
    if tag == "summary":
        return VSummary(_int(obj, "count"), _int(obj, "digest"))
    raise CodecError(f"unknown value tag {tag!r}")


def expr_to_json(e) -> dict:
    if isinstance(e, Lit):
        return {"e": "lit", "value": e.value}
    if isinstance(e, Var):
        return {"e": "var", "name": e.name}
    if isinstance(e, Quote):
        return {"e": "quote", "value": value_to_json(e.value)}
    if isinstance(e, Tuple):
        return {"e": "tuple", "elements": [expr_to_json(x) for x in e.elements]}
    if isinstance(e, Call):
        return {"e": "call", "callee": e.callee, "args": [expr_to_json(a) for a in e.args]}
    if isinstance(e, If):
        return {"e": "if", "cond": expr_to_json(e.cond), "then": expr_to_json(e.then),
                "else": expr_to_json(e.else_)}
    if isinstance(e, BinOp):
        return {"e": "binop", "op": e.op, "lhs": expr_to_json(e.lhs), "rhs": expr_to_json(e.rhs)}
    raise CodecError(f"cannot encode expression {e!r}")


def expr_from_json(obj):
    tag = obj.get("e") if isinstance(obj, dict) else None
    if tag == "lit":
        return Lit(_int(obj, "value"))
    if tag == "var":
        return Var(_str(obj, "name"))
    if tag == "quote":
        return Quote(value_from_json(obj.get("value")))
    if tag == "tuple":
        return Tuple(tuple(expr_from_json(x) for x in _list(obj, "elements")))
    if tag == "call":
        return Call(_str(obj, "callee"), tuple(expr_from_json(a) for a in _list(obj, "args")))
    if tag == "if":
        return If(expr_from_json(obj.get("cond")), expr_from_json(obj.get("then")),
                  expr_from_json(obj.get("else")))
    if tag == "binop":
        op = _str(obj, "op")
        if op not in ("+", "-", "*"):
            raise CodecError(f"unknown operator {op!r}")
        return BinOp(op, expr_from_json(obj.get("lhs")), expr_from_json(obj.get("rhs")))
    raise CodecError(f"unknown expression tag {tag!r}")


# -- messages --------------------------------------------------------------

def message_to_json(msg: Message) -> dict:
    name = _NAMES.get(type(msg))
    if name is None:
        raise CodecError(f"not a message: {msg!r}")
    obj = {"type": name}
    for f in fields(msg):
        x = getattr(msg, f.name)
        if f.name == "expr":
            x = expr_to_json(x)
        elif f.name == "value":
            x = value_to_json(x)
        obj[f.name] = x
    return obj


def message_from_json(obj) -> Message:
    if not isinstance(obj, dict):
        raise CodecError("frame payload is not a JSON object")
    cls = _TYPES.get(obj.get("type"))
    if cls is None:
        raise CodecError(f"unknown message type {obj.get('type')!r}")
    if cls is Hello:
        return Hello(_int(obj, "protocol_version", 0))
    if cls is HelloAck:
        return HelloAck(_int(obj, "worker_id", 0))
    if cls is Assign:
        return Assign(_int(obj, "task_id", 0), expr_from_json(obj.get("expr")),
                      _int(obj, "program_digest", 0, (1 << 64) - 1))
    if cls is Result:
        return Result(_int(obj, "task_id", 0), value_from_json(obj.get("value")),
                      _str(obj, "printed"))
    if cls is LoadProgram:
        return LoadProgram(_str(obj, "program_source"))
    if cls is ProtoError:
        return ProtoError(_str(obj, "message"))
    return Shutdown()


def encode_frame(msg: Message) -> bytes:
    payload = json.dumps(message_to_json(msg), separators=(",", ":"),
                         ensure_ascii=False).encode("utf-8")
    if len(payload) > MAX_FRAME:
        raise FrameTooLargeError(f"payload of {len(payload)} bytes exceeds {MAX_FRAME}")
    return _HEADER.pack(len(payload)) + payload


def decode_payload(payload: bytes) -> Message:
    try:
        obj = json.loads(payload.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as err:
        raise CodecError(f"malformed frame payload: {err}") from None
    try:
        return message_from_json(obj)
    except (RecursionError, ValueError) as err:
        raise CodecError(f"invalid message: {err}") from None


def decode_frames(buffer: bytes) -> tuple[list[Message], bytes]:
    """Decode every complete frame in ``buffer``; return them and the tail."""
    messages = []
    view = memoryview(buffer)
    pos = 0
    while len(view) - pos >= 4:
        (size,) = _HEADER.unpack_from(view, pos)
        if size > MAX_FRAME:
            raise FrameTooLargeError(f"frame length {size} exceeds {MAX_FRAME}")
        if len(view) - pos - 4 < size:
            break
        messages.append(decode_payload(bytes(view[pos + 4:pos + 4 + size])))
        pos += 4 + size
    return messages, bytes(view[pos:])


class FrameDecoder:
    """Incremental decoder: feed arbitrary chunks, get whole messages."""

    def __init__(self):
        self._buf = bytearray()

    def feed(self, data: bytes) -> list[Message]:
        self._buf += data
        messages = []
        while len(self._buf) >= 4:
            (size,) = _HEADER.unpack_from(self._buf, 0)
            if size > MAX_FRAME:
                raise FrameTooLargeError(f"frame length {size} exceeds {MAX_FRAME}")
            if len(self._buf) < 4 + size:
                break
            payload = bytes(self._buf[4:4 + size])
            del self._buf[:4 + size]
            messages.append(decode_payload(payload))
        return messages

    @property
    def pending(self) -> int:
        return len(self._buf)
