"""Dependency graph of an entry function's do-block.

One task per statement.  Data edges connect a statement to the earlier
statements whose binders it reads; effectful statements are additionally
chained by World edges carrying the RealWorld token, which serializes them
in source order.
"""
from __future__ import annotations

import enum
import heapq
from dataclasses import dataclass
from typing import Optional, Union

from .errors import GraphError
from .lang import Bare, Bind, Call, Let, Program, Purity, entry_def, free_vars, stmt_purity


class StmtKind(enum.Enum):
    BIND = "bind"
    LET = "let"
    BARE = "bare"


@dataclass(frozen=True, order=True)
class Data:
    source: int
    name: str


@dataclass(frozen=True)
class World:
    source: Optional[int]  # None is the initial world


Dep = Union[Data, World]


@dataclass(frozen=True)
class TaskNode:
    id: int
    stmt_kind: StmtKind
    binds_name: Optional[str]
    rhs: object
    purity: Purity
    deps: tuple

    @property
    def label(self) -> str:
        if isinstance(self.rhs, Call):
            return self.rhs.callee
        return self.stmt_kind.value

    @property
    def data_deps(self) -> list[Data]:
        return [d for d in self.deps if isinstance(d, Data)]

    @property
    def world_dep(self) -> Optional[World]:
        for d in self.deps:
            if isinstance(d, World):
                return d
        return None

    def sources(self) -> set[int]:
        """Ids of every task this one waits for."""
        out = {d.source for d in self.deps}
        out.discard(None)
        return out


@dataclass(frozen=True)
class DepGraph:
    entry: str
    nodes: tuple
    world_chain: tuple

    def __len__(self):
        return len(self.nodes)

    def edges(self) -> list[tuple]:
        """All edges as ``(source, target, label, kind)``; source -1 is the
        initial world."""
        out = []
        for n in self.nodes:
            for d in n.deps:
                if isinstance(d, Data):
                    out.append((d.source, n.id, d.name, "data"))
                else:
                    src = -1 if d.source is None else d.source
                    out.append((src, n.id, "RealWorld", "world"))
        out.sort(key=lambda e: (e[0], e[1], e[2]))
        return out


def build_graph(program: Program, entry: str, symbols) -> DepGraph:
    fd = entry_def(program, entry)
    binder_of: dict[str, int] = {}
    nodes = []
    chain: list[int] = []
    for i, stmt in enumerate(fd.body.stmts):
        if isinstance(stmt, Bind):
            kind, name = StmtKind.BIND, stmt.name
        elif isinstance(stmt, Let):
            kind, name = StmtKind.LET, stmt.name
        else:
            kind, name = StmtKind.BARE, None
        deps: list = []
        for var in sorted(free_vars(stmt.rhs)):
            if var not in binder_of:
                raise GraphError(f"statement {i}: '{var}' is not bound by an earlier statement")
            deps.append(Data(binder_of[var], var))
        deps.sort()
        purity = stmt_purity(stmt, symbols)
        if purity is Purity.EFFECTFUL:
            deps.append(World(chain[-1] if chain else None))
            chain.append(i)
        nodes.append(TaskNode(i, kind, name, stmt.rhs, purity, tuple(deps)))
        if name is not None:
            binder_of[name] = i
    return DepGraph(entry, tuple(nodes), tuple(chain))


def toposort(graph: DepGraph) -> list[int]:
    """Kahn's algorithm, always taking the smallest ready id.

    Edges only point forward, so this returns statement order; a cycle means
    the graph was built by something other than ``build_graph``.
    """
    indegree = {n.id: len(n.sources()) for n in graph.nodes}
    users: dict[int, list[int]] = {n.id: [] for n in graph.nodes}
    for n in graph.nodes:
        for s in n.sources():
            users[s].append(n.id)
    heap = [i for i, d in indegree.items() if d == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        i = heapq.heappop(heap)
        order.append(i)
        for u in users[i]:
            indegree[u] -= 1
            if indegree[u] == 0:
                heapq.heappush(heap, u)
    if len(order) != len(graph.nodes):
        raise GraphError("dependency graph contains a cycle")
    return order


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(graph: DepGraph) -> str:
    lines = [f"digraph {_quote(graph.entry)} {{", "  rankdir=TB;",
             '  InitialWorld [label="InitialWorld", shape=box];']
    for n in graph.nodes:
        shape = "ellipse" if n.purity is Purity.PURE else "box"
        lines.append(f"  n{n.id} [label={_quote(f'{n.id}: {n.label}')}, shape={shape}];")
    for src, dst, label, kind in graph.edges():
        src_name = "InitialWorld" if src < 0 else f"n{src}"
        style = ", style=dashed" if kind == "world" else ""
        lines.append(f"  {src_name} -> n{dst} [label={_quote(label)}{style}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def summary(graph: DepGraph) -> str:
    """Human-readable node and edge listing."""
    edges = graph.edges()
    data = [e for e in edges if e[3] == "data"]
    world = [e for e in edges if e[3] == "world"]
    out = [f"entry: {graph.entry}", f"tasks: {len(graph.nodes)}"]
    for n in graph.nodes:
        deps = ", ".join(
            f"{d.name}<-n{d.source}" if isinstance(d, Data)
            else ("world<-initial" if d.source is None else f"world<-n{d.source}")
            for d in n.deps) or "-"
        binder = n.binds_name or "_"
        out.append(f"  n{n.id}  {n.stmt_kind.value:<4} {binder:<10} {n.label:<20} "
                   f"{n.purity.value:<9} deps: {deps}")
    out.append(f"data edges: {len(data)}")
    out.append(f"world edges: {len(world)}")
    chain = " -> ".join(f"n{i}" for i in graph.world_chain) or "-"
    out.append(f"world chain: {chain} (length {len(graph.world_chain)})")
    return "\n".join(out) + "\n"
