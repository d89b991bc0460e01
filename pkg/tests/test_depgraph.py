import itertools

import pytest

from apar.depgraph import Data, StmtKind, World, build_graph, to_dot, toposort
from apar.errors import GraphError
from apar.lang import Purity, free_vars, parse, resolve


def graph_of(source, entry="main"):
    prog = parse(source)
    return build_graph(prog, entry, resolve(prog))


def main_of(*stmts):
    return "main :: IO ()\nmain = do\n" + "".join(f"    {s}\n" for s in stmts)


def brute_force_toposorts(graph):
    ids = [n.id for n in graph.nodes]
    valid = []
    for perm in itertools.permutations(ids):
        pos = {t: i for i, t in enumerate(perm)}
        if all(pos[s] < pos[n.id] for n in graph.nodes for s in n.sources()):
            valid.append(list(perm))
    return valid


class TestBuildGraph:
    def test_worked_example(self, example_source):
        g = graph_of(example_source)
        n0, n1, n2, n3 = g.nodes
        assert (n0.label, n0.purity, n0.deps) == ("clean_files", Purity.EFFECTFUL, (World(None),))
        assert (n1.label, n1.purity, n1.deps) == ("complex_evaluation", Purity.PURE, (Data(0, "x"),))
        assert (n2.label, n2.purity, n2.deps) == ("semantic_analysis", Purity.EFFECTFUL, (World(0),))
        assert (n3.label, n3.purity, n3.deps) == (
            "print", Purity.EFFECTFUL, (Data(1, "y"), Data(2, "z"), World(2)))
        assert g.world_chain == (0, 2, 3)
        assert [n.stmt_kind for n in g.nodes] == [
            StmtKind.BIND, StmtKind.LET, StmtKind.BIND, StmtKind.BARE]

    def test_single_print(self):
        g = graph_of(main_of("print (1, 2)"))
        assert len(g.nodes) == 1 and g.nodes[0].deps == (World(None),)
        assert g.world_chain == (0,)

    @pytest.mark.parametrize("k", [1, 3, 6])
    def test_independent_lets_then_print(self, k):
        stmts = [f"let a{i} = {i} * 2" for i in range(k)]
        stmts.append("print (" + ", ".join(f"a{i}" for i in range(k)) + ", 0)")
        g = graph_of(main_of(*stmts))
        # oracle: free variables of each statement, scanned directly
        prog = parse(main_of(*stmts))
        expected = sorted((i, v) for i, v in enumerate(sorted(free_vars(
            prog.defs["main"].body.stmts[-1].rhs))))
        printer = g.nodes[-1]
        assert len(printer.data_deps) == k == len(expected)
        assert {d.name for d in printer.data_deps} == {f"a{i}" for i in range(k)}
        assert g.world_chain == (k,)
        assert all(n.deps == () for n in g.nodes[:-1])

    def test_pure_chain(self):
        g = graph_of(main_of("let a = 1", "let b = a + 1", "let c = b * 2"))
        assert [n.deps for n in g.nodes] == [(), (Data(0, "a"),), (Data(1, "b"),)]
        assert g.world_chain == ()

    def test_bare_pure_statement_has_no_world_edge(self):
        g = graph_of(main_of("let a = 1", "a + 1"))
        assert g.nodes[1].purity is Purity.PURE and g.nodes[1].world_dep is None

    def test_entry_errors(self):
        src = "f :: Int\nf = 1\n\ng :: Int -> IO ()\ng n = do\n    print n\n\nh :: IO ()\nh = print 1\n"
        prog = parse(src)
        table = resolve(prog)
        with pytest.raises(GraphError, match="entry not found"):
            build_graph(prog, "main", table)
        with pytest.raises(GraphError, match="IO function"):
            build_graph(prog, "f", table)
        with pytest.raises(GraphError, match="no parameters"):
            build_graph(prog, "g", table)
        with pytest.raises(GraphError, match="do-block"):
            build_graph(prog, "h", table)

    def test_edges_point_forward(self, example_source):
        g = graph_of(example_source)
        assert all(src < dst for src, dst, _, _ in g.edges())

    def test_parallelism_witness(self, example_source):
        g = graph_of(example_source)
        done = {0}
        ready = {n.id for n in g.nodes if n.id not in done and n.sources() <= done}
        assert ready == {1, 2}

    def test_dropping_world_edges_keeps_data_deps(self, example_source):
        g = graph_of(example_source)
        for n in g.nodes:
            if n.purity is Purity.PURE:
                assert [d for d in n.deps if not isinstance(d, World)] == list(n.deps)


class TestToposort:
    def test_worked_example(self, example_source):
        g = graph_of(example_source)
        order = toposort(g)
        assert order == [0, 1, 2, 3]
        assert order in brute_force_toposorts(g)

    def test_single_and_empty(self):
        assert toposort(graph_of(main_of("print 1"))) == [0]
        assert toposort(graph_of("main :: IO ()\nmain = do\n")) == []

    def test_statement_order_for_wide_graph(self):
        g = graph_of(main_of("let a = 1", "let b = 2", "x <- semantic_analysis", "print (a, b, x)"))
        assert toposort(g) == [0, 1, 2, 3]
        assert [0, 1, 2, 3] in brute_force_toposorts(g)


class TestDot:
    def test_worked_example(self, example_source):
        dot = to_dot(graph_of(example_source))
        assert dot == (
            'digraph "main" {\n'
            "  rankdir=TB;\n"
            '  InitialWorld [label="InitialWorld", shape=box];\n'
            '  n0 [label="0: clean_files", shape=box];\n'
            '  n1 [label="1: complex_evaluation", shape=ellipse];\n'
            '  n2 [label="2: semantic_analysis", shape=box];\n'
            '  n3 [label="3: print", shape=box];\n'
            '  InitialWorld -> n0 [label="RealWorld", style=dashed];\n'
            '  n0 -> n1 [label="x"];\n'
            '  n0 -> n2 [label="RealWorld", style=dashed];\n'
            '  n1 -> n3 [label="y"];\n'
            '  n2 -> n3 [label="RealWorld", style=dashed];\n'
            '  n2 -> n3 [label="z"];\n'
            "}\n")
        assert dot.count(" -> ") == 6 and dot.count("style=dashed") == 3

    def test_empty(self):
        dot = to_dot(graph_of("main :: IO ()\nmain = do\n"))
        assert "InitialWorld [" in dot and " -> " not in dot and "n0" not in dot

    def test_two_lets(self):
        g = graph_of(main_of("let a = 1", "let b = a"))
        dot = to_dot(g)
        assert dot.count(" -> ") == 1 and "style=dashed" not in dot
        assert dot.count("[label=") == 4  # 3 vertices + 1 edge
