import random
from importlib.resources import files

import networkx as nx
import pytest

from twodd.digraph import Digraph, read_graph


def fixture_graph(name: str) -> Digraph:
    return read_graph(files("twodd") / "data" / f"{name}.graph")


def nx_graph(g: Digraph) -> nx.MultiDiGraph:
    G = nx.MultiDiGraph()
    G.add_nodes_from(range(g.vertex_count))
    G.add_edges_from(g.arcs)
    return G


def nx_isomorphic(g: Digraph, h: Digraph) -> bool:
    return nx.is_isomorphic(nx_graph(g), nx_graph(h))


def nx_automorphisms(g: Digraph) -> int:
    G = nx_graph(g)
    return sum(1 for _ in nx.algorithms.isomorphism.MultiDiGraphMatcher(G, G).isomorphisms_iter())


def shuffled(g: Digraph, rng: random.Random) -> Digraph:
    order = list(range(g.vertex_count))
    rng.shuffle(order)
    arcs = [(order[u], order[v]) for u, v in g.arcs]
    rng.shuffle(arcs)
    return Digraph(g.vertex_count, arcs)


@pytest.fixture
def rng():
    return random.Random(20261018)


@pytest.fixture(scope="session")
def four_exit():
    return [fixture_graph(f"g{k}") for k in range(1, 5)]


def pytest_terminal_summary(terminalreporter):
    """One PASS/FAIL line per acceptance criterion, plus any logged counts."""
    lines = []
    for outcome in ("passed", "failed"):
        for rep in terminalreporter.stats.get(outcome, []):
            if rep.when != "call" or "test_acceptance.py" not in rep.nodeid:
                continue
            name = rep.nodeid.split("::")[-1]
            extra = "; ".join(f"{k}={v}" for k, v in rep.user_properties)
            lines.append((name, f"{outcome.upper()[:4]} {name}" + (f"  [{extra}]" if extra else "")))
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
