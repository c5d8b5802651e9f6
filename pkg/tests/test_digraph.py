import json

import pytest

from conftest import fixture_graph
from twodd.digraph import (
    Digraph,
    GraphError,
    SpliceMap,
    ac_decompose,
    ac_is_clean,
    ac_is_closed,
    boundary_labeling,
    classify_vertices,
    components,
    disjoint_union,
    find_split_sets,
    format_graph_text,
    graph_from_json,
    graph_is_clean,
    graph_to_json,
    is_2_splittable,
    is_connected,
    merge_vertices,
    parse_graph_text,
    relabel,
    saturated_in,
    splice_pair,
    split,
    spliced_graph,
    to_dot,
    validate,
)
from twodd.perm import Perm, parse_cycles

CLEAN_AC = fixture_graph("clean_ac")


def doubled_cycle(n):
    """Every arc of an n-cycle doubled: n ACs of 2 arcs each."""
    arcs = []
    for i in range(n):
        arcs += [(i, (i + 1) % n)] * 2
    return Digraph(n, arcs)


def test_validate_reports_bad_vertices():
    g = Digraph(3, [(0, 1), (0, 2), (1, 2)])
    report = validate(g)
    assert not report.ok
    assert [v for v, _, _ in report.violations] == [1]
    assert "vertex 2" in report.describe()
    assert validate(CLEAN_AC).ok


def test_arc_endpoint_range():
    with pytest.raises(GraphError):
        Digraph(2, [(0, 2)])


def test_clean_ac_structure():
    entries, exits, sat = classify_vertices(CLEAN_AC)
    assert (len(entries), len(exits), sat) == (3, 3, [])
    (x,) = CLEAN_AC.acs
    assert x.r == 3 and x.is_odd
    assert ac_is_clean(CLEAN_AC, x) and not ac_is_closed(CLEAN_AC, x)


@pytest.mark.parametrize("name", ["g1", "g2", "g3", "g4", "ga", "gb", "g5"])
def test_ac_partition_alternates(name):
    g = fixture_graph(name)
    acs = ac_decompose(g)
    ids = sorted(a for x in acs for a in x.arc_ids)
    assert ids == list(range(len(g.arcs)))
    for x in acs:
        seq = x.arc_ids
        for i in range(0, len(seq), 2):
            e, f, e2 = seq[i], seq[i + 1], seq[(i + 2) % len(seq)]
            assert g.arcs[e][1] == g.arcs[f][1]          # share an end-vertex
            assert g.arcs[f][0] == g.arcs[e2][0]         # then a start-vertex
        assert min(seq) == seq[0]
    assert graph_is_clean(g)


def test_fixture_vertex_classes():
    for k in range(1, 5):
        g = fixture_graph(f"g{k}")
        assert (len(g.entries), len(g.exits), len(g.saturated)) == (4, 4, 2)
        assert len(g.acs) == 2
    for name in ("ga", "gb"):
        g = fixture_graph(name)
        assert (len(g.entries), len(g.exits), len(g.saturated)) == (5, 5, 4)
    g5 = fixture_graph("g5")
    assert g5.is_saturated and len(g5.acs) == 6 and is_connected(g5)


def test_closed_and_dirty_ac():
    g = doubled_cycle(3)
    assert len(g.acs) == 3
    assert all(x.r == 1 for x in g.acs)
    assert not any(ac_is_closed(g, x) for x in g.acs)
    # a 2-cycle with doubled arcs: each 2-arc AC is a loop-free pair of parallel arcs
    h = Digraph(1, [(0, 0), (0, 0)])
    (x,) = h.acs
    assert ac_is_closed(h, x)


def test_split_and_splice_inverse():
    g = fixture_graph("g5")
    v = g.saturated[0]
    h = split(g, [v])
    assert h.vertex_count == g.vertex_count + 1
    assert len(h.entries) == 1 and len(h.exits) == 1
    back = splice_pair(h, h.entries[0], h.exits[0])
    assert sorted(back.arcs) == sorted(g.arcs)
    with pytest.raises(GraphError):
        split(CLEAN_AC, [CLEAN_AC.entries[0]])


def test_split_sets_of_2dd_have_size_two():
    # two odd 2-dds joined by a 2-splice
    g = fixture_graph("g5")
    assert find_split_sets(g, 1) == []
    assert not is_2_splittable(g)
    cyc = doubled_cycle(4)
    sets = find_split_sets(cyc, 2)
    assert sets and all(len(S) == 2 for S in sets)
    assert is_2_splittable(cyc)
    with pytest.raises(GraphError):
        find_split_sets(disjoint_union(cyc, cyc), 2)


def test_spliced_graph_boundaries():
    g1, g2 = fixture_graph("g1"), fixture_graph("g2")
    x, y = parse_cycles("(1 2)", 4), parse_cycles("(2 3 4)", 4)
    g = spliced_graph(g1, g2, SpliceMap(x, y))
    assert validate(g).ok and g.is_saturated
    assert g.vertex_count == 10 + 10 - 8
    assert len(g.acs) == 4
    # g1 keeps its vertex ids; its exit i now leaves along g2's entry x(i)
    en1, ex1 = boundary_labeling(g1)
    en2, _ = boundary_labeling(g2)
    for i in range(1, 5):
        v = ex1[i - 1]
        assert len(g.out_arcs[v]) == 2
        assert len(g.in_arcs[en1[y(i) - 1]]) == 2
    assert sorted(g.arcs[a] for a in g.in_arcs[ex1[0]]) == sorted(g1.arcs[a] for a in g1.in_arcs[ex1[0]])
    with pytest.raises(GraphError):
        spliced_graph(g1, CLEAN_AC, SpliceMap(Perm.identity(4), Perm.identity(4)))


def test_induced_saturation_counts():
    g5 = fixture_graph("g5")
    assert saturated_in(g5, range(6)) == g5.vertex_count
    assert saturated_in(g5, [1, 4, 5]) == 4


def test_text_round_trip():
    g = fixture_graph("g3")
    text = format_graph_text(g)
    h = parse_graph_text(text)
    assert h == g and h.labels == g.labels
    for bad in ["1 2\n", "vertices 2\n1 2 3\n", "vertices 2\nlabel 1 middle 1\n", "vertices x\n"]:
        with pytest.raises(GraphError):
            parse_graph_text(bad)


def test_json_round_trip_keeps_ac_partition():
    g = fixture_graph("g5")
    data = json.loads(json.dumps(graph_to_json(g)))
    h = graph_from_json(data)
    assert h == g
    assert [(x.forward, x.backward) for x in h.acs] == [(x.forward, x.backward) for x in g.acs]
    assert data["acs"][0]["forward"][0] == 1


def test_relabel_and_components():
    g = fixture_graph("g1")
    order = list(reversed(range(g.vertex_count)))
    h = relabel(g, order)
    assert len(h.acs) == len(g.acs)
    assert components(disjoint_union(g, g)) == 2
    assert "->" in to_dot(g)


def test_single_junction_is_a_split_set():
    a, b = fixture_graph("g1"), fixture_graph("g2")
    u = disjoint_union(a, b)
    junction = (a.exits[0], a.vertex_count + b.entries[0])
    count, arcs, table = merge_vertices(u.vertex_count, u.arcs, [junction])
    g = Digraph(count, arcs)
    assert is_connected(g)
    assert find_split_sets(g, 1) == [(table[junction[0]],)]
