"""2-digraphs: vertices of (in, out) degree (0, 2), (2, 0) or (2, 2).

Vertices are numbered from 0 internally; the text and JSON formats are
1-based.  Arcs carry identity by index, so parallel arcs are fine.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

from .perm import Perm

ENTRY = "entry"
EXIT = "exit"


class GraphError(ValueError):
    pass


@dataclass(frozen=True)
class AltCycle:
    """An alternating cycle: ``arc_ids[0::2]`` is the forward half."""

    arc_ids: tuple[int, ...]
    heads: tuple[int, ...]   # shared end-vertices, one per even join
    tails: tuple[int, ...]   # shared start-vertices, one per odd join

    @property
    def r(self) -> int:
        return len(self.arc_ids) // 2

    @property
    def forward(self) -> tuple[int, ...]:
        return self.arc_ids[0::2]

    @property
    def backward(self) -> tuple[int, ...]:
        return self.arc_ids[1::2]

    @property
    def is_odd(self) -> bool:
        return self.r % 2 == 1

    def half(self, backward: bool) -> tuple[int, ...]:
        return self.backward if backward else self.forward


@dataclass(frozen=True)
class Digraph:
    vertex_count: int
    arcs: tuple[tuple[int, int], ...]
    # vertex -> (ENTRY|EXIT, number); optional route numbering
    labels: Mapping[int, tuple[str, int]] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "arcs", tuple((int(u), int(v)) for u, v in self.arcs))
        object.__setattr__(self, "labels", dict(self.labels))
        for u, v in self.arcs:
            if not (0 <= u < self.vertex_count and 0 <= v < self.vertex_count):
                raise GraphError(f"arc ({u + 1}, {v + 1}) has an endpoint outside 1..{self.vertex_count}")

    @cached_property
    def out_arcs(self) -> tuple[tuple[int, ...], ...]:
        out: list[list[int]] = [[] for _ in range(self.vertex_count)]
        for i, (u, _) in enumerate(self.arcs):
            out[u].append(i)
        return tuple(map(tuple, out))

    @cached_property
    def in_arcs(self) -> tuple[tuple[int, ...], ...]:
        inn: list[list[int]] = [[] for _ in range(self.vertex_count)]
        for i, (_, v) in enumerate(self.arcs):
            inn[v].append(i)
        return tuple(map(tuple, inn))

    @cached_property
    def acs(self) -> tuple[AltCycle, ...]:
        return tuple(ac_decompose(self))

    @cached_property
    def arc_ac(self) -> tuple[int, ...]:
        """Index of the AC owning each arc."""
        owner = [0] * len(self.arcs)
        for k, ac in enumerate(self.acs):
            for a in ac.arc_ids:
                owner[a] = k
        return tuple(owner)

    @property
    def entries(self) -> list[int]:
        return [v for v in range(self.vertex_count) if not self.in_arcs[v]]

    @property
    def exits(self) -> list[int]:
        return [v for v in range(self.vertex_count) if not self.out_arcs[v]]

    @property
    def saturated(self) -> list[int]:
        return [v for v in range(self.vertex_count) if self.in_arcs[v] and self.out_arcs[v]]

    @property
    def is_saturated(self) -> bool:
        return all(self.in_arcs[v] and self.out_arcs[v] for v in range(self.vertex_count))

    def with_labels(self, labels: Mapping[int, tuple[str, int]]) -> "Digraph":
        return Digraph(self.vertex_count, self.arcs, labels)


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[tuple[int, int, int], ...]  # (vertex, in, out), 0-based vertex

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok

    def describe(self) -> str:
        if self.ok:
            return "ok"
        return "; ".join(f"vertex {v + 1} has in={i} out={o}" for v, i, o in self.violations)


def validate(g: Digraph) -> ValidationReport:
    bad = []
    for v in range(g.vertex_count):
        d = (len(g.in_arcs[v]), len(g.out_arcs[v]))
        if d not in ((0, 2), (2, 0), (2, 2)):
            bad.append((v, *d))
    return ValidationReport(tuple(bad))


def require_valid(g: Digraph) -> None:
    report = validate(g)
    if not report.ok:
        raise GraphError("not a 2-digraph: " + report.describe())


def classify_vertices(g: Digraph) -> tuple[list[int], list[int], list[int]]:
    """(entry, exit, saturated) vertex lists."""
    require_valid(g)
    return g.entries, g.exits, g.saturated


def ac_decompose(g: Digraph) -> list[AltCycle]:
    """Partition the arcs into alternating cycles in linear time.

    Each AC starts at its smallest unvisited arc, which lands in the
    forward half; the walk leaves that arc through its end-vertex.
    """
    require_valid(g)
    seen = [False] * len(g.arcs)
    out = []
    for start in range(len(g.arcs)):
        if seen[start]:
            continue
        seq, heads, tails = [], [], []
        e = start
        while True:
            seq.append(e)
            seen[e] = True
            head = g.arcs[e][1]
            a, b = g.in_arcs[head]
            f = b if a == e else a
            heads.append(head)
            seq.append(f)
            seen[f] = True
            tail = g.arcs[f][0]
            a, b = g.out_arcs[tail]
            e = b if a == f else a
            tails.append(tail)
            if e == start:
                break
        out.append(AltCycle(tuple(seq), tuple(heads), tuple(tails)))
    return out


def ac_is_clean(g: Digraph, x: AltCycle) -> bool:
    """All 2r shared vertices of the AC are distinct."""
    shared = x.heads + x.tails
    return len(set(shared)) == len(shared)


def graph_is_clean(g: Digraph) -> bool:
    return all(ac_is_clean(g, x) for x in g.acs)


def _half_has_cycle(g: Digraph, arc_ids: Sequence[int]) -> bool:
    succ = {}
    for a in arc_ids:
        u, v = g.arcs[a]
        succ[u] = v
    for start in succ:
        v, steps = succ[start], 1
        while v in succ and v != start and steps <= len(succ):
            v = succ[v]
            steps += 1
        if v == start:
            return True
    return False


def ac_is_closed(g: Digraph, x: AltCycle) -> bool:
    """Both halves of the AC, taken alone, contain a cycle."""
    return _half_has_cycle(g, x.forward) and _half_has_cycle(g, x.backward)


def _component_ids(n: int, edges: Iterable[tuple[int, int]]) -> list[int]:
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for u, v in edges:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[max(ru, rv)] = min(ru, rv)
    return [find(v) for v in range(n)]


def components(g: Digraph) -> int:
    return len(set(_component_ids(g.vertex_count, g.arcs)))


def component_vertex_sets(g: Digraph) -> list[list[int]]:
    comp = _component_ids(g.vertex_count, g.arcs)
    groups: dict[int, list[int]] = {}
    for v, c in enumerate(comp):
        groups.setdefault(c, []).append(v)
    return [groups[c] for c in sorted(groups)]


def is_connected(g: Digraph) -> bool:
    return components(g) == 1


def split(g: Digraph, S: Iterable[int]) -> Digraph:
    """Split saturated vertices.

    Vertex v keeps its id and its in-arcs (it becomes an exit); its out-arcs
    move to a new entry vertex appended after the existing ones, in
    ascending order of v.
    """
    S = sorted(set(S))
    for v in S:
        if not (g.in_arcs[v] and g.out_arcs[v]):
            raise GraphError(f"vertex {v + 1} is not saturated")
    new_id = {v: g.vertex_count + k for k, v in enumerate(S)}
    arcs = [(new_id.get(u, u), v) for u, v in g.arcs]
    return Digraph(g.vertex_count + len(S), arcs, g.labels)


def merge_vertices(vertex_count: int, arcs: Sequence[tuple[int, int]],
                   pairs: Iterable[tuple[int, int]]) -> tuple[int, list[tuple[int, int]], list[int]]:
    """Identify each ``drop`` vertex with its ``keep`` vertex and compact ids.

    Returns the new vertex count, the arcs and the old-to-new id table
    (dropped vertices map to their keeper's new id).
    """
    target = list(range(vertex_count))
    for keep, drop in pairs:
        target[drop] = keep
    # resolve chains
    for v in range(vertex_count):
        t = v
        while target[t] != t:
            t = target[t]
        target[v] = t
    roots = sorted(set(target))
    renum = {old: new for new, old in enumerate(roots)}
    table = [renum[target[v]] for v in range(vertex_count)]
    return len(roots), [(table[u], table[v]) for u, v in arcs], table


def splice_pair(g: Digraph, entry: int, exit: int) -> Digraph:
    """Identify an entry vertex with an exit vertex; the merged vertex takes the smaller id."""
    if g.in_arcs[entry] or not g.out_arcs[entry]:
        raise GraphError(f"vertex {entry + 1} is not an entry vertex")
    if g.out_arcs[exit] or not g.in_arcs[exit]:
        raise GraphError(f"vertex {exit + 1} is not an exit vertex")
    keep, drop = min(entry, exit), max(entry, exit)
    n, arcs, _ = merge_vertices(g.vertex_count, g.arcs, [(keep, drop)])
    return Digraph(n, arcs)


def _split_components(g: Digraph, S: Sequence[int]) -> int:
    return components(split(g, S))


def find_split_sets(g: Digraph, k_max: int) -> list[tuple[int, ...]]:
    """All minimal split-sets of size at most ``k_max``, smallest first."""
    if not is_connected(g):
        raise GraphError("split-sets are only defined here for connected graphs")
    base = components(g)
    sat = g.saturated
    found: list[tuple[int, ...]] = []
    for k in range(1, k_max + 1):
        for S in itertools.combinations(sat, k):
            if any(set(f) <= set(S) for f in found):
                continue
            if _split_components(g, S) > base:
                found.append(S)
    return found


def is_2_splittable(g: Digraph) -> bool:
    """Some set of at most two saturated vertices is a split-set."""
    return bool(find_split_sets(g, 2))


def induced_with_map(g: Digraph, K: Iterable[int]) -> tuple[Digraph, list[int]]:
    """Subgraph on the arcs of the ACs in K, plus its new-to-old vertex table."""
    K = sorted(set(K))
    if not K:
        raise GraphError("K must be non-empty")
    acs = g.acs
    arc_ids = sorted(a for k in K for a in acs[k].arc_ids)
    verts = sorted({v for a in arc_ids for v in g.arcs[a]})
    renum = {v: i for i, v in enumerate(verts)}
    arcs = [(renum[g.arcs[a][0]], renum[g.arcs[a][1]]) for a in arc_ids]
    return Digraph(len(verts), arcs), verts


def induced_by_acs(g: Digraph, K: Iterable[int]) -> Digraph:
    return induced_with_map(g, K)[0]


def saturated_in(g: Digraph, K: Iterable[int]) -> int:
    """Number of vertices saturated in the subgraph induced by K."""
    K = set(K)
    owner = g.arc_ac
    count = 0
    for v in range(g.vertex_count):
        ins, outs = g.in_arcs[v], g.out_arcs[v]
        if ins and outs and owner[ins[0]] in K and owner[outs[0]] in K:
            count += 1
    return count


def boundary_labeling(g: Digraph) -> tuple[list[int], list[int]]:
    """(entries, exits) where ``entries[i - 1]`` is the vertex numbered i.

    Uses the graph's labels when present, ascending vertex ids otherwise.
    """
    entries, exits = g.entries, g.exits
    if not g.labels:
        return entries, exits
    by_kind: dict[str, dict[int, int]] = {ENTRY: {}, EXIT: {}}
    for v, (kind, k) in g.labels.items():
        by_kind[kind][k] = v
    out = []
    for kind, verts in ((ENTRY, entries), (EXIT, exits)):
        m = by_kind[kind]
        if sorted(m) != list(range(1, len(verts) + 1)) or sorted(m.values()) != sorted(verts):
            raise GraphError(f"{kind} labels do not number the {kind} vertices 1..{len(verts)}")
        out.append([m[k] for k in range(1, len(verts) + 1)])
    return out[0], out[1]


def labels_from_order(entries: Sequence[int], exits: Sequence[int]) -> dict[int, tuple[str, int]]:
    labels = {v: (ENTRY, i) for i, v in enumerate(entries, start=1)}
    labels.update({v: (EXIT, i) for i, v in enumerate(exits, start=1)})
    return labels


@dataclass(frozen=True)
class SpliceMap:
    """Exit i of F joins entry x(i) of F'; exit j of F' joins entry y(j) of F.

    The orders default to each graph's boundary labeling.
    """

    x: Perm
    y: Perm
    exit_order: Optional[tuple[int, ...]] = None
    entry_order: Optional[tuple[int, ...]] = None


def spliced_graph(F: Digraph, Fp: Digraph, m: SpliceMap) -> Digraph:
    """Splice F's exits to F''s entries through x and F''s exits to F's entries through y.

    F's vertices keep ids 0..|V(F)|-1; the surviving F' vertices follow in order.
    """
    f_entries, f_exits = boundary_labeling(F)
    g_entries, g_exits = boundary_labeling(Fp)
    if m.exit_order is not None:
        f_exits = list(m.exit_order)
    if m.entry_order is not None:
        g_entries = list(m.entry_order)
    n = len(f_exits)
    if not (n == len(f_entries) == len(g_entries) == len(g_exits) == m.x.n == m.y.n) or n == 0:
        raise GraphError("splicing needs equal, non-zero boundary sizes matching the permutation degree")
    off = F.vertex_count
    arcs = list(F.arcs) + [(u + off, v + off) for u, v in Fp.arcs]
    pairs = []
    for i in range(1, n + 1):
        pairs.append((f_exits[i - 1], g_entries[m.x(i) - 1] + off))
        pairs.append((f_entries[m.y(i) - 1], g_exits[i - 1] + off))
    count, arcs, _ = merge_vertices(off + Fp.vertex_count, arcs, pairs)
    return Digraph(count, arcs)


# -- text / JSON formats -------------------------------------------------

def parse_graph_text(text: str) -> Digraph:
    n = None
    arcs = []
    labels: dict[int, tuple[str, int]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if parts[0] == "vertices":
                n = int(parts[1])
            elif parts[0] == "label":
                v, kind, k = int(parts[1]), parts[2], int(parts[3])
                if kind not in (ENTRY, EXIT):
                    raise GraphError(f"line {lineno}: label kind must be entry or exit")
                labels[v - 1] = (kind, k)
            elif len(parts) == 2:
                arcs.append((int(parts[0]) - 1, int(parts[1]) - 1))
            else:
                raise GraphError(f"line {lineno}: cannot parse {raw!r}")
        except (IndexError, ValueError) as exc:
            if isinstance(exc, GraphError):
                raise
            raise GraphError(f"line {lineno}: cannot parse {raw!r}") from None
    if n is None:
        raise GraphError("missing 'vertices <n>' line")
    return Digraph(n, arcs, labels)


def format_graph_text(g: Digraph) -> str:
    lines = [f"vertices {g.vertex_count}"]
    lines += [f"{u + 1} {v + 1}" for u, v in g.arcs]
    for v in sorted(g.labels):
        kind, k = g.labels[v]
        lines.append(f"label {v + 1} {kind} {k}")
    return "\n".join(lines) + "\n"


def read_graph(path) -> Digraph:
    return parse_graph_text(Path(path).read_text())


def write_graph(g: Digraph, path) -> None:
    Path(path).write_text(format_graph_text(g))


def graph_to_json(g: Digraph) -> dict:
    acs = g.acs if validate(g).ok else ()
    return {
        "vertices": g.vertex_count,
        "arcs": [[u + 1, v + 1] for u, v in g.arcs],
        "labels": [{"vertex": v + 1, "kind": kind, "number": k}
                   for v, (kind, k) in sorted(g.labels.items())],
        "acs": [{"forward": [a + 1 for a in x.forward], "backward": [a + 1 for a in x.backward]}
                for x in acs],
    }


def graph_from_json(data: dict) -> Digraph:
    labels = {d["vertex"] - 1: (d["kind"], d["number"]) for d in data.get("labels", [])}
    return Digraph(data["vertices"], [(u - 1, v - 1) for u, v in data["arcs"]], labels)


def dumps_json(g: Digraph) -> str:
    return json.dumps(graph_to_json(g), indent=2)


def disjoint_union(*graphs: Digraph) -> Digraph:
    arcs = []
    off = 0
    for h in graphs:
        arcs += [(u + off, v + off) for u, v in h.arcs]
        off += h.vertex_count
    return Digraph(off, arcs)


def relabel(g: Digraph, order: Sequence[int]) -> Digraph:
    """Renumber so old vertex ``order[i]`` becomes vertex i; arc order is kept."""
    pos = {v: i for i, v in enumerate(order)}
    labels = {pos[v]: lab for v, lab in g.labels.items()}
    return Digraph(g.vertex_count, [(pos[u], pos[v]) for u, v in g.arcs], labels)


def to_dot(g: Digraph) -> str:
    lines = ["digraph G {"]
    for v in range(g.vertex_count):
        lines.append(f"  {v + 1};")
    colors = {}
    if validate(g).ok:
        for k, x in enumerate(g.acs):
            for a in x.arc_ids:
                colors[a] = (k, a in x.forward)
    for i, (u, v) in enumerate(g.arcs):
        attr = ""
        if i in colors:
            k, fwd = colors[i]
            attr = f' [label="{k + 1}"{"" if fwd else ", style=dashed"}]'
        lines.append(f"  {u + 1} -> {v + 1}{attr};")
    lines.append("}")
    return "\n".join(lines) + "\n"
