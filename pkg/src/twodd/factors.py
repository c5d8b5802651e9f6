"""Factors of a 2-digraph, their indices, routes and the Hamiltonicity oracle.

A factor picks one half of every AC.  Selection bit k is 0 for the forward
half of AC k and 1 for the backward half; factors are enumerated as a
binary counter with AC 0 in the lowest bit.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

from .digraph import Digraph, GraphError, SpliceMap, boundary_labeling, require_valid, spliced_graph
from .perm import Perm
from .permset import PermSet, ResourceLimitError, intersects_cyclic

DEFAULT_MAX_ACS = 24


class ParityFamily(enum.Enum):
    ODD = "ODD"
    EVEN = "EVEN"
    NEITHER = "NEITHER"


@dataclass(frozen=True)
class Factor:
    selection: tuple[int, ...]
    cycles: tuple[tuple[int, ...], ...]
    paths: tuple[tuple[int, ...], ...]

    @property
    def index(self) -> int:
        return len(self.cycles)

    @property
    def is_open(self) -> bool:
        return not self.cycles

    @property
    def bitstring(self) -> str:
        return "".join(map(str, self.selection))

    def arc_ids(self, g: Digraph) -> list[int]:
        return sorted(a for k, x in enumerate(g.acs) for a in x.half(bool(self.selection[k])))

    def to_json(self) -> dict:
        return {
            "selection": self.bitstring,
            "index": self.index,
            "cycles": [[v + 1 for v in c] for c in self.cycles],
            "paths": [[v + 1 for v in p] for p in self.paths],
        }


def _check_cap(g: Digraph, max_acs: int) -> None:
    if len(g.acs) > max_acs:
        raise ResourceLimitError(f"{len(g.acs)} ACs exceed the factor cap of {max_acs}")


def _halves(g: Digraph) -> list[tuple[list[tuple[int, int]], list[tuple[int, int]]]]:
    return [([g.arcs[a] for a in x.forward], [g.arcs[a] for a in x.backward]) for x in g.acs]


def _successors(g: Digraph, halves, mask: int) -> list[int]:
    succ = [-1] * g.vertex_count
    for k, (fwd, bwd) in enumerate(halves):
        for u, v in (bwd if mask >> k & 1 else fwd):
            succ[u] = v
    return succ


def _structure(succ: list[int], has_pred: list[bool]) -> tuple[list[tuple[int, ...]], list[tuple[int, ...]]]:
    n = len(succ)
    seen = [False] * n
    paths = []
    for v in range(n):
        if not has_pred[v]:
            path = [v]
            seen[v] = True
            w = succ[v]
            while w != -1:
                path.append(w)
                seen[w] = True
                w = succ[w]
            paths.append(tuple(path))
    cycles = []
    for v in range(n):
        if seen[v]:
            continue
        cyc = [v]
        seen[v] = True
        w = succ[v]
        while w != v:
            cyc.append(w)
            seen[w] = True
            w = succ[w]
        cycles.append(tuple(cyc))
    return cycles, paths


def factor_from_mask(g: Digraph, mask: int, halves=None) -> Factor:
    halves = halves if halves is not None else _halves(g)
    succ = _successors(g, halves, mask)
    has_pred = [False] * g.vertex_count
    for w in succ:
        if w != -1:
            has_pred[w] = True
    cycles, paths = _structure(succ, has_pred)
    sel = tuple(mask >> k & 1 for k in range(len(halves)))
    return Factor(sel, tuple(cycles), tuple(paths))


def enumerate_factors(g: Digraph, max_acs: int = DEFAULT_MAX_ACS) -> Iterator[Factor]:
    """All 2^K factors in binary-counter order of the selection bits."""
    require_valid(g)
    _check_cap(g, max_acs)
    halves = _halves(g)
    for mask in range(1 << len(halves)):
        yield factor_from_mask(g, mask, halves)


def _cycle_count(succ: list[int], cycle_limit: int = 1 << 30) -> int:
    """Cycles of a successor array with -1 marking path ends."""
    n = len(succ)
    state = bytearray(n)  # 0 new, 1 on current walk, 2 done
    count = 0
    for v in range(n):
        if state[v]:
            continue
        w = v
        while w != -1 and not state[w]:
            state[w] = 1
            w = succ[w]
        if w != -1 and state[w] == 1:
            count += 1
            if count > cycle_limit:
                return count
        w = v
        while w != -1 and state[w] == 1:
            state[w] = 2
            w = succ[w]
    return count


def factor_indices(g: Digraph, max_acs: int = DEFAULT_MAX_ACS) -> Iterator[tuple[int, int]]:
    """(mask, index) for every factor, without building Factor objects."""
    require_valid(g)
    _check_cap(g, max_acs)
    halves = _halves(g)
    for mask in range(1 << len(halves)):
        yield mask, _cycle_count(_successors(g, halves, mask))


def graph_index(g: Digraph, max_acs: int = DEFAULT_MAX_ACS) -> int:
    """Smallest factor index."""
    return min(i for _, i in factor_indices(g, max_acs))


def is_open(g: Digraph, max_acs: int = DEFAULT_MAX_ACS) -> bool:
    return any(i == 0 for _, i in factor_indices(g, max_acs))


def hamiltonian_witness(g: Digraph, max_acs: int = DEFAULT_MAX_ACS) -> Optional[Factor]:
    """A factor of index 1 (a Hamiltonian circuit), or None."""
    if not g.is_saturated:
        raise GraphError("Hamiltonicity is defined here for 2-diregular graphs only")
    for mask, i in factor_indices(g, max_acs):
        if i == 1:
            return factor_from_mask(g, mask)
    return None


def is_hamiltonian(g: Digraph, max_acs: int = DEFAULT_MAX_ACS) -> bool:
    """Brute force over all factors: some factor is a single cycle."""
    return hamiltonian_witness(g, max_acs) is not None


def classify_parity_family(g: Digraph, max_acs: int = DEFAULT_MAX_ACS) -> ParityFamily:
    if not g.is_saturated:
        raise GraphError("odd/even families are defined for 2-diregular graphs only")
    parities = {i % 2 for _, i in factor_indices(g, max_acs)}
    if parities == {1}:
        return ParityFamily.ODD
    if parities == {0}:
        return ParityFamily.EVEN
    return ParityFamily.NEITHER


@dataclass(frozen=True)
class RouteSet:
    entries: tuple[int, ...]   # entries[i-1] is the entry vertex numbered i
    exits: tuple[int, ...]
    routes: PermSet

    @property
    def n(self) -> int:
        return len(self.entries)


def route_of(factor: Factor, entries: Sequence[int], exits: Sequence[int]) -> Perm:
    """Entry number i maps to the number of the exit where its path ends."""
    exit_no = {v: k for k, v in enumerate(exits, start=1)}
    end = {p[0]: p[-1] for p in factor.paths}
    return Perm([exit_no[end[v]] for v in entries])


def open_factors(g: Digraph, max_acs: int = DEFAULT_MAX_ACS) -> Iterator[Factor]:
    require_valid(g)
    _check_cap(g, max_acs)
    halves = _halves(g)
    for mask in range(1 << len(halves)):
        if _cycle_count(_successors(g, halves, mask), 0) == 0:
            yield factor_from_mask(g, mask, halves)


def open_routes(g: Digraph, labeling: Optional[tuple[Sequence[int], Sequence[int]]] = None,
                normalize: bool = False, max_acs: int = DEFAULT_MAX_ACS) -> RouteSet:
    """Distinct routes of the open factors under a boundary labeling.

    ``labeling`` is (entries, exits) with ``entries[i-1]`` numbered i; it
    defaults to the graph's labels or ascending vertex ids.  With
    ``normalize`` the exits are renumbered so that the route of the first
    open factor in enumeration order becomes the identity.
    """
    entries, exits = labeling if labeling is not None else boundary_labeling(g)
    entries, exits = list(entries), list(exits)
    if not entries or len(entries) != len(exits):
        raise GraphError("open routes need equally many (>0) entry and exit vertices")
    facs = list(open_factors(g, max_acs))
    if not facs:
        raise GraphError("graph is closed: it has no open factor")
    if normalize:
        first = route_of(facs[0], entries, exits)
        # exit vertex reached from entry i gets number i
        exits = [exits[first(i) - 1] for i in range(1, len(entries) + 1)]
    routes = PermSet(len(entries), {route_of(f, entries, exits) for f in facs})
    return RouteSet(tuple(entries), tuple(exits), routes)


def hamiltonicity_via_routes(F: Digraph, Fp: Digraph, m: SpliceMap,
                             max_acs: int = DEFAULT_MAX_ACS) -> bool:
    """Hamiltonicity of the spliced graph read off the route sets: PxQy meets C_n."""
    spliced_graph(F, Fp, m)  # validates the boundary bookkeeping
    f_entries, f_exits = boundary_labeling(F)
    g_entries, g_exits = boundary_labeling(Fp)
    if m.exit_order is not None:
        f_exits = list(m.exit_order)
    if m.entry_order is not None:
        g_entries = list(m.entry_order)
    P = open_routes(F, (f_entries, f_exits), max_acs=max_acs)
    Q = open_routes(Fp, (g_entries, g_exits), max_acs=max_acs)
    return intersects_cyclic(P.routes, m.x, Q.routes, m.y)
