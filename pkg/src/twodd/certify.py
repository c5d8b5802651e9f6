"""Non-Hamiltonicity certificates and AC-count reductions for 2-diregular digraphs.

A certificate is a list of steps.  REPLACE and COLLAPSE steps carry the
graph they produce, and every later step refers to that graph.  The
verifier in this module recomputes each step from the recorded data and
the graph alone.
"""

from __future__ import annotations

import enum
import itertools
import json
from dataclasses import dataclass, field
from functools import lru_cache
from importlib.resources import files
from typing import Optional, Sequence

from .digraph import (
    Digraph,
    GraphError,
    ac_is_closed,
    component_vertex_sets,
    find_split_sets,
    graph_to_json,
    is_connected,
    merge_vertices,
    read_graph,
    saturated_in,
    split,
    validate,
)
from .factors import (
    DEFAULT_MAX_ACS,
    ParityFamily,
    classify_parity_family,
    factor_from_mask,
    hamiltonian_witness,
    open_routes,
)
from .perm import Perm, format_cycles, inverse, parity, parse_cycles
from .permset import (
    CaseClass,
    PermSet,
    ResourceLimitError,
    Uniformity,
    classify_parity_case,
    cyclic_witness,
    find_biconjugacy,
    residue,
    residue_theorem_check,
    translate,
    uniformity,
)

SUBSET_CAP = 12


class Verdict(enum.Enum):
    NON_HAMILTONIAN = "NON_HAMILTONIAN"
    HAMILTONIAN = "HAMILTONIAN"
    UNDECIDED = "UNDECIDED"


class StepKind(enum.Enum):
    EVEN_FAMILY = "EVEN_FAMILY"
    DISCONNECTED = "DISCONNECTED"
    CLOSED_AC = "CLOSED_AC"
    SPLIT = "SPLIT"
    RESIDUE = "RESIDUE"
    REPLACE = "REPLACE"
    COLLAPSE = "COLLAPSE"
    BRUTE_FORCE = "BRUTE_FORCE"


TERMINAL = {StepKind.EVEN_FAMILY, StepKind.DISCONNECTED, StepKind.CLOSED_AC,
            StepKind.SPLIT, StepKind.RESIDUE, StepKind.BRUTE_FORCE}


@dataclass
class Step:
    kind: StepKind
    data: dict

    def to_json(self) -> dict:
        return {"kind": self.kind.value, **self.data}

    @classmethod
    def from_json(cls, d: dict) -> "Step":
        d = dict(d)
        return cls(StepKind(d.pop("kind")), d)


@dataclass
class Certificate:
    verdict: Verdict
    steps: list[Step] = field(default_factory=list)
    reason: str = ""

    @property
    def kinds(self) -> list[StepKind]:
        return [s.kind for s in self.steps]

    def to_json(self) -> dict:
        d = {"verdict": self.verdict.value, "steps": [s.to_json() for s in self.steps]}
        if self.reason:
            d["reason"] = self.reason
        return d

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1)

    @classmethod
    def from_json(cls, d: dict) -> "Certificate":
        return cls(Verdict(d["verdict"]), [Step.from_json(s) for s in d["steps"]], d.get("reason", ""))


def _perm_text(p: Perm) -> str:
    return format_cycles(p)


def _permset_json(P: PermSet) -> list[str]:
    return P.cycle_strings()


def _permset_from(n: int, texts: Sequence[str]) -> PermSet:
    return PermSet.parse(n, texts)


def _require_2dd(g: Digraph) -> None:
    if not validate(g).ok or not g.is_saturated:
        raise GraphError("certification needs a valid 2-diregular digraph")


# -- terminal certificates -------------------------------------------------

def certify_disconnected(g: Digraph) -> Optional[Certificate]:
    sets = component_vertex_sets(g)
    if len(sets) < 2:
        return None
    return Certificate(Verdict.NON_HAMILTONIAN, [Step(StepKind.DISCONNECTED, {"components": len(sets)})])


def closed_ac(g: Digraph) -> Optional[int]:
    """An AC both of whose halves hold a cycle shorter than |V|, if any."""
    for k, x in enumerate(g.acs):
        if x.r < g.vertex_count and ac_is_closed(g, x):
            return k
    return None


def certify_closed_ac(g: Digraph) -> Optional[Certificate]:
    k = closed_ac(g)
    if k is None:
        return None
    return Certificate(Verdict.NON_HAMILTONIAN, [Step(StepKind.CLOSED_AC, {"ac": k})])


def certify_even(g: Digraph, max_acs: int = DEFAULT_MAX_ACS) -> Optional[Certificate]:
    """EVEN_FAMILY certificate when every factor has an even number of cycles."""
    _require_2dd(g)
    if classify_parity_family(g, max_acs) is not ParityFamily.EVEN:
        return None
    return Certificate(Verdict.NON_HAMILTONIAN, [Step(StepKind.EVEN_FAMILY, {})])


def split_components(g: Digraph, S: Sequence[int]) -> list[Digraph]:
    """Split at S, then close each component by splicing its single entry/exit pair."""
    h = split(g, S)
    out = []
    for verts in component_vertex_sets(h):
        vs = set(verts)
        renum = {v: i for i, v in enumerate(verts)}
        arcs = [(renum[u], renum[v]) for u, v in h.arcs if u in vs]
        c = Digraph(len(verts), arcs)
        if len(c.entries) != 1 or len(c.exits) != 1:
            raise GraphError("split component does not have exactly one entry and one exit")
        n, arcs, _ = merge_vertices(c.vertex_count, c.arcs, [(min(c.entries[0], c.exits[0]),
                                                                max(c.entries[0], c.exits[0]))])
        out.append(Digraph(n, arcs))
    return out


def _component_certificate(c: Digraph, max_acs: int, depth: int) -> Optional[Certificate]:
    cert = certify_closed_ac(c) or certify_even(c, max_acs)
    if cert is None and depth > 0:
        cert = certify_split(c, max_acs, depth - 1)
    if cert is None:
        cert = _residue_scan(c, max_acs, SUBSET_CAP)
    return cert


def certify_split(g: Digraph, max_acs: int = DEFAULT_MAX_ACS, depth: int = 8) -> Optional[Certificate]:
    """Certificate from a split-set of size 2 whose closed-up components include a non-Hamiltonian one.

    A Hamiltonian circuit of g crosses each split vertex once, so it restricts
    to a Hamiltonian circuit of both components.  Split-sets of size 1 cannot
    occur in a 2-dd.
    """
    _require_2dd(g)
    if not is_connected(g):
        return None
    for S in find_split_sets(g, 2):
        if len(S) != 2:
            continue
        try:
            comps = split_components(g, S)
        except GraphError:
            continue
        records = []
        hit = False
        for c in comps:
            sub = None if hit else _component_certificate(c, max_acs, depth)
            if sub is not None:
                hit = True
            records.append({"graph": graph_to_json(c), "certificate": sub.to_json() if sub else None})
        if hit:
            step = Step(StepKind.SPLIT, {"split_set": [v + 1 for v in S], "components": records})
            return Certificate(Verdict.NON_HAMILTONIAN, [step])
    return None


# -- AC-subset boundaries -------------------------------------------------

@dataclass(frozen=True)
class Boundary:
    """The two sides of g cut along the ACs in K.

    ``k_exits[j-1]`` is the shared vertex that is exit j of the K side and
    entry j of the complement; ``k_entries`` likewise.  Both lists are in
    ascending vertex order, so the splice maps are the identity.
    """
    K: tuple[int, ...]
    side: Digraph
    side_map: tuple[int, ...]        # side vertex -> g vertex
    rest: Digraph
    rest_map: tuple[int, ...]
    k_entries: tuple[int, ...]
    k_exits: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.k_exits)

    def side_labeling(self):
        back = {v: i for i, v in enumerate(self.side_map)}
        return [back[v] for v in self.k_entries], [back[v] for v in self.k_exits]

    def rest_labeling(self):
        back = {v: i for i, v in enumerate(self.rest_map)}
        return [back[v] for v in self.k_exits], [back[v] for v in self.k_entries]


def _sub(g: Digraph, acs: Sequence[int]) -> tuple[Digraph, tuple[int, ...]]:
    arc_ids = sorted(a for k in acs for a in g.acs[k].arc_ids)
    verts = sorted({v for a in arc_ids for v in g.arcs[a]})
    renum = {v: i for i, v in enumerate(verts)}
    return Digraph(len(verts), [(renum[g.arcs[a][0]], renum[g.arcs[a][1]]) for a in arc_ids]), tuple(verts)


def cut(g: Digraph, K: Sequence[int]) -> Boundary:
    K = tuple(sorted(set(K)))
    m = len(g.acs)
    if not K or len(K) == m or not all(0 <= k < m for k in K):
        raise GraphError("K must be a non-empty proper subset of the ACs")
    Ks = set(K)
    owner = g.arc_ac
    side, side_map = _sub(g, K)
    rest, rest_map = _sub(g, [k for k in range(m) if k not in Ks])
    k_entries, k_exits = [], []
    for v in range(g.vertex_count):
        head_in_k = owner[g.in_arcs[v][0]] in Ks
        tail_in_k = owner[g.out_arcs[v][0]] in Ks
        if head_in_k and not tail_in_k:
            k_exits.append(v)
        elif tail_in_k and not head_in_k:
            k_entries.append(v)
    return Boundary(K, side, side_map, rest, rest_map, tuple(k_entries), tuple(k_exits))


def k_routes(b: Boundary, max_acs: int = DEFAULT_MAX_ACS) -> PermSet:
    """Open routes of the K side under the shared numbering."""
    return open_routes(b.side, b.side_labeling(), max_acs=max_acs).routes


def side_routes(b: Boundary, max_acs: int = DEFAULT_MAX_ACS) -> tuple[PermSet, PermSet]:
    """Open routes of the K side and of the complement under the shared numbering."""
    Q = open_routes(b.rest, b.rest_labeling(), max_acs=max_acs).routes
    return k_routes(b, max_acs), Q


def certify_residue(g: Digraph, K: Sequence[int], max_acs: int = DEFAULT_MAX_ACS,
                    max_degree: int = 8) -> tuple[Optional[Certificate], str]:
    """Residue-containment certificate for the cut along K, or (None, reason)."""
    _require_2dd(g)
    try:
        b = cut(g, K)
    except GraphError as exc:
        return None, str(exc)
    if b.n == 0:
        return None, "no shared vertices"
    if b.n > max_degree:
        return None, f"boundary of {b.n} vertices exceeds the cap {max_degree}"
    if not is_connected(b.side) or not is_connected(b.rest):
        return None, "a side is disconnected"
    try:
        P, Q = side_routes(b, max_acs)
    except GraphError:
        return None, "a side is closed"
    if uniformity(P) is Uniformity.MIXED or uniformity(Q) is Uniformity.MIXED:
        return None, "route sets are not uniform"
    ident = Perm.identity(b.n)
    case = classify_parity_case(b.n, P, Q, ident, ident)
    # the direct product test is cheap and settles most failing cuts
    if case.cls is CaseClass.INTERESTING and cyclic_witness(P, ident, Q, ident) is not None:
        return None, "complement routes leave the residue"
    R = residue(P)
    if case.cls is CaseClass.INTERESTING and not residue_theorem_check(P, ident, Q, ident):
        raise AssertionError("residue containment disagrees with the product test")
    data = {
        "K": list(b.K),
        "n": b.n,
        "x": "I",
        "y": "I",
        "case": case.cls.value,
        "routes_P": _permset_json(P),
        "routes_Q": _permset_json(Q),
        "residue_P": _permset_json(R),
    }
    return Certificate(Verdict.NON_HAMILTONIAN, [Step(StepKind.RESIDUE, data)]), ""


# -- reductions --------------------------------------------------------------

def replace_subgraph(g: Digraph, K: Sequence[int], repl: Digraph, a: Perm, b: Perm,
                     max_acs: int = DEFAULT_MAX_ACS, check: bool = True) -> Digraph:
    """Swap the K side for ``repl`` given residue(K side) == a * residue(repl) * b.

    The complement keeps its vertex ids (compacted) and repl's saturated
    vertices follow.  Complement entry j is joined to repl exit a(j) and
    complement exit j to repl entry b^-1(j).  When both residues are empty
    the parities of a and b must make the two route sets agree in parity
    after translation; ``check`` verifies the precondition.
    """
    bd = cut(g, K)
    n = bd.n
    r_entries, r_exits = _labeling(repl)
    if len(r_entries) != n or len(r_exits) != n:
        raise GraphError("replacement has a different number of entries/exits")
    if check:
        P = k_routes(bd, max_acs)
        P2 = open_routes(repl, (r_entries, r_exits), max_acs=max_acs).routes
        if residue(P) != translate(a, residue(P2), b):
            raise ValueError("residue equivalence not witnessed by (a, b)")
        if set_parities(P) != {(p + parity(a) + parity(b)) % 2 for p in set_parities(P2)}:
            raise ValueError("(a, b) do not carry the route parity across")
    # vertices: complement first, then repl's internal vertices
    Ks = set(bd.K)
    keep = sorted(set(bd.rest_map))
    ids = {v: i for i, v in enumerate(keep)}
    arcs = [(ids[u], ids[v]) for (u, v), k in zip(g.arcs, g.arc_ac) if k not in Ks]
    rmap = {}
    b_inv = inverse(b)
    for j in range(1, n + 1):
        rmap[r_exits[a(j) - 1]] = ids[bd.k_exits[j - 1]]
        rmap[r_entries[b_inv(j) - 1]] = ids[bd.k_entries[j - 1]]
    nxt = len(keep)
    for v in range(repl.vertex_count):
        if v not in rmap:
            rmap[v] = nxt
            nxt += 1
    arcs += [(rmap[u], rmap[v]) for u, v in repl.arcs]
    return Digraph(nxt, arcs)


def set_parities(P: PermSet) -> set[int]:
    return {parity(p) for p in P.elems}


def _labeling(h: Digraph):
    from .digraph import boundary_labeling
    return boundary_labeling(h)


def collapse_unique_route(g: Digraph, K: Sequence[int], max_acs: int = DEFAULT_MAX_ACS) -> Digraph:
    """Drop the K side and join complement exit j to complement entry rho(j)."""
    bd = cut(g, K)
    P = k_routes(bd, max_acs)
    if len(P) != 1:
        raise ValueError(f"K side has {len(P)} open routes, not one")
    (rho,) = P.elems
    return _collapse(g, bd, rho)


def _collapse(g: Digraph, bd: Boundary, rho: Perm) -> Digraph:
    Ks = set(bd.K)
    arcs = [arc for arc, k in zip(g.arcs, g.arc_ac) if k not in Ks]
    used = sorted(set(bd.rest_map))
    # complement exit j is K entry j; it continues at K exit rho(j)
    pairs = []
    for j in range(1, bd.n + 1):
        u, v = bd.k_entries[j - 1], bd.k_exits[rho(j) - 1]
        pairs.append((min(u, v), max(u, v)))
    count, arcs, table = merge_vertices(g.vertex_count, arcs, pairs)
    # drop the K-only vertices, which now have no arcs
    alive = sorted({table[v] for v in used})
    ids = {v: i for i, v in enumerate(alive)}
    return Digraph(len(alive), [(ids[u], ids[v]) for u, v in arcs])


@lru_cache(maxsize=None)
def library_graph(name: str) -> Digraph:
    return read_graph(files("twodd") / "data" / f"{name}.graph")


def _parity_fix(P: PermSet, P2: PermSet, n: int) -> tuple[Perm, Perm]:
    """(a, b) with empty-residue sides made parity compatible."""
    ident = Perm.identity(n)
    if set_parities(P) == set_parities(P2) or n < 2:
        return ident, ident
    return Perm.from_cycles([(1, 2)], n), ident


def _replacement_for(P: PermSet, n: int, max_acs: int) -> Optional[tuple[str, Perm, Perm]]:
    """A library graph with fewer ACs whose residue is biconjugate to R_P."""
    if uniformity(P) is Uniformity.MIXED:
        return None
    R = residue(P)
    if n == 3 and not R:
        names = ["clean_ac"]
    elif n == 4 and not R:
        names = ["g4"]
    elif n == 4 and len(R) == 1:
        names = ["g1"]
    else:
        return None
    for name in names:
        h = library_graph(name)
        P2 = open_routes(h, max_acs=max_acs).routes
        R2 = residue(P2)
        if not R:
            a, b = _parity_fix(P, P2, n)
            return name, a, b
        w = find_biconjugacy(R, R2)
        if w is not None:
            return name, w[0], w[1]
    return None


def _reduce_at(g: Digraph, K: Sequence[int], allow_replace: bool,
               max_acs: int) -> Optional[tuple[Step, Digraph]]:
    bd = cut(g, K)
    if bd.n == 0 or not is_connected(bd.side):
        return None
    try:
        P = k_routes(bd, max_acs)
    except GraphError:
        return None
    if len(P) == 1:
        (rho,) = P.elems
        h = _collapse(g, bd, rho)
        step = Step(StepKind.COLLAPSE, {"K": list(bd.K), "route": _perm_text(rho), "result": graph_to_json(h)})
        return step, h
    if not allow_replace:
        return None
    found = _replacement_for(P, bd.n, max_acs)
    if found is None:
        return None
    name, a, b = found
    repl = library_graph(name)
    if len(repl.acs) >= len(K):
        return None
    h = replace_subgraph(g, K, repl, a, b, max_acs)
    step = Step(StepKind.REPLACE, {"K": list(bd.K), "replacement": name, "a": _perm_text(a),
                                   "b": _perm_text(b), "result": graph_to_json(h)})
    return step, h


def _reduce(g: Digraph, size: int, s_min: int, max_acs: int) -> Optional[tuple[Step, Digraph]]:
    m = len(g.acs)
    if m <= size:
        return None
    cands = []
    for K in itertools.combinations(range(m), size):
        s = saturated_in(g, K)
        if s >= s_min:
            cands.append((-s, K))
    for _, K in sorted(cands):
        out = _reduce_at(g, K, True, max_acs)
        if out is not None:
            return out
    return None


def reduce_2ac_step(g: Digraph, max_acs: int = DEFAULT_MAX_ACS) -> Optional[tuple[Step, Digraph]]:
    return _reduce(g, 2, 3, max_acs)


def reduce_3ac_step(g: Digraph, max_acs: int = DEFAULT_MAX_ACS) -> Optional[tuple[Step, Digraph]]:
    # only when no pair of ACs shares more than two saturated vertices
    m = len(g.acs)
    if any(saturated_in(g, K) > 2 for K in itertools.combinations(range(m), 2)):
        return None
    return _reduce(g, 3, 5, max_acs)


def reduce_2ac(g: Digraph, max_acs: int = DEFAULT_MAX_ACS) -> Optional[Digraph]:
    """Collapse a 2-AC subgraph with 4 saturated vertices, or one with 3 whose route is unique or residue empty."""
    out = reduce_2ac_step(g, max_acs)
    return out[1] if out else None


def reduce_3ac(g: Digraph, max_acs: int = DEFAULT_MAX_ACS) -> Optional[Digraph]:
    """Collapse or replace a 3-AC subgraph with at least 5 saturated vertices."""
    out = reduce_3ac_step(g, max_acs)
    return out[1] if out else None


# -- pipeline ----------------------------------------------------------------

def _brute_step(g: Digraph, max_acs: int) -> tuple[Verdict, Step]:
    w = hamiltonian_witness(g, max_acs)
    if w is None:
        return Verdict.NON_HAMILTONIAN, Step(StepKind.BRUTE_FORCE, {"exhausted": True, "factors": 1 << len(g.acs)})
    return Verdict.HAMILTONIAN, Step(StepKind.BRUTE_FORCE, {"witness": w.bitstring})


def check(g: Digraph, brute_force: bool = True, max_acs: int = DEFAULT_MAX_ACS,
          subset_cap: int = SUBSET_CAP) -> Certificate:
    """Run the certification pipeline and return the first decisive certificate."""
    _require_2dd(g)
    steps: list[Step] = []
    cur = g
    try:
        while True:
            cert = certify_disconnected(cur) or certify_closed_ac(cur)
            if cert is None:
                cert = certify_even(cur, max_acs) or certify_split(cur, max_acs)
            if cert is not None:
                return Certificate(cert.verdict, steps + cert.steps)
            red = reduce_2ac_step(cur, max_acs) or reduce_3ac_step(cur, max_acs)
            if red is None:
                break
            steps.append(red[0])
            cur = red[1]
        cert = _residue_scan(cur, max_acs, subset_cap)
        if cert is not None:
            return Certificate(cert.verdict, steps + cert.steps)
        if not brute_force:
            return Certificate(Verdict.UNDECIDED, steps, "no certificate without brute force")
        verdict, step = _brute_step(cur, max_acs)
        if verdict is Verdict.HAMILTONIAN:
            # a witness on the input graph needs no reduction chain
            verdict, step = _brute_step(g, max_acs)
            return Certificate(verdict, [step])
        return Certificate(verdict, steps + [step])
    except ResourceLimitError as exc:
        return Certificate(Verdict.UNDECIDED, steps, f"resource cap: {exc}")


def _residue_scan(g: Digraph, max_acs: int, subset_cap: int) -> Optional[Certificate]:
    m = len(g.acs)
    if m < 2:
        return None
    if m <= subset_cap:
        # K always holds AC 0; the complement of K gives the same cut
        subsets = (((0,) + rest) for size in range(0, m - 1)
                   for rest in itertools.combinations(range(1, m), size))
    else:
        subsets = _contiguous_subsets(g)
    for K in subsets:
        cert, _ = certify_residue(g, K, max_acs)
        if cert is not None:
            return cert
    return None


def _contiguous_subsets(g: Digraph):
    # grow K from each AC by absorbing the neighbour sharing the most saturated vertices
    m = len(g.acs)
    for start in range(m):
        K = [start]
        while len(K) < m - 1:
            best = max((saturated_in(g, K + [k]), k) for k in range(m) if k not in K)
            K.append(best[1])
            yield tuple(sorted(K))


def certification_outcome(g: Digraph, max_acs: int = DEFAULT_MAX_ACS) -> str:
    """Short label for census tables: the deciding step kind, or HAMILTONIAN/UNDECIDED."""
    cert = check(g, brute_force=False, max_acs=max_acs)
    if cert.verdict is Verdict.UNDECIDED:
        return "UNDECIDED"
    kinds = cert.kinds
    if StepKind.REPLACE in kinds or StepKind.COLLAPSE in kinds:
        return "REDUCED+" + kinds[-1].value
    return kinds[-1].value


# -- verification ------------------------------------------------------------

class CertificateError(ValueError):
    pass


def _fail(msg: str):
    raise CertificateError(msg)


def verify_certificate(g: Digraph, cert: Certificate, max_acs: int = DEFAULT_MAX_ACS) -> bool:
    """Re-check every step from the recorded data and the graph.

    Returns True when the certificate proves its verdict; raises
    CertificateError describing the first step that does not check out.
    """
    if cert.verdict is Verdict.UNDECIDED:
        return False
    if not cert.steps:
        _fail("certificate has no steps")
    cur = g
    for i, step in enumerate(cert.steps):
        last = i == len(cert.steps) - 1
        if step.kind in TERMINAL and not last:
            _fail(f"terminal step {step.kind.value} is not last")
        if not last and step.kind not in (StepKind.REPLACE, StepKind.COLLAPSE):
            _fail(f"step {i} cannot be followed")
        if step.kind in (StepKind.REPLACE, StepKind.COLLAPSE):
            if last:
                _fail("certificate ends on a reduction step")
            cur = _verify_reduction(cur, step, max_acs)
            continue
        if cert.verdict is Verdict.HAMILTONIAN:
            if step.kind is not StepKind.BRUTE_FORCE or "witness" not in step.data or i != 0:
                _fail("a HAMILTONIAN verdict needs a single witness step on the input graph")
        _verify_terminal(cur, step, max_acs)
    return True


def _verify_reduction(g: Digraph, step: Step, max_acs: int) -> Digraph:
    d = step.data
    K = d["K"]
    bd = cut(g, K)
    if step.kind is StepKind.COLLAPSE:
        P = k_routes(bd, max_acs)
        rho = parse_cycles(d["route"], bd.n)
        if P != PermSet(bd.n, [rho]):
            _fail("collapsed side does not have the recorded unique route")
        h = _collapse(g, bd, rho)
    else:
        repl = library_graph(d["replacement"])
        if len(repl.acs) >= len(K):
            _fail("replacement does not reduce the AC count")
        a, b = parse_cycles(d["a"], bd.n), parse_cycles(d["b"], bd.n)
        try:
            h = replace_subgraph(g, K, repl, a, b, max_acs, check=True)
        except ValueError as exc:
            _fail(str(exc))
    if graph_to_json(h)["arcs"] != d["result"]["arcs"]:
        _fail(f"{step.kind.value} result does not match the recorded graph")
    return h


def _verify_terminal(g: Digraph, step: Step, max_acs: int) -> None:
    d = step.data
    kind = step.kind
    if kind is StepKind.DISCONNECTED:
        if is_connected(g):
            _fail("graph is connected")
    elif kind is StepKind.CLOSED_AC:
        x = g.acs[d["ac"]]
        if not (x.r < g.vertex_count and ac_is_closed(g, x)):
            _fail("AC is not closed or spans the graph")
    elif kind is StepKind.EVEN_FAMILY:
        if classify_parity_family(g, max_acs) is not ParityFamily.EVEN:
            _fail("graph has a factor with an odd number of cycles")
    elif kind is StepKind.SPLIT:
        S = [v - 1 for v in d["split_set"]]
        comps = split_components(g, S)
        if len(comps) != len(d["components"]):
            _fail("split produces a different number of components")
        proven = False
        for c, rec in zip(comps, d["components"]):
            if graph_to_json(c)["arcs"] != rec["graph"]["arcs"]:
                _fail("split component differs from the record")
            if rec["certificate"] is not None:
                sub = Certificate.from_json(rec["certificate"])
                if sub.verdict is Verdict.NON_HAMILTONIAN and verify_certificate(c, sub, max_acs):
                    proven = True
        if not proven:
            _fail("no split component is certified non-Hamiltonian")
    elif kind is StepKind.RESIDUE:
        bd = cut(g, d["K"])
        P, Q = side_routes(bd, max_acs)
        n = bd.n
        x, y = parse_cycles(d["x"], n), parse_cycles(d["y"], n)
        if P != _permset_from(n, d["routes_P"]) or Q != _permset_from(n, d["routes_Q"]):
            _fail("recorded route sets do not match the graph")
        if cyclic_witness(P, x, Q, y) is not None:
            _fail("PxQy contains a cyclic permutation")
    elif kind is StepKind.BRUTE_FORCE:
        if "witness" in d:
            mask = int(d["witness"][::-1], 2) if d["witness"] else 0
            if len(d["witness"]) != len(g.acs) or factor_from_mask(g, mask).index != 1:
                _fail("witness factor is not a Hamiltonian circuit")
        elif hamiltonian_witness(g, max_acs) is not None:
            _fail("graph is Hamiltonian")
    else:
        _fail(f"unknown step {kind}")


def read_certificate(path) -> Certificate:
    with open(path) as fh:
        return Certificate.from_json(json.load(fh))


def write_certificate(cert: Certificate, path) -> None:
    with open(path, "w") as fh:
        fh.write(cert.dumps() + "\n")
