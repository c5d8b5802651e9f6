"""Isomorph-free generation of 2-digraph families built from AC templates.

Every vertex of a 2-digraph is a head of at most one AC and a tail of at
most one AC.  A graph in a family with m ACs of 2r arcs is therefore fixed
by

* a "type matrix" M, where M[A][B] counts the vertices that are heads in AC
  A and tails in AC B (the remaining heads are exits, the remaining tails
  entries), and
* for each AC, the cyclic order in which its heads and tails alternate.

Type matrices are taken up to simultaneous row/column permutation.  Graphs
built from different classes are never isomorphic, so each class is an
independent shard.  Inside a shard, duplicates are removed by canonical
code.
"""

from __future__ import annotations

import itertools
import json
import os
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from math import factorial
from pathlib import Path
from typing import Callable, Iterator, Optional, Sequence

from .digraph import Digraph, component_vertex_sets, graph_is_clean, is_2_splittable, is_connected, validate
from .permset import ResourceLimitError

# exhaustive runs above these need long_run=True
DEFAULT_MAX_ACS = 6


@dataclass(frozen=True)
class CanonicalForm:
    code: bytes
    automorphism_count: int


# -- canonical form -------------------------------------------------------

def _refine_colors(g: Digraph) -> list[int]:
    n = g.vertex_count
    outs = [[g.arcs[a][1] for a in g.out_arcs[v]] for v in range(n)]
    ins = [[g.arcs[a][0] for a in g.in_arcs[v]] for v in range(n)]
    color = [len(ins[v]) * 3 + len(outs[v]) for v in range(n)]
    classes = len(set(color))
    while True:
        sig = [(color[v], tuple(sorted(color[w] for w in outs[v])), tuple(sorted(color[w] for w in ins[v])))
               for v in range(n)]
        rank = {s: i for i, s in enumerate(sorted(set(sig)))}
        color = [rank[s] for s in sig]
        if len(rank) == classes:
            return color
        classes = len(rank)


def _canon_connected(g: Digraph) -> tuple[tuple[int, ...], set[tuple[int, ...]]]:
    """Minimum traversal code of a connected 2-digraph and the labelings achieving it.

    A traversal walks one AC from a start arc, numbering vertices as they
    appear, then enters every further AC from the lowest-numbered vertex
    on it.  The only freedom left is which of the two arcs at that vertex
    comes first; ties that labels and colors cannot break are branched.
    """
    arcs = g.arcs
    n = g.vertex_count
    na = len(arcs)
    hp = [0] * na  # other in-arc at the head
    tp = [0] * na  # other out-arc at the tail
    for v in range(n):
        ins = g.in_arcs[v]
        if ins:
            a, b = ins
            hp[a], hp[b] = b, a
        outs = g.out_arcs[v]
        if outs:
            a, b = outs
            tp[a], tp[b] = b, a
    owner = g.arc_ac
    color = _refine_colors(g)
    big = n + 1
    inv = [(color[u], color[v]) for u, v in arcs]
    low = min(inv)
    starts = [e for e in range(na) if inv[e] == low]

    best: Optional[list[int]] = None
    labelings: set[tuple[int, ...]] = set()

    # a state: (lab, order, code, visited, ptr, side, pending_start)
    stack = []
    for s in reversed(starts):
        stack.append(([-1] * n, [], [], bytearray(len(g.acs)), 0, 0, s))

    while stack:
        lab, order, code, visited, ptr, side, pending = stack.pop()
        # re-establish the comparison against the current best
        cmp = 0
        if best is not None:
            for a, b in zip(code, best):
                if a != b:
                    cmp = -1 if a < b else 1
                    break
            if cmp > 0:
                continue
        dead = False
        while True:
            if pending is not None:
                visited[owner[pending]] = 1
                e0 = e = pending
                pending = None
                while True:
                    for a in (e, hp[e]):
                        u, v = arcs[a]
                        if lab[u] < 0:
                            lab[u] = len(order)
                            order.append(u)
                        if lab[v] < 0:
                            lab[v] = len(order)
                            order.append(v)
                        c = lab[u] * big + lab[v]
                        if cmp == 0 and best is not None:
                            b = best[len(code)]
                            if c > b:
                                dead = True
                                break
                            if c < b:
                                cmp = -1
                        code.append(c)
                    if dead:
                        break
                    e = tp[hp[e]]
                    if e == e0:
                        break
                if dead:
                    break
            # find the next unvisited AC reachable from the scan position
            branch = None
            while ptr < len(order):
                v = order[ptr]
                if side == 0:
                    side = 1
                    ins = g.in_arcs[v]
                    if ins and not visited[owner[ins[0]]]:
                        a, b = ins
                        ka = (lab[arcs[a][0]] if lab[arcs[a][0]] >= 0 else big, color[arcs[a][0]])
                        kb = (lab[arcs[b][0]] if lab[arcs[b][0]] >= 0 else big, color[arcs[b][0]])
                        branch = (a, b, ka, kb, arcs[a][0] == arcs[b][0])
                        break
                else:
                    side = 0
                    ptr += 1
                    outs = g.out_arcs[v]
                    if outs and not visited[owner[outs[0]]]:
                        # the walk from a start arc leaves through its head and
                        # returns through the other out-arc of v
                        a, b = outs
                        ka = (lab[arcs[a][1]] if lab[arcs[a][1]] >= 0 else big, color[arcs[a][1]])
                        kb = (lab[arcs[b][1]] if lab[arcs[b][1]] >= 0 else big, color[arcs[b][1]])
                        branch = (a, b, ka, kb, arcs[a][1] == arcs[b][1])
                        break
            if branch is None:
                break
            a, b, ka, kb, same_end = branch
            if ka < kb or same_end:
                pending = a
            elif kb < ka:
                pending = b
            else:
                stack.append((lab[:], order[:], code[:], bytearray(visited), ptr, side, b))
                pending = a
        if dead:
            continue
        if best is None or cmp < 0:
            best = code
            labelings = {tuple(order)}
        else:
            labelings.add(tuple(order))
    return tuple(best), labelings


def _encode(parts: Sequence[tuple[int, int, tuple[int, ...]]]) -> bytes:
    out = bytearray()
    for nv, big, code in parts:
        out += nv.to_bytes(2, "big") + len(code).to_bytes(2, "big")
        for c in code:
            out += divmod(c, big)[0].to_bytes(2, "big") + divmod(c, big)[1].to_bytes(2, "big")
    return bytes(out)


def canonical_labeling(g: Digraph) -> tuple[CanonicalForm, list[int]]:
    """Canonical form plus a vertex order realising it (old ids in new order)."""
    if not validate(g).ok:
        raise ValueError("canonical forms are defined for valid 2-digraphs")
    if g.vertex_count == 0:
        return CanonicalForm(b"", 1), []
    comps = []
    for verts in component_vertex_sets(g):
        if len(verts) == g.vertex_count:
            h, back = g, list(range(g.vertex_count))
        else:
            vs = set(verts)
            renum = {v: i for i, v in enumerate(verts)}
            h = Digraph(len(verts), [(renum[u], renum[v]) for u, v in g.arcs if u in vs])
            back = verts
        code, labs = _canon_connected(h)
        order = min(labs)
        comps.append((code, h.vertex_count, len(labs), [back[v] for v in order]))
    comps.sort(key=lambda c: (c[1], c[0]))
    aut = 1
    for _, group in itertools.groupby(comps, key=lambda c: (c[1], c[0])):
        group = list(group)
        aut *= factorial(len(group)) * group[0][2] ** len(group)
    parts = [(nv, nv + 1, code) for code, nv, _, _ in comps]
    order = [v for c in comps for v in c[3]]
    return CanonicalForm(_encode(parts), aut), order


def canonical_form(g: Digraph) -> CanonicalForm:
    return canonical_labeling(g)[0]


def canonical_graph(g: Digraph) -> Digraph:
    """The representative of g's isomorphism class, arcs sorted."""
    _, order = canonical_labeling(g)
    pos = {v: i for i, v in enumerate(order)}
    return Digraph(g.vertex_count, sorted((pos[u], pos[v]) for u, v in g.arcs))


def are_isomorphic(g: Digraph, h: Digraph) -> bool:
    return canonical_form(g).code == canonical_form(h).code


def brute_force_isomorphic(g: Digraph, h: Digraph) -> bool:
    """Try every vertex bijection (oracle for small graphs)."""
    if g.vertex_count != h.vertex_count or len(g.arcs) != len(h.arcs):
        return False
    target = Counter(h.arcs)
    for perm in itertools.permutations(range(g.vertex_count)):
        if Counter((perm[u], perm[v]) for u, v in g.arcs) == target:
            return True
    return False


def brute_force_automorphisms(g: Digraph) -> int:
    target = Counter(g.arcs)
    return sum(1 for perm in itertools.permutations(range(g.vertex_count))
               if Counter((perm[u], perm[v]) for u, v in g.arcs) == target)


# -- families --------------------------------------------------------------

@dataclass(frozen=True)
class FamilySpec:
    arcs_per_ac: int = 6
    ac_count: int = 1
    clean: bool = True
    require_connected: bool = True
    saturated_count: Optional[int] = None
    filters: tuple[str, ...] = ()

    def __post_init__(self):
        if self.arcs_per_ac < 2 or self.arcs_per_ac % 2:
            raise ValueError("arcs_per_ac must be a positive even integer")
        if self.ac_count < 1:
            raise ValueError("ac_count must be at least 1")
        unknown = set(self.filters) - set(FILTERS)
        if unknown:
            raise ValueError(f"unknown filters: {sorted(unknown)}")

    @property
    def r(self) -> int:
        return self.arcs_per_ac // 2

    def to_json(self) -> dict:
        d = asdict(self)
        d["filters"] = list(self.filters)
        return d

    @classmethod
    def from_json(cls, d: dict) -> "FamilySpec":
        d = dict(d)
        d["filters"] = tuple(d.get("filters", ()))
        return cls(**d)


def _is_odd_family(g: Digraph) -> bool:
    from .factors import ParityFamily, classify_parity_family
    return g.is_saturated and classify_parity_family(g) is ParityFamily.ODD


def _is_open(g: Digraph) -> bool:
    from .factors import is_open
    return is_open(g)


FILTERS: dict[str, Callable[[Digraph], bool]] = {
    "odd-family": _is_odd_family,
    "non-2-splittable": lambda g: not is_2_splittable(g),
    "saturated-only": lambda g: g.is_saturated,
    "open": _is_open,
}


def _matrices(m: int, r: int, total: Optional[int], clean: bool) -> Iterator[tuple[tuple[int, ...], ...]]:
    """Type matrices with row and column sums at most r, one per conjugacy class."""
    cells = [(i, j) for i in range(m) for j in range(m) if not (clean and i == j)]
    perms = list(itertools.permutations(range(m)))
    rows = [0] * m
    cols = [0] * m
    M = [[0] * m for _ in range(m)]

    def rec(k: int, used: int):
        if k == len(cells):
            if total is None or used == total:
                yield tuple(tuple(row) for row in M)
            return
        i, j = cells[k]
        remaining_cells = len(cells) - k - 1
        hi = min(r - rows[i], r - cols[j])
        if total is not None:
            hi = min(hi, total - used)
        for val in range(hi, -1, -1):
            if total is not None and used + val + remaining_cells * r < total:
                break
            M[i][j] = val
            rows[i] += val
            cols[j] += val
            yield from rec(k + 1, used + val)
            rows[i] -= val
            cols[j] -= val
        M[i][j] = 0

    seen = set()
    for mat in rec(0, 0):
        flat = min(tuple(mat[p[i]][p[j]] for i in range(m) for j in range(m)) for p in perms)
        if flat in seen:
            continue
        seen.add(flat)
        yield tuple(tuple(flat[i * m:(i + 1) * m]) for i in range(m))


def _ac_graph_connected(M) -> bool:
    m = len(M)
    seen = {0}
    todo = [0]
    while todo:
        a = todo.pop()
        for b in range(m):
            if b not in seen and (M[a][b] or M[b][a]):
                seen.add(b)
                todo.append(b)
    return len(seen) == m


def _arrangements(heads: Sequence[int], tails: Sequence[int]) -> list[tuple[tuple[int, int], ...]]:
    """Distinct labeled ACs on the given heads and tails (arcs t_i->h_i, t_i->h_{i+1})."""
    r = len(heads)
    h0, rest = heads[0], list(heads[1:])
    out = {}
    for hp in itertools.permutations(rest):
        hs = (h0,) + hp
        for ts in itertools.permutations(tails):
            arcs = []
            for i in range(r):
                arcs.append((ts[i], hs[i]))
                arcs.append((ts[i], hs[(i + 1) % r]))
            key = tuple(sorted(arcs))
            out.setdefault(key, tuple(arcs))
    return [out[k] for k in sorted(out)]


def list_shards(spec: FamilySpec) -> list[tuple[tuple[int, ...], ...]]:
    m, r = spec.ac_count, spec.r
    want_s = spec.saturated_count
    if "saturated-only" in spec.filters:
        if want_s is not None and want_s != r * m:
            return []
        want_s = r * m
    out = []
    for M in _matrices(m, r, want_s, spec.clean):
        if spec.require_connected and not _ac_graph_connected(M):
            continue
        out.append(M)
    return out


def _shard_graphs(spec: FamilySpec, M) -> dict[bytes, Digraph]:
    m, r = spec.ac_count, spec.r
    heads: list[list[int]] = [[] for _ in range(m)]
    tails: list[list[int]] = [[] for _ in range(m)]
    v = 0
    for a in range(m):
        for b in range(m):
            for _ in range(M[a][b]):
                heads[a].append(v)
                tails[b].append(v)
                v += 1
    for a in range(m):
        while len(heads[a]) < r:
            heads[a].append(v)
            v += 1
    for b in range(m):
        while len(tails[b]) < r:
            tails[b].append(v)
            v += 1
    nv = v
    options = [_arrangements(heads[a], tails[a]) for a in range(m)]
    found: dict[bytes, Digraph] = {}
    for combo in itertools.product(*options):
        arcs = [arc for ac in combo for arc in ac]
        g = Digraph(nv, arcs)
        if len(g.acs) != m:
            # arrangements whose ACs fuse or split are not in this family
            continue
        if spec.clean and not graph_is_clean(g):
            continue
        if spec.require_connected and not is_connected(g):
            continue
        cf, order = canonical_labeling(g)
        if cf.code in found:
            continue
        if not all(FILTERS[f](g) for f in spec.filters):
            found[cf.code] = None  # type: ignore[assignment]
            continue
        pos = {u: i for i, u in enumerate(order)}
        found[cf.code] = Digraph(nv, sorted((pos[a], pos[b]) for a, b in g.arcs))
    return {k: g for k, g in found.items() if g is not None}


def _check_caps(spec: FamilySpec, long_run: bool, max_acs: int) -> None:
    if not long_run and (spec.ac_count > max_acs or (spec.arcs_per_ac != 6 and spec.ac_count > 3)):
        raise ResourceLimitError(
            f"family with {spec.ac_count} ACs of {spec.arcs_per_ac} arcs needs long_run=True")


def generate(spec: FamilySpec, long_run: bool = False, jobs: int = 1,
             max_acs: int = DEFAULT_MAX_ACS) -> Iterator[Digraph]:
    """Pairwise non-isomorphic members of the family, ordered by (shard, canonical code)."""
    _check_caps(spec, long_run, max_acs)
    shards = list_shards(spec)
    for graphs in _map_shards(spec, shards, jobs):
        for code in sorted(graphs):
            yield graphs[code]


def _shard_worker(args):
    spec, M = args
    return _shard_graphs(spec, M)


def _map_shards(spec: FamilySpec, shards, jobs: int):
    if jobs <= 1:
        for M in shards:
            yield _shard_graphs(spec, M)
        return
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        yield from pool.map(_shard_worker, [(spec, M) for M in shards], chunksize=1)


# -- census --------------------------------------------------------------

def _residue_size(g: Digraph):
    from .factors import open_routes
    from .permset import Uniformity, residue, uniformity
    if g.is_saturated:
        return None
    try:
        P = open_routes(g).routes
    except ValueError:
        return None
    if uniformity(P) is Uniformity.MIXED:
        return None
    return len(residue(P))


def _route_count(g: Digraph):
    from .factors import open_routes
    if g.is_saturated:
        return None
    try:
        return len(open_routes(g).routes)
    except ValueError:
        return 0


def _parity_family(g: Digraph):
    from .factors import classify_parity_family
    return classify_parity_family(g).value if g.is_saturated else None


def _hamiltonian(g: Digraph):
    from .factors import is_hamiltonian
    return is_hamiltonian(g) if g.is_saturated else None


def _certification(g: Digraph):
    from .certify import certification_outcome
    return certification_outcome(g) if g.is_saturated else None


ANALYSES: dict[str, Callable[[Digraph], object]] = {
    "connected": is_connected,
    "clean": graph_is_clean,
    "saturated": lambda g: len(g.saturated),
    "parity_family": _parity_family,
    "2_splittable": lambda g: is_2_splittable(g) if is_connected(g) else None,
    "hamiltonian": _hamiltonian,
    "open_routes": _route_count,
    "residue_size": _residue_size,
    "certification": _certification,
}


@dataclass
class Census:
    spec: FamilySpec
    analyses: tuple[str, ...]
    counts: Counter = field(default_factory=Counter)
    total: int = 0

    def add(self, row: tuple) -> None:
        self.counts[row] += 1
        self.total += 1

    def merge(self, other: "Census") -> None:
        self.counts.update(other.counts)
        self.total += other.total

    def rows(self) -> list[tuple]:
        return sorted(self.counts.items(), key=lambda kv: tuple(map(repr, kv[0])))

    def to_tsv(self) -> str:
        lines = ["\t".join(self.analyses + ("count",))]
        for key, count in self.rows():
            lines.append("\t".join([*(str(k) for k in key), str(count)]))
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        return {
            "spec": self.spec.to_json(),
            "analyses": list(self.analyses),
            "total": self.total,
            "rows": [{"key": list(key), "count": c} for key, c in self.rows()],
        }

    @classmethod
    def from_json(cls, d: dict) -> "Census":
        c = cls(FamilySpec.from_json(d["spec"]), tuple(d["analyses"]))
        for row in d["rows"]:
            c.counts[tuple(row["key"])] += row["count"]
        c.total = d["total"]
        return c


def analyse(g: Digraph, analyses: Sequence[str]) -> tuple:
    return tuple(ANALYSES[a](g) for a in analyses)


def census(spec: FamilySpec, analyses: Sequence[str], long_run: bool = False, jobs: int = 1,
           max_acs: int = DEFAULT_MAX_ACS) -> Census:
    unknown = set(analyses) - set(ANALYSES)
    if unknown:
        raise ValueError(f"unknown analyses: {sorted(unknown)}")
    out = Census(spec, tuple(analyses))
    for g in generate(spec, long_run=long_run, jobs=jobs, max_acs=max_acs):
        out.add(analyse(g, analyses))
    return out


# -- long-run sharded mode ------------------------------------------------

def write_manifest(spec: FamilySpec, analyses: Sequence[str], directory) -> Path:
    """Describe every shard of a long run; shards are then run independently."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    shards = list_shards(spec)
    manifest = {
        "spec": spec.to_json(),
        "analyses": list(analyses),
        "shards": [{"id": i, "matrix": [list(row) for row in M]} for i, M in enumerate(shards)],
    }
    path = d / "manifest.json"
    path.write_text(json.dumps(manifest, indent=1))
    return path


def run_shard(directory, shard_id: int) -> Path:
    """Run one shard; skipped if its output already exists (restartable)."""
    d = Path(directory)
    manifest = json.loads((d / "manifest.json").read_text())
    spec = FamilySpec.from_json(manifest["spec"])
    out_path = d / f"shard_{shard_id:06d}.json"
    if out_path.exists():
        return out_path
    M = tuple(tuple(row) for row in manifest["shards"][shard_id]["matrix"])
    analyses = tuple(manifest["analyses"])
    c = Census(spec, analyses)
    codes = []
    for code, g in sorted(_shard_graphs(spec, M).items()):
        c.add(analyse(g, analyses))
        codes.append(code.hex())
    tmp = out_path.with_suffix(".tmp")
    tmp.write_text(json.dumps({"census": c.to_json(), "codes": codes}))
    os.replace(tmp, out_path)
    return out_path


def run_all_shards(directory, jobs: int = 1) -> None:
    d = Path(directory)
    manifest = json.loads((d / "manifest.json").read_text())
    ids = [s["id"] for s in manifest["shards"]]
    if jobs <= 1:
        for i in ids:
            run_shard(d, i)
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            list(pool.map(run_shard, [d] * len(ids), ids))


def merge_shards(directory) -> tuple[Census, int]:
    """Combine finished shards; returns the census and the number of missing shards."""
    d = Path(directory)
    manifest = json.loads((d / "manifest.json").read_text())
    spec = FamilySpec.from_json(manifest["spec"])
    total = Census(spec, tuple(manifest["analyses"]))
    missing = 0
    seen: set[str] = set()
    for s in manifest["shards"]:
        p = d / f"shard_{s['id']:06d}.json"
        if not p.exists():
            missing += 1
            continue
        data = json.loads(p.read_text())
        dup = seen.intersection(data["codes"])
        if dup:
            raise ValueError(f"shard {s['id']} repeats {len(dup)} graphs from another shard")
        seen.update(data["codes"])
        part = Census.from_json(data["census"])
        total.merge(part)
    return total, missing


def decode(code: bytes) -> Digraph:
    """Rebuild the canonical representative from a canonical code."""
    arcs = []
    off = 0
    pos = 0
    while pos < len(code):
        nv = int.from_bytes(code[pos:pos + 2], "big")
        na = int.from_bytes(code[pos + 2:pos + 4], "big")
        pos += 4
        for _ in range(na):
            u = int.from_bytes(code[pos:pos + 2], "big")
            v = int.from_bytes(code[pos + 2:pos + 4], "big")
            arcs.append((u + off, v + off))
            pos += 4
        off += nv
    return Digraph(off, arcs)


def random_2dd(m: int, rng, clean: bool = True, arcs_per_ac: int = 6, attempts: int = 1000) -> Digraph:
    """A random connected 2-dd with m ACs, spliced along a random head/tail matching."""
    r = arcs_per_ac // 2
    if clean and m < 2:
        raise ValueError("a clean 2-dd needs at least two ACs")
    for _ in range(attempts):
        # vertex v is head slot v (of AC v // r) and tail slot tail_of[v]
        tail_of = list(range(r * m))
        rng.shuffle(tail_of)
        if clean and any(v // r == t // r for v, t in enumerate(tail_of)):
            continue
        vertex_of_tail = {t: v for v, t in enumerate(tail_of)}
        arcs = []
        for k in range(m):
            hs = list(range(k * r, (k + 1) * r))
            ts = [vertex_of_tail[t] for t in range(k * r, (k + 1) * r)]
            rng.shuffle(hs)
            rng.shuffle(ts)
            for i in range(r):
                arcs.append((ts[i], hs[i]))
                arcs.append((ts[i], hs[(i + 1) % r]))
        g = Digraph(r * m, arcs)
        if len(g.acs) == m and is_connected(g):
            return g
    raise RuntimeError(f"no connected graph with {m} ACs found in {attempts} attempts")
