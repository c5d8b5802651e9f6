"""Uniform subsets of S_n: excluded sets, residues and biconjugacy."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Optional

from .perm import (
    Perm,
    PermError,
    all_perms,
    alternating,
    compose,
    cyclic_perms,
    format_cycles,
    inverse,
    is_cyclic_image,
    odd_perms,
    parity,
    parse_cycles,
)

BICONJUGACY_MAX_DEGREE = 7


class ResourceLimitError(RuntimeError):
    """A search exceeded its configured cap."""


class Uniformity(enum.Enum):
    EVEN = 0
    ODD = 1
    MIXED = 2


class CaseClass(enum.Enum):
    BORING = "BORING"
    INTERESTING = "INTERESTING"


class PermSet:
    """A finite set of permutations of one degree.

    Iteration is in lexicographic order of image tuples, so anything built
    from a PermSet prints the same way every time.
    """

    __slots__ = ("n", "elems")

    def __init__(self, n: int, elems: Iterable[Perm] = ()):
        elems = frozenset(elems)
        for p in elems:
            if p.n != n:
                raise PermError(f"element {p} has degree {p.n}, expected {n}")
        self.n = n
        self.elems = elems

    @classmethod
    def parse(cls, n: int, texts: Iterable[str]) -> "PermSet":
        return cls(n, (parse_cycles(t, n) for t in texts))

    def __iter__(self) -> Iterator[Perm]:
        return iter(sorted(self.elems))

    def __len__(self):
        return len(self.elems)

    def __contains__(self, p):
        return p in self.elems

    def __eq__(self, other):
        if not isinstance(other, PermSet):
            return NotImplemented
        return self.n == other.n and self.elems == other.elems

    def __hash__(self):
        return hash((self.n, self.elems))

    def __le__(self, other: "PermSet") -> bool:
        return self.elems <= other.elems

    def __or__(self, other: "PermSet") -> "PermSet":
        _same_degree(self, other)
        return PermSet(self.n, self.elems | other.elems)

    def __and__(self, other: "PermSet") -> "PermSet":
        _same_degree(self, other)
        return PermSet(self.n, self.elems & other.elems)

    def __sub__(self, other: "PermSet") -> "PermSet":
        _same_degree(self, other)
        return PermSet(self.n, self.elems - other.elems)

    def __repr__(self):
        return f"PermSet(n={self.n}, {{{', '.join(self.cycle_strings())}}})"

    def cycle_strings(self) -> list[str]:
        return [format_cycles(p) for p in self]

    def inverse(self) -> "PermSet":
        return PermSet(self.n, (inverse(p) for p in self.elems))


def _same_degree(a: PermSet, b: PermSet) -> None:
    if a.n != b.n:
        raise PermError(f"degree mismatch: {a.n} vs {b.n}")


def alternating_set(n: int) -> PermSet:
    return PermSet(n, alternating(n))


def odd_set(n: int) -> PermSet:
    return PermSet(n, odd_perms(n))


def cyclic_set(n: int) -> PermSet:
    return PermSet(n, cyclic_perms(n))


def uniformity(P: PermSet) -> Uniformity:
    if not P.elems:
        raise ValueError("uniformity of an empty set is undefined")
    parities = {parity(p) for p in P.elems}
    if parities == {0}:
        return Uniformity.EVEN
    if parities == {1}:
        return Uniformity.ODD
    return Uniformity.MIXED


def set_parity(P: PermSet) -> int:
    """Parity bit of a uniform set; raises on mixed or empty sets."""
    u = uniformity(P)
    if u is Uniformity.MIXED:
        raise ValueError("set is not uniform")
    return u.value


def product_set(P: PermSet, Q: PermSet) -> PermSet:
    _same_degree(P, Q)
    return PermSet(P.n, {compose(p, q) for p in P.elems for q in Q.elems})


def translate(x: Perm, Q: PermSet, y: Perm) -> PermSet:
    """The biconjugate xQy."""
    if x.n != Q.n or y.n != Q.n:
        raise PermError("degree mismatch in translate")
    return PermSet(Q.n, (compose(x, q, y) for q in Q.elems))


def excluded_set(P: PermSet) -> PermSet:
    """E_P: every p^-1 c with p in P and c cyclic."""
    set_parity(P)
    out: set[Perm] = set()
    cyc = [c.image for c in cyclic_perms(P.n)]
    for p in P.elems:
        inv = inverse(p).image
        for ci in cyc:
            out.add(Perm._raw(tuple(ci[i - 1] for i in inv)))
    return PermSet(P.n, out)


def residue(P: PermSet) -> PermSet:
    """R_P: the odd (resp. even) permutations outside E_P when P's parity does (resp. does not) match n's."""
    pi = set_parity(P)
    n = P.n
    base = odd_perms(n) if pi == n % 2 else alternating(n)
    return PermSet(n, base - excluded_set(P).elems)


@dataclass(frozen=True)
class ParityCase:
    n_parity: int
    pq_same: bool
    xy_same: bool
    cls: CaseClass


def classify_parity_case(n: int, P: PermSet, Q: PermSet, x: Perm, y: Perm) -> ParityCase:
    pq_same = set_parity(P) == set_parity(Q)
    xy_same = parity(x) == parity(y)
    # T = PxQy has parity pq_same xor xy_same (negated); C_n has parity (n-1) mod 2
    t_parity = int(pq_same != xy_same)
    cls = CaseClass.INTERESTING if t_parity == (n - 1) % 2 else CaseClass.BORING
    return ParityCase(n % 2, pq_same, xy_same, cls)


def cyclic_witness(P: PermSet, x: Perm, Q: PermSet, y: Perm) -> Optional[tuple[Perm, Perm]]:
    """Some (p, q) with pxqy cyclic, or None. Examines every product."""
    _same_degree(P, Q)
    if x.n != P.n or y.n != P.n:
        raise PermError("degree mismatch")
    xi, yi = x.image, y.image
    # precompute x q y for each q, then test p * (xqy)
    mids = []
    for q in sorted(Q.elems):
        qi = q.image
        mids.append((q, tuple(yi[qi[xi[i] - 1] - 1] for i in range(P.n))))
    for p in sorted(P.elems):
        pi = p.image
        for q, m in mids:
            if is_cyclic_image(tuple(m[j - 1] for j in pi)):
                return p, q
    return None


def intersects_cyclic(P: PermSet, x: Perm, Q: PermSet, y: Perm) -> bool:
    """True iff PxQy meets C_n (brute force over |P|*|Q| products)."""
    return cyclic_witness(P, x, Q, y) is not None


def residue_theorem_check(P: PermSet, x: Perm, Q: PermSet, y: Perm) -> bool:
    """Whether xQy lies inside R_P; only meaningful in an INTERESTING parity case."""
    case = classify_parity_case(P.n, P, Q, x, y)
    if case.cls is CaseClass.BORING:
        raise ValueError("boring parity case: PxQy is disjoint from C_n by parity alone")
    return translate(x, Q, y).elems <= residue(P).elems


def find_biconjugacy(Rp: PermSet, Rq: PermSet,
                     max_degree: int = BICONJUGACY_MAX_DEGREE) -> Optional[tuple[Perm, Perm]]:
    """Return (x, y) with Rp == x Rq y, or None if there is no such pair."""
    _same_degree(Rp, Rq)
    n = Rp.n
    ident = Perm.identity(n)
    if len(Rp) != len(Rq):
        return None
    if not Rp.elems:
        return ident, ident
    if len(Rp) == 1:
        (r1,), (r2,) = Rp.elems, Rq.elems
        # x r2 y = r1 with x = r2
        x = r2
        return x, compose(inverse(r2), inverse(r2), r1)
    # biconjugation preserves uniformity
    if len({parity(p) for p in Rp.elems}) != len({parity(q) for q in Rq.elems}):
        return None
    if n > max_degree:
        raise ResourceLimitError(f"biconjugacy search over S_{n} exceeds cap S_{max_degree}")
    target = Rp.elems
    rq = sorted(Rq.elems)
    r0_inv = inverse(rq[0])
    rest = [q.image for q in rq[1:]]
    for x in all_perms(n):
        x_inv = inverse(x)
        for t in sorted(target):
            y = compose(r0_inv, x_inv, t)
            xi, yi = x.image, y.image
            ok = True
            for qi in rest:
                img = tuple(yi[qi[xi[i] - 1] - 1] for i in range(n))
                if Perm._raw(img) not in target:
                    ok = False
                    break
            if ok:
                return x, y
    return None


def equivalent(P: PermSet, Q: PermSet) -> bool:
    """P ~ Q: the residues are biconjugate."""
    return find_biconjugacy(residue(P), residue(Q)) is not None


def read_permset(path) -> PermSet:
    """Read the ``n=<degree>`` + one-cycle-string-per-line format."""
    return parse_permset_text(Path(path).read_text())


def parse_permset_text(text: str) -> PermSet:
    n = None
    perms = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if n is None:
            if not line.startswith("n="):
                raise ValueError("permutation-set file must start with 'n=<degree>'")
            n = int(line[2:])
            continue
        perms.append(parse_cycles(line, n))
    if n is None:
        raise ValueError("missing 'n=<degree>' header")
    return PermSet(n, perms)


def format_permset(P: PermSet) -> str:
    return "\n".join([f"n={P.n}", *P.cycle_strings()]) + "\n"


def write_permset(P: PermSet, path) -> None:
    Path(path).write_text(format_permset(P))


def symmetric_group(n: int) -> PermSet:
    return PermSet(n, all_perms(n))
