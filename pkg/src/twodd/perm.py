"""Permutations of {1..n}.

Products are taken left to right: ``(p * q)(i) == q(p(i))``.  This matches
route concatenation: follow ``p`` first, then ``q``.
"""

from __future__ import annotations

import itertools
import math
import re
from functools import lru_cache
from typing import Iterable, Iterator, Sequence


class PermError(ValueError):
    pass


class Perm:
    """An element of S_n stored as its image tuple.

    ``image[i - 1]`` is the image of ``i``.  Instances are immutable and
    hashable; ordering is lexicographic on the image tuple.
    """

    __slots__ = ("image", "_hash")

    def __init__(self, image: Sequence[int]):
        image = tuple(image)
        n = len(image)
        if n < 1:
            raise PermError("degree must be at least 1")
        if sorted(image) != list(range(1, n + 1)):
            raise PermError(f"{image!r} is not a bijection on 1..{n}")
        object.__setattr__(self, "image", image)
        object.__setattr__(self, "_hash", hash(image))

    @classmethod
    def _raw(cls, image: tuple[int, ...]) -> "Perm":
        # trusted constructor for internal products
        p = object.__new__(cls)
        object.__setattr__(p, "image", image)
        object.__setattr__(p, "_hash", hash(image))
        return p

    def __setattr__(self, name, value):
        raise AttributeError("Perm is immutable")

    @classmethod
    def identity(cls, n: int) -> "Perm":
        return cls(range(1, n + 1))

    @classmethod
    def from_cycles(cls, cycles: Iterable[Sequence[int]], n: int) -> "Perm":
        image = list(range(1, n + 1))
        seen: set[int] = set()
        for cyc in cycles:
            for a in cyc:
                if not 1 <= a <= n:
                    raise PermError(f"symbol {a} outside 1..{n}")
                if a in seen:
                    raise PermError(f"symbol {a} repeated")
                seen.add(a)
            for a, b in zip(cyc, list(cyc[1:]) + [cyc[0]]):
                image[a - 1] = b
        return cls._raw(tuple(image))

    @property
    def n(self) -> int:
        return len(self.image)

    def __call__(self, i: int) -> int:
        return self.image[i - 1]

    def __mul__(self, other: "Perm") -> "Perm":
        return compose(self, other)

    def __invert__(self) -> "Perm":
        return inverse(self)

    def __eq__(self, other):
        if not isinstance(other, Perm):
            return NotImplemented
        return self.image == other.image

    def __lt__(self, other: "Perm") -> bool:
        return (self.n, self.image) < (other.n, other.image)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Perm({format_cycles(self)!r}, n={self.n})"

    def __str__(self):
        return format_cycles(self)

    def cycles(self, fixed: bool = False) -> list[tuple[int, ...]]:
        """Cycles with smallest element first, ordered by smallest element."""
        out = []
        seen = [False] * (self.n + 1)
        for start in range(1, self.n + 1):
            if seen[start]:
                continue
            cyc = [start]
            seen[start] = True
            j = self.image[start - 1]
            while j != start:
                cyc.append(j)
                seen[j] = True
                j = self.image[j - 1]
            if fixed or len(cyc) > 1:
                out.append(tuple(cyc))
        return out

    def cycle_type(self) -> tuple[int, ...]:
        return tuple(sorted((len(c) for c in self.cycles(fixed=True)), reverse=True))


def compose(*perms: Perm) -> Perm:
    """Left-to-right product: apply the first factor first."""
    if not perms:
        raise PermError("compose needs at least one factor")
    img = perms[0].image
    for q in perms[1:]:
        if len(q.image) != len(img):
            raise PermError(f"degree mismatch: {len(img)} vs {q.n}")
        qi = q.image
        img = tuple(qi[i - 1] for i in img)
    return perms[0] if len(perms) == 1 else Perm._raw(img)


def inverse(p: Perm) -> Perm:
    inv = [0] * p.n
    for i, j in enumerate(p.image, start=1):
        inv[j - 1] = i
    return Perm._raw(tuple(inv))


def size(p: Perm) -> int:
    """Number of cycles, fixed points included."""
    return _cycle_count(p.image)


def _cycle_count(image: tuple[int, ...]) -> int:
    n = len(image)
    seen = bytearray(n + 1)
    count = 0
    for start in range(1, n + 1):
        if seen[start]:
            continue
        count += 1
        j = start
        while not seen[j]:
            seen[j] = 1
            j = image[j - 1]
    return count


def parity(p: Perm) -> int:
    """0 for even permutations, 1 for odd."""
    return (p.n - size(p)) % 2


def is_cyclic(p: Perm) -> bool:
    return size(p) == 1


def is_cyclic_image(image: tuple[int, ...]) -> bool:
    """Fast single-cycle test on a raw image tuple."""
    n = len(image)
    j = image[0]
    steps = 1
    while j != 1:
        j = image[j - 1]
        steps += 1
    return steps == n


_CYCLE_RE = re.compile(r"\(([^()]*)\)")


def parse_cycles(text: str, n: int) -> Perm:
    """Parse cycle notation such as ``"(1 4)(2,3)"``; ``"I"`` and ``"()"`` are the identity."""
    s = text.strip()
    if s in ("I", "()"):
        return Perm.identity(n)
    if not s:
        raise PermError("empty permutation text")
    pos = 0
    cycles = []
    for m in _CYCLE_RE.finditer(s):
        if s[pos:m.start()].strip():
            raise PermError(f"malformed cycle text {text!r}")
        pos = m.end()
        parts = [t for t in re.split(r"[\s,]+", m.group(1).strip()) if t]
        if len(parts) < 2:
            raise PermError(f"cycle needs at least two symbols in {text!r}")
        try:
            cycles.append([int(t) for t in parts])
        except ValueError:
            raise PermError(f"non-integer symbol in {text!r}") from None
    if s[pos:].strip() or not cycles:
        raise PermError(f"malformed cycle text {text!r}")
    return Perm.from_cycles(cycles, n)


def format_cycles(p: Perm) -> str:
    cycles = p.cycles()
    if not cycles:
        return "I"
    return "".join("(" + " ".join(map(str, c)) + ")" for c in cycles)


def all_perms(n: int) -> Iterator[Perm]:
    """S_n in lexicographic order of image tuples."""
    for img in itertools.permutations(range(1, n + 1)):
        yield Perm._raw(img)


@lru_cache(maxsize=None)
def cyclic_perms(n: int) -> tuple[Perm, ...]:
    """C_n: the (n-1)! single-cycle permutations, sorted."""
    out = []
    for rest in itertools.permutations(range(2, n + 1)):
        order = (1,) + rest
        img = [0] * n
        for a, b in zip(order, order[1:] + order[:1]):
            img[a - 1] = b
        out.append(Perm._raw(tuple(img)))
    return tuple(sorted(out))


@lru_cache(maxsize=None)
def alternating(n: int) -> frozenset:
    """A_n."""
    return frozenset(p for p in all_perms(n) if parity(p) == 0)


@lru_cache(maxsize=None)
def odd_perms(n: int) -> frozenset:
    """The complement of A_n in S_n."""
    return frozenset(p for p in all_perms(n) if parity(p) == 1)


def random_perm(n: int, rng) -> Perm:
    img = list(range(1, n + 1))
    rng.shuffle(img)
    return Perm._raw(tuple(img))


def factorial(n: int) -> int:
    return math.factorial(n)
