"""Finite topological spaces, preorders, and the constructions between them.

Points of a space of size u are 0..u-1 and point-sets are int bitmasks
internally; the public API accepts any iterable of points and returns
frozensets. Opens are kept deduplicated and sorted, validated eagerly.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Iterator, Optional, Sequence

from .errors import (
    EmptyList,
    MissingEmptyOrFull,
    NotClosedUnderIntersection,
    NotClosedUnderUnion,
    NotPreorder,
    OutOfRangePoint,
    SizeTooLarge,
)

ENUM_SIZE_CAP = 4


def bits_of(points: Iterable[int], size: int) -> int:
    mask = 0
    for p in points:
        if not 0 <= p < size:
            raise OutOfRangePoint(f"point {p} outside 0..{size - 1}")
        mask |= 1 << p
    return mask


def set_of(bits: int) -> frozenset:
    out = []
    p = 0
    while bits:
        if bits & 1:
            out.append(p)
        bits >>= 1
        p += 1
    return frozenset(out)


class FiniteTopology:
    """A topology on {0..size-1}; `opens` is a sorted tuple of bitmasks."""

    __slots__ = ("size", "opens", "_full", "_minnbhd")

    def __init__(self, size: int, opens: Sequence[int]):
        full = (1 << size) - 1
        fam = sorted(set(opens))
        if 0 not in fam or full not in fam:
            raise MissingEmptyOrFull(f"opens must contain {{}} and the full base of size {size}")
        for o in fam:
            if o & ~full:
                raise OutOfRangePoint(f"open {set_of(o)} not a subset of the base")
        famset = set(fam)
        for a, b in itertools.combinations(fam, 2):
            if (a | b) not in famset:
                raise NotClosedUnderUnion(set_of(a), set_of(b))
            if (a & b) not in famset:
                raise NotClosedUnderIntersection(set_of(a), set_of(b))
        self.size = size
        self.opens = tuple(fam)
        self._full = full
        # minimal open neighbourhood per point; finite spaces are Alexandrov
        nb = []
        for p in range(size):
            m = full
            for o in fam:
                if o >> p & 1:
                    m &= o
            nb.append(m)
        self._minnbhd = tuple(nb)

    def __eq__(self, other):
        return (
            isinstance(other, FiniteTopology)
            and self.size == other.size
            and self.opens == other.opens
        )

    def __hash__(self):
        return hash((self.size, self.opens))

    def __repr__(self):
        fam = [sorted(set_of(o)) for o in self.opens]
        return f"FiniteTopology(size={self.size}, opens={fam})"

    # -- bit-level core ------------------------------------------------

    def interior_bits(self, bits: int) -> int:
        out = 0
        for o in self.opens:
            if o & ~bits == 0:
                out |= o
        return out

    def closure_bits(self, bits: int) -> int:
        return self._full & ~self.interior_bits(self._full & ~bits)

    def is_open_bits(self, bits: int) -> bool:
        return bits in self.opens

    def to_json(self) -> dict:
        return {
            "size": self.size,
            "opens": sorted([sorted(set_of(o)) for o in self.opens]),
        }

    @staticmethod
    def from_json(doc: dict) -> "FiniteTopology":
        size = doc["size"]
        return make_topology(size, [bits_of(o, size) for o in doc["opens"]])


class Preorder:
    """A reflexive transitive relation; `up[x]` is the successor bitmask."""

    __slots__ = ("size", "up")

    def __init__(self, size: int, leq: Iterable[tuple]):
        up = [0] * size
        for x, y in leq:
            if not (0 <= x < size and 0 <= y < size):
                raise OutOfRangePoint(f"pair ({x},{y}) outside 0..{size - 1}")
            up[x] |= 1 << y
        for x in range(size):
            if not up[x] >> x & 1:
                raise NotPreorder(f"not reflexive at {x}")
        for x in range(size):
            m = up[x]
            y = 0
            while m >> y:
                if m >> y & 1 and up[y] & ~up[x]:
                    raise NotPreorder(f"not transitive at ({x},{y})")
                y += 1
        self.size = size
        self.up = tuple(up)

    def leq(self, x: int, y: int) -> bool:
        return bool(self.up[x] >> y & 1)

    def pairs(self):
        return frozenset(
            (x, y) for x in range(self.size) for y in range(self.size) if self.leq(x, y)
        )

    def __eq__(self, other):
        return isinstance(other, Preorder) and self.size == other.size and self.up == other.up

    def __hash__(self):
        return hash((self.size, self.up))

    def __repr__(self):
        return f"Preorder(size={self.size}, leq={sorted(self.pairs())})"

    def to_json(self) -> dict:
        return {"size": self.size, "leq": sorted([list(p) for p in self.pairs()])}

    @staticmethod
    def from_json(doc: dict) -> "Preorder":
        return Preorder(doc["size"], [tuple(p) for p in doc["leq"]])


# -- constructors -------------------------------------------------------


def make_topology(size: int, opens=None, preset: Optional[str] = None) -> FiniteTopology:
    """Build and validate a topology; `preset` overrides `opens`."""
    if preset == "discrete":
        return FiniteTopology(size, list(range(1 << size)))
    if preset == "indiscrete":
        return FiniteTopology(size, [0, (1 << size) - 1])
    if preset not in (None, "none"):
        raise ValueError(f"unknown preset {preset!r}")
    if opens is None:
        raise ValueError("opens required when no preset is given")
    fam = []
    for o in opens:
        fam.append(o if isinstance(o, int) else bits_of(o, size))
    return FiniteTopology(size, fam)


def interior(t: FiniteTopology, a: Iterable[int]) -> frozenset:
    return set_of(t.interior_bits(bits_of(a, t.size)))


def closure(t: FiniteTopology, a: Iterable[int]) -> frozenset:
    return set_of(t.closure_bits(bits_of(a, t.size)))


def is_almost_discrete(t: FiniteTopology) -> bool:
    """cl(A) = int cl(A) for every open A."""
    for o in t.opens:
        c = t.closure_bits(o)
        if c != t.interior_bits(c):
            return False
    return True


def alexandrov(p: Preorder) -> FiniteTopology:
    """Opens are exactly the up-closed sets of the preorder."""
    opens = []
    for m in range(1 << p.size):
        ok = True
        for x in range(p.size):
            if m >> x & 1 and p.up[x] & ~m:
                ok = False
                break
        if ok:
            opens.append(m)
    return FiniteTopology(p.size, opens)


def specialization_preorder(t: FiniteTopology) -> Preorder:
    """x <= y iff x lies in the closure of {y}; with up-set Alexandrov
    topologies this inverts alexandrov() exactly."""
    pairs = []
    for y in range(t.size):
        cl = t.closure_bits(1 << y)
        for x in range(t.size):
            if cl >> x & 1:
                pairs.append((x, y))
    return Preorder(t.size, pairs)


def coproduct(ts: Sequence[FiniteTopology]) -> FiniteTopology:
    """Disjoint union; open iff each summand trace is open (finest such)."""
    if not ts:
        raise EmptyList("coproduct of an empty list")
    offsets = []
    total = 0
    for t in ts:
        offsets.append(total)
        total += t.size
    opens = []
    for m in range(1 << total):
        ok = True
        for t, off in zip(ts, offsets):
            trace = (m >> off) & ((1 << t.size) - 1)
            if not t.is_open_bits(trace):
                ok = False
                break
        if ok:
            opens.append(m)
    return FiniteTopology(total, opens)


def subspace(t: FiniteTopology, s: Iterable[int]) -> FiniteTopology:
    """Trace topology on s, re-indexed to 0..|s|-1 in ascending point order."""
    sbits = bits_of(s, t.size)
    points = sorted(set_of(sbits))
    index = {p: i for i, p in enumerate(points)}
    opens = set()
    for o in t.opens:
        m = 0
        for p in points:
            if o >> p & 1:
                m |= 1 << index[p]
        opens.add(m)
    return FiniteTopology(len(points), sorted(opens))


def enumerate_topologies(size: int) -> Iterator[FiniteTopology]:
    """All distinct topologies on {0..size-1}, each exactly once (size <= 4)."""
    if size > ENUM_SIZE_CAP:
        raise SizeTooLarge(f"enumerate_topologies capped at size {ENUM_SIZE_CAP}")
    full = (1 << size) - 1
    if size == 0:
        yield FiniteTopology(0, [0])
        return
    middles = [m for m in range(1 << size) if m not in (0, full)]
    for picks in range(1 << len(middles)):
        fam = [0, full]
        for i, m in enumerate(middles):
            if picks >> i & 1:
                fam.append(m)
        famset = set(fam)
        ok = True
        for a, b in itertools.combinations(fam, 2):
            if (a | b) not in famset or (a & b) not in famset:
                ok = False
                break
        if ok:
            yield FiniteTopology(size, fam)


def enumerate_preorders(size: int) -> Iterator[Preorder]:
    """All labelled preorders on {0..size-1} (small sizes only)."""
    if size > 5:
        raise SizeTooLarge("enumerate_preorders capped at size 5")
    if size == 0:
        yield Preorder(0, [])
        return

    # choose successor rows one by one, pruning transitivity violations among
    # the rows decided so far
    def rows(x, acc):
        if x == size:
            yield Preorder(size, [
                (i, j) for i in range(size) for j in range(size) if acc[i] >> j & 1
            ])
            return
        for m in range(1 << size):
            if not m >> x & 1:
                continue
            ok = True
            for y in range(x):
                if m >> y & 1 and acc[y] & ~m:
                    ok = False
                    break
                if acc[y] >> x & 1 and m & ~acc[y]:
                    ok = False
                    break
            if ok:
                acc.append(m)
                yield from rows(x + 1, acc)
                acc.pop()

    yield from rows(0, [])
