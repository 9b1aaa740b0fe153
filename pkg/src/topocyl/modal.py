"""Syntax and finite-model semantics for S4 and S4C.

Formulas are tagged tuples: ("atom", k), ("not", f), ("and", f, g),
("or", f, g), ("imp", f, g), ("I", f) for the interior box and ("X", f)
for the temporal next. Satisfaction sets are int bitmasks over points.
"""

from __future__ import annotations

import random
from typing import Dict, Iterable, Optional, Tuple

import numpy as np

from .errors import NotContinuous, SizeTooLarge
from .topology import (
    FiniteTopology,
    Preorder,
    bits_of,
    enumerate_preorders,
    enumerate_topologies,
    set_of,
)

Formula = tuple

BINARY = {"and", "or", "imp"}
UNARY = {"not", "I", "X"}


def atom(k: int) -> Formula:
    return ("atom", k)


def neg(f: Formula) -> Formula:
    return ("not", f)


def conj(f: Formula, g: Formula) -> Formula:
    return ("and", f, g)


def disj(f: Formula, g: Formula) -> Formula:
    return ("or", f, g)


def implies(f: Formula, g: Formula) -> Formula:
    return ("imp", f, g)


def box(f: Formula) -> Formula:
    return ("I", f)


def nxt(f: Formula) -> Formula:
    return ("X", f)


def atoms_of(f: Formula) -> frozenset:
    if f[0] == "atom":
        return frozenset([f[1]])
    return frozenset().union(*(atoms_of(g) for g in f[1:]))


def modal_depth(f: Formula) -> int:
    """Nesting depth counting only I and X."""
    if f[0] == "atom":
        return 0
    sub = max(modal_depth(g) for g in f[1:])
    return sub + 1 if f[0] in ("I", "X") else sub


def uses_next(f: Formula) -> bool:
    if f[0] == "X":
        return True
    return any(uses_next(g) for g in f[1:] if isinstance(g, tuple))


# -- text syntax ---------------------------------------------------------


def parse(text: str) -> Formula:
    """Parse `p0, ~, &, |, ->, I, X` with parentheses; -> is right associative."""
    toks = _tokenize(text)
    pos = [0]

    def peek():
        return toks[pos[0]] if pos[0] < len(toks) else None

    def take(expected=None):
        tok = peek()
        if tok is None or (expected is not None and tok != expected):
            raise SyntaxError(f"expected {expected!r}, got {tok!r} in {text!r}")
        pos[0] += 1
        return tok

    def parse_imp():
        lhs = parse_or()
        if peek() == "->":
            take()
            return implies(lhs, parse_imp())
        return lhs

    def parse_or():
        lhs = parse_and()
        while peek() == "|":
            take()
            lhs = disj(lhs, parse_and())
        return lhs

    def parse_and():
        lhs = parse_unary()
        while peek() == "&":
            take()
            lhs = conj(lhs, parse_unary())
        return lhs

    def parse_unary():
        tok = peek()
        if tok == "~":
            take()
            return neg(parse_unary())
        if tok == "I":
            take()
            return box(parse_unary())
        if tok == "X":
            take()
            return nxt(parse_unary())
        if tok == "(":
            take()
            inner = parse_imp()
            take(")")
            return inner
        if tok is not None and tok.startswith("p"):
            take()
            return atom(int(tok[1:]))
        raise SyntaxError(f"unexpected token {tok!r} in {text!r}")

    out = parse_imp()
    if pos[0] != len(toks):
        raise SyntaxError(f"trailing tokens in {text!r}")
    return out


def _tokenize(text: str):
    toks = []
    i = 0
    while i < len(text):
        c = text[i]
        if c.isspace():
            i += 1
        elif c in "~&|()IX":
            toks.append(c)
            i += 1
        elif text.startswith("->", i):
            toks.append("->")
            i += 2
        elif c == "p":
            j = i + 1
            while j < len(text) and text[j].isdigit():
                j += 1
            if j == i + 1:
                raise SyntaxError(f"atom needs an index at {i} in {text!r}")
            toks.append(text[i:j])
            i = j
        else:
            raise SyntaxError(f"bad character {c!r} in {text!r}")
    return toks


def unparse(f: Formula) -> str:
    if f[0] == "atom":
        return f"p{f[1]}"
    if f[0] == "not":
        return f"~{unparse(f[1])}"
    if f[0] == "I":
        return f"I{unparse(f[1])}"
    if f[0] == "X":
        return f"X{unparse(f[1])}"
    op = {"and": "&", "or": "|", "imp": "->"}[f[0]]
    return f"({unparse(f[1])} {op} {unparse(f[2])})"


def to_json(f: Formula) -> dict:
    if f[0] == "atom":
        return {"op": "atom", "index": f[1]}
    if f[0] in UNARY:
        return {"op": f[0], "arg": to_json(f[1])}
    name = "implies" if f[0] == "imp" else f[0]
    return {"op": name, "lhs": to_json(f[1]), "rhs": to_json(f[2])}


def from_json(doc: dict) -> Formula:
    op = doc["op"]
    if op == "atom":
        return atom(doc["index"])
    if op in UNARY:
        return (op, from_json(doc["arg"]))
    tag = "imp" if op == "implies" else op
    return (tag, from_json(doc["lhs"]), from_json(doc["rhs"]))


# -- models --------------------------------------------------------------


def _clean_valuation(valuation: Dict[int, Iterable], size: int) -> Dict[int, int]:
    out = {}
    for k, pts in valuation.items():
        out[k] = pts if isinstance(pts, int) else bits_of(pts, size)
        if out[k] >> size:
            raise ValueError(f"valuation of p{k} not a subset of the base")
    return out


class TopoModel:
    def __init__(self, topology: FiniteTopology, valuation: Dict[int, Iterable]):
        self.topology = topology
        self.valuation = _clean_valuation(valuation, topology.size)


class KripkeModel:
    def __init__(self, preorder: Preorder, valuation: Dict[int, Iterable]):
        self.preorder = preorder
        self.valuation = _clean_valuation(valuation, preorder.size)


class DynamicModel:
    def __init__(self, topology: FiniteTopology, f: Iterable[int], valuation):
        fmap = tuple(f)
        if len(fmap) != topology.size or any(
            not 0 <= v < topology.size for v in fmap
        ):
            raise ValueError("f must be a total map on the base")
        if not is_continuous(topology, fmap):
            raise NotContinuous("f is not continuous for the given topology")
        self.topology = topology
        self.f = fmap
        self.valuation = _clean_valuation(valuation, topology.size)


def is_continuous(t: FiniteTopology, f) -> bool:
    """Preimage of every open is open."""
    fmap = tuple(f)
    for o in t.opens:
        pre = 0
        for x in range(t.size):
            if o >> fmap[x] & 1:
                pre |= 1 << x
        if not t.is_open_bits(pre):
            return False
    return True


def _eval_bits(f: Formula, val: Dict[int, int], full: int, interior_fn, preimage_fn):
    if f[0] == "atom":
        return val.get(f[1], 0)
    if f[0] == "not":
        return full & ~_eval_bits(f[1], val, full, interior_fn, preimage_fn)
    if f[0] == "and":
        return _eval_bits(f[1], val, full, interior_fn, preimage_fn) & _eval_bits(
            f[2], val, full, interior_fn, preimage_fn
        )
    if f[0] == "or":
        return _eval_bits(f[1], val, full, interior_fn, preimage_fn) | _eval_bits(
            f[2], val, full, interior_fn, preimage_fn
        )
    if f[0] == "imp":
        return (full & ~_eval_bits(f[1], val, full, interior_fn, preimage_fn)) | _eval_bits(
            f[2], val, full, interior_fn, preimage_fn
        )
    if f[0] == "I":
        return interior_fn(_eval_bits(f[1], val, full, interior_fn, preimage_fn))
    if f[0] == "X":
        if preimage_fn is None:
            raise ValueError("NEXT is only meaningful in dynamic models")
        return preimage_fn(_eval_bits(f[1], val, full, interior_fn, preimage_fn))
    raise ValueError(f"bad formula node {f[0]!r}")


def eval_topo(m: TopoModel, f: Formula) -> frozenset:
    full = (1 << m.topology.size) - 1
    return set_of(_eval_bits(f, m.valuation, full, m.topology.interior_bits, None))


def eval_kripke(m: KripkeModel, f: Formula) -> frozenset:
    p = m.preorder
    full = (1 << p.size) - 1

    def interior_fn(sat):
        out = 0
        for x in range(p.size):
            if p.up[x] & ~sat == 0:
                out |= 1 << x
        return out

    return set_of(_eval_bits(f, m.valuation, full, interior_fn, None))


def eval_dynamic(m: DynamicModel, f: Formula) -> frozenset:
    t = m.topology
    full = (1 << t.size) - 1

    def preimage_fn(sat):
        out = 0
        for x in range(t.size):
            if sat >> m.f[x] & 1:
                out |= 1 << x
        return out

    return set_of(_eval_bits(f, m.valuation, full, t.interior_bits, preimage_fn))


# -- batched evaluation (one pass over many valuations) ------------------


def eval_kripke_batch(p: Preorder, vals: Dict[int, np.ndarray], f: Formula) -> np.ndarray:
    """vals maps atom -> bool array (V, size); returns bool array (V, size)."""
    reach = np.zeros((p.size, p.size), dtype=np.uint8)
    for x in range(p.size):
        for y in range(p.size):
            reach[x, y] = p.up[x] >> y & 1

    shape = next(iter(vals.values())).shape if vals else (1, p.size)

    def go(g):
        if g[0] == "atom":
            return vals.get(g[1], np.zeros(shape, dtype=bool))
        if g[0] == "not":
            return ~go(g[1])
        if g[0] == "and":
            return go(g[1]) & go(g[2])
        if g[0] == "or":
            return go(g[1]) | go(g[2])
        if g[0] == "imp":
            return ~go(g[1]) | go(g[2])
        if g[0] == "I":
            sat = go(g[1])
            fail = (~sat).astype(np.uint8) @ reach.T
            return fail == 0
        raise ValueError(f"bad node {g[0]!r} for Kripke evaluation")

    return go(f)


def eval_topo_batch(t: FiniteTopology, vals: Dict[int, np.ndarray], f: Formula) -> np.ndarray:
    opens = np.zeros((len(t.opens), t.size), dtype=np.uint8)
    for i, o in enumerate(t.opens):
        for x in range(t.size):
            opens[i, x] = o >> x & 1

    shape = next(iter(vals.values())).shape if vals else (1, t.size)

    def go(g):
        if g[0] == "atom":
            return vals.get(g[1], np.zeros(shape, dtype=bool))
        if g[0] == "not":
            return ~go(g[1])
        if g[0] == "and":
            return go(g[1]) & go(g[2])
        if g[0] == "or":
            return go(g[1]) | go(g[2])
        if g[0] == "imp":
            return ~go(g[1]) | go(g[2])
        if g[0] == "I":
            sat = go(g[1])
            viol = (~sat).astype(np.uint8) @ opens.T  # (V, k): points of each open outside sat
            return ((viol == 0).astype(np.uint8) @ opens) > 0
        raise ValueError(f"bad node {g[0]!r} for topological evaluation")

    return go(f)


# -- countermodel search --------------------------------------------------

TOPO_SEARCH_CAP = 4
KRIPKE_SEARCH_CAP = 5


def random_formula(rng: random.Random, atom_count: int, depth: int,
                   allow_next=False, max_nodes: int = 24) -> Formula:
    """Random formula with modal depth at most `depth`; max_nodes bounds the
    tree since Boolean connectives do not consume modal depth."""
    ops = ["atom", "not", "and", "or", "imp"]
    modal = ["I", "X"] if allow_next else ["I"]
    budget = [max_nodes]

    def gen(d):
        budget[0] -= 1
        if budget[0] <= 0:
            return atom(rng.randrange(atom_count))
        op = rng.choice(ops + (modal if d > 0 else []))
        if op == "atom":
            return atom(rng.randrange(atom_count))
        if op in ("I", "X"):
            return (op, gen(d - 1))
        if op == "not":
            return neg(gen(d))
        return (op, gen(d), gen(d))

    return gen(depth)


def _valuations(size: int, atoms: Tuple[int, ...], exhaustive: bool, rng, samples: int):
    space = 1 << size
    if exhaustive:
        import itertools

        for combo in itertools.product(range(space), repeat=len(atoms)):
            yield dict(zip(atoms, combo))
    else:
        for _ in range(samples):
            yield {a: rng.randrange(space) for a in atoms}


def find_countermodel(
    f: Formula,
    max_size: int,
    mode: str = "topo",
    seed: int = 0,
    samples: int = 200,
) -> Optional[dict]:
    """Search models of size <= max_size for a point refuting f.

    Returns {"model": ..., "point": p, "mode": mode} or None if no
    countermodel exists within the bound. Absence is not a validity proof.
    """
    cap = TOPO_SEARCH_CAP if mode == "topo" else KRIPKE_SEARCH_CAP
    if max_size > cap:
        raise SizeTooLarge(f"{mode} search capped at size {cap}")
    alphabet = tuple(sorted(atoms_of(f)))
    exhaustive = len(alphabet) <= 2
    rng = random.Random(seed)
    for size in range(1, max_size + 1):
        full = (1 << size) - 1
        frames = enumerate_topologies(size) if mode == "topo" else enumerate_preorders(size)
        for frame in frames:
            for val in _valuations(size, alphabet, exhaustive, rng, samples):
                if mode == "topo":
                    model = TopoModel(frame, val)
                    satset = _eval_bits(f, model.valuation, full, frame.interior_bits, None)
                else:
                    model = KripkeModel(frame, val)

                    def interior_fn(s, _p=frame):
                        out = 0
                        for x in range(_p.size):
                            if _p.up[x] & ~s == 0:
                                out |= 1 << x
                        return out

                    satset = _eval_bits(f, model.valuation, full, interior_fn, None)
                if satset != full:
                    point = (full & ~satset).bit_length() - 1
                    return {"model": model, "point": point, "mode": mode}
    return None
