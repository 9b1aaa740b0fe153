import random

import pytest

from topocyl import setalg as S
from topocyl import topology as T
from topocyl.errors import IndexOutOfRange, NoChangSystem, NoTopology, NotSubsetOfUnit


def space(n, u, preset=None):
    topo = T.make_topology(u, preset=preset) if preset else None
    return S.SetAlgebraSpace(n, u, topo)


def brute_cyl(sp, i, x):
    """Oracle straight from the defining formula."""
    out = set()
    members = set(x.members())
    for s in sp.tuples():
        for t in members:
            if all(s[j] == t[j] for j in range(sp.dim) if j != i):
                out.add(s)
                break
    return sp.element(out)


def test_encoding_is_little_endian():
    sp = space(3, 3)
    assert sp.encode((1, 2, 0)) == 1 + 2 * 3
    assert sp.decode(7) == (1, 2, 0)
    for s in sp.tuples():
        assert sp.decode(sp.encode(s)) == s


def test_cyl_examples():
    sp = space(2, 2)
    x = sp.element([(0, 0)])
    assert sorted(S.cyl(0, x).members()) == [(0, 0), (1, 0)]
    assert S.cyl(0, S.cyl(0, x)) == S.cyl(0, x)
    assert S.cyl(1, sp.empty()) == sp.empty()
    with pytest.raises(IndexOutOfRange):
        S.cyl(2, x)
    rng = random.Random(0)
    for n, u in ((2, 2), (2, 3), (3, 2)):
        sp = space(n, u)
        for _ in range(8):
            x = sp.from_bits(rng.getrandbits(sp.ncodes))
            for i in range(n):
                assert S.cyl(i, x) == brute_cyl(sp, i, x)


def test_diag_examples():
    sp = space(2, 2)
    assert sorted(S.diag(0, 1, sp).members()) == [(0, 0), (1, 1)]
    assert S.diag(0, 0, sp) == sp.unit()
    sp3 = space(3, 2)
    got = sorted(S.diag(0, 2, sp3).members())
    assert got == [(0, 0, 0), (0, 1, 0), (1, 0, 1), (1, 1, 1)]


def test_interior_examples():
    ind = space(2, 2, "indiscrete")
    assert S.interior_op(0, ind.element([(0, 0)])) == ind.empty()
    both = ind.element([(0, 0), (1, 0)])
    assert S.interior_op(0, both) == both
    dis = space(2, 2, "discrete")
    for b in range(16):
        assert S.interior_op(0, dis.from_bits(b)).bits == b
    with pytest.raises(NoTopology):
        S.interior_op(0, space(2, 2).unit())


def test_closure_dual_is_cyl_on_indiscrete():
    ind = space(2, 2, "indiscrete")
    for b in range(16):
        x = ind.from_bits(b)
        assert S.interior_op(0, x, dual=True) == S.cyl(0, x)
        assert S.interior_op(1, x, dual=True) == S.cyl(1, x)


def test_interior_below_identity():
    rng = random.Random(1)
    for u in (2, 3):
        for topo in T.enumerate_topologies(u):
            sp = S.SetAlgebraSpace(2, u, topo)
            for _ in range(12):
                x = sp.from_bits(rng.getrandbits(sp.ncodes))
                for k in range(2):
                    assert S.interior_op(k, x).issubset(x)


def test_box_examples():
    ind2 = T.make_topology(2, preset="indiscrete")
    sp = S.SetAlgebraSpace(2, 2, ind2, S.chang_from_topology(ind2))
    assert S.box_op(0, sp.element([(0, 0)])) == sp.empty()
    with pytest.raises(NoChangSystem):
        S.box_op(0, space(2, 2, "indiscrete").unit())
    # a one-off Chang system: only the full base counts as a neighbourhood
    ch = S.ChangSystem(2, [[[0, 1]], [[0, 1]]])
    spc = S.SetAlgebraSpace(2, 2, None, ch)
    for b in range(16):
        x = spc.from_bits(b)
        got = S.box_op(0, x)
        expect = {s for s in spc.tuples()
                  if all((a,) + s[1:] in set(x.members()) for a in (0, 1))}
        assert set(got.members()) == expect


def test_box_equals_interior_for_topological_chang_systems():
    for u in (2, 3):
        for topo in T.enumerate_topologies(u):
            ch = S.chang_from_topology(topo)
            sp = S.SetAlgebraSpace(2, u, topo, ch)
            rng = random.Random(u)
            sample = range(sp.full_bits + 1) if sp.ncodes <= 4 else \
                [rng.getrandbits(sp.ncodes) for _ in range(64)]
            for b in sample:
                x = sp.from_bits(b)
                for k in range(2):
                    assert S.box_op(k, x) == S.interior_op(k, x)


def test_subst_examples():
    sp = space(2, 2)
    x = sp.element([(0, 1)])
    assert S.subst(S.replacement(0, 1, 2), x) == sp.empty()
    x = sp.element([(1, 1)])
    got = S.subst(S.replacement(0, 1, 2), x)
    assert sorted(got.members()) == [(0, 1), (1, 1)]
    assert got == S.cyl(0, S.diag(0, 1, sp) & x)
    for b in range(16):
        assert S.subst((0, 1), sp.from_bits(b)).bits == b


def test_subst_agrees_with_term_form():
    rng = random.Random(7)
    for n, u in ((2, 2), (2, 3), (3, 2), (3, 3)):
        sp = space(n, u)
        exhaustive = sp.ncodes <= 4
        bits = range(sp.full_bits + 1) if exhaustive else \
            [rng.getrandbits(sp.ncodes) for _ in range(50)]
        for b in bits:
            x = sp.from_bits(b)
            for i in range(n):
                for j in range(n):
                    if i == j:
                        continue
                    assert S.subst(S.replacement(i, j, n), x) == \
                        S.cyl(i, S.diag(i, j, sp) & x)


def test_neat_lift():
    ind = space(2, 2, "indiscrete")
    lifted_unit = S.neat_lift(ind.unit(), 2)
    assert lifted_unit.bits == lifted_unit.space.full_bits
    rng = random.Random(9)
    for _ in range(20):
        x = ind.from_bits(rng.getrandbits(4))
        for k in range(2):
            assert S.neat_lift(S.interior_op(k, x), 1) == \
                S.interior_op(k, S.neat_lift(x, 1))
            assert S.neat_lift(S.cyl(k, x), 1) == S.cyl(k, S.neat_lift(x, 1))
            assert S.neat_lift(S.diag(0, 1, ind) & x, 1) == \
                (S.diag(0, 1, S.neat_lift(x, 1).space) & S.neat_lift(x, 1))


def test_dimension_set():
    sp = space(2, 2)
    assert S.dimension_set(sp.unit()) == frozenset()
    assert S.dimension_set(S.diag(0, 1, sp)) == {0, 1}
    assert S.dimension_set(sp.element([(0, 0), (1, 0)])) == {1}


def test_nonadditivity_witness():
    ind = space(2, 2, "indiscrete")
    a = ind.element([(0, 0)])
    b = ind.element([(1, 0)])
    assert (S.interior_op(0, a) | S.interior_op(0, b)) == ind.empty()
    assert S.interior_op(0, a | b) == (a | b)


def test_non_term_definability_witness():
    dis = space(2, 2, "discrete")
    ind = space(2, 2, "indiscrete")
    x = [(0, 0)]
    assert S.interior_op(0, dis.element(x)).bits != S.interior_op(0, ind.element(x)).bits
    for b in range(16):
        for i in range(2):
            assert S.cyl(i, dis.from_bits(b)).bits == S.cyl(i, ind.from_bits(b)).bits
        for j in range(2):
            assert S.diag(0, j, dis).bits == S.diag(0, j, ind).bits


def test_generalized_space():
    ind1 = T.make_topology(1, preset="indiscrete")
    ind2 = T.make_topology(2, preset="indiscrete")
    g = S.GeneralizedSpace([S.SetAlgebraSpace(2, 1, ind1), S.SetAlgebraSpace(2, 2, ind2)])
    assert S.decompose_generalized(g, g.unit())[0].bits == 1
    single = S.GeneralizedSpace([S.SetAlgebraSpace(2, 2, ind2)])
    x = single.from_union_members([(0, 1)])
    assert S.decompose_generalized(single, x)[0] == single.summands[0].element([(0, 1)])
    with pytest.raises(NotSubsetOfUnit):
        g.from_union_members([(0, 1)])  # mixes the two summand bases


def test_tuple_set_json():
    sp = space(2, 2, "indiscrete")
    x = sp.element([(0, 1), (1, 1)])
    doc = x.to_json()
    assert doc["dim"] == 2 and doc["base"] == 2
    assert doc["members"] == [2, 3]
    assert doc["topology"]["opens"] == [[], [0, 1]]
    assert S.TupleSet.from_json(doc) == x
