import itertools

import pytest
from hypothesis import given, settings, strategies as st

from conftest import clauses_st
from zddsynth.oracle import clause_models, cube_models
from zddsynth.zdd import (EMPTY, UNIT, FalsityHasNoDnf, Manager, TautologicalClause,
                          CapExceeded)

PROPS = list(range(1, 9))


def fam(m, *clauses):
    return m.family(clauses)


def test_terminals():
    m = Manager(PROPS)
    empty, unit = m.terminal_families()
    assert m.clauses(empty) == [] and m.clauses(unit) == [()]
    assert clause_models([], [1, 2]) == clause_models(m.clauses(empty), [1, 2])
    assert clause_models(m.clauses(unit), [1, 2]) == frozenset()
    assert m.stats(EMPTY) == (0, 1)
    assert m.stats(UNIT) == (1, 1)


def test_clause_construction():
    m = Manager(PROPS)
    assert m.clause([]) == UNIT
    assert m.clauses(m.clause([1, -5, 4])) == [(1, 4, -5)]
    assert m.clause([1, 2]) == m.clause([2, 1])
    with pytest.raises(TautologicalClause):
        m.clause([1, -1])
    assert Manager(PROPS, strict=False).clause([1, -1]) == EMPTY


def test_union_sf_examples():
    m = Manager(PROPS)
    a = fam(m, (1,), (1, 2))
    assert m.clauses(m.union_sf(a, fam(m, (2, 3)))) == [(1,), (2, 3)]
    assert m.union_sf(a, UNIT) == UNIT
    assert m.union_sf(EMPTY, a) == m.minimal(a)
    both = m.union_sf(fam(m, (1, 4, -5)), fam(m, (1, -3, -4)))
    assert m.count(both) == 2


def test_distribute_examples():
    m = Manager(PROPS)
    assert m.clauses(m.distribute(fam(m, (1,)), fam(m, (2,), (3,)))) == [(1, 2), (1, 3)]
    assert m.distribute(fam(m, (1,)), fam(m, (-1,))) == EMPTY
    assert m.clauses(m.distribute(fam(m, (1, -5)), fam(m, (1, -3)))) == [(1, -3, -5)]


def test_select_examples():
    m = Manager(PROPS)
    z = fam(m, (1, 4, -5), (1, -3, -4))
    pos, neg, absent = m.select(z, 4)
    assert m.clauses(pos) == [(1, -5)]
    assert m.clauses(neg) == [(1, -3)]
    assert absent == EMPTY
    assert m.select(EMPTY, 4) == (EMPTY, EMPTY, EMPTY)
    assert m.select(UNIT, 4) == (EMPTY, EMPTY, UNIT)


def test_project_examples():
    m = Manager(PROPS)
    assert m.clauses(m.project(fam(m, (1, 3), (-3, 2)), 3)) == [(1, 2)]
    assert m.project(fam(m, (3,), (-3,)), 3) == UNIT
    assert m.project(fam(m, (1, 3), (-1, -3)), 3) == EMPTY
    z = fam(m, (5,), (-5, 6))
    assert m.project_all(z, []) == z
    assert m.project_all(z, [5, 6]) == EMPTY
    assert m.project_all(fam(m, (5,), (-5,)), [5, 6]) == UNIT


def test_cross_examples():
    m = Manager(PROPS)
    assert m.clauses(m.cross(fam(m, (1,), (2,)))) == [(1, 2)]
    assert m.clauses(m.cross(fam(m, (1, 2)))) == [(1,), (2,)]
    assert m.clauses(m.cross(fam(m, (3, 1), (-3,)))) == [(1, -3)]
    assert m.cross(EMPTY) == UNIT
    with pytest.raises(FalsityHasNoDnf):
        m.cross(UNIT)
    assert m.cross(UNIT, allow_falsity=True) == EMPTY


def test_complement_examples():
    m = Manager(PROPS)
    assert m.clauses(m.complement(fam(m, (3, 4)))) == [(-3, -4)]
    assert m.complement(EMPTY) == EMPTY
    assert m.clauses(m.complement(fam(m, (1,), (-2,)))) == [(-1,), (2,)]


def test_substitute_examples():
    m = Manager([1, 2, 3, 4, 5])
    # a=1 b=2 c=3 d=4 w=5
    z = fam(m, (1, 5), (2, -5))
    g_cnf = fam(m, (3,), (4,))
    r = m.substitute(z, 5, g_cnf, m.cross(g_cnf))
    assert sorted(m.clauses(r)) == sorted([(1, 3), (1, 4), (2, -3, -4)])
    z2 = fam(m, (1, 2))
    assert m.substitute(z2, 5, g_cnf, m.cross(g_cnf)) == z2
    assert m.substitute(fam(m, (5,)), 5, EMPTY, m.cross(EMPTY)) == EMPTY
    with pytest.raises(ValueError):
        m.substitute(z, 5, fam(m, (5,)), fam(m, (5,)))


def test_enumeration_and_cap():
    m = Manager(PROPS)
    assert m.clauses(m.clause([1, 4, -5])) == [(1, 4, -5)]
    z = m.family([(p,) for p in PROPS])
    with pytest.raises(CapExceeded):
        m.clauses(z, cap=3)
    assert m.count(z) == 8


def test_stats_two_singletons():
    m = Manager(PROPS)
    assert m.stats(fam(m, (1,), (2,))) == (2, 4)


def test_duplicate_order_rejected():
    with pytest.raises(ValueError):
        Manager([1, 1])


# -- properties ----------------------------------------------------------

@settings(max_examples=150, deadline=None)
@given(clauses_st(6), st.randoms(use_true_random=False))
def test_canonical_under_permutation(clauses, rnd):
    m = Manager(list(range(1, 7)))
    shuffled = list(clauses)
    rnd.shuffle(shuffled)
    shuffled = [tuple(rnd.sample(c, len(c))) for c in shuffled]
    assert m.family(clauses) == m.family(shuffled)


@settings(max_examples=150, deadline=None)
@given(clauses_st(6), clauses_st(6))
def test_union_sf_is_conjunction(a, b):
    m = Manager(list(range(1, 7)))
    props = list(range(1, 7))
    za, zb = m.family(a), m.family(b)
    r = m.union_sf(za, zb)
    assert clause_models(m.clauses(r), props) == clause_models(a + b, props)
    cs = [set(c) for c in m.clauses(r)]
    assert not any(c1 < c2 for c1 in cs for c2 in cs)
    assert r == m.union_sf(zb, za) and m.union_sf(r, r) == r


@settings(max_examples=150, deadline=None)
@given(clauses_st(6, max_clauses=5), clauses_st(6, max_clauses=5))
def test_distribute_is_disjunction(a, b):
    m = Manager(list(range(1, 7)))
    props = list(range(1, 7))
    r = m.distribute(m.family(a), m.family(b))
    models = clause_models(a, props) | clause_models(b, props)
    assert clause_models(m.clauses(r), props) == models
    assert m.is_tautology_free(r) and m.minimal(r) == r


@settings(max_examples=150, deadline=None)
@given(clauses_st(6), st.integers(1, 6))
def test_select_partitions(clauses, p):
    m = Manager(list(range(1, 7)))
    z = m.family(clauses)
    pos, neg, absent = m.select(z, p)
    lifted = ({tuple(sorted(c + (p,), key=abs)) for c in m.clauses(pos)}
              | {tuple(sorted(c + (-p,), key=abs)) for c in m.clauses(neg)}
              | set(m.clauses(absent)))
    assert lifted == {tuple(sorted(c, key=abs)) for c in m.clauses(z)}


@settings(max_examples=150, deadline=None)
@given(clauses_st(6))
def test_zero_suppressed_and_pairs_adjacent(clauses):
    m = Manager(list(range(1, 7)))
    assert m.zero_suppressed(m.family(clauses))


@settings(max_examples=100, deadline=None)
@given(st.lists(st.lists(st.integers(1, 5), min_size=1, max_size=3, unique=True).map(tuple),
                min_size=1, max_size=6))
def test_cross_involution_on_positive_families(clauses):
    m = Manager(list(range(1, 6)))
    z = m.family(clauses)
    assert m.cross(m.cross(z)) == m.minimal(z)


def _brute_exists(clauses, props, p):
    models = clause_models(clauses, props)
    return frozenset(a - {p} for a in models)


@settings(max_examples=150, deadline=None)
@given(clauses_st(6), st.integers(1, 6))
def test_projection_matches_truth_table(clauses, p):
    m = Manager(list(range(1, 7)))
    props = list(range(1, 7))
    r = m.project(m.family(clauses), p)
    assert p not in m.support(r)
    assert clause_models(m.clauses(r), props) == (
        _brute_exists(clauses, props, p) | {a | {p} for a in _brute_exists(clauses, props, p)})


def test_cross_all_width_two_pairs():
    # every family of two 2-literal clauses over three propositions
    m = Manager([1, 2, 3])
    lits = [1, -1, 2, -2, 3, -3]
    cls = [c for c in itertools.combinations(lits, 2) if c[0] != -c[1]]
    for a, b in itertools.product(cls, repeat=2):
        z = m.family([a, b])
        assert cube_models(m.clauses(m.cross(z)), [1, 2, 3]) == clause_models([a, b], [1, 2, 3])


@settings(max_examples=150, deadline=None)
@given(clauses_st(6))
def test_cross_dnf_matches_cnf(clauses):
    m = Manager(list(range(1, 7)))
    z = m.family(clauses)
    props = list(range(1, 7))
    d = m.cross(z, allow_falsity=True)
    assert cube_models(m.clauses(d), props) == clause_models(clauses, props)


@settings(max_examples=150, deadline=None)
@given(clauses_st(6), clauses_st(5, max_clauses=4, max_width=3), st.integers(1, 6))
def test_substitution_matches_truth_table(z_clauses, g_clauses, y):
    others = [p for p in range(1, 7) if p != y]
    g_clauses = [tuple(others[abs(l) - 1] * (1 if l > 0 else -1) for l in c) for c in g_clauses]
    m = Manager(list(range(1, 7)))
    g = m.family(g_clauses)
    r = m.substitute(m.family(z_clauses), y, g, m.cross(g, allow_falsity=True))
    assert y not in m.support(r) and m.is_tautology_free(r)
    g_models = clause_models(g_clauses, others)
    z_models = clause_models(z_clauses, list(range(1, 7)))
    expected = frozenset(a for a in clause_models([], others)
                         if (a | {y} if a in g_models else a) in z_models)
    assert clause_models(m.clauses(r), others) == expected
