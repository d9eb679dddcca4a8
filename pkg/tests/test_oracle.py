import pytest
from hypothesis import given, settings, strategies as st

from zddsynth.formula import CnfSpec, preprocess
from zddsynth.oracle import (TooLarge, classify_bruteforce, clause_models, cube_models,
                             gen_family, gen_random, verify_witnesses)
from zddsynth.realize import Realizability

X, Y = 1, 2


def test_micro_fully():
    v = classify_bruteforce(CnfSpec(2, {X}, {Y}, [(X, Y), (-X, -Y)]))
    assert v.kind is Realizability.FULLY
    assert v.rset_assignments == {frozenset(), frozenset({X})}


def test_micro_partial():
    v = classify_bruteforce(CnfSpec(2, {X}, {Y}, [(X,), (Y,)]))
    assert v.kind is Realizability.PARTIALLY and v.rset_assignments == {frozenset({X})}


def test_micro_nullary():
    v = classify_bruteforce(CnfSpec(1, set(), {1}, [(1,), (-1,)]))
    assert v.kind is Realizability.NULLARY and v.rset_assignments == frozenset()


def test_no_inputs_satisfiable_is_fully():
    assert classify_bruteforce(CnfSpec(1, set(), {1}, [(1,)])).kind is Realizability.FULLY


def test_verify_examples():
    assert verify_witnesses(CnfSpec(2, {X}, {Y}, [(X, Y)]), {Y: []}) is None
    assert verify_witnesses(CnfSpec(2, {X}, {Y}, [(-Y, X)]), {Y: []}) == frozenset()
    assert verify_witnesses(CnfSpec(2, {X}, {Y}, [(-Y, X)]), {Y: [(X,)]}) is None
    with pytest.raises(ValueError):
        verify_witnesses(CnfSpec(2, {X}, {Y}, [(X, Y)]), {Y: [(Y,)]})


def test_model_helpers():
    assert clause_models([(1, 2)], [1, 2]) == {frozenset({1}), frozenset({2}), frozenset({1, 2})}
    assert cube_models([(1, -2)], [1, 2]) == {frozenset({1})}
    assert cube_models([()], [1]) == {frozenset(), frozenset({1})}
    assert cube_models([], [1]) == frozenset()


def test_guard():
    big = CnfSpec(21, set(range(1, 11)), set(range(11, 22)), [])
    with pytest.raises(TooLarge):
        classify_bruteforce(big)


def test_gen_random_deterministic_and_shaped():
    a = gen_random(3, 3, 12, 3, seed=7)
    assert a == gen_random(3, 3, 12, 3, seed=7)
    assert all(any(abs(l) in a.outputs for l in c) for c in a.clauses)
    assert all(1 <= len(c) <= 3 for c in a.clauses)
    empty = gen_random(2, 2, 0, 3, seed=1)
    assert empty.clauses == [] and classify_bruteforce(empty).kind is Realizability.FULLY


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 4), st.integers(1, 4), st.integers(1, 20), st.integers(0, 10**6))
def test_gen_random_pure_flag(nx, ny, nc, seed):
    spec = gen_random(nx, ny, nc, 4, seed, allow_pure_x=True)
    assert any(all(abs(l) in spec.inputs for l in c) for c in spec.clauses)


def test_chain_family():
    c = gen_family("chain", 1)
    assert len(c.clauses) == 2
    assert classify_bruteforce(c).kind is Realizability.FULLY
    assert len(gen_family("chain", 50).clauses) == 100


def test_mutex_like_realizable():
    assert classify_bruteforce(gen_family("mutex-like", 3)).kind is Realizability.FULLY


def test_qshifter_like_realizable():
    assert classify_bruteforce(gen_family("qshifter-like", 4)).kind is Realizability.FULLY


@pytest.mark.parametrize("name", ["chain", "mutex-like", "qshifter-like"])
def test_families_deterministic_and_preprocess_stable(name):
    a = gen_family(name, 5)
    assert a == gen_family(name, 5)
    pre = preprocess(a)
    assert sorted(pre.all_clauses()) == sorted(a.clauses)


def test_bad_family():
    with pytest.raises(ValueError):
        gen_family("nope", 3)
    with pytest.raises(ValueError):
        gen_family("chain", 0)
