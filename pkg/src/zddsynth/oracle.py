"""Exhaustive ground truth and instance generators.

Nothing here touches decision diagrams; the brute-force checks work on
explicit assignments so they can judge the symbolic code independently.
"""
from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass

from .formula import CnfSpec, normalize_clause
from .realize import Realizability

ENUM_LIMIT = 20


class TooLarge(Exception):
    pass


@dataclass(frozen=True)
class OracleVerdict:
    kind: Realizability
    rset_assignments: frozenset[frozenset[int]]  # each assignment: the inputs set to true


def _masks(clauses, index: dict[int, int]):
    out = []
    for c in clauses:
        pos = neg = 0
        for lit in c:
            bit = 1 << index[abs(lit)]
            if lit > 0:
                pos |= bit
            else:
                neg |= bit
        out.append((pos, neg))
    return out


def _sat(masks, a: int) -> bool:
    return all((a & pos) or (~a & neg) for pos, neg in masks)


def assignments(props) -> list[frozenset[int]]:
    """Every assignment over ``props``, as the set of true propositions."""
    props = sorted(props)
    return [frozenset(p for p, b in zip(props, bits) if b)
            for bits in itertools.product((0, 1), repeat=len(props))]


def clause_models(clauses, props) -> frozenset[frozenset[int]]:
    """Assignments over ``props`` satisfying every clause."""
    props = sorted(props)
    if len(props) > ENUM_LIMIT:
        raise TooLarge(f"{len(props)} propositions exceed the enumeration limit")
    index = {p: i for i, p in enumerate(props)}
    masks = _masks(clauses, index)
    return frozenset(frozenset(p for p in props if a >> index[p] & 1)
                     for a in range(1 << len(props)) if _sat(masks, a))


def cube_models(cubes, props) -> frozenset[frozenset[int]]:
    """Assignments over ``props`` satisfying at least one cube."""
    props = sorted(props)
    index = {p: i for i, p in enumerate(props)}
    masks = _masks(cubes, index)
    hits = set()
    for a in range(1 << len(props)):
        # cube holds iff all positive bits set and all negative bits clear
        if any((a & pos) == pos and not (a & neg) for pos, neg in masks):
            hits.add(frozenset(p for p in props if a >> index[p] & 1))
    return frozenset(hits)


def classify_bruteforce(spec: CnfSpec) -> OracleVerdict:
    xs, ys = sorted(spec.inputs), sorted(spec.outputs)
    if len(xs) + len(ys) > ENUM_LIMIT:
        raise TooLarge(f"{len(xs) + len(ys)} propositions exceed the enumeration limit")
    index = {p: i for i, p in enumerate(xs + ys)}
    masks = _masks(spec.all_clauses(), index)
    nx = len(xs)
    rset = set()
    for xa in range(1 << nx):
        if any(_sat(masks, xa | (ya << nx)) for ya in range(1 << len(ys))):
            rset.add(frozenset(x for i, x in enumerate(xs) if xa >> i & 1))
    if len(rset) == 1 << nx:
        kind = Realizability.FULLY
    elif rset:
        kind = Realizability.PARTIALLY
    else:
        kind = Realizability.NULLARY
    return OracleVerdict(kind, frozenset(rset))


def _eval_cnf(clauses, true_props) -> bool:
    return all(any((lit > 0) == (abs(lit) in true_props) for lit in c) for c in clauses)


def verify_witnesses(spec: CnfSpec, witnesses: dict[int, list]) -> frozenset[int] | None:
    """``None`` if the witnesses satisfy the spec on its whole realizability set.

    Otherwise returns the first failing input assignment (inputs set to
    true).  Outputs without a witness count as constant true.
    """
    if len(spec.inputs) > ENUM_LIMIT:
        raise TooLarge("too many inputs to enumerate")
    for y, cnf in witnesses.items():
        bad = {abs(lit) for c in cnf for lit in c} - spec.inputs
        if bad:
            raise ValueError(f"witness for {y} mentions non-inputs {sorted(bad)}")
    verdict = classify_bruteforce(spec)
    clauses = spec.all_clauses()
    for x in sorted(verdict.rset_assignments, key=sorted):
        ys = {y for y in spec.outputs if _eval_cnf(witnesses.get(y, ()), x)}
        if not _eval_cnf(clauses, x | ys):
            return x
    return None


# -- generators ----------------------------------------------------------

def gen_random(num_x: int, num_y: int, num_clauses: int, max_width: int, seed: int,
               allow_pure_x: bool = False) -> CnfSpec:
    """Seeded random CNF; inputs are ``1..num_x``, outputs follow.

    Every clause gets an output literal (resampled until it does) unless
    ``allow_pure_x`` is set, in which case some clauses are input-only and
    at least one is whenever there are inputs and clauses.
    """
    if min(num_x, num_y, num_clauses, max_width) < 0 or max_width == 0:
        raise ValueError("sizes must be non-negative and max_width positive")
    rng = random.Random(seed)
    xs = list(range(1, num_x + 1))
    ys = list(range(num_x + 1, num_x + num_y + 1))
    props = xs + ys
    clauses = []
    want_pure = allow_pure_x and num_x > 0
    for i in range(num_clauses):
        pure = want_pure and (i == 0 or rng.random() < 0.2)
        pool = xs if pure else props
        while True:
            k = rng.randint(1, min(max_width, len(pool)))
            vs = rng.sample(pool, k)
            if pure or not ys or any(v in ys for v in vs):
                break
        clauses.append(normalize_clause(v if rng.random() < 0.5 else -v for v in vs))
    if want_pure and clauses:
        rng.shuffle(clauses)
    return CnfSpec(num_x + num_y, frozenset(xs), frozenset(ys), clauses,
                   name=f"random-{num_x}-{num_y}-{num_clauses}-{max_width}-{seed}")


def _chain(n: int) -> CnfSpec:
    xs = list(range(1, n + 1))
    y = [None] + list(range(n + 1, 2 * n + 2))  # y[1..n+1]
    clauses = []
    for i in range(1, n + 1):
        clauses.append(normalize_clause((xs[i - 1], y[i], -y[i + 1])))
        clauses.append(normalize_clause((-y[i], y[i + 1])))
    return CnfSpec(2 * n + 1, frozenset(xs), frozenset(y[1:]), clauses, name=f"chain-{n}")


def _mutex_like(n: int) -> CnfSpec:
    # block i: input x_i asks for one of three mutually exclusive outputs;
    # neighbouring blocks may not both pick their first output
    xs = list(range(1, n + 1))
    ys = [[n + 3 * i + j + 1 for j in range(3)] for i in range(n)]
    clauses = []
    for i in range(n):
        a, b, c = ys[i]
        clauses.append(normalize_clause((-xs[i], a, b, c)))
        clauses += [normalize_clause((-u, -v)) for u, v in ((a, b), (a, c), (b, c))]
        if i + 1 < n:
            clauses.append(normalize_clause((-a, -ys[i + 1][0])))
    return CnfSpec(4 * n, frozenset(xs), frozenset(v for blk in ys for v in blk), clauses,
                   name=f"mutex-like-{n}")


def _qshifter_like(n: int) -> CnfSpec:
    # outputs o_j must equal d_{(j + s) mod n} for the shift s given in binary
    k = max(1, math.ceil(math.log2(n))) if n > 1 else 1
    sel = list(range(1, k + 1))
    data = list(range(k + 1, k + n + 1))
    outs = list(range(k + n + 1, k + 2 * n + 1))
    clauses = []
    for s in range(1 << k):
        guard = [-b if s >> i & 1 else b for i, b in enumerate(sel)]
        for j in range(n):
            d = data[(j + s) % n]
            clauses.append(normalize_clause(guard + [-outs[j], d]))
            clauses.append(normalize_clause(guard + [outs[j], -d]))
    return CnfSpec(k + 2 * n, frozenset(sel + data), frozenset(outs), sorted(set(clauses)),
                   name=f"qshifter-like-{n}")


FAMILIES = {"chain": _chain, "mutex-like": _mutex_like, "qshifter-like": _qshifter_like}


def gen_family(name: str, n: int) -> CnfSpec:
    if n < 1:
        raise ValueError("family size must be at least 1")
    try:
        return FAMILIES[name](n)
    except KeyError:
        raise ValueError(f"unknown family {name!r}") from None
