"""Witness construction, monolithic and over graded trees."""
from __future__ import annotations

from dataclasses import dataclass

from .formula import CnfSpec, render_dimacs
from .realize import NO_DEADLINE, Deadline, TreeExecutor, Valuations
from .zdd import Manager


class MissingValuations(Exception):
    pass


@dataclass(frozen=True)
class Witness:
    cnf: int
    dnf: int


@dataclass
class WitnessSet:
    witnesses: dict[int, Witness]
    synth_order: list[int]

    def clause_lists(self, manager: Manager) -> dict[int, list[tuple[int, ...]]]:
        return {y: manager.clauses(w.cnf) for y, w in self.witnesses.items()}


def witness_single(manager: Manager, z: int, y: int) -> Witness:
    """Witness for ``y`` in ``z``: the clauses that contained ``-y``, minus ``-y``.

    If ``y`` never occurs negatively this is the empty family, i.e. ``y := true``.
    """
    _, neg, _ = manager.select(manager.minimal(z), y)
    return Witness(neg, manager.cross(neg, allow_falsity=True))


def _check_cnf(manager: Manager, z: int) -> None:
    if not manager.is_tautology_free(z):
        raise AssertionError("substitution produced a tautological clause")


def _solve_block(manager: Manager, z: int, ys: list[int], deadline: Deadline,
                 strict: bool) -> tuple[dict[int, Witness], list[int]]:
    """Witnesses for ``ys`` in ``z``; every other variable is treated as an input.

    ``ys`` are projected out in order, then solved in reverse order, each
    from the stage that still held it with the later witnesses substituted.
    """
    stages = [z]
    for y in ys[:-1]:
        deadline.check()
        stages.append(manager.project(stages[-1], y))
    fixed: dict[int, Witness] = {}
    order: list[int] = []
    for i in reversed(range(len(ys))):
        zi = stages[i]
        for y2 in ys[i + 1:]:
            deadline.check()
            w = fixed[y2]
            zi = manager.substitute(zi, y2, w.cnf, w.dnf)
            if strict:
                _check_cnf(manager, zi)
        fixed[ys[i]] = witness_single(manager, zi, ys[i])
        order.append(ys[i])
    return fixed, order


def synth_monolithic(manager: Manager, z: int, y_order: list[int],
                     deadline: Deadline = NO_DEADLINE, strict: bool = False) -> WitnessSet:
    """Witnesses for every output from the single family ``z``."""
    fixed, order = _solve_block(manager, z, list(y_order), deadline, strict)
    return WitnessSet(fixed, order)


def dp_synth(executor: TreeExecutor, vals: Valuations,
             deadline: Deadline | None = None, strict: bool = False) -> WitnessSet:
    """Witnesses solved node by node over the output trees, ancestors first.

    Each node's label is solved from its pre-valuation with ancestor-labelled
    outputs left free; their witnesses, already input-only, are then
    substituted in.
    """
    deadline = deadline or executor.deadline
    tree, mgr = executor.tree, executor.manager
    visit: list[int] = []
    for r in tree.y_tree_roots():
        visit.extend(m for m in tree.preorder(r) if not tree.is_leaf(m))
    final: dict[int, Witness] = {}
    order: list[int] = []
    for n in visit:
        if n not in vals.pre:
            raise MissingValuations(f"no pre-valuation for node {n}")
        ys = sorted(tree.nodes[n].label, key=mgr.level)
        if not ys:
            continue
        raw, raw_order = _solve_block(mgr, vals.pre[n], ys, deadline, strict)
        above = []
        a = tree.parent[n]
        while a >= 0 and tree.nodes[a].grade == "Y":
            above.extend(tree.nodes[a].label)
            a = tree.parent[a]
        for y in raw_order:
            g = raw[y].cnf
            support = mgr.support(g)
            for y2 in sorted((v for v in above if v in support), key=mgr.level):
                deadline.check()
                w = final[y2]
                g = mgr.substitute(g, y2, w.cnf, w.dnf)
                if strict:
                    _check_cnf(mgr, g)
            final[y] = Witness(g, mgr.cross(g, allow_falsity=True)) if g != raw[y].cnf else raw[y]
            order.append(y)
    return WitnessSet(final, order)


def complete_witnesses(ws: WitnessSet, outputs, manager: Manager) -> WitnessSet:
    """Give every output without a witness the constant ``true``."""
    for y in sorted(outputs):
        if y not in ws.witnesses:
            ws.witnesses[y] = witness_single(manager, 0, y)
            ws.synth_order.append(y)
    return ws


def apply_witnesses(manager: Manager, z: int, ws: WitnessSet) -> int:
    """``z`` with every output replaced by its witness."""
    for y, w in ws.witnesses.items():
        z = manager.substitute(z, y, w.cnf, w.dnf)
    return z


def emit_witnesses(ws: WitnessSet, spec: CnfSpec, manager: Manager) -> dict:
    """JSON-ready witness document; clauses are lists of DIMACS literals."""
    return {
        "instance": spec.name,
        "inputs": sorted(spec.inputs),
        "outputs": sorted(spec.outputs),
        "synth_order": list(ws.synth_order),
        "witnesses": {
            str(y): {"cnf": [list(c) for c in manager.clauses(w.cnf)],
                     "dnf": [list(c) for c in manager.clauses(w.dnf)]}
            for y, w in sorted(ws.witnesses.items())
        },
    }


def parse_witnesses(doc: dict) -> dict[int, list[tuple[int, ...]]]:
    """Per-output CNF clause lists from a witness document."""
    return {int(y): [tuple(c) for c in entry["cnf"]] for y, entry in doc["witnesses"].items()}


def witness_dimacs(doc: dict, y: int, num_props: int) -> str:
    clauses = doc["witnesses"][str(y)]["cnf"]
    return render_dimacs(clauses, num_props,
                         comment=f"witness for output {y} of {doc.get('instance') or 'instance'}")
