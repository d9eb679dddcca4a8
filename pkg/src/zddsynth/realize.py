"""Bottom-up valuations over a graded tree and realizability classification."""
from __future__ import annotations

import enum
import time
from dataclasses import dataclass, field

from .formula import CnfSpec
from .planner import GradedProjectJoinTree, PjtNode
from .zdd import EMPTY, UNIT, Manager


class ExecutionTimeout(Exception):
    pass


class Deadline:
    """Cooperative wall-clock limit, polled between top-level diagram operations."""

    def __init__(self, seconds: float | None):
        self.at = None if seconds is None else time.monotonic() + seconds

    def check(self) -> None:
        if self.at is not None and time.monotonic() > self.at:
            raise ExecutionTimeout("execution deadline passed")


NO_DEADLINE = Deadline(None)


class Realizability(enum.Enum):
    FULLY = "FULLY_REALIZABLE"
    PARTIALLY = "PARTIALLY_REALIZABLE"
    NULLARY = "NULLARY_REALIZABLE"


class Status(enum.Enum):
    OK = "ok"
    NULLARY = "nullary"


@dataclass
class Valuations:
    pre: dict[int, int] = field(default_factory=dict)
    post: dict[int, int] = field(default_factory=dict)


@dataclass
class RealizabilityOutcome:
    kind: Realizability
    rset: int


class TreeExecutor:
    """Evaluates valuations of one graded tree on one manager."""

    def __init__(self, spec: CnfSpec, tree: GradedProjectJoinTree, manager: Manager,
                 deadline: Deadline = NO_DEADLINE):
        self.spec = spec
        self.tree = tree
        self.manager = manager
        self.deadline = deadline
        self._clauses = spec.all_clauses()
        self._leaf_cache: dict[int, int] = {}

    def leaf_family(self, clause_index: int) -> int:
        z = self._leaf_cache.get(clause_index)
        if z is None:
            z = self._leaf_cache[clause_index] = self.manager.clause(self._clauses[clause_index])
        return z

    def project_label(self, z: int, label) -> int:
        mgr = self.manager
        for p in sorted(label, key=mgr.level):
            self.deadline.check()
            z = mgr.project(z, p)
            if z == UNIT:
                break
        return z

    def compute_valuations(self, n: int, vals: Valuations,
                           tree: GradedProjectJoinTree | None = None,
                           leaf_override: dict[int, int] | None = None) -> Status:
        """Fill pre/post valuations for ``n`` and its subtree.

        Stops with ``Status.NULLARY`` as soon as some valuation is the
        empty clause.
        """
        tree = tree or self.tree
        mgr = self.manager
        override = leaf_override or {}
        for m in tree.postorder(n):
            node: PjtNode = tree.nodes[m]
            if m in override:
                z = override[m]
                vals.pre[m] = vals.post[m] = z
            elif node.kind == "leaf":
                z = self.leaf_family(node.clause)
                vals.pre[m] = vals.post[m] = z
            else:
                pre = EMPTY
                for c in node.children:
                    self.deadline.check()
                    pre = mgr.union_sf(pre, vals.post[c])
                vals.pre[m] = pre
                if pre == UNIT:
                    vals.post[m] = UNIT
                    return Status.NULLARY
                z = vals.post[m] = self.project_label(pre, node.label)
            if z == UNIT:
                return Status.NULLARY
        return Status.OK

    def get_rset(self, vals: Valuations):
        """Realizability set over the inputs, plus the contracted tree.

        Returns ``(rset, t_new, leaf_families)`` or ``Status.NULLARY``.  In
        ``t_new`` every output-tree root is a leaf carrying its post-valuation.
        """
        mgr = self.manager
        rset = EMPTY
        roots = self.tree.y_tree_roots()
        for n in roots:
            if self.compute_valuations(n, vals) is Status.NULLARY:
                return Status.NULLARY
            rset = mgr.union_sf(rset, vals.post[n])
        n_y = len(self.spec.clauses)
        for i in range(n_y, len(self._clauses)):
            rset = mgr.union_sf(rset, self.leaf_family(i))
        nodes = [PjtNode(nd.id, nd.kind, nd.clause, nd.label, nd.grade, list(nd.children))
                 for nd in self.tree.nodes]
        for n in roots:
            nodes[n] = PjtNode(n, "leaf")
        t_new = GradedProjectJoinTree(nodes, self.tree.root)
        return rset, t_new, {n: vals.post[n] for n in roots}

    def check_partial(self, vals: Valuations) -> RealizabilityOutcome:
        got = self.get_rset(vals)
        if got is Status.NULLARY:
            return RealizabilityOutcome(Realizability.NULLARY, UNIT)
        rset, t_new, carried = got
        if rset == EMPTY:
            return RealizabilityOutcome(Realizability.FULLY, EMPTY)
        if rset == UNIT:
            return RealizabilityOutcome(Realizability.NULLARY, UNIT)
        upper = Valuations()
        status = self.compute_valuations(t_new.root, upper, tree=t_new, leaf_override=carried)
        if status is Status.NULLARY or upper.post[t_new.root] == UNIT:
            return RealizabilityOutcome(Realizability.NULLARY, UNIT)
        return RealizabilityOutcome(Realizability.PARTIALLY, rset)


def classify_monolithic(manager: Manager, phi: int, inputs, outputs,
                        deadline: Deadline = NO_DEADLINE) -> RealizabilityOutcome:
    """Realizability by projecting every output out of the whole family."""
    rset = phi
    for y in sorted(outputs, key=manager.level):
        deadline.check()
        rset = manager.project(rset, y)
        if rset == UNIT:
            return RealizabilityOutcome(Realizability.NULLARY, UNIT)
    if rset == EMPTY:
        return RealizabilityOutcome(Realizability.FULLY, EMPTY)
    rest = rset
    for x in sorted(inputs, key=manager.level):
        deadline.check()
        rest = manager.project(rest, x)
        if rest == UNIT:
            return RealizabilityOutcome(Realizability.NULLARY, UNIT)
    return RealizabilityOutcome(Realizability.PARTIALLY, rset)
