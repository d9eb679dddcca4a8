"""Graded project-join trees from tree decompositions of the primal graph.

A tree is built in two stages.  The output variables are graded first: a
decomposition of the primal graph is rooted and every output variable
becomes a label at its forget point, producing a forest whose roots are the
output-tree roots.  Each forest root is then summarized by the input
variables it touches and a second decomposition, over inputs only, places
the input labels above the forest.
"""
from __future__ import annotations

import heapq
import queue
import random
import threading
import time
from collections.abc import Callable, Iterable, Iterator
from dataclasses import dataclass, field

from .formula import CnfSpec, mcs_order, primal_adjacency


class PlanningError(Exception):
    pass


class InvalidDecomposition(PlanningError):
    pass


class PlanningExhausted(PlanningError):
    """No graded tree was produced within the planning budget."""


HEURISTICS = ("min-fill", "mcs", "random-restarts")


@dataclass
class PlanConfig:
    plan_timeout: float = 200.0
    width_target: int = 200
    seed: int = 0
    heuristic: str = "min-fill"
    max_restarts: int = 16

    def __post_init__(self):
        if self.plan_timeout <= 0:
            raise ValueError("plan_timeout must be positive")
        if self.width_target < 0:
            raise ValueError("width_target must be non-negative")
        if self.heuristic not in HEURISTICS:
            raise ValueError(f"unknown heuristic {self.heuristic!r}")


@dataclass
class PlanReport:
    trees_examined: int
    best_width: int
    elapsed: float
    met_target: bool


# -- tree decompositions -------------------------------------------------

@dataclass
class TreeDecomposition:
    bags: list[frozenset[int]]
    parent: list[int]
    root: int

    @property
    def width(self) -> int:
        return max(0, max((len(b) for b in self.bags), default=0) - 1)

    def children(self) -> list[list[int]]:
        kids: list[list[int]] = [[] for _ in self.bags]
        for b, p in enumerate(self.parent):
            if p >= 0:
                kids[p].append(b)
        return kids

    def preorder(self) -> list[int]:
        kids = self.children()
        out, stack = [], [self.root]
        while stack:
            b = stack.pop()
            out.append(b)
            stack.extend(reversed(kids[b]))
        return out

    def violations(self, vertices: Iterable[int], edges: Iterable[Iterable[int]]) -> list[str]:
        errs = []
        order = self.preorder()
        if sorted(order) != list(range(len(self.bags))):
            errs.append("bags do not form a single rooted tree")
            return errs
        where: dict[int, list[int]] = {}
        for b, bag in enumerate(self.bags):
            for v in bag:
                where.setdefault(v, []).append(b)
        for v in vertices:
            if v not in where:
                errs.append(f"vertex {v} is in no bag")
        for v, bs in where.items():
            # connected iff exactly one bag of the set has its parent outside the set
            members = set(bs)
            tops = [b for b in bs if self.parent[b] not in members]
            if len(tops) != 1:
                errs.append(f"bags holding {v} are not connected")
        for e in edges:
            e = set(e)
            if e and not any(e <= self.bags[b] for b in where.get(next(iter(e)), ())):
                errs.append(f"no bag covers {sorted(e)}")
        return errs


def _td_from_elimination(steps: list[tuple[int, frozenset[int]]]) -> TreeDecomposition:
    """Decomposition from an elimination sequence of (vertex, later neighbours)."""
    if not steps:
        return TreeDecomposition([frozenset()], [-1], 0)
    pos = {v: i for i, (v, _) in enumerate(steps)}
    bags = [nb | {v} for v, nb in steps]
    parent = [min((pos[u] for u in nb), default=-1) for _, nb in steps]
    root = len(steps) - 1
    for i in range(root):
        if parent[i] < 0:
            parent[i] = root
    return TreeDecomposition(bags, parent, root)


def _min_fill_steps(adj: dict[int, set[int]], rng: random.Random | None):
    g = {v: set(nb) for v, nb in adj.items()}
    tie = {v: (rng.random() if rng else 0.0) for v in sorted(g)}

    def fill(v: int) -> int:
        nb = list(g[v])
        missing = 0
        for i, a in enumerate(nb):
            ga = g[a]
            for b in nb[i + 1:]:
                if b not in ga:
                    missing += 1
        return missing

    current = {v: fill(v) for v in g}
    heap = [(current[v], tie[v], v) for v in g]
    heapq.heapify(heap)
    steps = []
    while heap:
        f, _, v = heapq.heappop(heap)
        if v not in g or current[v] != f:
            continue
        nb = g.pop(v)
        steps.append((v, frozenset(nb)))
        for a in nb:
            ga = g[a]
            ga.discard(v)
            ga.update(nb)
            ga.discard(a)
        affected = set(nb)
        for a in nb:
            affected.update(g[a])
        for u in affected:
            fu = fill(u)
            if fu != current[u]:
                current[u] = fu
                heapq.heappush(heap, (fu, tie[u], u))
    return steps


def _ordered_steps(adj: dict[int, set[int]], order: list[int]):
    g = {v: set(nb) for v, nb in adj.items()}
    steps = []
    for v in order:
        nb = g.pop(v)
        steps.append((v, frozenset(nb)))
        for a in nb:
            g[a].discard(v)
            g[a].update(nb)
            g[a].discard(a)
    return steps


def decompose(adj: dict[int, set[int]], config: PlanConfig,
              deadline: float | None = None, spec: CnfSpec | None = None,
              ) -> Iterator[TreeDecomposition]:
    """Anytime stream of decompositions of non-increasing width.

    ``min-fill`` starts with lowest-id tie-breaking and then restarts with
    seeded random tie-breaks; ``random-restarts`` randomizes from the first
    run; ``mcs`` emits the single decomposition induced by maximum
    cardinality search.
    """
    if not adj:
        yield TreeDecomposition([frozenset()], [-1], 0)
        return
    if config.heuristic == "mcs":
        if spec is None:
            raise ValueError("mcs decomposition needs the spec")
        yield _td_from_elimination(_ordered_steps(adj, list(reversed(mcs_order(spec)))))
        return
    best = None
    for attempt in range(config.max_restarts + 1):
        if deadline is not None and time.monotonic() >= deadline:
            return
        if attempt == 0 and config.heuristic == "min-fill":
            rng = None
        else:
            rng = random.Random(config.seed * 1_000_003 + attempt)
        td = _td_from_elimination(_min_fill_steps(adj, rng))
        if best is None or td.width <= best:
            best = td.width
            yield td


def _bucket_decomposition(vertices: list[int], edges: list[frozenset[int]]) -> TreeDecomposition:
    """Hypergraph elimination that removes vertices private to the merged edges together.

    Used for the input stage, where one summarized subtree can touch many
    inputs at once; expanding such an edge into a clique is not affordable.
    """
    alive: dict[int, frozenset[int]] = {}
    incident: dict[int, set[int]] = {v: set() for v in vertices}
    for e in edges:
        eid = len(alive)
        alive[eid] = e
        for v in e:
            incident[v].add(eid)
    producer: dict[int, int] = {}
    next_eid = len(alive)

    def cost(v: int) -> int:
        return sum(len(alive[e]) for e in incident[v])

    heap = [(cost(v), v) for v in vertices]
    heapq.heapify(heap)
    bags: list[frozenset[int]] = []
    parent: list[int] = []
    while heap:
        c, v = heapq.heappop(heap)
        if v not in incident or cost(v) != c:
            continue
        merged = incident[v]
        scope = {v}
        for e in merged:
            scope |= alive[e]
        group = {u for u in scope if incident[u] <= merged}
        b = len(bags)
        bags.append(frozenset(scope))
        parent.append(-1)
        for e in merged:
            if e in producer:
                parent[producer[e]] = b
            del alive[e]
        for u in group:
            del incident[u]
        rest = frozenset(scope - group)
        if rest:
            eid = next_eid
            next_eid += 1
            alive[eid] = rest
            producer[eid] = b
            for u in rest:
                incident[u] -= merged
                incident[u].add(eid)
                heapq.heappush(heap, (cost(u), u))
    if not bags:
        return TreeDecomposition([frozenset()], [-1], 0)
    root = len(bags) - 1
    for i in range(root):
        if parent[i] < 0:
            parent[i] = root
    return TreeDecomposition(bags, parent, root)


# -- graded project-join trees ------------------------------------------

@dataclass
class PjtNode:
    id: int
    kind: str  # "leaf" or "internal"
    clause: int | None = None
    label: tuple[int, ...] = ()
    grade: str | None = None  # "X" or "Y" for internal nodes
    children: list[int] = field(default_factory=list)


class GradedProjectJoinTree:
    """Rooted tree with clause leaves and graded, variable-labelled internal nodes."""

    def __init__(self, nodes: list[PjtNode], root: int):
        self.nodes = nodes
        self.root = root
        self.parent = [-1] * len(nodes)
        for n in nodes:
            for c in n.children:
                self.parent[c] = n.id

    def __len__(self):
        return len(self.nodes)

    def is_leaf(self, n: int) -> bool:
        return self.nodes[n].kind == "leaf"

    def internal(self) -> list[int]:
        return [n.id for n in self.nodes if n.kind == "internal"]

    def preorder(self, start: int | None = None) -> list[int]:
        out, stack = [], [self.root if start is None else start]
        while stack:
            n = stack.pop()
            out.append(n)
            stack.extend(reversed(self.nodes[n].children))
        return out

    def postorder(self, start: int | None = None) -> list[int]:
        return self.preorder(start)[::-1]

    def y_tree_roots(self) -> list[int]:
        return [n for n in self.preorder()
                if self.nodes[n].kind == "internal" and self.nodes[n].grade == "Y"
                and (n == self.root or self.nodes[self.parent[n]].grade == "X")]

    def x_tree_leaves(self) -> list[int]:
        nodes = self.nodes
        return [n for n in self.preorder()
                if nodes[n].kind == "internal" and nodes[n].grade == "X"
                and all(nodes[c].kind == "internal" and nodes[c].grade == "Y"
                        for c in nodes[n].children)]

    def label_owner(self) -> dict[int, int]:
        return {v: n.id for n in self.nodes for v in n.label}

    def to_json(self) -> dict:
        out = []
        for n in self.nodes:
            d = {"id": n.id, "kind": n.kind, "children": list(n.children)}
            if n.kind == "leaf":
                d["clause"] = n.clause
            else:
                d["label"] = list(n.label)
                d["grade"] = n.grade
            out.append(d)
        return {"root": self.root, "nodes": out}

    @classmethod
    def from_json(cls, doc: dict) -> GradedProjectJoinTree:
        raw = sorted(doc["nodes"], key=lambda d: d["id"])
        if [d["id"] for d in raw] != list(range(len(raw))):
            raise ValueError("tree node ids must be 0..n-1")
        nodes = [PjtNode(d["id"], d["kind"], d.get("clause"), tuple(d.get("label", ())),
                         d.get("grade"), list(d.get("children", ()))) for d in raw]
        return cls(nodes, doc["root"])


class _Builder:
    def __init__(self):
        self.nodes: list[PjtNode] = []

    def leaf(self, clause: int) -> int:
        self.nodes.append(PjtNode(len(self.nodes), "leaf", clause=clause))
        return len(self.nodes) - 1

    def internal(self, label, grade: str, children: list[int]) -> int:
        self.nodes.append(PjtNode(len(self.nodes), "internal", label=tuple(sorted(label)),
                                  grade=grade, children=list(children)))
        return len(self.nodes) - 1


def _grade(td: TreeDecomposition, items: list[tuple[frozenset[int], int]],
           labeled: frozenset[int], grade: str, builder: _Builder) -> list[int]:
    """Hang ``items`` (prop set, node) under labels placed at forget points of ``td``.

    Returns the top-level nodes, in order.
    """
    kids = td.children()
    depth = [0] * len(td.bags)
    top: dict[int, int] = {}
    for b in td.preorder():
        if td.parent[b] >= 0:
            depth[b] = depth[td.parent[b]] + 1
        for v in td.bags[b]:
            top.setdefault(v, b)
    placed: list[list[int]] = [[] for _ in td.bags]
    live: dict[int, frozenset[int]] = {}
    for props, node in items:
        # the bags holding all of props form a subtree whose top is the deepest per-vertex top
        b = max((top[v] for v in props), key=lambda t: depth[t], default=td.root)
        placed[b].append(node)
        live[node] = props & labeled
    collected: list[list[int]] = [[] for _ in td.bags]
    for b in reversed(td.preorder()):
        children = list(placed[b])
        for c in kids[b]:
            children.extend(collected[c])
        p = td.parent[b]
        forgotten = [v for v in td.bags[b] if v in labeled and (p < 0 or v not in td.bags[p])]
        if not forgotten:
            collected[b] = children
            continue
        # only subtrees that mention a forgotten variable go under its node;
        # the rest stay independent siblings
        fs = frozenset(forgotten)
        inside = [c for c in children if live[c] & fs] or children
        chosen = set(inside)
        n = builder.internal(forgotten, grade, inside)
        acc: set[int] = set()
        for c in inside:
            acc |= live.pop(c)
        live[n] = frozenset(acc - fs)
        collected[b] = [n] + [c for c in children if c not in chosen]
    return collected[td.root]


def _clause_props(clause) -> frozenset[int]:
    return frozenset(abs(lit) for lit in clause)


def build_graded_pjt(spec: CnfSpec, td_lower: TreeDecomposition,
                     config: PlanConfig | None = None) -> GradedProjectJoinTree:
    clauses = spec.all_clauses()
    errs = td_lower.violations(range(1, spec.num_props + 1), (_clause_props(c) for c in clauses))
    if errs:
        raise InvalidDecomposition("; ".join(errs[:5]))
    builder = _Builder()
    n_y = len(spec.clauses)
    y_items = [(_clause_props(clauses[i]), builder.leaf(i)) for i in range(n_y)]
    pure_leaves = [builder.leaf(i) for i in range(n_y, len(clauses))]
    y_roots = _grade(td_lower, y_items, spec.outputs, "Y", builder)

    if spec.inputs:
        nodes = builder.nodes
        summary = []
        for r in y_roots:
            xs = set()
            stack = [r]
            while stack:
                n = nodes[stack.pop()]
                if n.kind == "leaf":
                    xs.update(v for v in _clause_props(clauses[n.clause]) if v in spec.inputs)
                else:
                    stack.extend(n.children)
            summary.append((frozenset(xs), r))
        summary += [(_clause_props(clauses[nodes[leaf].clause]), leaf) for leaf in pure_leaves]
        vertices = sorted(spec.inputs)
        td_upper = _bucket_decomposition(vertices, [s for s, _ in summary if s])
        tops = _grade(td_upper, summary, spec.inputs, "X", builder)
        if len(tops) == 1 and builder.nodes[tops[0]].grade == "X":
            root = tops[0]
        else:
            root = builder.internal((), "X", tops)
    else:
        tops = y_roots + pure_leaves
        if len(tops) == 1 and builder.nodes[tops[0]].kind == "internal":
            root = tops[0]
        else:
            root = builder.internal((), "Y", tops)
    return GradedProjectJoinTree(builder.nodes, root)


def pjt_width(t: GradedProjectJoinTree, spec: CnfSpec) -> int:
    """Largest number of live variables at an internal node.

    Live at ``n``: occurring in a clause below ``n`` and not labelled
    strictly below ``n``.
    """
    clauses = spec.all_clauses()
    live: dict[int, set[int]] = {}
    width = 0
    for n in t.postorder():
        node = t.nodes[n]
        if node.kind == "leaf":
            live[n] = set(_clause_props(clauses[node.clause])) if node.clause is not None else set()
            continue
        sets = [live.pop(c) for c in node.children]
        acc = max(sets, key=len) if sets else set()
        for s in sets:
            if s is not acc:
                acc |= s
        width = max(width, len(acc))
        acc.difference_update(node.label)
        live[n] = acc
    return width


def validate_pjt(t: GradedProjectJoinTree, spec: CnfSpec) -> list[str]:
    """All structural violations of ``t`` as a graded tree of ``spec``; empty means valid."""
    errs: list[str] = []
    nodes = t.nodes
    order = t.preorder()
    if sorted(order) != list(range(len(nodes))) or t.parent[t.root] != -1:
        return ["tree: nodes do not form a single tree under the root"]
    clauses = spec.all_clauses()

    leaves = [n for n in nodes if n.kind == "leaf"]
    if any(n.children for n in leaves):
        errs.append("leaf-bijection: a leaf has children")
    if sorted(n.clause for n in leaves if n.clause is not None) != list(range(len(clauses))) \
            or any(n.clause is None for n in leaves):
        errs.append("leaf-bijection: leaves do not match clauses one to one")

    owner: dict[int, int] = {}
    for n in nodes:
        if n.kind != "internal":
            continue
        if not n.label and n.id != t.root:
            errs.append(f"partition: node {n.id} has an empty label")
        for v in n.label:
            if v in owner:
                errs.append(f"partition: variable {v} labels nodes {owner[v]} and {n.id}")
            owner[v] = n.id
    if set(owner) != set(spec.inputs | spec.outputs):
        errs.append("partition: labels do not cover exactly the variables")

    tin, tout = {}, {}
    clock = 0
    stack = [(t.root, False)]
    while stack:
        n, done = stack.pop()
        if done:
            tout[n] = clock
            continue
        tin[n] = clock
        clock += 1
        stack.append((n, True))
        stack.extend((c, False) for c in reversed(nodes[n].children))
    for n in leaves:
        if n.clause is None or not 0 <= n.clause < len(clauses):
            continue
        for v in _clause_props(clauses[n.clause]):
            o = owner.get(v)
            if o is not None and not (tin[o] < tin[n.id] <= tout[o]):
                errs.append(f"descent: clause {n.clause} is not below the node labelled {v}")

    for n in nodes:
        if n.kind != "internal":
            continue
        if n.grade not in ("X", "Y"):
            errs.append(f"grade: node {n.id} has no grade")
            continue
        allowed = spec.inputs if n.grade == "X" else spec.outputs
        if not set(n.label) <= allowed:
            errs.append(f"grade: node {n.id} label disagrees with grade {n.grade}")
        if n.grade == "X" and n.id != t.root and nodes[t.parent[n.id]].grade != "X":
            errs.append(f"X-above-Y: input node {n.id} sits below an output node")

    roots = t.y_tree_roots()
    by_def = {n.id for n in nodes if n.kind == "internal" and n.grade == "Y"
              and (n.id == t.root or nodes[t.parent[n.id]].grade == "X")}
    if set(roots) != by_def:
        errs.append("tree-roots: YTreeRoots derivation mismatch")
    if (t.root in by_def) != (not spec.inputs):
        errs.append("tree-roots: root is an output-tree root exactly when there are no inputs")
    for n in t.x_tree_leaves():
        if not set(nodes[n].children) <= by_def:
            errs.append(f"tree-roots: XTreeLeaf {n} has a child outside YTreeRoots")
    return errs


# -- planning policy -----------------------------------------------------

Decomposer = Callable[..., Iterable[TreeDecomposition]]


def plan(spec: CnfSpec, config: PlanConfig | None = None,
         decomposer: Decomposer | None = None,
         ) -> tuple[GradedProjectJoinTree, PlanReport]:
    """Pick a graded tree under the time budget and width target.

    The first tree whose width is within ``width_target`` is taken at once.
    Otherwise the narrowest tree seen by the deadline (or by the time the
    decomposer runs dry) is returned.  No tree at all raises
    :class:`PlanningExhausted`.
    """
    config = config or PlanConfig()
    start = time.monotonic()
    deadline = start + config.plan_timeout
    adj = primal_adjacency(spec)
    if decomposer is None:
        def decomposer(graph, cfg, dl):
            return decompose(graph, cfg, dl, spec=spec)

    feed: queue.Queue = queue.Queue()
    stop = threading.Event()
    done = object()

    def worker():
        try:
            for td in decomposer(adj, config, deadline):
                if stop.is_set():
                    break
                feed.put(td)
        except BaseException as exc:  # surfaced on the policy side
            feed.put(exc)
        feed.put(done)

    threading.Thread(target=worker, daemon=True).start()
    best = None
    examined = 0
    try:
        while True:
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                break
            try:
                item = feed.get(timeout=remaining)
            except queue.Empty:
                break
            if item is done:
                break
            if isinstance(item, BaseException):
                raise item
            if time.monotonic() > deadline:
                break
            tree = build_graded_pjt(spec, item, config)
            width = pjt_width(tree, spec)
            examined += 1
            if best is None or width < best[1]:
                best = (tree, width)
            if width <= config.width_target:
                break
    finally:
        stop.set()
    elapsed = time.monotonic() - start
    if best is None:
        raise PlanningExhausted("no graded project-join tree within the planning budget")
    tree, width = best
    return tree, PlanReport(examined, width, elapsed, width <= config.width_target)
