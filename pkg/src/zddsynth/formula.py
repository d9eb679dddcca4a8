"""QDIMACS input, CNF preprocessing and proposition ordering."""
from __future__ import annotations

import heapq
import json
import os
from collections import defaultdict
from dataclasses import dataclass, field, replace

from .zdd import Manager

Clause = tuple[int, ...]


class FormulaError(Exception):
    pass


class QdimacsSyntaxError(FormulaError):
    pass


class QuantifierError(FormulaError):
    pass


class CountMismatch(FormulaError):
    pass


def normalize_clause(lits) -> Clause:
    """Sorted, duplicate-free literal tuple (ordered by variable, positive first)."""
    return tuple(sorted(set(lits), key=lambda lit: (abs(lit), lit < 0)))


def is_tautology(clause) -> bool:
    s = set(clause)
    return any(-lit in s for lit in s)


@dataclass
class CnfSpec:
    """A synthesis problem: CNF over inputs X and outputs Y.

    ``clauses`` are the clauses still to be handled by the tree executor;
    after :func:`preprocess` each holds at least one output literal and the
    input-only clauses sit in ``pure_x_clauses``.
    """
    num_props: int
    inputs: frozenset[int]
    outputs: frozenset[int]
    clauses: list[Clause]
    pure_x_clauses: list[Clause] = field(default_factory=list)
    name: str = ""
    unquantified: tuple[int, ...] = ()
    trivially_nullary: bool = False

    def __post_init__(self):
        self.inputs = frozenset(self.inputs)
        self.outputs = frozenset(self.outputs)
        if self.inputs & self.outputs:
            raise QuantifierError("a variable is both input and output")

    @property
    def props(self) -> list[int]:
        return sorted(self.inputs | self.outputs)

    def all_clauses(self) -> list[Clause]:
        """Clauses indexed the way tree leaves refer to them."""
        return list(self.clauses) + list(self.pure_x_clauses)


def parse_qdimacs(text: str | bytes, name: str = "", sidecar: dict | None = None) -> CnfSpec:
    """Read a QDIMACS (or plain DIMACS) problem.

    Universal variables become inputs and existential ones outputs; variables
    in neither block default to outputs.  A ``sidecar`` mapping with
    ``inputs``/``outputs`` lists overrides the quantifier lines.
    """
    if isinstance(text, bytes):
        text = text.decode()
    header = None
    blocks: list[tuple[str, list[int]]] = []
    clause_tokens: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        parts = line.split()
        if parts[0] == "p":
            if header is not None:
                raise QdimacsSyntaxError(f"line {lineno}: second problem line")
            if len(parts) != 4 or parts[1] != "cnf":
                raise QdimacsSyntaxError(f"line {lineno}: malformed problem line {line!r}")
            try:
                header = (int(parts[2]), int(parts[3]))
            except ValueError:
                raise QdimacsSyntaxError(f"line {lineno}: malformed problem line {line!r}") from None
            if header[0] < 0 or header[1] < 0:
                raise QdimacsSyntaxError(f"line {lineno}: negative counts")
            continue
        if header is None:
            raise QdimacsSyntaxError(f"line {lineno}: content before problem line")
        try:
            nums = [int(t) for t in parts[1:]] if parts[0] in ("a", "e") else [int(t) for t in parts]
        except ValueError:
            raise QdimacsSyntaxError(f"line {lineno}: non-integer token") from None
        if parts[0] in ("a", "e"):
            if clause_tokens:
                raise QuantifierError(f"line {lineno}: quantifier block after clauses")
            if not nums or nums[-1] != 0 or 0 in nums[:-1]:
                raise QdimacsSyntaxError(f"line {lineno}: quantifier line must end with a single 0")
            if any(v <= 0 for v in nums[:-1]):
                raise QdimacsSyntaxError(f"line {lineno}: quantified variables must be positive")
            if blocks and blocks[-1][0] == parts[0]:
                blocks[-1][1].extend(nums[:-1])
            else:
                blocks.append((parts[0], nums[:-1]))
            continue
        clause_tokens.extend(nums)
    if header is None:
        raise QdimacsSyntaxError("missing problem line")
    num_vars, num_clauses = header

    if len(blocks) > 2:
        raise QuantifierError("more than two quantifier blocks")
    if len(blocks) == 2 and blocks[0][0] == "e":
        raise QuantifierError("existential block precedes universal block")
    universal = [v for kind, vs in blocks if kind == "a" for v in vs]
    existential = [v for kind, vs in blocks if kind == "e" for v in vs]

    if clause_tokens and clause_tokens[-1] != 0:
        raise QdimacsSyntaxError("last clause is not terminated by 0")
    clauses: list[Clause] = []
    current: list[int] = []
    for tok in clause_tokens:
        if tok == 0:
            clauses.append(normalize_clause(current))
            current = []
        else:
            if abs(tok) > num_vars:
                raise QdimacsSyntaxError(f"literal {tok} exceeds declared variable count {num_vars}")
            current.append(tok)
    if len(clauses) != num_clauses:
        raise CountMismatch(f"header declares {num_clauses} clauses, found {len(clauses)}")

    if sidecar is not None:
        universal = [int(v) for v in sidecar.get("inputs", [])]
        existential = [int(v) for v in sidecar.get("outputs", [])]
    for v in universal + existential:
        if v > num_vars:
            raise QdimacsSyntaxError(f"quantified variable {v} exceeds {num_vars}")
    inputs = set(universal)
    if inputs & set(existential):
        raise QuantifierError("variable quantified twice")
    quantified = inputs | set(existential)
    unquantified = tuple(v for v in range(1, num_vars + 1) if v not in quantified)
    outputs = set(existential) | set(unquantified)
    return CnfSpec(num_vars, frozenset(inputs), frozenset(outputs), clauses,
                   name=name, unquantified=unquantified)


def load_spec(path: str, sidecar_path: str | None = None) -> CnfSpec:
    with open(path, "rb") as fh:
        data = fh.read()
    sidecar = None
    if sidecar_path:
        with open(sidecar_path) as fh:
            sidecar = json.load(fh)
    return parse_qdimacs(data, name=os.path.basename(path), sidecar=sidecar)


def render_qdimacs(spec: CnfSpec, *, comment: str | None = None) -> str:
    """QDIMACS text for ``spec`` (all clauses, pure-input ones included)."""
    lines = []
    if comment:
        lines.extend(f"c {ln}" for ln in comment.splitlines())
    clauses = spec.all_clauses()
    lines.append(f"p cnf {spec.num_props} {len(clauses)}")
    if spec.inputs:
        lines.append("a " + " ".join(map(str, sorted(spec.inputs))) + " 0")
    if spec.outputs:
        lines.append("e " + " ".join(map(str, sorted(spec.outputs))) + " 0")
    for c in clauses:
        lines.append(" ".join(map(str, c)) + (" 0" if c else "0"))
    return "\n".join(lines) + "\n"


def render_dimacs(clauses, num_props: int, *, comment: str | None = None) -> str:
    lines = []
    if comment:
        lines.extend(f"c {ln}" for ln in comment.splitlines())
    lines.append(f"p cnf {num_props} {len(clauses)}")
    for c in clauses:
        lines.append(" ".join(map(str, c)) + (" 0" if c else "0"))
    return "\n".join(lines) + "\n"


def _drop_subsumed(clauses: list[Clause]) -> list[Clause]:
    """Remove duplicates and clauses that are supersets of another clause."""
    unique = set(clauses)
    if () in unique:
        return [()]
    occurs: dict[int, list[Clause]] = defaultdict(list)
    kept: list[Clause] = []
    for c in sorted(unique, key=lambda c: (len(c), c)):
        cs = set(c)
        # a subsumer shares all its literals with c, so it sits in some occurrence list of c
        if any(cs.issuperset(d) for lit in c for d in occurs[lit]):
            continue
        kept.append(c)
        for lit in c:
            occurs[lit].append(c)
    return kept


def preprocess(spec: CnfSpec) -> CnfSpec:
    """Drop tautologies, duplicates and subsumed clauses; split off input-only clauses."""
    clauses = [normalize_clause(c) for c in spec.all_clauses()]
    clauses = [c for c in clauses if not is_tautology(c)]
    kept = _drop_subsumed(clauses)
    outputs = spec.outputs
    with_y = [c for c in kept if any(abs(lit) in outputs for lit in c)]
    pure_x = [c for c in kept if not any(abs(lit) in outputs for lit in c)]
    return replace(spec, clauses=sorted(with_y), pure_x_clauses=sorted(pure_x),
                   trivially_nullary=() in pure_x)


def primal_adjacency(spec: CnfSpec) -> dict[int, set[int]]:
    adj: dict[int, set[int]] = {p: set() for p in range(1, spec.num_props + 1)}
    for c in spec.all_clauses():
        vs = {abs(lit) for lit in c}
        for v in vs:
            adj[v].update(vs)
            adj[v].discard(v)
    return adj


def mcs_order(spec: CnfSpec) -> list[int]:
    """Maximum-cardinality search over the primal graph.

    Picks the unnumbered vertex with the most numbered neighbours, breaking
    ties by lowest id (so the search starts from the lowest id).
    """
    adj = primal_adjacency(spec)
    weight = dict.fromkeys(adj, 0)
    heap = [(0, v) for v in adj]
    heapq.heapify(heap)
    done: set[int] = set()
    order: list[int] = []
    while heap:
        w, v = heapq.heappop(heap)
        if v in done or -w != weight[v]:
            continue
        done.add(v)
        order.append(v)
        for u in adj[v]:
            if u not in done:
                weight[u] += 1
                heapq.heappush(heap, (-weight[u], u))
    return order


def build_family(spec: CnfSpec, manager: Manager) -> int:
    """Family of every clause of ``spec``, input-only clauses included."""
    return manager.family(spec.all_clauses())
