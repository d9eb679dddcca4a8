"""End-to-end runs: preprocess, plan, execute, optionally synthesize."""
from __future__ import annotations

import sys
import threading
import time
from dataclasses import asdict, dataclass

from .formula import CnfSpec, build_family, mcs_order, preprocess
from .planner import (GradedProjectJoinTree, InvalidDecomposition, PlanConfig, PlanningExhausted,
                      pjt_width, plan, validate_pjt)
from .realize import (Deadline, ExecutionTimeout, Realizability, TreeExecutor, Valuations,
                      classify_monolithic)
from .synth import WitnessSet, complete_witnesses, dp_synth, synth_monolithic
from .zdd import UNIT, Manager

MODES = ("dp", "monolithic")
PLANNING_EXHAUSTED = "PLANNING_EXHAUSTED"
TIMEOUT = "TIMEOUT"
STATS_FIELDS = ("instance", "mode", "outcome", "parse_ms", "plan_ms", "exec_ms", "total_ms",
                "pjt_width", "peak_nodes")


@dataclass
class RunStats:
    instance: str
    mode: str
    outcome: str = ""
    parse_ms: float = 0.0
    plan_ms: float = 0.0
    exec_ms: float = 0.0
    total_ms: float = 0.0
    pjt_width: int = 0
    peak_nodes: int = 0

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass
class RunResult:
    spec: CnfSpec
    outcome: str
    stats: RunStats
    manager: Manager | None = None
    rset: int | None = None
    tree: GradedProjectJoinTree | None = None
    witnesses: WitnessSet | None = None

    @property
    def kind(self) -> Realizability | None:
        try:
            return Realizability(self.outcome)
        except ValueError:
            return None


def _ms(t0: float) -> float:
    return round((time.monotonic() - t0) * 1000.0, 3)


def run(spec: CnfSpec, *, mode: str = "dp", plan_config: PlanConfig | None = None,
        exec_timeout: float | None = None, synthesize: bool = False,
        tree: GradedProjectJoinTree | None = None, decomposer=None,
        strict: bool = False, parse_ms: float = 0.0) -> RunResult:
    """Classify ``spec`` (and build witnesses when asked).

    Planning failures and a passed execution deadline are reported through
    ``outcome`` rather than raised.  A supplied ``tree`` must be valid for
    the preprocessed spec.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    t_start = time.monotonic() - parse_ms / 1000.0
    stats = RunStats(spec.name, mode, parse_ms=parse_ms)
    pre = preprocess(spec)
    mgr = Manager(mcs_order(pre), strict=strict)
    result = RunResult(pre, "", stats, manager=mgr)

    def finish(outcome: str) -> RunResult:
        result.outcome = stats.outcome = outcome
        stats.total_ms = _ms(t_start)
        stats.peak_nodes = len(mgr)
        return result

    if pre.trivially_nullary:
        result.rset = UNIT
        return finish(Realizability.NULLARY.value)

    executor = None
    if mode == "dp":
        t0 = time.monotonic()
        if tree is None:
            try:
                tree, _ = plan(pre, plan_config, decomposer)
            except PlanningExhausted:
                stats.plan_ms = _ms(t0)
                return finish(PLANNING_EXHAUSTED)
        else:
            errs = validate_pjt(tree, pre)
            if errs:
                raise InvalidDecomposition("; ".join(errs[:5]))
        stats.plan_ms = _ms(t0)
        stats.pjt_width = pjt_width(tree, pre)
        result.tree = tree

    deadline = Deadline(exec_timeout)
    t0 = time.monotonic()
    try:
        if mode == "dp":
            executor = TreeExecutor(pre, tree, mgr, deadline)
            vals = Valuations()
            outcome = executor.check_partial(vals)
        else:
            phi = build_family(pre, mgr)
            outcome = classify_monolithic(mgr, phi, pre.inputs, pre.outputs, deadline)
        result.rset = outcome.rset
        if synthesize and outcome.kind is not Realizability.NULLARY:
            if mode == "dp":
                ws = dp_synth(executor, vals, deadline, strict)
            else:
                ws = synth_monolithic(mgr, phi, sorted(pre.outputs, key=mgr.level), deadline, strict)
            result.witnesses = complete_witnesses(ws, pre.outputs, mgr)
    except ExecutionTimeout:
        stats.exec_ms = _ms(t0)
        return finish(TIMEOUT)
    stats.exec_ms = _ms(t0)
    return finish(outcome.kind.value)


def rset_clauses(result: RunResult) -> list[tuple[int, ...]]:
    if result.rset is None or result.manager is None:
        return []
    return result.manager.clauses(result.rset)


def call_with_big_stack(fn, *args, stack_mb: int = 512, recursion: int = 1 << 20, **kwargs):
    """Run ``fn`` in a worker thread with a deep stack; the diagram code recurses per level."""
    box: dict = {}

    def target():
        try:
            box["value"] = fn(*args, **kwargs)
        except BaseException as exc:  # re-raised in the caller
            box["error"] = exc

    old_limit = sys.getrecursionlimit()
    old_size = threading.stack_size()
    sys.setrecursionlimit(max(old_limit, recursion))
    threading.stack_size(stack_mb << 20)
    try:
        t = threading.Thread(target=target)
        t.start()
    finally:
        threading.stack_size(old_size)
    t.join()
    sys.setrecursionlimit(old_limit)
    if "error" in box:
        raise box["error"]
    return box.get("value")

