"""Forall-exists realizability and witness synthesis over clause ZDDs."""
from .formula import CnfSpec, load_spec, parse_qdimacs, preprocess
from .oracle import classify_bruteforce, gen_family, gen_random, verify_witnesses
from .pipeline import RunResult, RunStats, run
from .planner import GradedProjectJoinTree, PlanConfig, plan
from .realize import Realizability
from .zdd import EMPTY, UNIT, Manager

__all__ = [
    "CnfSpec", "load_spec", "parse_qdimacs", "preprocess",
    "classify_bruteforce", "gen_family", "gen_random", "verify_witnesses",
    "RunResult", "RunStats", "run",
    "GradedProjectJoinTree", "PlanConfig", "plan",
    "Realizability", "EMPTY", "UNIT", "Manager",
]
