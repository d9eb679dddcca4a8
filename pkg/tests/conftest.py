import pytest
from hypothesis import strategies as st

from zddsynth.formula import normalize_clause


def clauses_st(num_props, max_clauses=8, max_width=4, tautologies=False):
    """Lists of clauses over propositions 1..num_props."""
    lit = st.integers(1, num_props).flatmap(lambda v: st.sampled_from((v, -v)))
    clause = st.lists(lit, min_size=1, max_size=max_width).map(normalize_clause)
    if not tautologies:
        clause = clause.filter(lambda c: len({abs(x) for x in c}) == len(c))
    return st.lists(clause, max_size=max_clauses)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


APPENDIX = """p cnf 8 5
a 1 2 3 0
e 4 5 6 0
1 4 -5 0
-1 2 6 0
1 -2 3 5 0
-3 1 -4 0
-3 2 -5 0
"""
