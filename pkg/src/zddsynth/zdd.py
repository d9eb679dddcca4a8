"""Zero-suppressed decision diagrams over literal variables, read as clause sets.

Every proposition ``p`` owns two adjacent decision variables: ``2k`` for the
literal ``p`` and ``2k + 1`` for ``-p``, where ``k`` is the position of ``p``
in the manager's proposition order.  A diagram denotes a family of literal
sets.  Read as a CNF, each set is a clause and the family is their
conjunction; read as a DNF (after :meth:`Manager.cross`), each set is a cube.

Handles are plain ints.  The two terminals are

- ``EMPTY`` (0): the empty family.  As a CNF this is logical truth.
- ``UNIT`` (1): the family holding only the empty clause, i.e. falsity.

Literals are DIMACS-style signed ints throughout.
"""
from __future__ import annotations

import sys
from collections.abc import Iterable, Sequence

EMPTY = 0
UNIT = 1

# Terminals sort below every decision variable.
_BOTTOM = sys.maxsize


class ZddError(Exception):
    pass


class TautologicalClause(ZddError):
    """A clause holds both polarities of one proposition."""


class FalsityHasNoDnf(ZddError):
    """``cross`` was asked for the DNF of the unsatisfiable CNF."""


class CapExceeded(ZddError):
    """Materializing a family would exceed the configured clause cap."""


class Manager:
    """Unique table, operation caches and the clause-set algebra.

    ``order`` lists the propositions from the top of the diagram downwards.
    A manager and its handles belong to one thread.
    """

    def __init__(self, order: Sequence[int], *, strict: bool = True,
                 cache_limit: int = 1 << 22, enum_cap: int = 1 << 20):
        self.order = list(order)
        self._level = {p: k for k, p in enumerate(self.order)}
        if len(self._level) != len(self.order):
            raise ValueError("proposition order has duplicates")
        self.strict = strict
        self.cache_limit = cache_limit
        self.enum_cap = enum_cap
        self._var = [_BOTTOM, _BOTTOM]
        self._lo = [EMPTY, UNIT]
        self._hi = [EMPTY, UNIT]
        self._unique: dict[tuple[int, int, int], int] = {}
        self._caches: dict[str, dict] = {}
        self._cache_entries = 0

    # -- bookkeeping -----------------------------------------------------

    def __len__(self) -> int:
        return len(self._var)

    @property
    def num_nodes(self) -> int:
        return len(self._var)

    def _cache(self, name: str) -> dict:
        c = self._caches.get(name)
        if c is None:
            c = self._caches[name] = {}
        return c

    def _note_entry(self) -> None:
        self._cache_entries += 1
        if self._cache_entries > self.cache_limit:
            self.clear_caches()

    def clear_caches(self) -> None:
        for c in self._caches.values():
            c.clear()
        self._cache_entries = 0

    def _mk(self, v: int, lo: int, hi: int) -> int:
        if hi == EMPTY:
            return lo
        key = (v, lo, hi)
        n = self._unique.get(key)
        if n is None:
            n = len(self._var)
            self._var.append(v)
            self._lo.append(lo)
            self._hi.append(hi)
            self._unique[key] = n
        return n

    def _mk_prop(self, k: int, pos: int, neg: int, absent: int) -> int:
        return self._mk(2 * k, self._mk(2 * k + 1, absent, neg), pos)

    def literal_var(self, lit: int) -> int:
        try:
            k = self._level[abs(lit)]
        except KeyError:
            raise ValueError(f"literal {lit} is outside the manager's propositions") from None
        return 2 * k + (lit < 0)

    def var_literal(self, v: int) -> int:
        p = self.order[v >> 1]
        return -p if v & 1 else p

    def level(self, prop: int) -> int:
        return self._level[prop]

    # -- construction ----------------------------------------------------

    def terminal_families(self) -> tuple[int, int]:
        return EMPTY, UNIT

    def clause(self, literals: Iterable[int]) -> int:
        """Family holding the single clause ``literals``.

        Tautological input raises :class:`TautologicalClause` in strict mode
        and yields ``EMPTY`` (a valid clause contributes nothing) otherwise.
        """
        lits = set(literals)
        for lit in lits:
            if lit == 0:
                raise ValueError("0 is not a literal")
            if -lit in lits:
                if self.strict:
                    raise TautologicalClause(sorted(lits, key=abs))
                return EMPTY
        node = UNIT
        for v in sorted((self.literal_var(lit) for lit in lits), reverse=True):
            node = self._mk(v, EMPTY, node)
        return node

    def family(self, clauses: Iterable[Iterable[int]]) -> int:
        """Subsumption-free family of ``clauses`` (their conjunction)."""
        parts = [self.clause(c) for c in clauses]
        if not parts:
            return EMPTY
        while len(parts) > 1:
            nxt = [self.union(parts[i], parts[i + 1]) for i in range(0, len(parts) - 1, 2)]
            if len(parts) % 2:
                nxt.append(parts[-1])
            parts = nxt
        return self.minimal(parts[0])

    # -- plain set algebra ----------------------------------------------

    def union(self, a: int, b: int) -> int:
        if a == EMPTY:
            return b
        if b == EMPTY or a == b:
            return a
        if a > b:
            a, b = b, a
        cache = self._cache("union")
        r = cache.get((a, b))
        if r is not None:
            return r
        var, lo, hi = self._var, self._lo, self._hi
        va, vb = var[a], var[b]
        if va < vb:
            r = self._mk(va, self.union(lo[a], b), hi[a])
        elif vb < va:
            r = self._mk(vb, self.union(a, lo[b]), hi[b])
        else:
            r = self._mk(va, self.union(lo[a], lo[b]), self.union(hi[a], hi[b]))
        cache[(a, b)] = r
        self._note_entry()
        return r

    def subset0(self, f: int, v: int) -> int:
        """Sets of ``f`` that do not contain decision variable ``v``."""
        var = self._var
        if var[f] > v:
            return f
        if var[f] == v:
            return self._lo[f]
        cache = self._cache("subset0")
        r = cache.get((f, v))
        if r is None:
            r = self._mk(var[f], self.subset0(self._lo[f], v), self.subset0(self._hi[f], v))
            cache[(f, v)] = r
            self._note_entry()
        return r

    def nonsup(self, f: int, g: int) -> int:
        """Sets of ``f`` that are not supersets of any set of ``g``."""
        if g == EMPTY:
            return f
        if f == EMPTY or g == UNIT or f == g:
            return EMPTY
        cache = self._cache("nonsup")
        r = cache.get((f, g))
        if r is not None:
            return r
        var, lo, hi = self._var, self._lo, self._hi
        vf, vg = var[f], var[g]
        if vg < vf:
            r = self.nonsup(f, lo[g])
        elif vf < vg:
            r = self._mk(vf, self.nonsup(lo[f], g), self.nonsup(hi[f], g))
        else:
            r = self._mk(vf, self.nonsup(lo[f], lo[g]),
                         self.nonsup(self.nonsup(hi[f], lo[g]), hi[g]))
        cache[(f, g)] = r
        self._note_entry()
        return r

    def minimal(self, f: int) -> int:
        """Drop every set that strictly contains another set of ``f``."""
        if f <= UNIT:
            return f
        cache = self._cache("minimal")
        r = cache.get(f)
        if r is None:
            lo = self.minimal(self._lo[f])
            hi = self.nonsup(self.minimal(self._hi[f]), lo)
            r = self._mk(self._var[f], lo, hi)
            cache[f] = r
            self._note_entry()
        return r

    # -- clause-set algebra ---------------------------------------------

    def union_sf(self, a: int, b: int) -> int:
        """Subsumption-free union: conjunction of two CNFs."""
        return self.minimal(self.union(a, b))

    def _split(self, f: int, k: int) -> tuple[int, int, int]:
        # Requires the top variable of f to be at or below 2k.
        var = self._var
        if var[f] == 2 * k:
            pos, rest = self._hi[f], self._lo[f]
        else:
            pos, rest = EMPTY, f
        if var[rest] == 2 * k + 1:
            return pos, self._hi[rest], self._lo[rest]
        return pos, EMPTY, rest

    def distribute(self, a: int, b: int) -> int:
        """Clause distribution: disjunction of two CNFs.

        Pairwise clause unions, with tautological products dropped and the
        result made subsumption-free.
        """
        return self._cd(self.minimal(a), self.minimal(b))

    def _cd(self, f: int, g: int) -> int:
        if f == EMPTY or g == EMPTY:
            return EMPTY
        if f == UNIT or f == g:
            return g
        if g == UNIT:
            return f
        if f > g:
            f, g = g, f
        cache = self._cache("cd")
        r = cache.get((f, g))
        if r is not None:
            return r
        k = min(self._var[f], self._var[g]) >> 1
        fp, fn, f0 = self._split(f, k)
        gp, gn, g0 = self._split(g, k)
        r0 = self._cd(f0, g0)
        # p with -p is tautological, so fp x gn and fn x gp never appear
        rp = self.union_sf(self._cd(fp, self.union_sf(gp, g0)), self._cd(f0, gp))
        rn = self.union_sf(self._cd(fn, self.union_sf(gn, g0)), self._cd(f0, gn))
        r = self._mk_prop(k, self.nonsup(rp, r0), self.nonsup(rn, r0), r0)
        cache[(f, g)] = r
        self._note_entry()
        return r

    def select(self, z: int, p: int) -> tuple[int, int, int]:
        """Split ``z`` on proposition ``p`` into (pos, neg, absent).

        ``pos`` holds the clauses that contained ``p``, with ``p`` removed;
        ``neg`` likewise for ``-p``; ``absent`` the clauses with neither.
        """
        return self._cofactor(z, self._level[p])

    def _cofactor(self, f: int, k: int) -> tuple[int, int, int]:
        v = self._var[f]
        if v >= 2 * k:
            return self._split(f, k)
        cache = self._cache("cofactor")
        r = cache.get((f, k))
        if r is None:
            lp, ln, la = self._cofactor(self._lo[f], k)
            hp, hn, ha = self._cofactor(self._hi[f], k)
            r = (self._mk(v, lp, hp), self._mk(v, ln, hn), self._mk(v, la, ha))
            cache[(f, k)] = r
            self._note_entry()
        return r

    def project(self, z: int, p: int) -> int:
        """Existentially quantify ``p`` by symbolic resolution."""
        pos, neg, absent = self.select(self.minimal(z), p)
        if pos == EMPTY or neg == EMPTY:
            return absent
        return self.union_sf(self._cd(pos, neg), absent)

    def project_all(self, z: int, props: Iterable[int]) -> int:
        for p in props:
            z = self.project(z, p)
        return z

    def cross(self, z: int, *, allow_falsity: bool = False) -> int:
        """DNF (family of cubes) equivalent to the CNF ``z``.

        Minimal transversals of the clauses, minus those holding both
        polarities of a proposition.  The CNF ``EMPTY`` (truth) maps to the
        single empty cube; ``UNIT`` (falsity) maps to the empty DNF, but only
        when ``allow_falsity`` is set.
        """
        z = self.minimal(z)
        if z == UNIT and not allow_falsity:
            raise FalsityHasNoDnf("the empty clause has no DNF of cubes")
        return self._consistent(self._transversals(z))

    def _transversals(self, f: int) -> int:
        if f == EMPTY:
            return UNIT
        if f == UNIT:
            return EMPTY
        cache = self._cache("transversals")
        r = cache.get(f)
        if r is None:
            lo, hi = self._lo[f], self._hi[f]
            without = self._transversals(self.union(lo, hi))
            with_v = self.nonsup(self._transversals(lo), without)
            r = self._mk(self._var[f], without, with_v)
            cache[f] = r
            self._note_entry()
        return r

    def _consistent(self, f: int) -> int:
        # drop sets holding both literals of one proposition
        if f <= UNIT:
            return f
        cache = self._cache("consistent")
        r = cache.get(f)
        if r is None:
            v = self._var[f]
            hi = self._hi[f]
            if not v & 1:
                hi = self.subset0(hi, v + 1)
            r = self._mk(v, self._consistent(self._lo[f]), self._consistent(hi))
            cache[f] = r
            self._note_entry()
        return r

    def complement(self, z: int) -> int:
        """Replace every literal by its negation, set by set."""
        if z <= UNIT:
            return z
        cache = self._cache("complement")
        r = cache.get(z)
        if r is not None:
            return r
        var, lo, hi = self._var, self._lo, self._hi
        v = var[z]
        k2 = v & ~1
        if v == k2:
            with_p, without_p = hi[z], lo[z]
        else:
            with_p, without_p = EMPTY, z
        if var[with_p] == k2 + 1:
            both, pos_only = hi[with_p], lo[with_p]
        else:
            both, pos_only = EMPTY, with_p
        if var[without_p] == k2 + 1:
            neg_only, neither = hi[without_p], lo[without_p]
        else:
            neg_only, neither = EMPTY, without_p
        c = self.complement
        r = self._mk(k2, self._mk(k2 + 1, c(neither), c(pos_only)),
                     self._mk(k2 + 1, c(neg_only), c(both)))
        cache[z] = r
        self._note_entry()
        return r

    def substitute(self, z: int, y: int, g_cnf: int, g_dnf: int) -> int:
        """CNF for ``z`` with ``y`` replaced by the function ``g``.

        ``g_cnf`` and ``g_dnf`` are equivalent CNF/DNF forms of ``g``.  The
        positive occurrences take ``g_cnf``; the negative ones take the
        complemented cubes of ``g_dnf``, which is ``-g`` as a CNF.
        """
        if self.strict and y in self.support(g_cnf) | self.support(g_dnf):
            raise ValueError(f"substituent for {y} mentions {y}")
        pos, neg, absent = self.select(self.minimal(z), y)
        with_g = self._cd(pos, self.minimal(g_cnf))
        with_not_g = self._cd(neg, self.complement(self.minimal(g_dnf)))
        return self.union_sf(self.union_sf(with_g, with_not_g), absent)

    # -- inspection ------------------------------------------------------

    def count(self, z: int) -> int:
        """Number of sets in the family."""
        memo = {EMPTY: 0, UNIT: 1}
        stack = [z]
        lo, hi = self._lo, self._hi
        while stack:
            n = stack[-1]
            if n in memo:
                stack.pop()
                continue
            a, b = lo[n], hi[n]
            if a in memo and b in memo:
                memo[n] = memo[a] + memo[b]
                stack.pop()
            else:
                if a not in memo:
                    stack.append(a)
                if b not in memo:
                    stack.append(b)
        return memo[z]

    def _reachable(self, z: int) -> set[int]:
        seen = {z}
        stack = [z]
        while stack:
            n = stack.pop()
            if n > UNIT:
                for c in (self._lo[n], self._hi[n]):
                    if c not in seen:
                        seen.add(c)
                        stack.append(c)
        return seen

    def size(self, z: int) -> int:
        """Reachable node count, terminals included."""
        return len(self._reachable(z))

    def stats(self, z: int) -> tuple[int, int]:
        return self.count(z), self.size(z)

    def support(self, z: int) -> set[int]:
        """Propositions mentioned by some set of ``z``."""
        return {self.order[self._var[n] >> 1] for n in self._reachable(z) if n > UNIT}

    def is_tautology_free(self, z: int) -> bool:
        var, hi = self._var, self._hi
        for n in self._reachable(z):
            if n > UNIT and not var[n] & 1 and var[hi[n]] == var[n] + 1:
                return False
        return True

    def zero_suppressed(self, z: int) -> bool:
        return all(n <= UNIT or self._hi[n] != EMPTY for n in self._reachable(z))

    def clauses(self, z: int, cap: int | None = None) -> list[tuple[int, ...]]:
        """Materialize the family, ordered lexicographically by variable order."""
        cap = self.enum_cap if cap is None else cap
        if self.count(z) > cap:
            raise CapExceeded(f"family holds more than {cap} sets")
        out: list[tuple[int, ...]] = []
        path: list[int] = []
        lo, hi, var = self._lo, self._hi, self._var

        def walk(n: int) -> None:
            # sets ending here sort before their extensions
            while n > UNIT:
                path.append(var[n])
                walk(hi[n])
                path.pop()
                n = lo[n]
            if n == UNIT:
                out.append(tuple(path))

        walk(z)
        out.sort()
        return [tuple(self.var_literal(v) for v in vs) for vs in out]
