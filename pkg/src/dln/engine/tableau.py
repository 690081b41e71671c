"""Tableau decision procedure for ALC concept inclusions.

Inclusions with an atomic (or atomic-conjunct) left-hand side are absorbed
and unfolded lazily; everything else is internalised as a global constraint
``¬L ⊔ R`` added to every node.  Nodes are explored depth first.  A successor
whose initial label is contained in the completed label of an ancestor is
blocked, which makes the search terminate on cyclic terminologies.

Normality concepts behave as atomic names.
"""

from __future__ import annotations

import sys
from functools import lru_cache

from ..syntax import (
    AND,
    ATOM,
    BOT,
    BOT_K,
    EXISTS,
    FORALL,
    NORM,
    NOT,
    OR,
    TOP,
    TOP_K,
    Concept,
    Exists,
    Forall,
    Not,
    StrongAxiom,
    conj,
    disj,
)

_INF = 1 << 30


@lru_cache(maxsize=None)
def nnf(c: Concept) -> Concept:
    k = c.kind
    if k in (ATOM, NORM, TOP_K, BOT_K):
        return c
    if k == NOT:
        return nnf_neg(c.arg)
    if k == AND:
        return conj(*(nnf(a) for a in c.args))
    if k == OR:
        return disj(*(nnf(a) for a in c.args))
    if k == EXISTS:
        return Exists(c.role, nnf(c.filler))
    if k == FORALL:
        return Forall(c.role, nnf(c.filler))
    raise TypeError(c)


@lru_cache(maxsize=None)
def nnf_neg(c: Concept) -> Concept:
    """NNF of ¬c."""
    k = c.kind
    if k in (ATOM, NORM):
        return Not(c)
    if k == TOP_K:
        return BOT
    if k == BOT_K:
        return TOP
    if k == NOT:
        return nnf(c.arg)
    if k == AND:
        return disj(*(nnf_neg(a) for a in c.args))
    if k == OR:
        return conj(*(nnf_neg(a) for a in c.args))
    if k == EXISTS:
        return Forall(c.role, nnf_neg(c.filler))
    if k == FORALL:
        return Exists(c.role, nnf_neg(c.filler))
    raise TypeError(c)


def _is_name(c: Concept) -> bool:
    return c.kind == ATOM or c.kind == NORM


def _branch_key(c: Concept):
    # negative literals first, then other literals, then complex disjuncts
    if c.kind == NOT:
        return 0
    if _is_name(c):
        return 1
    return 2


class TBox:
    """Absorbed terminology: lazy unfolding table plus global constraints."""

    def __init__(self, axioms=()):
        self.unfold: dict = {}
        self.globals: list = []
        self.axioms: list = []
        for ax in axioms:
            self.add(ax)

    def copy(self) -> "TBox":
        t = TBox()
        t.unfold = {k: list(v) for k, v in self.unfold.items()}
        t.globals = list(self.globals)
        t.axioms = list(self.axioms)
        return t

    def add(self, ax: StrongAxiom) -> None:
        self.axioms.append(ax)
        lhs, rhs = ax.lhs, ax.rhs
        if lhs.kind == BOT_K or rhs.kind == TOP_K:
            return
        if lhs.kind == OR:
            for d in lhs.args:
                self.add(StrongAxiom(d, rhs))
            self.axioms.pop()
            return
        if _is_name(lhs):
            self.unfold.setdefault(lhs, []).append(nnf(rhs))
        elif lhs.kind == TOP_K:
            self._glob(nnf(rhs))
        elif lhs.kind == AND and any(_is_name(a) for a in lhs.args):
            head = next(a for a in lhs.args if _is_name(a))
            rest = [a for a in lhs.args if a != head]
            rest_c = rest[0] if len(rest) == 1 else conj(*rest)
            self.unfold.setdefault(head, []).append(disj(nnf_neg(rest_c), nnf(rhs)))
        else:
            self._glob(disj(nnf_neg(lhs), nnf(rhs)))

    def _glob(self, c: Concept) -> None:
        if c not in self.globals:
            self.globals.append(c)


class Tableau:
    def __init__(self, tbox: TBox):
        self.tbox = tbox
        self.sat_cache: set = set()
        self.unsat_cache: set = set()

    def reset_caches(self, keep_unsat: bool) -> None:
        self.sat_cache = set()
        if not keep_unsat:
            self.unsat_cache = set()

    # -- propositional completion ---------------------------------------

    def _expand(self, state: set, todo: list) -> bool:
        unfold = self.tbox.unfold
        while todo:
            c = todo.pop()
            if c in state:
                continue
            k = c.kind
            if k == BOT_K:
                return False
            if k == TOP_K:
                continue
            if k == ATOM or k == NORM:
                if nnf_neg(c) in state:
                    return False
                state.add(c)
                more = unfold.get(c)
                if more:
                    todo.extend(more)
                continue
            if k == NOT:
                if c.arg in state:
                    return False
            state.add(c)
            if k == AND:
                todo.extend(c.args)
        return True

    def _completions(self, state: set, todo: list):
        if not self._expand(state, todo):
            return
        while True:
            open_or = None
            forced = None
            for c in state:
                if c.kind != OR:
                    continue
                unknown = []
                done = False
                for d in c.args:
                    if d in state:
                        done = True
                        break
                    if d.kind != BOT_K and nnf_neg(d) not in state:
                        unknown.append(d)
                if done:
                    continue
                if not unknown:
                    return
                if len(unknown) == 1:
                    forced = unknown[0]
                    break
                if open_or is None:
                    open_or = unknown
            if forced is not None:
                if not self._expand(state, [forced]):
                    return
                continue
            break
        if open_or is None:
            yield frozenset(state)
            return
        tried = []
        for d in sorted(open_or, key=_branch_key):
            branch = set(state)
            yield from self._completions(branch, [d] + [nnf_neg(t) for t in tried])
            tried.append(d)

    # -- node satisfiability ----------------------------------------------

    def _sat(self, label: frozenset, ancestors: list) -> tuple:
        if label in self.unsat_cache:
            return False, _INF
        if label in self.sat_cache:
            return True, _INF
        depth = len(ancestors)
        glob = self.tbox.globals
        for full in self._completions(set(), list(label)):
            ancestors.append(full)
            ok = True
            dep = _INF
            for ex in full:
                if ex.kind != EXISTS:
                    continue
                child = {ex.filler}
                for f in full:
                    if f.kind == FORALL and f.role == ex.role:
                        child.add(f.filler)
                child.update(glob)
                child = frozenset(child)
                blocker = None
                for i in range(depth, -1, -1):
                    if child <= ancestors[i]:
                        blocker = i
                        break
                if blocker is not None:
                    dep = min(dep, blocker)
                    continue
                res, d = self._sat(child, ancestors)
                if not res:
                    ok = False
                    break
                dep = min(dep, d)
            ancestors.pop()
            if ok:
                if dep >= depth:
                    self.sat_cache.add(label)
                    return True, _INF
                return True, dep
        self.unsat_cache.add(label)
        return False, _INF

    def satisfiable(self, concepts) -> bool:
        label = frozenset(list(concepts) + self.tbox.globals)
        # deep models recurse once per successor level
        limit = sys.getrecursionlimit()
        if limit >= 20000:
            return self._sat(label, [])[0]
        sys.setrecursionlimit(20000)
        try:
            return self._sat(label, [])[0]
        finally:
            sys.setrecursionlimit(limit)

    def subsumes(self, lhs: Concept, rhs: Concept) -> bool:
        """True iff lhs ⊑ rhs follows from the TBox."""
        return not self.satisfiable([nnf(lhs), nnf_neg(rhs)])

    def model_names(self, c: Concept):
        """Names in the root label of some model of c, or None if unsatisfiable.

        A name missing from the returned set is not a subsumer of c.
        """
        label = frozenset([nnf(c)] + self.tbox.globals)
        for full in self._completions(set(), list(label)):
            ancestors = [full]
            ok = True
            for ex in full:
                if ex.kind != EXISTS:
                    continue
                child = {ex.filler}
                child.update(f.filler for f in full if f.kind == FORALL and f.role == ex.role)
                child.update(self.tbox.globals)
                child = frozenset(child)
                if child <= full:
                    continue
                if not self._sat(child, ancestors)[0]:
                    ok = False
                    break
            if ok:
                return {x for x in full if _is_name(x)}
        return None


def classify_tableau(axioms) -> set:
    from ..syntax import signature_of

    tab = Tableau(TBox(axioms))
    names = set()
    for ax in axioms:
        names |= signature_of(ax).concepts
    out = set()
    for n in names:
        a = _name_concept(n)
        model = tab.model_names(a)
        if model is None:
            out.add((n, "Bot"))
            out.update((n, m) for m in names)
            continue
        out.add((n, n))
        for m in model:
            if m.text != n and m.text in names and tab.subsumes(a, m):
                out.add((n, m.text))
    return out


def _name_concept(n: str) -> Concept:
    from ..parser import parse_concept

    return parse_concept(n)
