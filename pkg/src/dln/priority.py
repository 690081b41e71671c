"""Priority relations over defeasible inclusions.

Two relations are supported.  *Specificity* prefers a DI whose premise is
strictly subsumed, under the strong axioms alone, by the other's premise.
*Rank* orders DIs by an exceptionality ranking computed from the sequence
E_0 ⊇ E_1 ⊇ ... where E_0 holds the classical counterparts of all DIs and
E_{i+1} keeps those whose premise is unsatisfiable w.r.t. S ∪ E_i.

``prec(a, b)`` means DI ``a`` has strictly higher priority than DI ``b``.
"""

from __future__ import annotations

import heapq
import math
import random
from typing import Iterable

from .engine import ClassicalAxiomSet, Metrics, choose_backend, entails, open_session
from .engine import el as _el
from .syntax import BOT, KnowledgeBase, Query

INF = math.inf


def strong_set(kb: KnowledgeBase) -> ClassicalAxiomSet:
    s = kb.cache.get("strong")
    if s is None:
        s = kb.cache["strong"] = ClassicalAxiomSet(kb.strong)
    return s


# --- rank --------------------------------------------------------------------


def rank_sequence(kb: KnowledgeBase, metrics: Metrics | None = None):
    """Yield (i, ids in E_i) for the exceptionality sequence, ending at its fixpoint."""
    strong = strong_set(kb)
    backend = choose_backend(list(strong) + [d.material for d in kb.defeasible])
    current = [d for d in kb.defeasible]
    i = 0
    while True:
        yield i, frozenset(d.id for d in current)
        if not current:
            return
        base = ClassicalAxiomSet([d.material for d in current], parent=strong)
        s = open_session(base, backend, metrics)
        nxt = [d for d in current if s.check(Query(d.pre, BOT))]
        if len(nxt) == len(current):
            return
        current = nxt
        i += 1


def compute_rank(kb: KnowledgeBase, metrics: Metrics | None = None) -> dict:
    """Map DI id to its rank; DIs that never leave the sequence get ``inf``."""
    rank = {}
    prev = None
    last = frozenset()
    for i, ids in rank_sequence(kb, metrics):
        if prev is not None:
            for d in prev - ids:
                rank[d] = i - 1
        prev = ids
        last = ids
    for d in last:
        rank[d] = INF
    # the last step may have left E unchanged: survivors are exactly ``last``
    return rank


def prec_rank(r: dict, d1: int, d2: int) -> bool:
    return r[d1] > r[d2]


# --- specificity ---------------------------------------------------------------


def prec_specificity(strong, d1, d2) -> bool:
    """pre(d1) strictly subsumed by pre(d2) under the strong axioms."""
    if d1.pre == d2.pre:
        return False
    axioms = ClassicalAxiomSet(strong)
    return entails(axioms, Query(d1.pre, d2.pre)) and not entails(axioms, Query(d2.pre, d1.pre))


def _premise_order_el(strong: ClassicalAxiomSet, premises: list) -> dict:
    """For each premise, the set of premises that subsume it (EL back-end)."""
    s = open_session(strong, "el")
    plans = {}
    for p in premises:
        ctx, target, defs = _el.query_plan(p, p)
        if defs:
            s._sat.add_nfs(defs)
        plans[p] = (ctx, target)
    by_target: dict = {}
    for p, (_, target) in plans.items():
        by_target.setdefault(target, []).append(p)
    sups = {}
    for p, (ctx, _) in plans.items():
        subs = s._sat.subsumers(ctx)
        if _el.BOT_E in subs:
            sups[p] = set(premises)
        elif len(subs) < len(by_target):
            sups[p] = {q for e in subs for q in by_target.get(e, ())}
        else:
            sups[p] = {q for e, qs in by_target.items() if e in subs for q in qs}
        sups[p].add(p)
    return sups


def _premise_order_generic(strong: ClassicalAxiomSet, premises: list) -> dict:
    s = open_session(strong, choose_backend(strong, [Query(p, q) for p in premises for q in premises]))
    return {p: {q for q in premises if p == q or s.check(Query(p, q))} for p in premises}


class PriorityRelation:
    kind = ""

    def __init__(self, ids: Iterable[int]):
        self.ids = frozenset(ids)

    def prec(self, d1: int, d2: int) -> bool:
        raise NotImplementedError

    def above(self, d: int, among: Iterable[int]) -> set:
        """Members of ``among`` with strictly higher priority than ``d``."""
        return {x for x in among if self.prec(x, d)}

    def restrict(self, ids) -> "PriorityRelation":
        raise NotImplementedError

    def linearize(self, dis, seed: int = 0) -> list:
        raise NotImplementedError


class RankPriority(PriorityRelation):
    kind = "rank"

    def __init__(self, rank: dict):
        super().__init__(rank)
        self.rank = dict(rank)

    def prec(self, d1, d2):
        return self.rank[d1] > self.rank[d2]

    def above(self, d, among):
        r = self.rank[d]
        rank = self.rank
        return {x for x in among if rank[x] > r}

    def restrict(self, ids):
        return RankPriority({i: self.rank[i] for i in ids})

    def linearize(self, dis, seed=0):
        rng = random.Random(seed)
        keyed = [(-self.rank[d.id], rng.random(), d.id, d) for d in dis]
        keyed.sort(key=lambda t: t[:3])
        return [t[3] for t in keyed]


class SpecificityPriority(PriorityRelation):
    kind = "spec"

    def __init__(self, preds: dict):
        """``preds[d]`` is the set of DI ids strictly preceding ``d``."""
        super().__init__(preds)
        self.preds = {k: frozenset(v) for k, v in preds.items()}

    @classmethod
    def from_kb(cls, kb: KnowledgeBase) -> "SpecificityPriority":
        strong = strong_set(kb)
        premises = list(dict.fromkeys(d.pre for d in kb.defeasible))
        if not premises:
            return cls({})
        try:
            if not strong.is_el():
                raise _el.NotEL("strong axioms")
            sups = _premise_order_el(strong, premises)
        except _el.NotEL:
            sups = _premise_order_generic(strong, premises)
        by_pre: dict = {}
        for d in kb.defeasible:
            by_pre.setdefault(d.pre, []).append(d.id)
        # lower[q] = premises strictly more specific than q
        lower: dict = {p: set() for p in premises}
        for p in premises:
            for q in sups[p]:
                if q != p and p not in sups[q]:
                    lower[q].add(p)
        preds = {}
        for d in kb.defeasible:
            preds[d.id] = {i for p in lower[d.pre] for i in by_pre[p]}
        return cls(preds)

    def prec(self, d1, d2):
        return d1 in self.preds[d2]

    def above(self, d, among):
        p = self.preds[d]
        if not isinstance(among, (set, frozenset, dict)):
            among = set(among)
        if len(p) < len(among):
            return {x for x in p if x in among}
        return {x for x in among if x in p}

    def restrict(self, ids):
        ids = frozenset(ids)
        return SpecificityPriority({i: self.preds[i] & ids for i in ids})

    def linearize(self, dis, seed=0):
        rng = random.Random(seed)
        members = {d.id: d for d in dis}
        key = {i: rng.random() for i in members}
        indeg = {i: 0 for i in members}
        succ: dict = {i: [] for i in members}
        for i in members:
            for j in self.preds[i]:
                if j in members:
                    indeg[i] += 1
                    succ[j].append(i)
        heap = [(key[i], i) for i in members if indeg[i] == 0]
        heapq.heapify(heap)
        out = []
        while heap:
            _, i = heapq.heappop(heap)
            out.append(members[i])
            for j in succ[i]:
                indeg[j] -= 1
                if indeg[j] == 0:
                    heapq.heappush(heap, (key[j], j))
        if len(out) != len(members):
            raise ValueError("priority relation has a cycle")
        return out


def priority_for(kb: KnowledgeBase, kind: str, metrics: Metrics | None = None) -> PriorityRelation:
    """Priority relation of ``kb`` (memoised on the KB)."""
    key = ("priority", kind)
    p = kb.cache.get(key)
    if p is None:
        if kind in ("spec", "specificity"):
            p = SpecificityPriority.from_kb(kb)
        elif kind == "rank":
            p = RankPriority(compute_rank(kb, metrics))
        else:
            raise ValueError(f"unknown priority {kind!r}")
        kb.cache[key] = p
    return p


def linearize(dis, p: PriorityRelation, seed: int = 0) -> list:
    return p.linearize(dis, seed)
