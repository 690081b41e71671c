"""Small random knowledge bases for the property and acceptance tests.

The shapes are chosen to produce plenty of DI conflicts: conclusions are
often negated names and the strong part has disjointness axioms.
"""

from __future__ import annotations

import random

from dln.syntax import (
    ATOM,
    BOT,
    TOP,
    Atom,
    DefeasibleInclusion,
    Exists,
    Forall,
    KnowledgeBase,
    Norm,
    Not,
    Query,
    StrongAxiom,
    conj,
    disj,
)


def names(k: int) -> list:
    return [Atom(f"A{i}") for i in range(k)]


ROLES = ["r", "s"]


def el_concept(rng: random.Random, ns: list, depth: int = 1):
    x = rng.random()
    if depth > 0 and x < 0.2:
        return Exists(rng.choice(ROLES), el_concept(rng, ns, depth - 1))
    if depth > 0 and x < 0.3:
        return conj(rng.choice(ns), rng.choice(ns))
    if x < 0.32:
        return TOP
    return rng.choice(ns)


def alc_concept(rng: random.Random, ns: list, depth: int = 2):
    x = rng.random()
    if depth <= 0 or x < 0.4:
        a = rng.choice(ns)
        return Not(a) if rng.random() < 0.3 else a
    sub = lambda: alc_concept(rng, ns, depth - 1)  # noqa: E731
    if x < 0.55:
        return conj(sub(), sub())
    if x < 0.7:
        return disj(sub(), sub())
    if x < 0.85:
        return Exists(rng.choice(ROLES), sub())
    return Forall(rng.choice(ROLES), sub())


def el_axiom(rng: random.Random, ns: list) -> StrongAxiom:
    x = rng.random()
    a, b = rng.sample(ns, 2)
    if x < 0.45:
        return StrongAxiom(a, b)
    if x < 0.55:
        return StrongAxiom(conj(a, b), BOT)
    if x < 0.7:
        return StrongAxiom(a, Exists(rng.choice(ROLES), b))
    if x < 0.85:
        return StrongAxiom(Exists(rng.choice(ROLES), a), b)
    return StrongAxiom(conj(a, rng.choice(ns)), b)


def el_tbox(rng: random.Random, n_names: int, n_axioms: int) -> list:
    ns = names(n_names)
    out = []
    for _ in range(n_axioms):
        out.append(el_axiom(rng, ns))
    return list(dict.fromkeys(out))


def di_conclusion(rng: random.Random, ns: list):
    x = rng.random()
    b = rng.choice(ns)
    if x < 0.4:
        return b
    if x < 0.75:
        return Not(b)
    if x < 0.9:
        return Exists(rng.choice(ROLES), b)
    return conj(b, rng.choice(ns))


def random_kb(
    rng: random.Random,
    n_names: int = 8,
    n_strong: int = 10,
    n_dis: int = 6,
    inject: int = 0,
    alc: bool = False,
) -> KnowledgeBase:
    """Random DL^N KB.  ``inject`` DIs get a conclusion ``some r . N(B)``."""
    ns = names(n_names)
    strong = []
    for _ in range(n_strong):
        if alc and rng.random() < 0.3:
            strong.append(StrongAxiom(alc_concept(rng, ns, 1), alc_concept(rng, ns, 1)))
        else:
            strong.append(el_axiom(rng, ns))
    dis = []
    for i in range(n_dis):
        pre = rng.choice(ns) if rng.random() < 0.8 else conj(*rng.sample(ns, 2))
        con = di_conclusion(rng, ns)
        dis.append(DefeasibleInclusion(i, pre, con))
    for _ in range(min(inject, n_dis)):
        d = dis[rng.randrange(n_dis)]
        dis[d.id] = DefeasibleInclusion(d.id, d.pre, Exists(rng.choice(ROLES), Norm(rng.choice(ns))))
    return KnowledgeBase(tuple(dict.fromkeys(strong)), tuple(dis))


def random_queries(rng: random.Random, kb: KnowledgeBase, n: int) -> list:
    """Queries over the KB's names: N(A) ⊑ B, N(A) ⊑ ¬B, N(A) ⊑ ⊥, N(A) ⊑ ∃r.B."""
    ns = sorted({d.pre for d in kb.defeasible if d.pre.kind == ATOM} | set(names(4)), key=str)
    pool = names(max(4, len(ns)))
    out = []
    for _ in range(n):
        a = rng.choice(ns)
        b = rng.choice(pool)
        x = rng.random()
        if x < 0.45:
            rhs = b
        elif x < 0.65:
            rhs = Not(b)
        elif x < 0.8:
            rhs = BOT
        else:
            rhs = Exists(rng.choice(ROLES), b)
        out.append(Query(Norm(a), rhs))
    return out
