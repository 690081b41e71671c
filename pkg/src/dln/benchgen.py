"""Synthetic GO-like ontologies with defeasible inclusions.

The base ontology is a rooted DAG of atomic inclusions over names
``C0 .. Cn-1`` (every node below the root has an earlier parent, plus some
extra edges to earlier nodes) together with a minority of existential
axioms over a handful of roles.  On top of it :func:`apply_rates` turns
strong axioms into DIs (or adds synthetic DIs), sprinkles disjointness
between siblings and optionally injects normality concepts under
existentials in DI conclusions.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, replace

from .engine.el import Saturation, compile_axioms, intern, is_el_axiom
from .syntax import (
    BOT,
    EXISTS,
    Atom,
    DefeasibleInclusion,
    Exists,
    KnowledgeBase,
    Norm,
    Not,
    Query,
    StrongAxiom,
    conj,
    signature_of,
)

log = logging.getLogger(__name__)

ATOMIC_SHARE = 0.85


@dataclass(frozen=True)
class GenConfig:
    base_axioms: int = 1000
    base_concepts: int = 0  # 0 means 70% of base_axioms
    ci_rate: float = 0.0
    synth_rate: float = 0.0
    da_rate: float = 0.0
    n_inject: int = 0
    roles: int = 8
    seed: int = 0

    def __post_init__(self):
        for name in ("ci_rate", "synth_rate", "da_rate"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {v}")
        if self.ci_rate and self.synth_rate:
            raise ValueError("a suite uses either ci_rate or synth_rate, not both")

    @property
    def concepts(self) -> int:
        return self.base_concepts or max(2, int(self.base_axioms * 0.7))

    @property
    def suite(self) -> str:
        return "synth" if self.synth_rate else "ci"


def _name(i: int) -> Atom:
    return Atom(f"C{i}")


def gen_base(cfg: GenConfig, seed: int | None = None) -> KnowledgeBase:
    """Classical EL ontology with exactly ``cfg.base_axioms`` strong axioms."""
    rng = random.Random(cfg.seed if seed is None else seed)
    n = cfg.concepts
    total = cfg.base_axioms
    n_atomic = max(min(total, n - 1), int(round(total * ATOMIC_SHARE)))
    n_atomic = min(n_atomic, total)
    roles = [f"R{i}" for i in range(max(1, cfg.roles))]
    axioms: dict = {}
    parent = [0] * n
    for i in range(1, n):
        if len(axioms) >= n_atomic:
            break
        j = rng.randrange(i)
        parent[i] = j
        axioms[StrongAxiom(_name(i), _name(j))] = None
    tries = 0
    while len(axioms) < n_atomic and tries < 50 * total:
        tries += 1
        i = rng.randrange(1, n)
        j = rng.randrange(i)
        axioms.setdefault(StrongAxiom(_name(i), _name(j)), None)
    children: dict = {}
    for i in range(1, n):
        children.setdefault(parent[i], []).append(i)
    k = 0
    while len(axioms) < total:
        # existential fillers are taken from the neighbourhood of the subject,
        # as part-of style relations in GO mostly link related terms
        a = rng.randrange(n)
        b = _near(a, parent, children, rng)
        r = rng.choice(roles)
        if k % 2 == 0:
            ax = StrongAxiom(_name(a), Exists(r, _name(b)))
        else:
            ax = StrongAxiom(Exists(r, _name(a)), _name(b))
        if ax not in axioms:
            axioms[ax] = None
            k += 1
    kb = KnowledgeBase(tuple(axioms), ())
    kb.cache["parent"] = parent
    return kb


def _near(a: int, parent: list, children: dict, rng: random.Random) -> int:
    """A cousin-like node: up to two steps up from ``a``, then down again."""
    x = a
    for _ in range(rng.randint(1, 2)):
        x = parent[x]
    for _ in range(rng.randint(0, 2)):
        kids = children.get(x)
        if not kids:
            break
        x = rng.choice(kids)
    return x


def _siblings(parent: list, rng: random.Random, count: int) -> list:
    children: dict = {}
    for i, p in enumerate(parent):
        if i:
            children.setdefault(p, []).append(i)
    groups = [c for c in children.values() if len(c) > 1]
    pairs = []
    if not groups:
        return pairs
    for _ in range(count):
        g = rng.choice(groups)
        a, b = rng.sample(g, 2)
        pairs.append((min(a, b), max(a, b)))
    return pairs


def _descendants(strong) -> dict:
    """Map each name to the named concepts it subsumes (EL classification)."""
    sat = Saturation(compile_axioms(frozenset(strong)))
    names = set()
    for ax in strong:
        names |= signature_of(ax).concepts
    ents = {intern(n): n for n in names}
    desc: dict = {}
    for n in names:
        for e in sat.subsumers(intern(n)):
            m = ents.get(e)
            if m is not None:
                desc.setdefault(m, set()).add(n)
    return desc


def apply_rates(base: KnowledgeBase, cfg: GenConfig, seed: int | None = None) -> KnowledgeBase:
    rng = random.Random((cfg.seed if seed is None else seed) * 7919 + 17)
    strong = list(base.strong)
    size = len(strong)
    dis: list = []
    if cfg.ci_rate:
        k = int(cfg.ci_rate * size)
        chosen = set(rng.sample(range(size), k))
        dis = [(strong[i].lhs, strong[i].rhs) for i in sorted(chosen)]
        strong = [ax for i, ax in enumerate(strong) if i not in chosen]
    elif cfg.synth_rate:
        n = cfg.concepts
        roles = [f"R{i}" for i in range(max(1, cfg.roles))]
        for _ in range(int(cfg.synth_rate * size)):
            a, b = _name(rng.randrange(n)), _name(rng.randrange(n))
            shape = rng.randrange(3)
            con = b if shape == 0 else Not(b) if shape == 1 else Exists(rng.choice(roles), b)
            dis.append((a, con))
    if not dis:
        log.warning("configuration produced no DIs")

    n_da = int(cfg.da_rate * size)
    if n_da:
        parent = base.cache.get("parent")
        if parent is None:
            parent = [0] * cfg.concepts
        desc = _descendants(strong)
        seen = set()
        for a, b in _siblings(parent, rng, 20 * n_da):
            if len(seen) >= n_da:
                break
            if (a, b) in seen:
                continue
            na, nb = f"C{a}", f"C{b}"
            if desc.get(na, set()) & desc.get(nb, set()):
                continue
            seen.add((a, b))
            strong.append(StrongAxiom(conj(_name(a), _name(b)), BOT))
        if len(seen) < n_da:
            log.warning("only %d of %d disjointness axioms placed", len(seen), n_da)

    if cfg.n_inject:
        dis = _inject(dis, cfg.n_inject, rng)
    return KnowledgeBase(tuple(strong), tuple(DefeasibleInclusion(i, p, c) for i, (p, c) in enumerate(dis)))


def _inject(dis: list, count: int, rng: random.Random) -> list:
    """Rewrite ∃R.C into ∃R.N(C) in DI conclusions, using distinct C."""
    slots: dict = {}
    for i, (_, con) in enumerate(dis):
        if con.kind == EXISTS and not con.filler.has_norm():
            slots.setdefault(con.filler, []).append(i)
    fillers = sorted(slots, key=str)
    rng.shuffle(fillers)
    picked = fillers[:count]
    if len(picked) < count:
        log.warning("only %d distinct existential fillers available for %d injections", len(picked), count)
    out = list(dis)
    for c in picked:
        i = rng.choice(slots[c])
        pre, con = out[i]
        out[i] = (pre, Exists(con.role, Norm(con.filler)))
    return out


def _named_subsumers(axioms, sources, names) -> dict:
    sat = Saturation(compile_axioms(frozenset(axioms)))
    ents = {intern(n): n for n in names}
    return {a: sorted(ents[e] for e in sat.subsumers(intern(a)) if e in ents and ents[e] != a) for a in sources}


def sample_queries(kb: KnowledgeBase, n: int, seed: int = 0) -> list:
    """Queries N(A) ⊑ B with A from DI premises.

    B is, with even odds, a classical subsumer of A (strong axioms plus the
    DIs read classically) or a name from some DI conclusion, so that a fair
    share of queries is entailed and another share is blocked by overriding.
    """
    rng = random.Random(seed * 104729 + 3)
    pre_names = sorted({x for d in kb.defeasible for x in signature_of(d.pre).concepts})
    con_names = sorted({x for d in kb.defeasible for x in signature_of(d.con).concepts if not x.startswith("N(")})
    if not pre_names:
        names = sorted(x for x in signature_of(kb).concepts if not x.startswith("N("))
        pre_names = con_names = names or ["C0"]
    if not con_names:
        con_names = pre_names
    axioms = list(kb.strong) + [d.material for d in kb.defeasible]
    ups: dict = {}
    if all(is_el_axiom(a) for a in axioms):
        names = sorted(x for x in signature_of(kb).concepts if not x.startswith("N("))
        ups = _named_subsumers(axioms, pre_names, names)
    out: dict = {}
    limit = len(pre_names) * max(len(con_names), 1)
    tries = 0
    while len(out) < min(n, limit) and tries < 100 * n:
        tries += 1
        a = rng.choice(pre_names)
        cands = ups.get(a)
        b = rng.choice(cands) if cands and rng.random() < 0.5 else rng.choice(con_names)
        out.setdefault(Query(Norm(Atom(a)), Atom(b)), None)
    return list(out)


def config_for(cfg: GenConfig, **changes) -> GenConfig:
    return replace(cfg, **changes)
