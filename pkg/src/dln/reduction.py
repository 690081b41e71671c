"""Translation of a DL^N knowledge base into a classical one.

For every normality concept N C in Σ and every DI δ, the translation
``N C ⊓ pre(δ) ⊑ con(δ)`` is kept unless, together with the already kept
translations of strictly higher-priority DIs, it makes N C unsatisfiable.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .engine import ClassicalAxiomSet, Metrics, ReasonerSession, choose_backend, open_session, session_check
from .priority import PriorityRelation, strong_set
from .syntax import BOT, DefeasibleInclusion, KnowledgeBase, Norm, Query, StrongAxiom, conj, sorted_sigma


@dataclass(frozen=True)
class TranslatedDI:
    origin: int
    nc: Norm
    axiom: StrongAxiom

    def __str__(self):
        return str(self.axiom)


def translate_di(d: DefeasibleInclusion, nc: Norm) -> TranslatedDI:
    return TranslatedDI(d.id, nc, StrongAxiom(conj(nc, d.pre), d.con))


def filter_below(current, d: DefeasibleInclusion, p: PriorityRelation) -> set:
    """Translations whose origin DI strictly precedes ``d``."""
    return {t for t in current if p.prec(t.origin, d.id)}


def normality_axioms(sigma) -> list:
    """The axioms N C ⊑ C for each N C in sigma."""
    return [StrongAxiom(nc, nc.arg) for nc in sorted_sigma(sigma)]


def kb_zero(kb: KnowledgeBase, sigma) -> ClassicalAxiomSet:
    return ClassicalAxiomSet(normality_axioms(sigma), parent=strong_set(kb))


def unsat_query(nc: Norm) -> Query:
    return Query(nc, BOT)


@dataclass
class KBSigma:
    base: ClassicalAxiomSet
    kept: frozenset
    overridden: frozenset
    order: tuple = ()
    session: ReasonerSession | None = field(default=None, repr=False, compare=False)

    @property
    def axioms(self) -> frozenset:
        return self.base.axioms | {t.axiom for t in self.kept}

    def kept_pairs(self) -> frozenset:
        return frozenset((t.origin, t.nc) for t in self.kept)


def backend_for(kb: KnowledgeBase, sigma, queries=()) -> str:
    # a translation is EL exactly when the DI's classical counterpart is
    kb_backend = kb.cache.get("backend")
    if kb_backend is None:
        axioms = list(kb.strong) + [d.material for d in kb.defeasible]
        kb_backend = kb.cache["backend"] = choose_backend(axioms)
    if kb_backend != "el":
        return kb_backend
    return choose_backend(normality_axioms(sigma), queries)


def build_kb_sigma(
    kb: KnowledgeBase,
    sigma,
    p: PriorityRelation,
    seed: int = 0,
    metrics: Metrics | None = None,
    backend: str | None = None,
    queries=(),
) -> KBSigma:
    m = metrics if metrics is not None else Metrics()
    ncs = sorted_sigma(sigma)
    base = kb_zero(kb, ncs)
    if backend is None:
        backend = backend_for(kb, ncs, queries)
    s = open_session(base, backend, m)
    order = p.linearize(kb.defeasible, seed)
    kept_by_di: dict = {}
    kept = []
    overridden = []
    for d in order:
        below = p.above(d.id, kept_by_di)
        filtered = [ax for i in below for ax in kept_by_di[i]]
        step = []
        for nc in ncs:
            t = translate_di(d, nc)
            if session_check(s, filtered + [t.axiom], unsat_query(nc)):
                overridden.append((d.id, nc))
            else:
                step.append(t)
        if step:
            kept_by_di[d.id] = [t.axiom for t in step]
            kept.extend(step)
    return KBSigma(base, frozenset(kept), frozenset(overridden), tuple(d.id for d in order), s)


def answer(ks: KBSigma, q: Query, metrics: Metrics | None = None, backend: str | None = None) -> bool:
    """Classical entailment of q from the translated KB, reusing its session when possible."""
    s = ks.session
    if s is None:
        s = open_session(ks.base, backend or choose_backend(list(ks.axioms), [q]), metrics)
    return session_check(s, [t.axiom for t in ks.kept], q)
