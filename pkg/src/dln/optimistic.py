"""Two-phase optimistic construction of a classical KB equivalent to the
translated one.

Phase 1 walks the linearisation once with a single growing session and does
not filter by priority, so no axiom is ever retracted except the candidate
that just failed (rolled back through an undo point).  Phase 2 revisits the
discarded translations with the priority filter to tell genuine overriding
apart from same-priority conflicts.  The result is only guaranteed to be
equivalent when the KB has no normality concepts of its own (or |Σ| ≤ 1).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .engine import ClassicalAxiomSet, Metrics, ReasonerSession, open_session, session_check
from .priority import PriorityRelation
from .reduction import TranslatedDI, backend_for, kb_zero, translate_di, unsat_query
from .syntax import BOT, KnowledgeBase, StrongAxiom, sorted_sigma


class GuardError(ValueError):
    """The optimistic method is not applicable to this KB and Σ."""


@dataclass(frozen=True)
class NFreeGuard:
    is_n_free: bool
    sigma_size: int

    @property
    def ok(self) -> bool:
        return self.is_n_free or self.sigma_size <= 1

    @classmethod
    def of(cls, kb: KnowledgeBase, sigma) -> "NFreeGuard":
        return cls(kb.is_n_free(), len(sigma))


@dataclass
class OptimisticState:
    pi: list = field(default_factory=list)
    delta: list = field(default_factory=list)
    bottoms: list = field(default_factory=list)
    base: ClassicalAxiomSet | None = None
    session: ReasonerSession | None = field(default=None, repr=False)

    @property
    def kb_star(self) -> frozenset:
        return self.base.axioms | {t.axiom for t in self.pi} | {StrongAxiom(nc, BOT) for nc in self.bottoms}

    @property
    def additions(self) -> list:
        return [t.axiom for t in self.pi] + [StrongAxiom(nc, BOT) for nc in self.bottoms]


def optimistic_kb_star(
    kb: KnowledgeBase,
    sigma,
    p: PriorityRelation,
    seed: int = 0,
    metrics: Metrics | None = None,
    backend: str | None = None,
    queries=(),
    check_guard: bool = True,
) -> OptimisticState:
    m = metrics if metrics is not None else Metrics()
    ncs = sorted_sigma(sigma)
    if check_guard and not NFreeGuard.of(kb, ncs).ok:
        raise GuardError("optimistic method needs an N-free KB or a single normality concept")
    base = kb_zero(kb, ncs)
    if backend is None:
        backend = backend_for(kb, ncs, queries)
    st = OptimisticState(base=base)

    # Phase 1: unfiltered, monotone
    s = open_session(base, backend, m)
    st.session = s
    order = p.linearize(kb.defeasible, seed)
    for d in order:
        for nc in ncs:
            t = translate_di(d, nc)
            s.push()
            s.add([t.axiom])
            m.phase1_checks += 1
            if s.check(unsat_query(nc)):
                s.pop()
                st.delta.append(t)
            else:
                s.commit()
                st.pi.append(t)
    if not st.delta:
        return st

    # Phase 2: filtered re-tests of the discarded translations
    pi_by_di: dict = {}
    for t in st.pi:
        pi_by_di.setdefault(t.origin, []).append(t.axiom)
    s2 = open_session(base, backend, m)
    delta = list(st.delta)

    def consistent(t: TranslatedDI) -> bool:
        above = p.above(t.origin, pi_by_di)
        filtered = [ax for i in above for ax in pi_by_di[i]]
        m.phase2_checks += 1
        return not session_check(s2, filtered + [t.axiom], unsat_query(t.nc))

    def purge(nc) -> None:
        delta[:] = [x for x in delta if x.nc != nc]

    while delta:
        t = delta.pop(0)
        if consistent(t):
            st.bottoms.append(t.nc)
            purge(t.nc)
            continue
        # t is genuinely overridden
        cursor = t.origin
        while True:
            j = next((k for k, x in enumerate(delta) if p.prec(cursor, x.origin)), None)
            if j is None:
                break
            tj = delta.pop(j)
            if consistent(tj):
                st.bottoms.append(tj.nc)
                purge(tj.nc)
                cursor = tj.origin
    if st.bottoms:
        s.add([StrongAxiom(nc, BOT) for nc in st.bottoms])
    return st
