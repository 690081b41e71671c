"""Top-level DL^N query answering with the four construction strategies."""

from __future__ import annotations

import time
from dataclasses import dataclass

from .engine import Metrics, open_session, session_check
from .modularity import mod_pipeline
from .optimistic import GuardError, NFreeGuard, optimistic_kb_star
from .priority import PriorityRelation, priority_for
from .reduction import backend_for, build_kb_sigma
from .syntax import KnowledgeBase, Query, collect_sigma

STRATEGIES = ("naive", "opt", "mod", "modopt")


@dataclass
class Result:
    entailed: bool
    metrics: Metrics
    strategy: str


def _naive(kb, sigma, q, p, seed, m):
    backend = backend_for(kb, sigma, [q])
    ks = build_kb_sigma(kb, sigma, p, seed, m, backend)
    return session_check(ks.session, [t.axiom for t in ks.kept], q)


def _opt(kb, sigma, q, p, seed, m):
    backend = backend_for(kb, sigma, [q])
    st = optimistic_kb_star(kb, sigma, p, seed, m, backend, check_guard=False)
    return st.session.check(q)


def dln_entails(
    kb: KnowledgeBase,
    q: Query,
    p: PriorityRelation | str = "spec",
    strategy: str = "naive",
    seed: int = 0,
    guard: str = "fallback",
    metrics: Metrics | None = None,
    timeout: float | None = None,
) -> Result:
    """Does ``kb`` entail ``q`` under the priority ``p``?

    ``guard`` decides what happens when the optimistic method is not
    applicable: ``"fallback"`` uses the naive construction instead, while
    ``"refuse"`` raises :class:`GuardError`.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    if isinstance(p, str):
        p = priority_for(kb, p)
    m = metrics if metrics is not None else Metrics()
    t0 = time.perf_counter()
    if timeout is not None:
        m.deadline = t0 + timeout
    sigma = collect_sigma(kb, q)
    try:
        target = kb
        prio = p
        if strategy in ("mod", "modopt"):
            target, module = mod_pipeline(kb, q)
            m.module_size = len(target)
            prio = p.restrict(d.id for d in target.defeasible)
        else:
            m.module_size = len(kb)
        if strategy in ("naive", "mod"):
            ans = _naive(target, sigma, q, prio, seed, m)
        else:
            if NFreeGuard.of(target, sigma).ok:
                ans = _opt(target, sigma, q, prio, seed, m)
            elif guard == "refuse":
                raise GuardError(
                    f"{strategy}: KB still mentions {len(target.norm_concepts())} normality "
                    f"concept(s) and |Σ| = {len(sigma)}; the optimistic method is not applicable"
                )
            else:
                m.fallback = True
                ans = _naive(target, sigma, q, prio, seed, m)
    finally:
        m.wall_ms = (time.perf_counter() - t0) * 1000.0
        m.deadline = None
    return Result(ans, m, strategy)
