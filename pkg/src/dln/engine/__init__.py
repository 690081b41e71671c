"""Classical entailment with incremental reasoning sessions.

A session answers subsumption queries over ``base ∪ additions``.  Monotone
additions are folded into the live state; anything that needs an axiom to be
retracted discards the derived state and counts as a rebuild.  Speculative
additions can instead be journalled with :meth:`ReasonerSession.push` and
rolled back with :meth:`ReasonerSession.pop`, which does not count as a
rebuild.

Two back-ends are available: the EL⊥ completion reasoner (``"el"``) and an
ALC tableau (``"tableau"``).  ``"auto"`` picks EL whenever everything the
session will see normalises.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from ..syntax import Query, StrongAxiom
from . import el as _el
from .el import NotEL
from .tableau import TBox, Tableau, classify_tableau

__all__ = [
    "ClassicalAxiomSet",
    "Metrics",
    "NotEL",
    "ReasonerSession",
    "Timeout",
    "choose_backend",
    "classify",
    "entails",
    "open_session",
    "session_check",
]


class Timeout(RuntimeError):
    pass


@dataclass
class Metrics:
    checks: int = 0
    rebuilds: int = 0
    phase1_checks: int = 0
    phase2_checks: int = 0
    module_size: int = -1
    wall_ms: float = 0.0
    fallback: bool = False
    deadline: float | None = field(default=None, repr=False)

    def tick(self) -> None:
        self.checks += 1
        if self.deadline is not None and time.perf_counter() > self.deadline:
            raise Timeout("deadline exceeded")


class ClassicalAxiomSet:
    """Immutable set of strong axioms (normality concepts are plain names here).

    ``parent`` lets a set extend a larger shared set; the EL back-end then
    reuses the parent's compiled index and only indexes the difference.
    """

    __slots__ = ("axioms", "parent", "own")

    def __init__(self, axioms=(), parent: "ClassicalAxiomSet | None" = None):
        own = tuple(dict.fromkeys(axioms))
        self.parent = parent
        if parent is not None:
            own = tuple(a for a in own if a not in parent.axioms)
            self.axioms = parent.axioms | frozenset(own)
        else:
            self.axioms = frozenset(own)
        self.own = own

    def __iter__(self):
        return iter(self.axioms)

    def __len__(self):
        return len(self.axioms)

    def __contains__(self, ax):
        return ax in self.axioms

    def is_el(self) -> bool:
        return all(_el.is_el_axiom(a) for a in self.axioms)


def _as_set(axioms) -> ClassicalAxiomSet:
    return axioms if isinstance(axioms, ClassicalAxiomSet) else ClassicalAxiomSet(axioms)


def choose_backend(axioms=(), queries=()) -> str:
    """"el" if every axiom and query fits EL⊥, else "tableau"."""
    for ax in axioms:
        if not _el.is_el_axiom(ax):
            return "tableau"
    for q in queries:
        if not _el.is_el_query(q.lhs, q.rhs):
            return "tableau"
    return "el"


class ReasonerSession:
    def __init__(self, base: ClassicalAxiomSet, backend: str = "auto", metrics: Metrics | None = None):
        self.base = base
        self.metrics = metrics if metrics is not None else Metrics()
        if backend == "auto":
            backend = choose_backend(base)
        if backend not in ("el", "tableau"):
            raise ValueError(f"unknown backend {backend!r}")
        self.backend = backend
        self.additions: dict = {}
        self._marks: list = []
        self._build()

    # -- state management ---------------------------------------------------

    def _build(self) -> None:
        self.metrics.rebuilds += 1
        if self.backend == "el":
            root = self.base.parent or self.base
            if root is self.base:
                index = _el.compile_axioms(self.base.axioms)
                own = ()
            else:
                index = _el.compile_axioms(root.axioms)
                own = self.base.own
            self._sat = _el.Saturation(index)
            self._own_nfs = [nf for ax in own for nf in _el.normalize(ax)]
            self._sat.add_nfs(self._own_nfs)
            for ax in self.additions:
                self._sat.add_nfs(_el.normalize(ax))
        else:
            self._tbox = TBox(list(self.base) + list(self.additions))
            self._tab = Tableau(self._tbox)
        self._marks = []

    def _rebuild_with(self, axioms: dict) -> None:
        if self.backend == "el":
            # unindex what goes away, index what is new, then drop derived state
            sat = self._sat
            sat.reset()
            self.metrics.rebuilds += 1
            for ax in self.additions:
                if ax not in axioms:
                    sat.remove_nfs(_el.normalize(ax))
            for ax in axioms:
                if ax not in self.additions:
                    sat.add_nfs(_el.normalize(ax))
            self.additions = dict(axioms)
            self._marks = []
        else:
            self.additions = dict(axioms)
            self._build()

    def add(self, axioms) -> None:
        """Monotone addition; never triggers a rebuild."""
        new = [ax for ax in dict.fromkeys(axioms) if ax not in self.additions and ax not in self.base]
        if not new:
            return
        for ax in new:
            self.additions[ax] = None
        if self.backend == "el":
            nfs = [nf for ax in new for nf in _el.normalize(ax)]
            self._sat.add_nfs(nfs)
        else:
            for ax in new:
                self._tbox.add(ax)
            self._tab.reset_caches(keep_unsat=True)

    def remove(self, axioms) -> None:
        drop = set(axioms)
        if not drop & self.additions.keys():
            return
        self._rebuild_with({a: None for a in self.additions if a not in drop})

    def set_additions(self, axioms) -> None:
        target = dict.fromkeys(a for a in axioms if a not in self.base)
        if self.additions.keys() <= target.keys():
            self.add(target)
        else:
            self._rebuild_with(target)

    def push(self) -> None:
        """Open an undo point; later additions can be rolled back by pop()."""
        if self.backend == "el":
            self._marks.append((self._sat.mark(), dict(self.additions)))
        else:
            self._marks.append((self._tbox.copy(), dict(self.additions)))

    def pop(self) -> None:
        point, additions = self._marks.pop()
        self.additions = additions
        if self.backend == "el":
            self._sat.undo(point)
            if not self._marks:
                self._sat.release()
        else:
            self._tbox = point
            self._tab = Tableau(point)

    def commit(self) -> None:
        """Keep everything since the last push."""
        self._marks.pop()
        if self.backend == "el" and not self._marks:
            self._sat.release()

    # -- queries -------------------------------------------------------------

    def check(self, q) -> bool:
        """Does base ∪ additions entail the subsumption q?"""
        self.metrics.tick()
        lhs, rhs = q.lhs, q.rhs
        if self.backend == "el":
            ctx, target, defs = _el.query_plan(lhs, rhs)
            if defs:
                self._sat.add_nfs(defs)
            s = self._sat.subsumers(ctx)
            return target in s or _el.BOT_E in s
        return self._tab.subsumes(lhs, rhs)

    def subsumers(self, c) -> set:
        """EL only: entity ids subsuming concept c."""
        ctx, _, defs = _el.query_plan(c, c)
        if defs:
            self._sat.add_nfs(defs)
        return self._sat.subsumers(ctx)


def open_session(base, backend: str = "auto", metrics: Metrics | None = None) -> ReasonerSession:
    return ReasonerSession(_as_set(base), backend, metrics)


def session_check(s: ReasonerSession, added, q) -> bool:
    """Answer q over base ∪ added, reusing state when ``added`` extends the
    session's current additions and rebuilding otherwise."""
    s.set_additions(added)
    return s.check(q)


def entails(axioms, q, backend: str = "auto") -> bool:
    if isinstance(q, StrongAxiom):
        q = Query(q.lhs, q.rhs)
    base = _as_set(axioms)
    if backend == "auto":
        backend = choose_backend(base, [q])
    return ReasonerSession(base, backend).check(q)


def classify(axioms, backend: str = "el") -> set:
    axioms = list(_as_set(axioms))
    if backend == "el":
        for ax in axioms:
            if not _el.is_el_axiom(ax):
                raise NotEL(f"not EL: {ax}")
        return _el.classify_el(axioms)
    return classify_tableau(axioms)
