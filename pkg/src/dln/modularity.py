"""Syntactic locality and ⊤⊥* module extraction for knowledge bases with DIs.

Under the ⊥ substitution every symbol outside the signature becomes ⊥ (names)
or the empty role; under the ⊤ substitution names become ⊤ and roles the
universal role.  An inclusion is local when the substitution provably turns
it into a tautology.  A DI is local iff its classical counterpart is.
Normality concepts are opaque names throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .syntax import (
    AND,
    ATOM,
    BOT_K,
    EXISTS,
    FORALL,
    NORM,
    NOT,
    OR,
    TOP_K,
    Concept,
    DefeasibleInclusion,
    KnowledgeBase,
    Query,
    Signature,
    StrongAxiom,
    conjuncts,
    disjuncts,
    signature_of,
)

BOTTOM = "bot"
TOPP = "top"

# evaluation classes
_B, _T, _U = 0, 1, 2


def _name(c: Concept) -> str:
    return c.name if c.kind == ATOM else c.text


def _eval(c: Concept, names, roles, pol: str) -> int:
    """Class of c after substitution: _B (equivalent to ⊥), _T (⊤) or _U."""
    k = c.kind
    if k == ATOM or k == NORM:
        if _name(c) in names:
            return _U
        return _B if pol == BOTTOM else _T
    if k == TOP_K:
        return _T
    if k == BOT_K:
        return _B
    if k == NOT:
        v = _eval(c.arg, names, roles, pol)
        return _T if v == _B else _B if v == _T else _U
    if k == AND:
        out = _T
        for a in c.args:
            v = _eval(a, names, roles, pol)
            if v == _B:
                return _B
            if v == _U:
                out = _U
        return out
    if k == OR:
        out = _B
        for a in c.args:
            v = _eval(a, names, roles, pol)
            if v == _T:
                return _T
            if v == _U:
                out = _U
        return out
    v = _eval(c.filler, names, roles, pol)
    in_sig = c.role in roles
    if k == EXISTS:
        if v == _B:
            return _B
        if not in_sig:
            if pol == BOTTOM:
                return _B
            # universal role over a non-empty domain
            return _T if v == _T else _U
        return _U
    if k == FORALL:
        if v == _T:
            return _T
        if not in_sig:
            if pol == BOTTOM:
                return _T
            return _B if v == _B else _U
        return _U
    raise TypeError(c)


def _tautology(lhs: Concept, rhs: Concept) -> bool:
    if lhs == rhs or lhs.kind == BOT_K or rhs.kind == TOP_K:
        return True
    if set(conjuncts(rhs)) <= set(conjuncts(lhs)):
        return True
    return set(disjuncts(lhs)) <= set(disjuncts(rhs))


def _parts(ax):
    if isinstance(ax, DefeasibleInclusion):
        return ax.pre, ax.con
    return ax.lhs, ax.rhs


def is_local(ax, sig: Signature, pol: str) -> bool:
    lhs, rhs = _parts(ax)
    if _tautology(lhs, rhs):
        return True
    if _eval(lhs, sig.concepts, sig.roles, pol) == _B:
        return True
    return _eval(rhs, sig.concepts, sig.roles, pol) == _T


@dataclass(frozen=True)
class Module:
    axioms: tuple
    final_sig: Signature

    def __len__(self):
        return len(self.axioms)

    def __contains__(self, ax):
        return ax in self.axioms


def _item_sig(ax) -> Signature:
    if isinstance(ax, DefeasibleInclusion):
        return signature_of(ax)
    return signature_of(ax)


class _Items:
    """Axioms with their signatures and a symbol index, built once per input."""

    def __init__(self, items):
        self.items = list(dict.fromkeys(items))
        self.sigs = [_item_sig(ax) for ax in self.items]
        self.parts = [_parts(ax) for ax in self.items]
        # tautologies are local for every signature
        self.taut = [_tautology(l, r) for l, r in self.parts]
        self.by_name: dict = {}
        self.by_role: dict = {}
        for i, sg in enumerate(self.sigs):
            for n in sg.concepts:
                self.by_name.setdefault(n, []).append(i)
            for r in sg.roles:
                self.by_role.setdefault(r, []).append(i)
        self._empty: dict = {}

    def known(self) -> set:
        k = self.__dict__.get("_known")
        if k is None:
            k = self._known = set(self.items)
        return k

    def nonlocal_empty(self, pol) -> list:
        """Indices of items that are non-local even for the empty signature."""
        got = self._empty.get(pol)
        if got is None:
            e = frozenset()
            got = self._empty[pol] = [i for i in range(len(self.items)) if not self.local(i, e, e, pol)]
        return got

    def local(self, i, names, roles, pol) -> bool:
        if self.taut[i]:
            return True
        lhs, rhs = self.parts[i]
        return _eval(lhs, names, roles, pol) == _B or _eval(rhs, names, roles, pol) == _T


def _xmod_indexed(idx: _Items, sig: Signature, pol: str, subset=None) -> tuple:
    """Least fixpoint of adding non-local items; returns (item indices, final signature)."""
    names = set(sig.concepts)
    roles = set(sig.roles)
    allowed = subset
    inm: set = set()
    seeds = idx.nonlocal_empty(pol)
    todo = list(seeds) if allowed is None else [i for i in seeds if i in allowed]
    # items touching the seed signature
    for n in names:
        todo.extend(idx.by_name.get(n, ()))
    for r in roles:
        todo.extend(idx.by_role.get(r, ()))
    while todo:
        i = todo.pop()
        if i in inm or (allowed is not None and i not in allowed):
            continue
        if idx.local(i, names, roles, pol):
            continue
        inm.add(i)
        sg = idx.sigs[i]
        for n in sg.concepts:
            if n not in names:
                names.add(n)
                todo.extend(idx.by_name.get(n, ()))
        for r in sg.roles:
            if r not in roles:
                roles.add(r)
                todo.extend(idx.by_role.get(r, ()))
    return inm, Signature(frozenset(names), frozenset(roles))


def x_mod(kb_items, sig: Signature, pol: str) -> Module:
    """Module of ``kb_items`` (axioms and DIs) w.r.t. ``sig`` under one polarity."""
    idx = kb_items if isinstance(kb_items, _Items) else _Items(_as_items(kb_items))
    inm, final = _xmod_indexed(idx, sig, pol)
    return Module(tuple(idx.items[i] for i in sorted(inm)), final)


def x_mod_naive(kb_items, sig: Signature, pol: str) -> Module:
    """Direct transcription of the extraction loop; used as a test oracle."""
    rest = list(dict.fromkeys(_as_items(kb_items)))
    m: list = []
    changed = True
    while changed:
        changed = False
        cur = sig
        for ax in m:
            cur = cur | _item_sig(ax)
        for ax in list(rest):
            if not is_local(ax, cur, pol):
                m.append(ax)
                rest.remove(ax)
                changed = True
                break
    final = sig
    for ax in m:
        final = final | _item_sig(ax)
    order = {ax: i for i, ax in enumerate(dict.fromkeys(_as_items(kb_items)))}
    return Module(tuple(sorted(m, key=order.get)), final)


def _as_items(x) -> list:
    if isinstance(x, KnowledgeBase):
        return list(x.strong) + list(x.defeasible)
    return list(x)


def _tbstar(idx: _Items, sig: Signature) -> tuple:
    current = None
    final = sig
    first = True
    while True:
        if first:
            bot, _ = _xmod_indexed(idx, sig, BOTTOM)
            first = False
        else:
            bot, _ = _xmod_indexed(idx, sig, BOTTOM, subset=current)
        top, final = _xmod_indexed(idx, sig, TOPP, subset=bot)
        if current is not None and top == current:
            return sorted(current), final
        current = top


def tbstar_mod_di(sig: Signature, kb_items, index: _Items | None = None) -> Module:
    """Alternate ⊥- and ⊤-extraction until the axiom set is stable."""
    idx = index if index is not None else _Items(_as_items(kb_items))
    members, final = _tbstar(idx, sig)
    return Module(tuple(idx.items[i] for i in members), final)


def _kb_index(kb: KnowledgeBase) -> _Items:
    idx = kb.cache.get("locality-index")
    if idx is None:
        idx = kb.cache["locality-index"] = _Items(list(kb.strong) + list(kb.defeasible))
    return idx


def query_signature(kb: KnowledgeBase, q: Query) -> Signature:
    """Seed signature: the query's symbols plus every normality concept of the KB."""
    s = signature_of(q)
    return Signature(s.concepts | {n.text for n in kb.norm_concepts()}, s.roles)


def norm_axioms_for(kb: KnowledgeBase, q: Query) -> list:
    from .reduction import normality_axioms
    from .syntax import collect_sigma

    return normality_axioms(collect_sigma(kb, q))


def mod_pipeline(kb: KnowledgeBase, q: Query) -> tuple:
    """(KB ∩ M0, M0) where M0 is the ⊤⊥* module of KB ∪ NΣ for the query's seed signature."""
    sig = query_signature(kb, q)
    extra = norm_axioms_for(kb, q)
    base = _kb_index(kb)
    idx = _Extended(base, extra)
    members, final = _tbstar(idx, sig)
    module = Module(tuple(idx.items[i] for i in members), final)
    # the cached index lists the strong axioms first, then the DIs
    ns, nk = len(kb.strong), len(base.items)
    reduced = KnowledgeBase(
        tuple(idx.items[i] for i in members if i < ns),
        tuple(idx.items[i] for i in members if ns <= i < nk),
    )
    return reduced, module


class _Extended(_Items):
    """A cached KB index plus a few extra axioms, without re-indexing the KB."""

    def __init__(self, base: _Items, extra):
        known = base.known()
        extra = [a for a in dict.fromkeys(extra) if a not in known] if extra else []
        self.items = base.items + extra
        n = len(base.items)
        self.sigs = base.sigs + [_item_sig(a) for a in extra]
        self.parts = base.parts + [_parts(a) for a in extra]
        self.taut = base.taut + [_tautology(l, r) for l, r in self.parts[len(base.items):]]
        self.by_name = _Overlay(base.by_name)
        self.by_role = _Overlay(base.by_role)
        for j, sg in enumerate(self.sigs[n:], n):
            for nm in sg.concepts:
                self.by_name.add(nm, j)
            for r in sg.roles:
                self.by_role.add(r, j)
        self._base = base
        self._n = n
        self._empty = {}

    def nonlocal_empty(self, pol):
        got = self._empty.get(pol)
        if got is None:
            e = frozenset()
            got = list(self._base.nonlocal_empty(pol))
            got += [i for i in range(self._n, len(self.items)) if not self.local(i, e, e, pol)]
            self._empty[pol] = got
        return got


class _Overlay:
    def __init__(self, base: dict):
        self.base = base
        self.extra: dict = {}

    def add(self, key, i):
        self.extra.setdefault(key, []).append(i)

    def get(self, key, default=()):
        b = self.base.get(key)
        e = self.extra.get(key)
        if e is None:
            return b if b is not None else default
        return (b or []) + e
