"""Concept and axiom syntax, knowledge bases and signatures.

Concepts are immutable, hashable trees.  ``And``/``Or`` are n-ary, flattened
and sorted by their text form, so two conjunctions over the same operand set
compare equal no matter how they were built.  Every node caches its text and
hash; equality is text equality, which is sound because the printed form is
canonical and fully parenthesised where precedence requires it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Union

# node kinds, used for fast dispatch in the engines
ATOM, TOP_K, BOT_K, NOT, AND, OR, EXISTS, FORALL, NORM = range(9)


class Concept:
    __slots__ = ("_text", "_hash")
    kind: int = -1

    def _seal(self, text: str) -> None:
        object.__setattr__(self, "_text", text)
        object.__setattr__(self, "_hash", hash(text))

    def __setattr__(self, name, value):
        raise AttributeError("concepts are immutable")

    def __eq__(self, other):
        return isinstance(other, Concept) and self._text == other._text

    def __ne__(self, other):
        return not self.__eq__(other)

    def __hash__(self):
        return self._hash

    def __str__(self):
        return self._text

    def __repr__(self):
        return f"<{type(self).__name__} {self._text}>"

    def __lt__(self, other):
        return self._text < other._text

    @property
    def text(self) -> str:
        return self._text

    def children(self) -> tuple:
        return ()

    def subterms(self) -> Iterator["Concept"]:
        """Pre-order walk over this concept and all its subconcepts."""
        stack = [self]
        while stack:
            c = stack.pop()
            yield c
            stack.extend(reversed(c.children()))

    def has_norm(self) -> bool:
        return any(c.kind == NORM for c in self.subterms())


class Atom(Concept):
    __slots__ = ("name",)
    kind = ATOM

    def __init__(self, name: str):
        object.__setattr__(self, "name", name)
        self._seal(name)


class _Top(Concept):
    __slots__ = ()
    kind = TOP_K

    def __init__(self):
        self._seal("Top")


class _Bot(Concept):
    __slots__ = ()
    kind = BOT_K

    def __init__(self):
        self._seal("Bot")


TOP = _Top()
BOT = _Bot()


def _unary_text(c: Concept) -> str:
    return f"({c._text})" if c.kind in (AND, OR) else c._text


class Not(Concept):
    __slots__ = ("arg",)
    kind = NOT

    def __init__(self, arg: Concept):
        object.__setattr__(self, "arg", arg)
        self._seal("not " + _unary_text(arg))

    def children(self):
        return (self.arg,)


class And(Concept):
    """n-ary conjunction; build through :func:`conj` to get canonical form."""

    __slots__ = ("args",)
    kind = AND

    def __init__(self, args: tuple):
        object.__setattr__(self, "args", args)
        self._seal(" and ".join(f"({a._text})" if a.kind == OR else a._text for a in args))

    def children(self):
        return self.args


class Or(Concept):
    __slots__ = ("args",)
    kind = OR

    def __init__(self, args: tuple):
        object.__setattr__(self, "args", args)
        self._seal(" or ".join(a._text for a in args))

    def children(self):
        return self.args


class Exists(Concept):
    __slots__ = ("role", "filler")
    kind = EXISTS

    def __init__(self, role: str, filler: Concept = TOP):
        object.__setattr__(self, "role", role)
        object.__setattr__(self, "filler", filler)
        self._seal(f"some {role} . {_unary_text(filler)}")

    def children(self):
        return (self.filler,)


class Forall(Concept):
    __slots__ = ("role", "filler")
    kind = FORALL

    def __init__(self, role: str, filler: Concept):
        object.__setattr__(self, "role", role)
        object.__setattr__(self, "filler", filler)
        self._seal(f"all {role} . {_unary_text(filler)}")

    def children(self):
        return (self.filler,)


class Norm(Concept):
    """Normality concept N(C); treated as an opaque fresh name by the reduction."""

    __slots__ = ("arg",)
    kind = NORM

    def __init__(self, arg: Concept):
        if arg.has_norm():
            raise ValueError(f"nested normality concept in N({arg})")
        object.__setattr__(self, "arg", arg)
        self._seal(f"N({arg._text})")

    def children(self):
        return (self.arg,)


def _nary(cls, kind, operands: Iterable[Concept]) -> Concept:
    flat = {}
    for c in operands:
        if c.kind == kind:
            for a in c.args:
                flat[a._text] = a
        else:
            flat[c._text] = c
    if not flat:
        raise ValueError("empty connective")
    if len(flat) == 1:
        return next(iter(flat.values()))
    return cls(tuple(flat[k] for k in sorted(flat)))


def conj(*operands: Concept) -> Concept:
    return _nary(And, AND, operands)


def disj(*operands: Concept) -> Concept:
    return _nary(Or, OR, operands)


def conjuncts(c: Concept) -> tuple:
    return c.args if c.kind == AND else (c,)


def disjuncts(c: Concept) -> tuple:
    return c.args if c.kind == OR else (c,)


def norm_name(c: Norm) -> str:
    """Opaque concept name standing for a normality concept in signatures."""
    return c._text


# --- axioms and knowledge bases -------------------------------------------


@dataclass(frozen=True)
class StrongAxiom:
    lhs: Concept
    rhs: Concept

    def __str__(self):
        return f"{self.lhs} <= {self.rhs}"


@dataclass(frozen=True)
class DefeasibleInclusion:
    id: int
    pre: Concept
    con: Concept

    def __post_init__(self):
        if self.pre.has_norm():
            raise ValueError(f"normality concept in premise of DI {self.id}: {self.pre}")

    @property
    def material(self) -> StrongAxiom:
        """The classical counterpart pre ⊑ con."""
        return StrongAxiom(self.pre, self.con)

    def __str__(self):
        return f"{self.pre} <~ {self.con}"


@dataclass(frozen=True)
class Query:
    lhs: Concept
    rhs: Concept

    def __str__(self):
        return f"{self.lhs} <= {self.rhs}"

    @property
    def axiom(self) -> StrongAxiom:
        return StrongAxiom(self.lhs, self.rhs)


@dataclass(frozen=True)
class KnowledgeBase:
    """A DL^N knowledge base: strong axioms plus defeasible inclusions.

    ``strong`` keeps first-occurrence order but holds no duplicates.  DI ids
    must be unique; files produced by the parser number them densely in file
    order, while KBs derived by module extraction keep the original ids.
    """

    strong: tuple = ()
    defeasible: tuple = ()
    _norms: frozenset = field(default=None, compare=False, repr=False, hash=False)
    # per-KB memo for derived data (compiled indexes, priorities, locality)
    cache: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "strong", tuple(dict.fromkeys(self.strong)))
        object.__setattr__(self, "defeasible", tuple(self.defeasible))
        ids = [d.id for d in self.defeasible]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate DI ids")

    @property
    def dis(self) -> tuple:
        return self.defeasible

    def di(self, ident: int) -> DefeasibleInclusion:
        for d in self.defeasible:
            if d.id == ident:
                return d
        raise KeyError(ident)

    def norm_concepts(self) -> frozenset:
        """All Norm subterms occurring in the KB (cached)."""
        if self._norms is None:
            found = set()
            for c in _kb_concepts(self):
                if c.has_norm():
                    found.update(s for s in c.subterms() if s.kind == NORM)
            object.__setattr__(self, "_norms", frozenset(found))
        return self._norms

    def is_n_free(self) -> bool:
        return not self.norm_concepts()

    def __len__(self):
        return len(self.strong) + len(self.defeasible)


def _kb_concepts(kb: KnowledgeBase) -> Iterator[Concept]:
    for ax in kb.strong:
        yield ax.lhs
        yield ax.rhs
    for d in kb.defeasible:
        yield d.pre
        yield d.con


# --- signatures -------------------------------------------------------------


@dataclass(frozen=True)
class Signature:
    concepts: frozenset = frozenset()
    roles: frozenset = frozenset()

    def __or__(self, other: "Signature") -> "Signature":
        return Signature(self.concepts | other.concepts, self.roles | other.roles)

    def __le__(self, other: "Signature") -> bool:
        return self.concepts <= other.concepts and self.roles <= other.roles

    def __len__(self):
        return len(self.concepts) + len(self.roles)

    @classmethod
    def of(cls, concepts=(), roles=()) -> "Signature":
        return cls(frozenset(concepts), frozenset(roles))


def _concept_symbols(c: Concept, names: set, roles: set) -> None:
    stack = [c]
    while stack:
        x = stack.pop()
        k = x.kind
        if k == ATOM:
            names.add(x.name)
        elif k == NORM:
            names.add(x._text)
        else:
            if k == EXISTS or k == FORALL:
                roles.add(x.role)
            stack.extend(x.children())


Item = Union[Concept, StrongAxiom, DefeasibleInclusion, Query, KnowledgeBase]


def signature_of(x: Item) -> Signature:
    """Concept and role names of ``x``.

    A normality concept N(C) contributes the single opaque name ``N(C)`` and
    nothing from C itself.
    """
    names: set = set()
    roles: set = set()
    if isinstance(x, Concept):
        parts = (x,)
    elif isinstance(x, (StrongAxiom, Query)):
        parts = (x.lhs, x.rhs)
    elif isinstance(x, DefeasibleInclusion):
        parts = (x.pre, x.con)
    elif isinstance(x, KnowledgeBase):
        parts = tuple(_kb_concepts(x))
    else:
        raise TypeError(f"no signature for {type(x).__name__}")
    for c in parts:
        _concept_symbols(c, names, roles)
    return Signature(frozenset(names), frozenset(roles))


def norm_subterms(c: Concept) -> set:
    return {s for s in c.subterms() if s.kind == NORM}


def collect_sigma(kb: KnowledgeBase, q: Query | None = None) -> frozenset:
    """Normality concepts occurring explicitly in ``kb`` or the query."""
    found = set(kb.norm_concepts())
    if q is not None:
        found |= norm_subterms(q.lhs) | norm_subterms(q.rhs)
    return frozenset(found)


def sorted_sigma(sigma: Iterable[Norm]) -> list:
    return sorted(sigma, key=lambda n: n._text)
