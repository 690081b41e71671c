"""Completion-rule reasoner for EL with bottom.

Axioms are normalised into four shapes over integer entities::

    (0, a, b)        a ⊑ b
    (1, a, b, c)     a ⊓ b ⊑ c
    (2, a, r, b)     a ⊑ ∃r.b
    (3, r, a, b)     ∃r.a ⊑ b

Complex subconcepts get structural entities: the same subconcept always maps
to the same entity, so definitions can be shared between axioms.  Negation is
accepted in positive position (``a ⊑ ¬X`` becomes ``a ⊓ X ⊑ ⊥``), which
covers the negated-existential policies used in the golden examples.

Saturation is goal directed: a context is created for an entity only when a
query or an existential link needs it.
"""

from __future__ import annotations

from functools import lru_cache

from ..syntax import AND, ATOM, BOT_K, EXISTS, NORM, NOT, OR, TOP_K, Concept, StrongAxiom, conj

TOP_E = 0
BOT_E = 1

_ENT: dict = {"Top": TOP_E, "Bot": BOT_E}
_KEYS: list = ["Top", "Bot"]


class NotEL(ValueError):
    """Raised when an axiom or query falls outside the EL⊥ fragment."""


def intern(key) -> int:
    e = _ENT.get(key)
    if e is None:
        e = len(_KEYS)
        _ENT[key] = e
        _KEYS.append(key)
    return e


def entity_key(e: int):
    return _KEYS[e]


def atom_entity(name: str) -> int:
    return intern(name)


# --- normalisation -----------------------------------------------------------


def _neg(c: Concept, out: list) -> int:
    """Entity e with c ⊑ e (c occurs negatively)."""
    k = c.kind
    if k == ATOM:
        return intern(c.name)
    if k == NORM:
        return intern(c.text)
    if k == TOP_K:
        return TOP_E
    if k == BOT_K:
        return BOT_E
    if k == AND:
        ents = sorted({_neg(a, out) for a in c.args} - {TOP_E})
        if not ents:
            return TOP_E
        cur = ents[0]
        for nxt in ents[1:]:
            e = intern(("&", cur, nxt))
            out.append((1, cur, nxt, e))
            cur = e
        return cur
    if k == EXISTS:
        f = _neg(c.filler, out)
        e = intern(("E", c.role, f))
        out.append((3, c.role, f, e))
        return e
    raise NotEL(f"not EL in negative position: {c}")


def _pos(c: Concept, out: list) -> int:
    """Entity e with e ⊑ c (c occurs positively)."""
    k = c.kind
    if k == ATOM:
        return intern(c.name)
    if k == NORM:
        return intern(c.text)
    if k == TOP_K:
        return TOP_E
    if k == BOT_K:
        return BOT_E
    e = intern(("p", c.text))
    _rhs(e, c, out)
    return e


def _rhs(a: int, c: Concept, out: list) -> None:
    """Emit normal forms for a ⊑ c."""
    k = c.kind
    if k == ATOM or k == NORM or k == BOT_K:
        out.append((0, a, _pos(c, out)))
    elif k == TOP_K:
        pass
    elif k == AND:
        for x in c.args:
            _rhs(a, x, out)
    elif k == EXISTS:
        out.append((2, a, c.role, _pos(c.filler, out)))
    elif k == NOT:
        x = _neg(c.arg, out)
        if x == TOP_E:
            out.append((0, a, BOT_E))
        elif x != BOT_E:
            out.append((1, a, x, BOT_E) if a < x else (1, x, a, BOT_E))
    else:
        raise NotEL(f"not EL in positive position: {c}")


@lru_cache(maxsize=None)
def normalize(ax: StrongAxiom) -> tuple:
    out: list = []
    lhs = ax.lhs
    if lhs.kind == OR:
        for d in lhs.args:
            out.extend(normalize(StrongAxiom(d, ax.rhs)))
    elif lhs.kind != BOT_K:
        _rhs(_neg(lhs, out), ax.rhs, out)
    # drop trivial a ⊑ a and a ⊑ ⊤ forms
    return tuple(dict.fromkeys(nf for nf in out if not (nf[0] == 0 and (nf[1] == nf[2] or nf[2] == TOP_E))))


def is_el_axiom(ax: StrongAxiom) -> bool:
    try:
        normalize(ax)
        return True
    except NotEL:
        return False


@lru_cache(maxsize=None)
def query_plan(lhs: Concept, rhs: Concept) -> tuple:
    """(context entity, target entity, definitional normal forms) for lhs ⊑ rhs."""
    out: list = []
    if rhs.kind == NOT:
        ctx = _pos(conj(lhs, rhs.arg), out)
        target = BOT_E
    else:
        ctx = _pos(lhs, out)
        target = _neg(rhs, out)
    return ctx, target, tuple(dict.fromkeys(out))


def is_el_query(lhs: Concept, rhs: Concept) -> bool:
    try:
        query_plan(lhs, rhs)
        return True
    except NotEL:
        return False


# --- indexes -----------------------------------------------------------------


class CompiledIndex:
    """Read-only rule index over a fixed list of normal forms."""

    __slots__ = ("told", "conj", "exrhs", "exlhs", "exlhs_f", "exlhs_r", "nfs")

    def __init__(self, nfs):
        told: dict = {}
        cj: dict = {}
        exrhs: dict = {}
        exlhs: dict = {}
        exlhs_f: dict = {}
        exlhs_r: dict = {}
        self.nfs = frozenset(nfs)
        for nf in self.nfs:
            t = nf[0]
            if t == 0:
                told.setdefault(nf[1], []).append(nf[2])
            elif t == 1:
                _, a, b, c = nf
                cj.setdefault(a, {}).setdefault(b, []).append(c)
                cj.setdefault(b, {}).setdefault(a, []).append(c)
            elif t == 2:
                exrhs.setdefault(nf[1], []).append((nf[2], nf[3]))
            else:
                _, r, a, b = nf
                exlhs.setdefault((r, a), []).append(b)
                exlhs_f.setdefault(a, []).append((r, b))
                exlhs_r.setdefault(r, {}).setdefault(a, []).append(b)
        self.told = {k: tuple(v) for k, v in told.items()}
        self.conj = cj
        self.exrhs = {k: tuple(v) for k, v in exrhs.items()}
        self.exlhs = {k: tuple(v) for k, v in exlhs.items()}
        self.exlhs_f = {k: tuple(v) for k, v in exlhs_f.items()}
        self.exlhs_r = {r: {a: tuple(v) for a, v in m.items()} for r, m in exlhs_r.items()}


class LocalIndex:
    """Mutable, reference-counted rule index for session-local axioms."""

    __slots__ = ("told", "conj", "exrhs", "exlhs", "exlhs_f", "exlhs_r", "count")

    def __init__(self):
        self.told: dict = {}
        self.conj: dict = {}
        self.exrhs: dict = {}
        self.exlhs: dict = {}
        self.exlhs_f: dict = {}
        self.exlhs_r: dict = {}
        self.count: dict = {}

    def incr(self, nf) -> bool:
        """Add one reference; True when the form became active."""
        n = self.count.get(nf, 0)
        self.count[nf] = n + 1
        if n:
            return False
        t = nf[0]
        if t == 0:
            self.told.setdefault(nf[1], set()).add(nf[2])
        elif t == 1:
            _, a, b, c = nf
            self.conj.setdefault(a, {}).setdefault(b, set()).add(c)
            self.conj.setdefault(b, {}).setdefault(a, set()).add(c)
        elif t == 2:
            self.exrhs.setdefault(nf[1], set()).add((nf[2], nf[3]))
        else:
            _, r, a, b = nf
            self.exlhs.setdefault((r, a), set()).add(b)
            self.exlhs_f.setdefault(a, set()).add((r, b))
            self.exlhs_r.setdefault(r, {}).setdefault(a, set()).add(b)
        return True

    def decr(self, nf) -> None:
        n = self.count[nf]
        if n > 1:
            self.count[nf] = n - 1
            return
        del self.count[nf]
        t = nf[0]
        if t == 0:
            _discard(self.told, nf[1], nf[2])
        elif t == 1:
            _, a, b, c = nf
            _discard(self.conj[a], b, c)
            _discard(self.conj[b], a, c)
        elif t == 2:
            _discard(self.exrhs, nf[1], (nf[2], nf[3]))
        else:
            _, r, a, b = nf
            _discard(self.exlhs, (r, a), b)
            _discard(self.exlhs_f, a, (r, b))
            m = self.exlhs_r[r]
            _discard(m, a, b)
            if not m:
                del self.exlhs_r[r]


def _discard(d: dict, key, val) -> None:
    s = d.get(key)
    if s is not None:
        s.discard(val)
        if not s:
            del d[key]


_EMPTY: tuple = ()


class Saturation:
    """Goal-directed completion state over a compiled base plus a local index.

    Mutations can be journalled (``mark``/``undo``) so that a speculative
    axiom addition can be rolled back without recomputing anything.
    """

    def __init__(self, base: CompiledIndex):
        self.base = base
        self.local = LocalIndex()
        self.S: dict = {}
        self.pred: dict = {}
        self.queue: list = []
        self.trail: list | None = None

    # -- primitive mutations --------------------------------------------

    def _add(self, x: int, e: int) -> None:
        sx = self.S[x]
        if e not in sx:
            sx.add(e)
            self.queue.append((x, e))
            if self.trail is not None:
                self.trail.append((0, x, e))

    def context(self, y: int) -> None:
        if y not in self.S:
            self.S[y] = set()
            self.pred[y] = {}
            if self.trail is not None:
                self.trail.append((1, y))
            self._add(y, y)
            self._add(y, TOP_E)

    def _link(self, x: int, r, y: int) -> None:
        self.context(y)
        py = self.pred[y]
        xs = py.get(r)
        if xs is None:
            xs = py[r] = set()
        if x in xs:
            return
        xs.add(x)
        if self.trail is not None:
            self.trail.append((2, y, r, x))
        sy = self.S[y]
        add = self._add
        if BOT_E in sy:
            add(x, BOT_E)
        for idx in (self.base, self.local):
            m = idx.exlhs_r.get(r)
            if not m:
                continue
            # walk whichever side is smaller; x may equal y, so copy sy
            sx = self.S[x]
            if len(m) < len(sy):
                for c, bs in tuple(m.items()):
                    if c in sy:
                        for b in tuple(bs):
                            if b not in sx:
                                add(x, b)
            else:
                for c in tuple(sy):
                    bs = m.get(c)
                    if bs:
                        for b in tuple(bs):
                            if b not in sx:
                                add(x, b)

    # -- rule application -----------------------------------------------

    def run(self) -> None:
        queue = self.queue
        S = self.S
        pred = self.pred
        add = self._add
        indexes = (self.base, self.local) if self.local.count else (self.base,)
        while queue:
            x, a = queue.pop()
            sx = S[x]
            for idx in indexes:
                bs = idx.told.get(a)
                if bs:
                    for b in bs:
                        if b not in sx:
                            add(x, b)
                d = idx.conj.get(a)
                if d:
                    if len(d) <= len(sx):
                        for other, cs in d.items():
                            if other in sx:
                                for c in cs:
                                    if c not in sx:
                                        add(x, c)
                    else:
                        for other in tuple(sx):
                            cs = d.get(other)
                            if cs:
                                for c in cs:
                                    if c not in sx:
                                        add(x, c)
                ex = idx.exrhs.get(a)
                if ex:
                    for r, b in ex:
                        self._link(x, r, b)
                ex = idx.exlhs_f.get(a)
                if ex:
                    px = pred[x]
                    if px:
                        for r, b in ex:
                            xs = px.get(r)
                            if xs:
                                for y in xs:
                                    if b not in S[y]:
                                        add(y, b)
            if a == BOT_E:
                for xs in pred[x].values():
                    for y in xs:
                        if BOT_E not in S[y]:
                            add(y, BOT_E)

    def subsumers(self, x: int) -> set:
        self.context(x)
        self.run()
        return self.S[x]

    # -- incremental axiom addition -------------------------------------

    def add_nfs(self, nfs) -> None:
        fresh = [nf for nf in nfs if self.local.incr(nf)]
        if self.trail is not None:
            self.trail.extend((3, nf) for nf in nfs)
        if not fresh or not self.S:
            return
        S = self.S
        for nf in fresh:
            t = nf[0]
            if t == 0:
                _, a, b = nf
                for x, sx in tuple(S.items()):
                    if a in sx:
                        self._add(x, b)
            elif t == 1:
                _, a, b, c = nf
                for x, sx in tuple(S.items()):
                    if a in sx and b in sx:
                        self._add(x, c)
            elif t == 2:
                _, a, r, b = nf
                for x, sx in tuple(S.items()):
                    if a in sx:
                        self._link(x, r, b)
            else:
                _, r, a, b = nf
                for y, sy in tuple(S.items()):
                    if a in sy:
                        xs = self.pred[y].get(r)
                        if xs:
                            for x in tuple(xs):
                                self._add(x, b)
        self.run()

    def remove_nfs(self, nfs) -> None:
        """Unindex forms; the caller must reset derived state afterwards."""
        for nf in nfs:
            self.local.decr(nf)

    def reset(self) -> None:
        self.S = {}
        self.pred = {}
        self.queue = []
        self.trail = None

    # -- journal ----------------------------------------------------------

    def mark(self) -> int:
        if self.trail is None:
            self.trail = []
        return len(self.trail)

    def undo(self, mark: int) -> None:
        trail = self.trail
        S = self.S
        while len(trail) > mark:
            op = trail.pop()
            t = op[0]
            if t == 0:
                sx = S.get(op[1])
                if sx is not None:
                    sx.discard(op[2])
            elif t == 1:
                S.pop(op[1], None)
                self.pred.pop(op[1], None)
            elif t == 2:
                py = self.pred.get(op[1])
                if py is not None:
                    xs = py.get(op[2])
                    if xs is not None:
                        xs.discard(op[3])
            else:
                self.local.decr(op[1])

    def release(self) -> None:
        self.trail = None


@lru_cache(maxsize=64)
def compile_axioms(axioms: frozenset) -> CompiledIndex:
    nfs = []
    for ax in axioms:
        nfs.extend(normalize(ax))
    return CompiledIndex(nfs)


def classify_el(axioms) -> set:
    """All entailed atomic subsumptions (names and ``Bot``), reflexive pairs included."""
    from ..syntax import signature_of

    axioms = frozenset(axioms)
    sat = Saturation(compile_axioms(axioms))
    names = set()
    for ax in axioms:
        names |= signature_of(ax).concepts
    ents = {intern(n): n for n in names}
    out = set()
    for n in names:
        s = sat.subsumers(intern(n))
        if BOT_E in s:
            out.add((n, "Bot"))
            out.update((n, m) for m in names)
        else:
            out.update((n, ents[e]) for e in s if e in ents)
    return out
