"""Line-oriented text format for knowledge bases and queries.

Grammar (precedence ``not`` > ``and`` > ``or``)::

    concept := Top | Bot | name | not C | C and C | C or C
             | some role . C | some role | all role . C | N( C ) | ( C )
    line    := C <= D | C <~ D | disjoint(A, B)

``#`` starts a comment.  ``some R`` without a filler reads as ``some R . Top``.
The quantifier filler is a unary operand, so ``some R . A and B`` is
``(some R . A) and B``.
"""

from __future__ import annotations

import re

from .syntax import (
    BOT,
    TOP,
    Atom,
    Concept,
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


class DLNSyntaxError(ValueError):
    def __init__(self, msg: str, line: int = 0, col: int = 0):
        self.msg = msg
        self.line = line
        self.col = col
        super().__init__(f"line {line}, col {col}: {msg}" if line else msg)


_TOKEN = re.compile(r"\s*(?:(<=|<~|[().,])|([A-Za-z_][A-Za-z0-9_\-:']*))")
_KEYWORDS = {"Top", "Bot", "not", "and", "or", "some", "all"}


def _tokenize(text: str, line: int):
    toks = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if m is None:
            raise DLNSyntaxError(f"unexpected character {text[pos]!r}", line, pos + 1)
        start = m.start(1) if m.group(1) else m.start(2)
        toks.append((m.group(1) or m.group(2), start + 1))
        pos = m.end()
    return toks


class _Parser:
    def __init__(self, text: str, line: int = 0):
        self.toks = _tokenize(text, line)
        self.i = 0
        self.line = line
        self.end_col = len(text) + 1

    def peek(self, k: int = 0):
        j = self.i + k
        return self.toks[j][0] if j < len(self.toks) else None

    def col(self):
        return self.toks[self.i][1] if self.i < len(self.toks) else self.end_col

    def error(self, msg):
        raise DLNSyntaxError(msg, self.line, self.col())

    def take(self, expected=None):
        tok = self.peek()
        if tok is None:
            self.error(f"expected {expected or 'token'}, found end of input")
        if expected is not None and tok != expected:
            self.error(f"expected {expected!r}, found {tok!r}")
        self.i += 1
        return tok

    def name(self, what):
        tok = self.peek()
        if tok is None or tok in _KEYWORDS or not (tok[0].isalpha() or tok[0] == "_"):
            self.error(f"expected {what}")
        self.i += 1
        return tok

    def concept(self) -> Concept:
        parts = [self.conjunction()]
        while self.peek() == "or":
            self.i += 1
            parts.append(self.conjunction())
        return parts[0] if len(parts) == 1 else disj(*parts)

    def conjunction(self) -> Concept:
        parts = [self.unary()]
        while self.peek() == "and":
            self.i += 1
            parts.append(self.unary())
        return parts[0] if len(parts) == 1 else conj(*parts)

    def unary(self) -> Concept:
        tok = self.peek()
        if tok is None:
            self.error("expected concept, found end of input")
        if tok == "not":
            self.i += 1
            return Not(self.unary())
        if tok in ("some", "all"):
            self.i += 1
            role = self.name("role name")
            if self.peek() == ".":
                self.i += 1
                filler = self.unary()
            elif tok == "some":
                filler = TOP
            else:
                self.error("expected '.' after universal role")
            return Exists(role, filler) if tok == "some" else Forall(role, filler)
        if tok == "(":
            self.i += 1
            c = self.concept()
            self.take(")")
            return c
        if tok == "Top":
            self.i += 1
            return TOP
        if tok == "Bot":
            self.i += 1
            return BOT
        if tok == "N" and self.peek(1) == "(":
            col = self.col()
            self.i += 2
            inner = self.concept()
            self.take(")")
            if inner.has_norm():
                raise DLNSyntaxError("nested normality concept", self.line, col)
            return Norm(inner)
        return Atom(self.name("concept"))

    def done(self):
        if self.peek() is not None:
            self.error(f"unexpected {self.peek()!r}")


def parse_concept(text: str) -> Concept:
    p = _Parser(text)
    c = p.concept()
    p.done()
    return c


def _parse_inclusion(p: _Parser):
    lhs = p.concept()
    op = p.peek()
    if op not in ("<=", "<~"):
        p.error("expected '<=' or '<~'")
    p.i += 1
    rhs = p.concept()
    p.done()
    return lhs, op, rhs


def parse_query(text: str) -> Query:
    p = _Parser(text.strip())
    lhs, op, rhs = _parse_inclusion(p)
    if op != "<=":
        raise DLNSyntaxError("queries are strong subsumptions, use '<='")
    return Query(lhs, rhs)


def parse_kb(text: str) -> KnowledgeBase:
    strong = []
    dis = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        p = _Parser(line, lineno)
        if p.peek() == "disjoint" and p.peek(1) == "(":
            p.i += 2
            a = p.concept()
            p.take(",")
            b = p.concept()
            p.take(")")
            p.done()
            strong.append(StrongAxiom(conj(a, b), BOT))
            continue
        lhs, op, rhs = _parse_inclusion(p)
        if op == "<=":
            strong.append(StrongAxiom(lhs, rhs))
        else:
            if lhs.has_norm():
                raise DLNSyntaxError("normality concept in defeasible premise", lineno, 1)
            dis.append(DefeasibleInclusion(len(dis), lhs, rhs))
    return KnowledgeBase(tuple(strong), tuple(dis))


def load_kb(path) -> KnowledgeBase:
    with open(path, encoding="utf-8") as fh:
        return parse_kb(fh.read())


def format_kb(kb: KnowledgeBase) -> str:
    lines = [str(ax) for ax in kb.strong]
    lines += [str(d) for d in kb.defeasible]
    return "\n".join(lines) + ("\n" if lines else "")
