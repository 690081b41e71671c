import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dln.parser import DLNSyntaxError, format_kb, parse_concept, parse_kb, parse_query
from dln.syntax import (
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
    Signature,
    StrongAxiom,
    collect_sigma,
    conj,
    disj,
    signature_of,
)

atoms = st.sampled_from([Atom(n) for n in ("A", "B", "C", "Dx", "e_1")]) | st.just(TOP) | st.just(BOT)
roles = st.sampled_from(["r", "has_part", "s"])


def _concepts(allow_norm=True):
    def extend(inner):
        return st.one_of(
            inner.map(Not),
            st.tuples(inner, inner).map(lambda p: conj(*p)),
            st.tuples(inner, inner).map(lambda p: disj(*p)),
            st.tuples(roles, inner).map(lambda p: Exists(*p)),
            st.tuples(roles, inner).map(lambda p: Forall(*p)),
        )

    plain = st.recursive(atoms, extend, max_leaves=8)
    if not allow_norm:
        return plain
    return st.recursive(atoms | plain.map(Norm), extend, max_leaves=8)


concepts = _concepts()


@given(concepts)
def test_print_parse_round_trip(c):
    assert parse_concept(str(c)) == c


@given(_concepts(False), concepts)
@settings(max_examples=50)
def test_kb_round_trip(pre, con):
    kb = KnowledgeBase((StrongAxiom(con, pre),), (DefeasibleInclusion(0, pre, con),))
    again = parse_kb(format_kb(kb))
    assert again == kb


@given(concepts, concepts)
def test_signature_is_monotone_under_conjunction(a, b):
    sa, sab = signature_of(a), signature_of(conj(a, b))
    assert sa <= sab
    assert sab == sa | signature_of(b)


def test_conj_flattens_and_sorts():
    a, b, c = Atom("A"), Atom("B"), Atom("C")
    assert conj(c, conj(a, b)) == conj(a, b, c)
    assert conj(a, a) == a
    assert str(conj(b, a)) == "A and B"


def test_precedence():
    c = parse_concept("not A and B or C")
    assert c == disj(conj(Not(Atom("A")), Atom("B")), Atom("C"))
    assert parse_concept("some r . A and B") == conj(Exists("r", Atom("A")), Atom("B"))
    assert parse_concept("some r") == Exists("r", TOP)


def test_norm_is_opaque_in_signatures():
    s = signature_of(Norm(Exists("r", Atom("A"))))
    assert s.concepts == {"N(some r . A)"}
    assert s.roles == frozenset()


def test_nested_norm_rejected():
    with pytest.raises(DLNSyntaxError):
        parse_concept("N(A and N(B))")
    with pytest.raises(ValueError):
        Norm(Norm(Atom("A")))


def test_norm_in_premise_rejected():
    with pytest.raises(DLNSyntaxError) as e:
        parse_kb("A <= B\nN(A) <~ B\n")
    assert e.value.line == 2


def test_disjointness_sugar():
    kb = parse_kb("disjoint(A, B)")
    assert kb.strong == (StrongAxiom(conj(Atom("A"), Atom("B")), BOT),)


def test_query_must_be_strong():
    assert parse_query("N(A) <= Bot") == Query(Norm(Atom("A")), BOT)
    with pytest.raises(DLNSyntaxError):
        parse_query("A <~ B")


@pytest.mark.parametrize("bad", ["A <=", "A and", "(A", "A <= B)", "all r A", "A $ B", "some . A"])
def test_syntax_errors_carry_position(bad):
    with pytest.raises(DLNSyntaxError) as e:
        parse_kb(bad)
    assert e.value.line == 1 and e.value.col >= 1


def test_duplicate_di_ids_rejected():
    d = DefeasibleInclusion(0, Atom("A"), Atom("B"))
    with pytest.raises(ValueError):
        KnowledgeBase((), (d, d))


def test_collect_sigma_includes_query_and_kb_norms():
    kb = parse_kb("A <~ some r . N(B)\nB <= C\n")
    q = parse_query("N(A) <= C")
    assert {str(n) for n in collect_sigma(kb, q)} == {"N(A)", "N(B)"}
    assert not kb.is_n_free()


def test_signature_union_and_order():
    s = Signature.of(["A"], ["r"]) | Signature.of(["B"])
    assert s.concepts == {"A", "B"} and s.roles == {"r"}
    assert Signature.of(["A"]) <= s
    assert len(s) == 3
