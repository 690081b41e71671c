import logging

import pytest

from dln.benchgen import GenConfig, apply_rates, gen_base, sample_queries
from dln.engine import classify
from dln.parser import format_kb
from dln.query import dln_entails
from dln.syntax import ATOM, EXISTS, KnowledgeBase, collect_sigma, signature_of


@pytest.fixture(scope="module")
def base():
    return gen_base(GenConfig(base_axioms=1000), seed=7)


def test_exact_axiom_count(base):
    assert len(base.strong) == 1000
    assert not base.defeasible


def test_deterministic_under_seed(base):
    assert format_kb(gen_base(GenConfig(base_axioms=1000), seed=7)) == format_kb(base)
    assert format_kb(gen_base(GenConfig(base_axioms=1000), seed=8)) != format_kb(base)


def test_shape_of_the_base(base):
    atomic = [a for a in base.strong if a.lhs.kind == ATOM and a.rhs.kind == ATOM]
    share = len(atomic) / len(base.strong)
    assert 0.8 <= share <= 0.9
    # every non-root name has a parent with a smaller index, so the atomic part is acyclic
    for a in atomic:
        assert int(a.lhs.name[1:]) > int(a.rhs.name[1:])
    exist = [a for a in base.strong if a not in atomic]
    assert all(a.lhs.kind == EXISTS or a.rhs.kind == EXISTS for a in exist)


def test_base_is_coherent(base):
    assert not any(b == "Bot" for _, b in classify(base.strong))


def test_ci_rate_counts(base):
    cfg = GenConfig(base_axioms=1000, ci_rate=0.15)
    kb = apply_rates(base, cfg, 7)
    assert len(kb.defeasible) == 150
    assert len(kb.strong) == 850
    assert [d.id for d in kb.defeasible] == list(range(150))


def test_disjointness_is_added_and_no_base_name_becomes_unsatisfiable(base):
    cfg = GenConfig(base_axioms=1000, ci_rate=0.15, da_rate=0.1)
    kb = apply_rates(base, cfg, 7)
    assert len(kb.strong) == 850 + 100
    assert not any(b == "Bot" for _, b in classify(kb.strong))


def test_no_disjointness_means_no_bottom(base):
    kb = apply_rates(base, GenConfig(base_axioms=1000, ci_rate=0.2), 7)
    assert not any(b == "Bot" for _, b in classify(kb.strong))


def test_synthetic_dis(base):
    kb = apply_rates(base, GenConfig(base_axioms=1000, synth_rate=0.1), 7)
    assert len(kb.defeasible) == 100 and len(kb.strong) == 1000


def test_injection_gives_distinct_normality_concepts(base):
    kb = apply_rates(base, GenConfig(base_axioms=1000, synth_rate=0.25, n_inject=50), 7)
    assert len(kb.norm_concepts()) >= 45
    q = sample_queries(kb, 1, 7)[0]
    assert len(collect_sigma(kb, q)) >= 46
    for d in kb.defeasible:
        if d.con.has_norm():
            assert d.con.kind == EXISTS and d.con.filler.kind != EXISTS


def test_short_injection_warns(base, caplog):
    with caplog.at_level(logging.WARNING):
        apply_rates(base, GenConfig(base_axioms=1000, ci_rate=0.01, n_inject=500), 7)
    assert "injections" in caplog.text


def test_rates_are_validated():
    with pytest.raises(ValueError):
        GenConfig(ci_rate=1.5)
    with pytest.raises(ValueError):
        GenConfig(ci_rate=0.1, synth_rate=0.1)


def test_sampled_queries(base):
    kb = apply_rates(base, GenConfig(base_axioms=1000, ci_rate=0.15), 7)
    qs = sample_queries(kb, 50, 3)
    assert len(qs) == 50 == len(set(qs))
    assert qs == sample_queries(kb, 50, 3)
    premise_names = {x for d in kb.defeasible for x in signature_of(d.pre).concepts}
    for q in qs:
        assert q.lhs.arg.name in premise_names
        assert q.rhs.kind == ATOM


def test_queries_on_a_kb_without_dis(base, caplog):
    with caplog.at_level(logging.WARNING):
        kb = apply_rates(base, GenConfig(base_axioms=1000), 7)
    assert "no DIs" in caplog.text
    small = KnowledgeBase(kb.strong[:40], ())
    qs = sample_queries(small, 5, 0)
    assert len(qs) == 5
    for q in qs:
        answers = {dln_entails(small, q, "spec", s).entailed for s in ("naive", "opt", "mod", "modopt")}
        assert len(answers) == 1
