import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dln.engine import Metrics, entails
from dln.optimistic import GuardError, NFreeGuard, optimistic_kb_star
from dln.parser import parse_concept, parse_kb, parse_query
from dln.priority import priority_for
from dln.query import dln_entails
from dln.reduction import build_kb_sigma
from dln.syntax import BOT, Query, collect_sigma, signature_of

from randkb import random_kb, random_queries


def _atomic_queries(kb, sigma):
    names = sorted(signature_of(kb).concepts | {n.text for n in sigma})
    cs = [parse_concept(n) for n in names]
    return [Query(a, b) for a in cs for b in cs + [BOT] if a != b]


@given(st.integers(0, 10_000), st.sampled_from(["spec", "rank"]))
@settings(max_examples=40, deadline=None)
def test_kb_star_is_equivalent_to_kb_sigma_on_n_free_kbs(seed, kind):
    rng = random.Random(seed)
    kb = random_kb(rng, n_names=6, n_strong=rng.randint(2, 10), n_dis=rng.randint(1, 8))
    q = random_queries(rng, kb, 1)[0]
    sigma = collect_sigma(kb, q)
    p = priority_for(kb, kind)
    ks = build_kb_sigma(kb, sigma, p)
    st_ = optimistic_kb_star(kb, sigma, p)
    a, b = list(ks.axioms), list(st_.kb_star)
    for aq in _atomic_queries(kb, sigma):
        assert entails(a, aq) == entails(b, aq), aq


def test_phase_one_never_rebuilds(golden):
    kb = golden("ex4")
    for kind in ("spec", "rank"):
        m = Metrics()
        q = parse_query("N(A) <= Bot")
        st_ = optimistic_kb_star(kb, collect_sigma(kb, q), priority_for(kb, kind), metrics=m)
        # one build for each of the two sessions, nothing else
        assert m.rebuilds <= 2
        assert m.phase1_checks == len(kb.defeasible)
        assert st_.session.metrics is m


def test_opt_uses_fewer_rebuilds_than_naive(golden):
    kb = golden("ex4")
    q = parse_query("N(A) <= Bot")
    naive = dln_entails(kb, q, "spec", "naive")
    opt = dln_entails(kb, q, "spec", "opt")
    assert naive.entailed == opt.entailed
    assert opt.metrics.rebuilds < naive.metrics.rebuilds


def test_guard():
    kb = parse_kb("A <~ some r . N(B)\nB <~ C\n")
    assert not kb.is_n_free()
    q = parse_query("N(A) <= some r . C")
    assert not NFreeGuard.of(kb, collect_sigma(kb, q)).ok
    assert NFreeGuard(False, 1).ok and NFreeGuard(True, 5).ok
    with pytest.raises(GuardError):
        optimistic_kb_star(kb, collect_sigma(kb, q), priority_for(kb, "spec"))
    with pytest.raises(GuardError):
        dln_entails(kb, q, "spec", "opt", guard="refuse")
    r = dln_entails(kb, q, "spec", "opt")
    assert r.metrics.fallback
    assert r.entailed == dln_entails(kb, q, "spec", "naive").entailed


def test_n_free_kb_does_not_fall_back(golden):
    r = dln_entails(golden("ex4"), parse_query("N(A) <= Bot"), "spec", "modopt")
    assert r.entailed and not r.metrics.fallback
