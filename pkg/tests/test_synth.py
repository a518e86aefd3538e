import random

import numpy as np
import pytest

from strigraph.canon import canonical_bytes, boundary_canonical, iso_equal
from strigraph.graph import GraphBuilder, normalize_wires
from strigraph.rewrite import RewriteSystem
from strigraph.synth import (RedexSet, SynthParams, classify,
                             commutative_ports, enumerate_disconnected,
                             enumerate_pluggings, generate_rules, omega_key,
                             run_synthesis, spider_merge_preload)
from strigraph.tensor import equal_up_to_scalar, evaluate_graph
from strigraph.theories import check_rule_soundness, gw_theory, zx_theory

GW = gw_theory()


def brute_force_disconnected(sig, inputs, outputs, max_boxes):
    """Independent generator: enumerate multisets directly and count
    unordered-iso classes."""
    import itertools
    names = sorted(sig.morphisms)
    seen = set()
    count = 0
    for size in range(max_boxes + 1):
        for combo in itertools.combinations_with_replacement(names, size):
            din = sum(len(sig.morphism(f).dom) for f in combo)
            dout = sum(len(sig.morphism(f).cod) for f in combo)
            s = inputs - din
            if s < 0 or s != outputs - dout:
                continue
            b = GraphBuilder(sig)
            for f in combo:
                b.add_generator(f)
            for _ in range(s):
                w1, w2 = b.add_wire("Q"), b.add_wire("Q")
                b.add_edge(w1, w2)
            key = canonical_bytes(boundary_canonical(b.freeze()))
            if key not in seen:
                seen.add(key)
                count += 1
    return count


def test_enumerate_disconnected_counts():
    got = enumerate_disconnected(GW.sig, 1, 1, 1)
    # one strand, or one 1->1 box (only tick in the gw signature)
    assert len(got) == 2
    got2 = enumerate_disconnected(GW.sig, 1, 1, 0)
    assert len(got2) == 1


def test_enumerate_disconnected_matches_bruteforce():
    for m, n in [(0, 1), (1, 1), (2, 1), (2, 2)]:
        got = enumerate_disconnected(GW.sig, m, n, 1)
        want = brute_force_disconnected(GW.sig, m, n, 1)
        assert len(got) == want


def test_enumerate_disconnected_state_example():
    got = enumerate_disconnected(GW.sig, 0, 1, 1)
    # exactly the 0->1 generators: g_unit and w_unit
    assert len(got) == 2
    for g in got:
        assert len(g.box_vertices()) == 1


def test_enumerate_pluggings_identity_and_closure():
    b = GraphBuilder(GW.sig)
    b.add_generator("g_unit")
    b.add_generator("g_counit")
    seed = b.freeze()
    assert enumerate_pluggings(seed, 0) == [boundary_canonical(normalize_wires(seed))] or \
        len(enumerate_pluggings(seed, 0)) == 1
    plugged = enumerate_pluggings(seed, 1)
    assert len(plugged) == 1
    assert plugged[0].input_order == () and plugged[0].output_order == ()
    assert len(plugged[0].box_vertices()) == 2


def test_enumerate_pluggings_redex_prune():
    b = GraphBuilder(GW.sig)
    b.add_generator("g_unit")
    b.add_generator("g_counit")
    seed = b.freeze()
    redexes = RedexSet()
    plugged_graph = enumerate_pluggings(seed, 1)[0]
    redexes.add(plugged_graph)
    counter = {}
    assert enumerate_pluggings(seed, 1, redexes, counter) == []
    assert counter["filtered_by_redex"] == 1


def test_pruning_with_empty_redexes_equals_naive():
    b = GraphBuilder(GW.sig)
    b.add_generator("w_comul")
    b.add_generator("w_mul")
    seed = b.freeze()
    with_empty = enumerate_pluggings(seed, 2, RedexSet())
    without = enumerate_pluggings(seed, 2, None)
    assert {canonical_bytes(g) for g in with_empty} == \
        {canonical_bytes(g) for g in without}


def test_classify_groups_scalars_and_drops_isos():
    b1 = GraphBuilder(GW.sig)
    v = b1.add_wire("Q")
    b1.add_edge(v, v)
    circle = b1.freeze()
    b2 = GraphBuilder(GW.sig)
    v2 = b2.add_wire("Q")
    b2.add_edge(v2, v2)
    circle2 = b2.freeze()
    b3 = GraphBuilder(GW.sig)
    b3.add_generator("g_unit")
    b3.add_generator("g_counit")
    scalar2 = enumerate_pluggings(b3.freeze(), 1)[0]
    classes = classify([circle, circle2, scalar2], GW.valuation)
    assert len(classes) == 1
    assert len(classes[0]) == 2    # iso duplicate dropped


def test_classify_drops_zero_tensors():
    # a traced tick has zero trace: excluded from classes
    b = GraphBuilder(GW.sig)
    _, ins, outs = b.add_generator("tick")
    g = b.freeze(ins, outs)
    from strigraph.graph import plug_self
    zero = plug_self(g, [(g.output_order[0], g.input_order[0])])
    assert evaluate_graph(zero, GW.valuation).norm_inf() < 1e-12
    assert classify([zero], GW.valuation) == []


def test_generate_rules_minimal_and_congruences():
    rng = random.Random(0)
    b1 = GraphBuilder(GW.sig)
    b1.add_generator("g_unit")
    b1.add_generator("g_counit")
    scalar2 = enumerate_pluggings(b1.freeze(), 1)[0]
    b2 = GraphBuilder(GW.sig)
    empty = b2.freeze()
    report = generate_rules([[empty, scalar2]], GW.valuation, rng)
    assert len(report.rules.rules) == 1
    r = report.rules.rules[0]
    assert len(r.lhs.box_vertices()) == 2 and len(r.rhs.vertices) == 0
    assert omega_key(r.lhs) > omega_key(r.rhs)
    # a coarse measure that cannot split members yields congruences
    coarse = lambda g: (0,)
    report2 = generate_rules([[empty, scalar2]], GW.valuation,
                             random.Random(0), omega=coarse)
    assert report2.rules.rules == []
    assert len(report2.congruences) == 1


def test_run_synthesis_sound_and_decreasing():
    rep = run_synthesis(GW, SynthParams(1, 1, 1), seed_rules=GW.rules, seed=3)
    for r in rep.rules.rules:
        z = check_rule_soundness(r, GW.valuation)
        assert abs(z) > 1e-12
        assert omega_key(r.lhs) > omega_key(r.rhs)


def test_run_synthesis_deterministic():
    a = run_synthesis(GW, SynthParams(1, 1, 1), seed_rules=GW.rules, seed=5)
    b = run_synthesis(GW, SynthParams(1, 1, 1), seed_rules=GW.rules, seed=5)
    assert a.counts == b.counts
    assert [r.name for r in a.rules.rules] == [r.name for r in b.rules.rules]
    for ra, rb in zip(a.rules.rules, b.rules.rules):
        assert canonical_bytes(ra.lhs) == canonical_bytes(rb.lhs)


def test_filtered_at_most_naive():
    filt = run_synthesis(GW, SynthParams(2, 2, 2), seed_rules=GW.rules, seed=7)
    naive = run_synthesis(GW, SynthParams(2, 2, 2, naive=True), seed=7)
    assert filt.counts["rules"] <= naive.counts["rules"]
    assert filt.counts["filtered_by_redex"] > 0
    assert naive.counts["filtered_by_redex"] == 0


def test_single_state_generator_yields_no_rules():
    # a generic single-state signature has all-singleton classes
    from strigraph.signature import MonoidalSignature, MorphismType, ObjectType
    from strigraph.tensor import Tensor, Valuation
    from strigraph.theories import Theory, build_theory
    sig = MonoidalSignature("one", [ObjectType("Q", 2)],
                            [MorphismType("u", (), ("Q",))])
    val = Valuation({"Q": 2}, {"u": Tensor((("Q", 2),), (),
                                           np.array([1.0, 0.618]))})
    th = build_theory("one", sig, val, [])
    rep = run_synthesis(th, SynthParams(2, 2, 0), seed=0)
    assert rep.counts["rules"] == 0
