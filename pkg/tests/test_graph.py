import random

import pytest

from strigraph.canon import iso_equal
from strigraph.errors import (NoSuchEdge, NotBoundaryCoherent,
                              SignatureMismatch, TypeMismatch)
from strigraph.graph import (GraphBuilder, Tag, boundary, contract_vertex,
                             contractible_vertices, disjoint_union,
                             empty_graph, expand_wire, is_minimal,
                             normalize_wires, plug, plug_self, relabel,
                             validate, wire_homeomorphic, wires)
from strigraph.randgen import demo_signature, random_graph

SIG = demo_signature()


def strand(sig=SIG, t="Q"):
    b = GraphBuilder(sig)
    w1, w2 = b.add_wire(t), b.add_wire(t)
    b.add_edge(w1, w2)
    return b.freeze([w1], [w2])


def single_box(name="f", sig=SIG):
    b = GraphBuilder(sig)
    box, ins, outs = b.add_generator(name)
    return b.freeze(ins, outs)


def circle(n=1, sig=SIG, t="Q"):
    b = GraphBuilder(sig)
    ws = [b.add_wire(t) for _ in range(n)]
    for a, c in zip(ws, ws[1:] + ws[:1]):
        b.add_edge(a, c)
    return b.freeze([], [])


# -- validation ---------------------------------------------------------------

def test_validate_ok_box():
    assert validate(single_box()) == []


def test_validate_wire_out_degree():
    b = GraphBuilder(SIG)
    w, a, c = b.add_wire("Q"), b.add_wire("Q"), b.add_wire("Q")
    b.add_edge(w, a)
    b.add_edge(w, c)
    g = b.freeze()
    assert "WireOutDegree" in [v.code for v in validate(g)]


def test_validate_local_iso_missing_port():
    b = GraphBuilder(SIG)
    box = b.add_box("w")           # w : Q x Q -> Q
    win = b.add_wire("Q")
    b.add_edge(win, box, Tag("in", "w", 0))
    wout = b.add_wire("Q")
    b.add_edge(box, wout, Tag("out", "w", 0))
    g = b.freeze()
    assert "LocalIsoViolation" in [v.code for v in validate(g)]


def test_validate_port_type_mismatch():
    sig = demo_signature(2)
    b = GraphBuilder(sig)
    box = b.add_box("g")           # g : Q x R -> R
    w0, w1, w2 = b.add_wire("Q"), b.add_wire("Q"), b.add_wire("R")
    b.add_edge(w0, box, Tag("in", "g", 0))
    b.add_edge(w1, box, Tag("in", "g", 1))   # should be R
    b.add_edge(box, w2, Tag("out", "g", 0))
    g = b.freeze()
    assert "PortTypeMismatch" in [v.code for v in validate(g)]


# -- boundary -----------------------------------------------------------------

def test_boundary_isolated_vertex_is_both():
    b = GraphBuilder(SIG)
    v = b.add_wire("Q")
    g = b.freeze()
    assert boundary(g) == ((v,), (v,))


def test_boundary_state_box():
    g = single_box("u")            # u : I -> Q
    ins, outs = boundary(g)
    assert ins == () and len(outs) == 1


def test_boundary_chain():
    g = strand()
    ins, outs = boundary(g)
    assert len(ins) == 1 and len(outs) == 1 and ins != outs


# -- normalization ------------------------------------------------------------

def chain_between_boxes(n_mid: int):
    """f -> (n_mid wire-vertices) -> f."""
    b = GraphBuilder(SIG)
    b1, _, o1 = b.add_generator("f")
    b2, i2, _ = b.add_generator("f")
    g = b.freeze()
    # join the two port wires into one wire of n_mid vertices
    g = plug_self(g, [(o1[0], i2[0])])
    g = normalize_wires(g)
    eid = next(e for e, d in g.edges.items()
               if g.vertices[d.src].kind == "box" or g.vertices[d.tgt].kind == "box")
    # g now minimal: f -> w -> f; expand to reach n_mid vertices
    if n_mid > 1:
        mid = [e for e, d in g.edges.items() if d.tag.kind == "in"][0]
        g = expand_wire(g, mid, n_mid - 1)
    del eid
    return g


def test_normalize_box_to_box_wire():
    g = chain_between_boxes(3)
    assert len(g.wire_vertices()) > 1
    n = normalize_wires(g)
    assert validate(n) == []
    inner = [v for v in n.wire_vertices()
             if n.in_edge(v) is not None and n.out_edge(v) is not None]
    assert len(inner) == 1


def test_normalize_circle_to_single_vertex():
    g = circle(4)
    n = normalize_wires(g)
    assert len(n.vertices) == 1
    v = next(iter(n.vertices))
    assert n.in_edge(v) == n.out_edge(v) is not None


def test_normalize_strand_keeps_two():
    g = strand()
    stretched = expand_wire(g, next(iter(g.edges)), 3)
    n = normalize_wires(stretched)
    assert len(n.vertices) == 2
    assert n.input_order != n.output_order


def test_normalize_fixpoint():
    g = normalize_wires(random_graph(SIG, random.Random(5)))
    assert normalize_wires(g) is g


def test_normalize_step_budget_and_confluence_small():
    rng = random.Random(7)
    for _ in range(50):
        g = random_graph(SIG, rng)
        n_wire = len(g.wire_vertices())
        base = normalize_wires(g)
        # every contraction removes one wire-vertex
        assert n_wire - len(base.wire_vertices()) <= n_wire
        for trial in range(3):
            order = list(g.vertices)
            rng.shuffle(order)
            alt = normalize_wires(g, order=order)
            assert iso_equal(base, alt)


def test_contract_preserves_boundary():
    g = strand()
    g2 = expand_wire(g, next(iter(g.edges)), 2)
    while not is_minimal(g2):
        v = contractible_vertices(g2)[0]
        g2 = contract_vertex(g2, v)
        assert set(g2.input_order) <= set(g2.vertices)
    assert g2.input_order == g.input_order
    assert g2.output_order == g.output_order


# -- wire homeomorphism ---------------------------------------------------------

def test_homeomorphic_stretched():
    g = single_box("f")
    eid = next(iter(g.edges))
    assert wire_homeomorphic(g, expand_wire(g, eid, 3))


def test_circle_vs_strand_not_homeomorphic():
    assert not wire_homeomorphic(circle(2), strand())


def test_different_boxes_not_homeomorphic():
    assert not wire_homeomorphic(single_box("f"), single_box("b"))


# -- expand -------------------------------------------------------------------

def test_expand_then_normalize_roundtrip():
    g = normalize_wires(random_graph(SIG, random.Random(3)))
    if g.edges:
        eid = sorted(g.edges)[0]
        h = expand_wire(g, eid, 2)
        assert len(h.vertices) == len(g.vertices) + 2
        assert iso_equal(normalize_wires(h), g)


def test_expand_missing_edge():
    with pytest.raises(NoSuchEdge):
        expand_wire(strand(), 999, 1)


def test_expand_in_edge_keeps_port_tag():
    g = single_box("f")
    in_eid = next(e for e, d in g.edges.items() if d.tag.kind == "in")
    h = expand_wire(g, in_eid, 1)
    in_edges = [d for d in h.edges.values() if d.tag.kind == "in"]
    assert len(in_edges) == 1
    assert h.vertices[in_edges[0].src].kind == "wire"


# -- plug / disjoint union ------------------------------------------------------

def test_plug_counts_and_validity():
    g, h = single_box("u"), single_box("k")   # u: I->Q, k: Q->I
    out_v = g.output_order[0]
    in_v = h.input_order[0]
    p = plug(g, h, [(out_v, in_v)])
    assert validate(p) == []
    assert len(p.vertices) == len(g.vertices) + len(h.vertices) - 1
    assert p.input_order == () and p.output_order == ()


def test_plug_type_mismatch():
    sig = demo_signature(2)
    b = GraphBuilder(sig)
    w1, w2 = b.add_wire("Q"), b.add_wire("Q")
    b.add_edge(w1, w2)
    gq = b.freeze([w1], [w2])
    b2 = GraphBuilder(sig)
    v1, v2 = b2.add_wire("R"), b2.add_wire("R")
    b2.add_edge(v1, v2)
    gr = b2.freeze([v1], [v2])
    with pytest.raises(TypeMismatch):
        plug(gq, gr, [(gq.output_order[0], gr.input_order[0])])


def test_plug_inputs_together_rejected():
    g, h = strand(), strand()
    with pytest.raises(NotBoundaryCoherent):
        plug(g, h, [(g.input_order[0], h.input_order[0])])


def test_plug_pseudo_identity_is_identity_up_to_homeo():
    g = single_box("f")
    s = strand()
    p = plug(g, s, [(g.output_order[0], s.input_order[0])])
    assert wire_homeomorphic(p, g)


def test_plug_self_closes_circle():
    s = strand()
    c = plug_self(s, [(s.output_order[0], s.input_order[0])])
    assert validate(c) == []
    ws = wires(c)
    assert len(ws) == 1 and ws[0].kind == "circle"


def test_disjoint_union_counts_and_order():
    g, h = single_box("f"), strand()
    u, _, _ = disjoint_union(g, h)
    assert len(u.vertices) == len(g.vertices) + len(h.vertices)
    assert len(u.input_order) == len(g.input_order) + len(h.input_order)
    e = empty_graph(SIG)
    ug, _, _ = disjoint_union(g, e)
    assert iso_equal(ug, g)


def test_disjoint_union_signature_mismatch():
    other = demo_signature(2)
    with pytest.raises(SignatureMismatch):
        disjoint_union(single_box("f"), single_box("f", other))


# -- random validity ------------------------------------------------------------

def test_random_graphs_valid_and_normalize_valid():
    rng = random.Random(11)
    for _ in range(60):
        g = random_graph(SIG, rng)
        assert validate(g) == []
        assert validate(normalize_wires(g)) == []


def test_relabel_is_isomorphic():
    rng = random.Random(13)
    for _ in range(30):
        g = random_graph(SIG, rng)
        assert iso_equal(g, relabel(g))
