"""Seeded random generators for graphs, rules, and cospans.

Used by property tests and the acceptance suite; every generator takes an
explicit ``random.Random`` so runs are reproducible.
"""
from __future__ import annotations

import random
from .graph import (GraphBuilder, StringGraph, expand_wire, normalize_wires,
                    plug_self)
from .signature import MonoidalSignature


def random_graph(sig: MonoidalSignature, rng: random.Random,
                 max_boxes: int = 4, max_strands: int = 3,
                 max_circles: int = 2, max_expand: int = 6,
                 max_plugs: int = 3) -> StringGraph:
    """A random valid string graph: boxes, strands, circles, stretched wires,
    then a few random output-to-input pluggings."""
    b = GraphBuilder(sig)
    morphs = sorted(sig.morphisms)
    objs = sorted(sig.objects)
    for _ in range(rng.randint(0, max_boxes)):
        name = rng.choice(morphs)
        mt = sig.morphism(name)
        data = None
        if mt.data_kind == "angle":
            from fractions import Fraction
            data = Fraction(rng.randint(0, 7), 4)
        b.add_generator(name, data)
    for _ in range(rng.randint(0, max_strands)):
        t = rng.choice(objs)
        w1, w2 = b.add_wire(t), b.add_wire(t)
        b.add_edge(w1, w2)
    for _ in range(rng.randint(0, max_circles)):
        t = rng.choice(objs)
        w = b.add_wire(t)
        b.add_edge(w, w)
    g = b.freeze()
    for _ in range(rng.randint(0, max_plugs)):
        outs = [v for v in g.output_order]
        ins = [v for v in g.input_order]
        rng.shuffle(outs)
        ok = False
        for o in outs:
            cands = [i for i in ins
                     if i != o and g.vertices[i].type == g.vertices[o].type]
            if cands:
                g = plug_self(g, [(o, rng.choice(cands))])
                ok = True
                break
        if not ok:
            break
    g = normalize_wires(g)
    for _ in range(rng.randint(0, max_expand)):
        if not g.edges:
            break
        eid = rng.choice(sorted(g.edges))
        g = expand_wire(g, eid, rng.randint(1, 2))
    return g


def demo_signature(n_objects: int = 1) -> MonoidalSignature:
    """A small test signature: white/black dots and a couple of boxes."""
    from .signature import MorphismType, ObjectType
    objs = [ObjectType("Q", 2)]
    if n_objects > 1:
        objs.append(ObjectType("R", 3))
    q = "Q"
    morphs = [
        MorphismType("w", (q, q), (q,)),       # white merge
        MorphismType("b", (q,), (q, q)),       # black split
        MorphismType("u", (), (q,)),           # state
        MorphismType("k", (q,), ()),           # effect
        MorphismType("f", (q,), (q,)),         # endo box
    ]
    if n_objects > 1:
        morphs.append(MorphismType("g", ("Q", "R"), ("R",)))
    return MonoidalSignature("demo", objs, morphs)
