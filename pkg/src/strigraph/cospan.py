"""Framed point graphs and framed cospans.

A framed cospan is a string graph with ordered, signed boundary frames; these
are the morphisms of the free symmetric traced category (all-positive frames)
and the free compact closed category (signed frames). Composition plugs the
shared frame; pseudo-identities, symmetries, caps, cups, and trace give the
structure maps, all up to wire-homeomorphism.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from .errors import FrameMismatch, SignatureMismatch, Violation
from .graph import (GraphBuilder, StringGraph, disjoint_union, normalize_wires,
                    plug_self)
from .rewrite import Limits, RewriteSystem, joinable
from .signature import MonoidalSignature

POS = "+"
NEG = "-"


@dataclass(frozen=True)
class FramedPointGraph:
    points: tuple[tuple[str, str], ...]    # (object type, sign)

    def __post_init__(self) -> None:
        object.__setattr__(self, "points", tuple(tuple(p) for p in self.points))

    @staticmethod
    def of(*points: tuple[str, str]) -> "FramedPointGraph":
        return FramedPointGraph(tuple(points))

    @staticmethod
    def positive(types: list[str]) -> "FramedPointGraph":
        return FramedPointGraph(tuple((t, POS) for t in types))

    def star(self) -> "FramedPointGraph":
        return FramedPointGraph(tuple((t, NEG if s == POS else POS)
                                      for t, s in self.points))

    def concat(self, other: "FramedPointGraph") -> "FramedPointGraph":
        return FramedPointGraph(self.points + other.points)

    def is_positive(self) -> bool:
        return all(s == POS for _, s in self.points)

    def __len__(self) -> int:
        return len(self.points)


EMPTY_FRAME = FramedPointGraph(())


@dataclass
class FramedCospan:
    dom: FramedPointGraph
    cod: FramedPointGraph
    graph: StringGraph
    d: tuple[int, ...]
    c: tuple[int, ...]

    def signature(self) -> MonoidalSignature:
        return self.graph.sig


def validate_cospan(f: FramedCospan) -> list[Violation]:
    out: list[Violation] = []
    g = f.graph
    ins, outs = set(g.input_order), set(g.output_order)
    for v in g.wire_vertices():
        if g.in_edge(v) is None and g.out_edge(v) is None:
            out.append(Violation("IsolatedWireVertex", str(v)))
    if len(f.d) != len(f.dom) or len(f.c) != len(f.cod):
        out.append(Violation("FrameArityMismatch"))
        return out
    image = list(f.d) + list(f.c)
    if len(set(image)) != len(image) or set(image) != ins | outs:
        out.append(Violation("BoundaryNotCovered"))
    for (t, s), v in zip(f.dom.points, f.d):
        if g.vertices[v].type != t:
            out.append(Violation("FrameTypeMismatch", str(v)))
        if (v in ins) != (s == POS):
            out.append(Violation("FramePolarity", str(v), "dom"))
    for (t, s), v in zip(f.cod.points, f.c):
        if g.vertices[v].type != t:
            out.append(Violation("FrameTypeMismatch", str(v)))
        if (v in outs) != (s == POS):
            out.append(Violation("FramePolarity", str(v), "cod"))
    return out


def _normalized(f: FramedCospan) -> FramedCospan:
    """Wire-normalize the underlying graph (frame vertices survive)."""
    g = normalize_wires(f.graph)
    return FramedCospan(f.dom, f.cod, g, f.d, f.c)


def compose(f: FramedCospan, g: FramedCospan) -> FramedCospan:
    """g after f: plug f's codomain boundary into g's domain boundary."""
    if f.graph.sig != g.graph.sig:
        raise SignatureMismatch(f"{f.graph.sig.name} vs {g.graph.sig.name}")
    if f.cod != g.dom:
        raise FrameMismatch(f"{f.cod} vs {g.dom}")
    u, fmap, gmap = disjoint_union(f.graph, g.graph)
    pairs = []
    for (t, s), fv, gv in zip(f.cod.points, f.c, g.d):
        if s == POS:
            pairs.append((fmap[fv], gmap[gv]))   # output of f into input of g
        else:
            pairs.append((gmap[gv], fmap[fv]))   # wire runs upward
    plugged = plug_self(u, pairs)
    res = FramedCospan(f.dom, g.cod, plugged,
                       tuple(fmap[v] for v in f.d),
                       tuple(gmap[v] for v in g.c))
    return _normalized(res)


def tensor(f: FramedCospan, g: FramedCospan) -> FramedCospan:
    if f.graph.sig != g.graph.sig:
        raise SignatureMismatch(f"{f.graph.sig.name} vs {g.graph.sig.name}")
    u, fmap, gmap = disjoint_union(f.graph, g.graph)
    return FramedCospan(f.dom.concat(g.dom), f.cod.concat(g.cod), u,
                        tuple(fmap[v] for v in f.d) + tuple(gmap[v] for v in g.d),
                        tuple(fmap[v] for v in f.c) + tuple(gmap[v] for v in g.c))


def pseudo_identity(sig: MonoidalSignature, x: FramedPointGraph) -> FramedCospan:
    """Two wire-vertices per point, one edge each, directed by sign."""
    b = GraphBuilder(sig)
    d_side, c_side = [], []
    for t, s in x.points:
        vd, vc = b.add_wire(t), b.add_wire(t)
        if s == POS:
            b.add_edge(vd, vc)
        else:
            b.add_edge(vc, vd)
        d_side.append(vd)
        c_side.append(vc)
    ins = [v for (t, s), v in zip(x.points, d_side) if s == POS] + \
          [v for (t, s), v in zip(x.points, c_side) if s == NEG]
    outs = [v for (t, s), v in zip(x.points, c_side) if s == POS] + \
           [v for (t, s), v in zip(x.points, d_side) if s == NEG]
    g = b.freeze(ins, outs)
    return FramedCospan(x, x, g, tuple(d_side), tuple(c_side))


def symmetry(sig: MonoidalSignature, x: FramedPointGraph,
             y: FramedPointGraph) -> FramedCospan:
    """Strand crossing: dom = x ++ y, cod = y ++ x."""
    ident = pseudo_identity(sig, x.concat(y))
    cod = y.concat(x)
    # reorder the codomain frame: y's strands first, then x's
    perm = list(range(len(x), len(x) + len(y))) + list(range(len(x)))
    c = tuple(ident.c[i] for i in perm)
    return FramedCospan(x.concat(y), cod, ident.graph, ident.d, c)


def cap(sig: MonoidalSignature, t: str) -> FramedCospan:
    """I -> [(t,-),(t,+)]: a strand with both ends on the codomain."""
    b = GraphBuilder(sig)
    w1, w2 = b.add_wire(t), b.add_wire(t)
    b.add_edge(w1, w2)
    g = b.freeze([w1], [w2])
    return FramedCospan(EMPTY_FRAME, FramedPointGraph.of((t, NEG), (t, POS)),
                        g, (), (w1, w2))


def cup(sig: MonoidalSignature, t: str) -> FramedCospan:
    """[(t,+),(t,-)] -> I: a strand with both ends on the domain."""
    b = GraphBuilder(sig)
    w1, w2 = b.add_wire(t), b.add_wire(t)
    b.add_edge(w1, w2)
    g = b.freeze([w1], [w2])
    return FramedCospan(FramedPointGraph.of((t, POS), (t, NEG)), EMPTY_FRAME,
                        g, (w1, w2), ())


def trace(f: FramedCospan, k: int) -> FramedCospan:
    """Join the last k (positive) domain strands to the last k codomain strands."""
    if k == 0:
        return f
    if len(f.dom) < k or len(f.cod) < k:
        raise FrameMismatch("not enough strands to trace")
    dt = f.dom.points[len(f.dom) - k:]
    ct = f.cod.points[len(f.cod) - k:]
    if dt != ct or any(s != POS for _, s in dt):
        raise FrameMismatch(f"traced strands must match and be positive: {dt} vs {ct}")
    b = f.graph.builder()
    for j in range(k):
        vd = f.d[len(f.d) - k + j]
        vc = f.c[len(f.c) - k + j]
        b.add_edge(vc, vd)
    keep_d = f.d[:len(f.d) - k]
    keep_c = f.c[:len(f.c) - k]
    drop = set(f.d[len(f.d) - k:]) | set(f.c[len(f.c) - k:])
    ins = [v for v in f.graph.input_order if v not in drop]
    outs = [v for v in f.graph.output_order if v not in drop]
    g = b.freeze(ins, outs)
    res = FramedCospan(FramedPointGraph(f.dom.points[:len(f.dom) - k]),
                       FramedPointGraph(f.cod.points[:len(f.cod) - k]),
                       g, keep_d, keep_c)
    return _normalized(res)


def frame_ordered_graph(f: FramedCospan) -> StringGraph:
    """The underlying graph with boundary orders fixed by the frames.

    Inputs: positive domain points then negative codomain points; outputs:
    positive codomain points then negative domain points. Gives isomorphism
    and evaluation a frame-respecting boundary convention.
    """
    ins = [v for (t, s), v in zip(f.dom.points, f.d) if s == POS] + \
          [v for (t, s), v in zip(f.cod.points, f.c) if s == NEG]
    outs = [v for (t, s), v in zip(f.cod.points, f.c) if s == POS] + \
           [v for (t, s), v in zip(f.dom.points, f.d) if s == NEG]
    g = f.graph
    return StringGraph(g.sig, dict(g.vertices), dict(g.edges), ins, outs)


def equal_mod(f: FramedCospan, g: FramedCospan, system: RewriteSystem,
              limits: Limits = Limits(max_steps=64)) -> bool:
    """True iff the cospans are joinable under ``system`` after normalization."""
    if f.dom != g.dom or f.cod != g.cod:
        raise FrameMismatch("frames differ")
    gf, gg = frame_ordered_graph(f), frame_ordered_graph(g)
    return joinable(gf, gg, system, limits)


def equal_up_to_wires(f: FramedCospan, g: FramedCospan) -> bool:
    """Equality in the wire-homeomorphism rewrite category."""
    if f.dom != g.dom or f.cod != g.cod:
        return False
    from .graph import wire_homeomorphic
    return wire_homeomorphic(frame_ordered_graph(f), frame_ordered_graph(g))


@dataclass
class EquivClassHandle:
    """A framed cospan considered up to a rewrite system."""

    rep: FramedCospan
    system: RewriteSystem
    limits: Limits = field(default_factory=lambda: Limits(max_steps=64))

    def compose(self, other: "EquivClassHandle") -> "EquivClassHandle":
        return EquivClassHandle(compose(self.rep, other.rep), self.system,
                                self.limits)

    def tensor(self, other: "EquivClassHandle") -> "EquivClassHandle":
        return EquivClassHandle(tensor(self.rep, other.rep), self.system,
                                self.limits)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, EquivClassHandle):
            return NotImplemented
        return equal_mod(self.rep, other.rep, self.system, self.limits)

    __hash__ = None  # handles compare semantically


def cospan_of_graph(g: StringGraph) -> FramedCospan:
    """The positive cospan with frames read off the graph's boundary."""
    g = normalize_wires(g)
    dom = FramedPointGraph.positive([g.vertices[v].type for v in g.input_order])
    cod = FramedPointGraph.positive([g.vertices[v].type for v in g.output_order])
    return FramedCospan(dom, cod, g, tuple(g.input_order), tuple(g.output_order))


def evaluate_cospan(f: FramedCospan, valuation):
    """Evaluate as a tensor with uppers = codomain points, lowers = domain
    points (frame order); a negative strand's index is read from the
    opposite graph boundary and transposed onto its frame's side."""
    from .tensor import Tensor, evaluate_graph
    g = f.graph
    ins = [v for v in list(f.d) + list(f.c) if v in set(g.input_order)]
    outs = [v for v in list(f.d) + list(f.c) if v in set(g.output_order)]
    gg = StringGraph(g.sig, dict(g.vertices), dict(g.edges), ins, outs)
    t = evaluate_graph(gg, valuation)
    n_out = len(outs)

    def axis_of(v: int) -> int:
        return outs.index(v) if v in set(outs) else n_out + ins.index(v)

    order = [axis_of(v) for v in f.c] + [axis_of(v) for v in f.d]
    arr = t.array.transpose(order) if order else t.array
    upper = tuple((ty, valuation.dim(ty)) for ty, _ in f.cod.points)
    lower = tuple((ty, valuation.dim(ty)) for ty, _ in f.dom.points)
    return Tensor(upper, lower, arr)
