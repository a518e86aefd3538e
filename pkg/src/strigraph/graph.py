"""String graphs: typed graphs of wire- and box-vertices.

Wires are chains of wire-vertices; boxes carry generators. Every box's
incident edges must mirror its generator's ports exactly (local
isomorphism), and wire-vertices have at most one in- and one out-edge.
Graphs are immutable; all operations return new graphs.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Iterable, Optional

from .errors import (NoSuchEdge, NotBoundaryCoherent, SignatureMismatch,
                     StaleOrder, TypeMismatch, Violation)
from .signature import MonoidalSignature

WIRE = "wire"
BOX = "box"


@dataclass(frozen=True)
class Vertex:
    kind: str                 # WIRE | BOX
    type: str                 # object name for wires, morphism name for boxes
    data: Any = None          # Fraction (angle) | str (opaque) | None


@dataclass(frozen=True)
class Tag:
    kind: str                 # "mid" | "in" | "out"
    morphism: Optional[str] = None
    port: Optional[int] = None

    def key(self) -> tuple:
        return (self.kind, self.morphism or "", -1 if self.port is None else self.port)


MID = Tag("mid")


@dataclass(frozen=True)
class Edge:
    src: int
    tgt: int
    tag: Tag


class StringGraph:
    """Immutable string graph over a signature.

    ``input_order`` / ``output_order`` list the boundary wire-vertices in
    their declared order; isolated wire-vertices appear in both.
    """

    __slots__ = ("sig", "vertices", "edges", "input_order", "output_order",
                 "_in_edge", "_out_edge", "_canon", "_next_id")

    def __init__(self, sig: MonoidalSignature, vertices: dict[int, Vertex],
                 edges: dict[int, Edge], input_order: Iterable[int],
                 output_order: Iterable[int]):
        self.sig = sig
        self.vertices = vertices
        self.edges = edges
        self.input_order = tuple(input_order)
        self.output_order = tuple(output_order)
        # wire-vertex incidence: at most one entry each by validity
        self._in_edge: dict[int, int] = {}
        self._out_edge: dict[int, int] = {}
        for eid, e in edges.items():
            if vertices[e.tgt].kind == WIRE:
                self._in_edge.setdefault(e.tgt, eid)
            if vertices[e.src].kind == WIRE:
                self._out_edge.setdefault(e.src, eid)
        self._canon = None
        self._next_id = max(list(vertices) + list(edges), default=-1) + 1

    # -- basic accessors ---------------------------------------------------

    def wire_vertices(self) -> list[int]:
        return [v for v, d in self.vertices.items() if d.kind == WIRE]

    def box_vertices(self) -> list[int]:
        return [v for v, d in self.vertices.items() if d.kind == BOX]

    def in_edge(self, v: int) -> Optional[int]:
        return self._in_edge.get(v)

    def out_edge(self, v: int) -> Optional[int]:
        return self._out_edge.get(v)

    def box_ports(self, b: int) -> dict[tuple[str, int], int]:
        """Map (direction, port) -> incident edge id for box ``b``."""
        ports: dict[tuple[str, int], int] = {}
        for eid, e in self.edges.items():
            if e.tgt == b and e.tag.kind == "in":
                ports[("in", e.tag.port)] = eid
            if e.src == b and e.tag.kind == "out":
                ports[("out", e.tag.port)] = eid
        return ports

    def vertex_count(self) -> int:
        return len(self.vertices)

    def __repr__(self) -> str:
        return (f"StringGraph({len(self.vertices)}v, {len(self.edges)}e, "
                f"{len(self.input_order)}->{len(self.output_order)})")

    # -- builders ----------------------------------------------------------

    def builder(self) -> "GraphBuilder":
        """A mutable copy of this graph."""
        b = GraphBuilder(self.sig)
        b.vertices = dict(self.vertices)
        b.edges = dict(self.edges)
        b.next_id = self._next_id
        return b


class GraphBuilder:
    """Mutable construction buffer; ``freeze`` yields a StringGraph."""

    def __init__(self, sig: MonoidalSignature):
        self.sig = sig
        self.vertices: dict[int, Vertex] = {}
        self.edges: dict[int, Edge] = {}
        self.next_id = 0

    def _fresh(self) -> int:
        i = self.next_id
        self.next_id += 1
        return i

    def add_wire(self, obj_type: str) -> int:
        v = self._fresh()
        self.vertices[v] = Vertex(WIRE, obj_type)
        return v

    def add_box(self, morphism: str, data: Any = None) -> int:
        v = self._fresh()
        self.vertices[v] = Vertex(BOX, morphism, data)
        return v

    def add_edge(self, src: int, tgt: int, tag: Tag = MID) -> int:
        e = self._fresh()
        self.edges[e] = Edge(src, tgt, tag)
        return e

    def add_generator(self, morphism: str, data: Any = None,
                      ins: Optional[list[int]] = None,
                      outs: Optional[list[int]] = None) -> tuple[int, list[int], list[int]]:
        """Add a box with one fresh wire-vertex per port.

        Existing wire-vertices may be supplied for some ports via ``ins``
        / ``outs`` (None entries get fresh vertices). Returns the box id and
        the in/out wire-vertex ids in port order.
        """
        mt = self.sig.morphism(morphism)
        b = self.add_box(morphism, data)
        in_ws: list[int] = []
        out_ws: list[int] = []
        for i, obj in enumerate(mt.dom):
            w = ins[i] if ins is not None and ins[i] is not None else self.add_wire(obj)
            self.add_edge(w, b, Tag("in", morphism, i))
            in_ws.append(w)
        for j, obj in enumerate(mt.cod):
            w = outs[j] if outs is not None and outs[j] is not None else self.add_wire(obj)
            self.add_edge(b, w, Tag("out", morphism, j))
            out_ws.append(w)
        return b, in_ws, out_ws

    def remove_vertex(self, v: int) -> None:
        del self.vertices[v]

    def remove_edge(self, e: int) -> None:
        del self.edges[e]

    def freeze(self, input_order: Optional[Iterable[int]] = None,
               output_order: Optional[Iterable[int]] = None) -> StringGraph:
        """Finalize. Boundary orders default to ascending vertex id."""
        ins_set = {v for v, d in self.vertices.items() if d.kind == WIRE}
        outs_set = set(ins_set)
        for e in self.edges.values():
            if self.vertices[e.tgt].kind == WIRE:
                ins_set.discard(e.tgt)
            if self.vertices[e.src].kind == WIRE:
                outs_set.discard(e.src)
        if input_order is None:
            input_order = sorted(ins_set)
        if output_order is None:
            output_order = sorted(outs_set)
        return StringGraph(self.sig, dict(self.vertices), dict(self.edges),
                           input_order, output_order)


def empty_graph(sig: MonoidalSignature) -> StringGraph:
    return GraphBuilder(sig).freeze()


# -- validation --------------------------------------------------------------


def validate(g: StringGraph) -> list[Violation]:
    """All invariant violations of ``g``; empty list iff valid."""
    out: list[Violation] = []
    in_deg: dict[int, int] = {}
    out_deg: dict[int, int] = {}
    for eid, e in g.edges.items():
        if e.src not in g.vertices or e.tgt not in g.vertices:
            out.append(Violation("DanglingEdge", str(eid)))
            continue
        in_deg[e.tgt] = in_deg.get(e.tgt, 0) + 1
        out_deg[e.src] = out_deg.get(e.src, 0) + 1
        sv, tv = g.vertices[e.src], g.vertices[e.tgt]
        if e.tag.kind == "mid":
            if sv.kind != WIRE or tv.kind != WIRE:
                out.append(Violation("BadTag", str(eid), "mid edge on a box"))
            elif sv.type != tv.type:
                out.append(Violation("WireTypeMismatch", str(eid),
                                     f"{sv.type} -> {tv.type}"))
        elif e.tag.kind == "in":
            if tv.kind != BOX or sv.kind != WIRE:
                out.append(Violation("BadTag", str(eid), "in edge endpoints"))
            else:
                mt = g.sig.morphisms.get(tv.type)
                if mt is None or e.tag.morphism != tv.type or \
                        e.tag.port is None or e.tag.port >= len(mt.dom):
                    out.append(Violation("BadTag", str(eid), "in port"))
                elif sv.type != mt.dom[e.tag.port]:
                    out.append(Violation("PortTypeMismatch", str(eid)))
        elif e.tag.kind == "out":
            if sv.kind != BOX or tv.kind != WIRE:
                out.append(Violation("BadTag", str(eid), "out edge endpoints"))
            else:
                mt = g.sig.morphisms.get(sv.type)
                if mt is None or e.tag.morphism != sv.type or \
                        e.tag.port is None or e.tag.port >= len(mt.cod):
                    out.append(Violation("BadTag", str(eid), "out port"))
                elif tv.type != mt.cod[e.tag.port]:
                    out.append(Violation("PortTypeMismatch", str(eid)))
        else:
            out.append(Violation("BadTag", str(eid), e.tag.kind))

    for v, d in g.vertices.items():
        if d.kind == WIRE:
            if d.type not in g.sig.objects:
                out.append(Violation("UnknownObject", str(v), d.type))
            if in_deg.get(v, 0) > 1:
                out.append(Violation("WireInDegree", str(v)))
            if out_deg.get(v, 0) > 1:
                out.append(Violation("WireOutDegree", str(v)))
        else:
            mt = g.sig.morphisms.get(d.type)
            if mt is None:
                out.append(Violation("UnknownMorphism", str(v), d.type))
                continue
            ports = g.box_ports(v)
            want = {("in", i) for i in range(len(mt.dom))} | \
                   {("out", j) for j in range(len(mt.cod))}
            have: dict[tuple[str, int], int] = {}
            for eid, e in g.edges.items():
                if e.tgt == v and e.tag.kind == "in":
                    have[("in", e.tag.port)] = have.get(("in", e.tag.port), 0) + 1
                elif e.src == v and e.tag.kind == "out":
                    have[("out", e.tag.port)] = have.get(("out", e.tag.port), 0) + 1
                elif v in (e.src, e.tgt) and not (e.tgt == v and e.tag.kind == "in") \
                        and not (e.src == v and e.tag.kind == "out"):
                    out.append(Violation("LocalIsoViolation", str(v),
                                         "stray incident edge"))
            if set(have) != want or any(n != 1 for n in have.values()):
                out.append(Violation("LocalIsoViolation", str(v),
                                     f"ports {sorted(have)} != {sorted(want)}"))
            del ports

    ins, outs = _recompute_boundary(g)
    if set(g.input_order) != ins or len(set(g.input_order)) != len(g.input_order):
        out.append(Violation("StaleInputOrder", detail=f"{g.input_order}"))
    if set(g.output_order) != outs or len(set(g.output_order)) != len(g.output_order):
        out.append(Violation("StaleOutputOrder", detail=f"{g.output_order}"))
    return out


def _recompute_boundary(g: StringGraph) -> tuple[set[int], set[int]]:
    ins = {v for v, d in g.vertices.items() if d.kind == WIRE and g.in_edge(v) is None}
    outs = {v for v, d in g.vertices.items() if d.kind == WIRE and g.out_edge(v) is None}
    return ins, outs


def boundary(g: StringGraph) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """(inputs, outputs) in declared order; raises StaleOrder on drift."""
    ins, outs = _recompute_boundary(g)
    if set(g.input_order) != ins or set(g.output_order) != outs:
        raise StaleOrder("declared boundary order disagrees with edges")
    return g.input_order, g.output_order


def is_point_graph(g: StringGraph) -> bool:
    return not g.edges and all(d.kind == WIRE for d in g.vertices.values())


# -- wires -------------------------------------------------------------------


@dataclass
class Wire:
    """A maximal chain or cycle of wire-vertices.

    For chains, ``vertices`` runs from the source end to the target end;
    ``src_end``/``tgt_end`` are ("box", box_id, port_edge_id) or ("boundary",).
    For circles, ``vertices`` is the cycle in edge order and both ends are None.
    """

    kind: str                      # "chain" | "circle"
    vertices: list[int]
    src_end: Optional[tuple] = None
    tgt_end: Optional[tuple] = None
    obj_type: str = ""


def wires(g: StringGraph) -> list[Wire]:
    """Decompose all wire-vertices of ``g`` into maximal wires."""
    seen: set[int] = set()
    out: list[Wire] = []
    for v, d in sorted(g.vertices.items()):
        if d.kind != WIRE or v in seen:
            continue
        # walk backwards to the start of the chain
        start = v
        steps = 0
        is_circle = False
        while True:
            ein = g.in_edge(start)
            if ein is None:
                break
            prev = g.edges[ein].src
            if g.vertices[prev].kind == BOX:
                break
            if prev == v:
                is_circle = True
                break
            start = prev
            steps += 1
            if steps > len(g.vertices):
                is_circle = True
                break
        chain: list[int] = []
        cur = start
        while cur is not None and cur not in seen:
            chain.append(cur)
            seen.add(cur)
            eout = g.out_edge(cur)
            if eout is None:
                break
            nxt = g.edges[eout].tgt
            if g.vertices[nxt].kind == BOX:
                break
            cur = nxt
        if is_circle:
            w = Wire("circle", chain)
        else:
            ein = g.in_edge(chain[0])
            src_end: tuple = ("boundary",)
            if ein is not None:
                src_end = ("box", g.edges[ein].src, ein)
            eout = g.out_edge(chain[-1])
            tgt_end = ("boundary",)
            if eout is not None:
                tgt_end = ("box", g.edges[eout].tgt, eout)
            w = Wire("chain", chain, src_end, tgt_end)
        w.obj_type = g.vertices[chain[0]].type
        out.append(w)
    return out


# -- wire-homeomorphism (system of loop/wire/port contractions) ---------------


def contractible_vertices(g: StringGraph) -> list[int]:
    """Wire-vertices removable by a single contraction step.

    A wire-vertex with both an in- and an out-edge is contractible unless
    both neighbours are boxes (the wire is already minimal there) or the
    vertex carries a self-loop (a minimal circle).
    """
    out = []
    for v, d in sorted(g.vertices.items()):
        if d.kind != WIRE:
            continue
        ein, eout = g.in_edge(v), g.out_edge(v)
        if ein is None or eout is None:
            continue
        if ein == eout:
            continue  # minimal circle
        prev = g.edges[ein].src
        nxt = g.edges[eout].tgt
        if g.vertices[prev].kind == BOX and g.vertices[nxt].kind == BOX:
            continue
        out.append(v)
    return out


def contract_vertex(g: StringGraph, v: int) -> StringGraph:
    """Remove one contractible wire-vertex, joining its two edges.

    On a two-cycle this closes the remaining vertex into a minimal circle.
    """
    ein, eout = g.in_edge(v), g.out_edge(v)
    assert ein is not None and eout is not None and ein != eout
    e_in, e_out = g.edges[ein], g.edges[eout]
    b = g.builder()
    b.remove_edge(ein)
    b.remove_edge(eout)
    b.remove_vertex(v)
    prev, nxt = e_in.src, e_out.tgt
    if e_out.tag.kind == "in":
        tag = e_out.tag
    elif e_in.tag.kind == "out":
        tag = e_in.tag
    else:
        tag = MID
    b.add_edge(prev, nxt, tag)
    # boundary is untouched: contracted vertices are interior
    return b.freeze(g.input_order, g.output_order)


def normalize_wires(g: StringGraph, order: Optional[list[int]] = None) -> StringGraph:
    """Contract until minimal: circles 1 vertex, box wires 1, strands 2.

    ``order`` optionally scripts which contractible vertex to remove at
    each step (entries not currently contractible are skipped); used to
    exercise arbitrary reduction orders.
    """
    cur = g
    if order is not None:
        pending = list(order)
        while pending:
            v = pending.pop(0)
            if v in cur.vertices and v in set(contractible_vertices(cur)):
                cur = contract_vertex(cur, v)
    while True:
        cs = contractible_vertices(cur)
        if not cs:
            return cur
        cur = contract_vertex(cur, cs[0])


def is_minimal(g: StringGraph) -> bool:
    return not contractible_vertices(g)


def wire_homeomorphic(g: StringGraph, h: StringGraph) -> bool:
    """True iff the minimal forms are isomorphic (boundary orders matched)."""
    _check_same_sig(g, h)
    from .canon import iso_equal
    return iso_equal(normalize_wires(g), normalize_wires(h))


def expand_wire(g: StringGraph, edge_id: int, k: int = 1) -> StringGraph:
    """Insert ``k`` fresh wire-vertices along an edge; inverse of contraction."""
    if edge_id not in g.edges:
        raise NoSuchEdge(str(edge_id))
    if k < 1:
        raise ValueError("k must be >= 1")
    e = g.edges[edge_id]
    if e.tag.kind == "in":
        obj = g.sig.morphisms[g.vertices[e.tgt].type].dom[e.tag.port]
    elif e.tag.kind == "out":
        obj = g.sig.morphisms[g.vertices[e.src].type].cod[e.tag.port]
    else:
        obj = g.vertices[e.src].type
    b = g.builder()
    b.remove_edge(edge_id)
    chain = [b.add_wire(obj) for _ in range(k)]
    first_tag = e.tag if e.tag.kind == "out" else MID
    last_tag = e.tag if e.tag.kind == "in" else MID
    b.add_edge(e.src, chain[0], first_tag)
    for a, c in zip(chain, chain[1:]):
        b.add_edge(a, c, MID)
    b.add_edge(chain[-1], e.tgt, last_tag)
    return b.freeze(g.input_order, g.output_order)


# -- gluing -------------------------------------------------------------------


def _check_same_sig(g: StringGraph, h: StringGraph) -> None:
    if g.sig != h.sig:
        raise SignatureMismatch(f"{g.sig.name} vs {h.sig.name}")


def disjoint_union(g: StringGraph, h: StringGraph) -> tuple[StringGraph, dict[int, int], dict[int, int]]:
    """g + h with h's ids shifted; returns (graph, g_vertex_map, h_vertex_map)."""
    _check_same_sig(g, h)
    b = GraphBuilder(g.sig)
    gmap: dict[int, int] = {}
    hmap: dict[int, int] = {}
    for v, d in sorted(g.vertices.items()):
        nv = b._fresh()
        b.vertices[nv] = d
        gmap[v] = nv
    for v, d in sorted(h.vertices.items()):
        nv = b._fresh()
        b.vertices[nv] = d
        hmap[v] = nv
    for _, e in sorted(g.edges.items()):
        b.add_edge(gmap[e.src], gmap[e.tgt], e.tag)
    for _, e in sorted(h.edges.items()):
        b.add_edge(hmap[e.src], hmap[e.tgt], e.tag)
    ins = [gmap[v] for v in g.input_order] + [hmap[v] for v in h.input_order]
    outs = [gmap[v] for v in g.output_order] + [hmap[v] for v in h.output_order]
    return b.freeze(ins, outs), gmap, hmap


def plug_self(g: StringGraph, pairing: list[tuple[int, int]]) -> StringGraph:
    """Identify output vertices of ``g`` with input vertices of ``g``.

    Each pair (o, i) merges output ``o`` with input ``i`` (the pushout over
    a point graph). Pairing an isolated vertex with itself (o == i) is not
    boundary-coherent; pairing the two ends of one strand closes a circle.
    """
    outs = set(g.output_order)
    ins = set(g.input_order)
    for o, i in pairing:
        if o not in outs:
            raise NotBoundaryCoherent(f"{o} is not an output")
        if i not in ins:
            raise NotBoundaryCoherent(f"{i} is not an input")
        if o == i:
            raise NotBoundaryCoherent(f"{o} paired with itself")
        if g.vertices[o].type != g.vertices[i].type:
            raise TypeMismatch(f"{g.vertices[o].type} vs {g.vertices[i].type}")
    if len({o for o, _ in pairing}) != len(pairing) or \
            len({i for _, i in pairing}) != len(pairing):
        raise NotBoundaryCoherent("pairing reuses a boundary vertex")

    cur: dict[int, int] = {}  # merged-away id -> surviving id

    def resolve(v: int) -> int:
        while v in cur:
            v = cur[v]
        return v

    b = g.builder()
    for o, i in pairing:
        vo, vi = resolve(o), resolve(i)
        for eid, e in list(b.edges.items()):
            src = vo if e.src == vi else e.src
            tgt = vo if e.tgt == vi else e.tgt
            if (src, tgt) != (e.src, e.tgt):
                b.edges[eid] = Edge(src, tgt, e.tag)
        b.remove_vertex(vi)
        cur[vi] = vo
    paired_out = {o for o, _ in pairing}
    paired_in = {i for _, i in pairing}
    new_ins = [resolve(v) for v in g.input_order if v not in paired_in]
    new_outs = [resolve(v) for v in g.output_order if v not in paired_out]
    # a merged vertex may still be boundary on one side
    res = b.freeze(new_ins, new_outs)
    return res


def plug(g: StringGraph, h: StringGraph,
         pairing: list[tuple[int, int]]) -> StringGraph:
    """Pushout pairing outputs of ``g`` with inputs of ``h`` (kept disjoint otherwise)."""
    _check_same_sig(g, h)
    g_outs = set(g.output_order)
    h_ins = set(h.input_order)
    for o, i in pairing:
        if o not in g_outs:
            raise NotBoundaryCoherent(f"{o} is not an output of the left graph")
        if i not in h_ins:
            raise NotBoundaryCoherent(f"{i} is not an input of the right graph")
    u, gmap, hmap = disjoint_union(g, h)
    return plug_self(u, [(gmap[o], hmap[i]) for o, i in pairing])


def relabel(g: StringGraph, offset: int = 1000) -> StringGraph:
    """A fresh isomorphic copy with shifted, re-ordered ids (for tests)."""
    ids = sorted(g.vertices) + sorted(g.edges)
    remap = {old: offset + n for n, old in enumerate(reversed(ids))}
    vertices = {remap[v]: d for v, d in g.vertices.items()}
    edges = {remap[e]: Edge(remap[d.src], remap[d.tgt], d.tag)
             for e, d in g.edges.items()}
    return StringGraph(g.sig, vertices, edges,
                       [remap[v] for v in g.input_order],
                       [remap[v] for v in g.output_order])
