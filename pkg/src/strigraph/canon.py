"""Canonical labeling, iso-hashing, and isomorphism for string graphs.

Colors are seeded from (kind, type, data, boundary positions), refined by
neighbourhood multisets, then individualized with backtracking; the
canonical form is the minimum serialization over all branches. Two graphs
get equal canonical bytes iff they are isomorphic (boundary order included),
so the bytes double as a dedup key.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .graph import StringGraph

VColors = dict[int, int]


@dataclass
class GraphMap:
    """A homomorphism between two string graphs."""

    vmap: dict[int, int] = field(default_factory=dict)
    emap: dict[int, int] = field(default_factory=dict)

    def is_injective(self) -> bool:
        return len(set(self.vmap.values())) == len(self.vmap)


def _data_repr(data) -> str:
    return "" if data is None else repr(data)


def _seed_colors(g: StringGraph) -> VColors:
    in_pos = {v: i for i, v in enumerate(g.input_order)}
    out_pos = {v: i for i, v in enumerate(g.output_order)}
    keys = {}
    for v, d in g.vertices.items():
        keys[v] = (d.kind, d.type, _data_repr(d.data),
                   in_pos.get(v, -1), out_pos.get(v, -1))
    return _index(keys)


def _index(keys: dict[int, tuple]) -> VColors:
    order = sorted(set(keys.values()))
    rank = {k: i for i, k in enumerate(order)}
    return {v: rank[k] for v, k in keys.items()}


def _refine(g: StringGraph, colors: VColors, tag_key=None) -> VColors:
    tk = tag_key or (lambda t: t.key())
    while True:
        keys: dict[int, tuple] = {}
        neigh: dict[int, list] = {v: [] for v in g.vertices}
        for e in g.edges.values():
            neigh[e.src].append(("o", tk(e.tag), colors[e.tgt]))
            neigh[e.tgt].append(("i", tk(e.tag), colors[e.src]))
        for v in g.vertices:
            keys[v] = (colors[v], tuple(sorted(neigh[v])))
        new = _index(keys)
        if len(set(new.values())) == len(set(colors.values())):
            return new
        colors = new


def _cells(colors: VColors) -> list[list[int]]:
    by_color: dict[int, list[int]] = {}
    for v, c in colors.items():
        by_color.setdefault(c, []).append(v)
    return [sorted(vs) for _, vs in sorted(by_color.items())]


def _serialize(g: StringGraph, order: list[int], ordered_boundary: bool = True) -> tuple:
    idx = {v: i for i, v in enumerate(order)}
    verts = tuple((d.kind, d.type, _data_repr(d.data))
                  for d in (g.vertices[v] for v in order))
    edges = tuple(sorted((idx[e.src], idx[e.tgt], e.tag.key())
                         for e in g.edges.values()))
    ins = tuple(idx[v] for v in g.input_order)
    outs = tuple(idx[v] for v in g.output_order)
    if not ordered_boundary:
        ins, outs = tuple(sorted(ins)), tuple(sorted(outs))
    return (verts, edges, ins, outs)


def _canonical_serial(g: StringGraph, colors: VColors,
                      ordered_boundary: bool = True) -> tuple[tuple, list[int]]:
    colors = _refine(g, colors)
    cells = _cells(colors)
    target = next((c for c in cells if len(c) > 1), None)
    if target is None:
        order = [v for cell in cells for v in cell]
        return _serialize(g, order, ordered_boundary), order
    best: Optional[tuple] = None
    best_order: list[int] = []
    fresh = max(colors.values()) + 1
    for v in target:
        branch = dict(colors)
        branch[v] = fresh
        ser, order = _canonical_serial(g, branch, ordered_boundary)
        if best is None or ser < best:
            best, best_order = ser, order
    return best, best_order


def canonical_order(g: StringGraph) -> list[int]:
    """Vertices in canonical order (stable across isomorphic relabelings)."""
    _, order = _canonical_serial(g, _seed_colors(g))
    return order


def canonical_bytes(g: StringGraph) -> bytes:
    """Iso-invariant hash key; equal bytes iff isomorphic (same sig assumed)."""
    if g._canon is None:
        ser, _ = _canonical_serial(g, _seed_colors(g))
        g._canon = repr(ser).encode()
    return g._canon


def isomorphic(g: StringGraph, h: StringGraph) -> Optional[GraphMap]:
    """A kind/type/tag/boundary-order preserving bijection, if one exists."""
    if g.sig != h.sig:
        return None
    if len(g.vertices) != len(h.vertices) or len(g.edges) != len(h.edges):
        return None
    if len(g.input_order) != len(h.input_order) or \
            len(g.output_order) != len(h.output_order):
        return None
    sg, og = _canonical_serial(g, _seed_colors(g))
    sh, oh = _canonical_serial(h, _seed_colors(h))
    if sg != sh:
        return None
    m = GraphMap(vmap=dict(zip(og, oh)))
    # map edges by endpoint/tag key
    h_edges = {}
    for eid, e in h.edges.items():
        h_edges[(e.src, e.tgt, e.tag)] = eid
    for eid, e in g.edges.items():
        key = (m.vmap[e.src], m.vmap[e.tgt], e.tag)
        other = h_edges.get(key)
        if other is None:
            return None  # canonical collision would be a bug; stay safe
        m.emap[eid] = other
    return m


def iso_equal(g: StringGraph, h: StringGraph) -> bool:
    return isomorphic(g, h) is not None


def symmetric_bytes(g: StringGraph, sym: set[tuple[str, str]]) -> bytes:
    """Dedup key insensitive to boundary order and to port order at
    generators declared commutative (``sym`` holds (morphism, "in"/"out")).

    Equal keys imply the graphs agree up to boundary permutation and port
    swaps at those generators; with the commutativity laws bundled, such
    graphs are interchangeable class members.
    """
    def tk(t):
        if t.morphism is not None and (t.morphism, t.kind) in sym:
            return (t.kind, t.morphism, -2)
        return t.key()

    in_set, out_set = set(g.input_order), set(g.output_order)
    keys = {}
    for v, d in g.vertices.items():
        keys[v] = (d.kind, d.type, _data_repr(d.data),
                   1 if v in in_set else 0, 1 if v in out_set else 0)
    colors = _refine(g, _index(keys), tag_key=tk)

    def serialize(order: list[int]) -> tuple:
        idx = {v: i for i, v in enumerate(order)}
        verts = tuple((d.kind, d.type, _data_repr(d.data))
                      for d in (g.vertices[v] for v in order))
        edges = tuple(sorted((idx[e.src], idx[e.tgt], tk(e.tag))
                             for e in g.edges.values()))
        ins = tuple(sorted(idx[v] for v in g.input_order))
        outs = tuple(sorted(idx[v] for v in g.output_order))
        return (verts, edges, ins, outs)

    def backtrack(colors: VColors) -> tuple:
        colors = _refine(g, colors, tag_key=tk)
        cells = _cells(colors)
        target = next((c for c in cells if len(c) > 1), None)
        if target is None:
            return serialize([v for cell in cells for v in cell])
        best = None
        fresh = max(colors.values()) + 1
        for v in target:
            branch = dict(colors)
            branch[v] = fresh
            ser = backtrack(branch)
            if best is None or ser < best:
                best = ser
        return best

    return repr(backtrack(colors)).encode()


def boundary_canonical(g: StringGraph) -> StringGraph:
    """Canonicalize with the boundary treated as unordered sets.

    Returns an identical-up-to-boundary-order graph whose input/output
    orders are fixed by a canonical labeling that ignores boundary
    positions; two graphs isomorphic up to boundary reordering map to
    byte-identical canonical copies.
    """
    in_set, out_set = set(g.input_order), set(g.output_order)
    keys = {}
    for v, d in g.vertices.items():
        keys[v] = (d.kind, d.type, _data_repr(d.data),
                   1 if v in in_set else 0, 1 if v in out_set else 0)
    _, order = _canonical_serial(g, _index(keys), ordered_boundary=False)
    ins = [v for v in order if v in in_set]
    outs = [v for v in order if v in out_set]
    g2 = StringGraph(g.sig, dict(g.vertices), dict(g.edges), ins, outs)
    return canonical_copy(g2)


def canonical_copy(g: StringGraph) -> StringGraph:
    """Relabel to 0..n-1 in canonical order; isomorphic inputs map to
    identical outputs (ids, orders, and edge numbering included)."""
    order = canonical_order(g)
    vmap = {v: i for i, v in enumerate(order)}
    vertices = {vmap[v]: g.vertices[v] for v in order}
    edge_list = sorted(((vmap[e.src], vmap[e.tgt], e.tag)
                        for e in g.edges.values()),
                       key=lambda t: (t[0], t[1], t[2].key()))
    from .graph import Edge
    edges = {len(vertices) + i: Edge(s, t, tag)
             for i, (s, t, tag) in enumerate(edge_list)}
    return StringGraph(g.sig, vertices, edges,
                       [vmap[v] for v in g.input_order],
                       [vmap[v] for v in g.output_order])
