"""Rewrite rules, matching up to wire-homeomorphism, and DPO application.

Hosts are kept in minimal wire form; matching finds literal monomorphisms
into the host after splitting host wire-vertices where two pattern boundary
vertices land on the same spot. Pattern wires anchored at boxes map
positionally from their anchors, so a rule authored in minimal form matches
host wires of any original length, while deliberately stretched patterns
(the wire-contraction rules) find no match on minimal hosts.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .canon import GraphMap, canonical_bytes, canonical_order
from .errors import HostNotMinimal, StaleMatch, Violation
from .graph import (BOX, Edge, StringGraph, Tag, Wire, is_minimal,
                    normalize_wires, wires)


@dataclass
class RewriteRule:
    """A span lhs <- I -> rhs given by a boundary bijection.

    ``iface`` maps every boundary wire-vertex of lhs to one of rhs,
    input-to-input and output-to-output. ``scalar`` optionally records the
    semantic factor eval(lhs) = scalar * eval(rhs) discovered at load time.
    """

    name: str
    lhs: StringGraph
    rhs: StringGraph
    iface: dict[int, int]
    scalar: Optional[complex] = None
    tags: tuple[str, ...] = ()


def validate_rule(r: RewriteRule) -> list[Violation]:
    out: list[Violation] = []
    for side, g in (("lhs", r.lhs), ("rhs", r.rhs)):
        for v in g.wire_vertices():
            if g.in_edge(v) is None and g.out_edge(v) is None:
                out.append(Violation("IsolatedWireVertex", f"{side}:{v}"))
    l_in, l_out = set(r.lhs.input_order), set(r.lhs.output_order)
    r_in, r_out = set(r.rhs.input_order), set(r.rhs.output_order)
    if set(r.iface) != l_in | l_out:
        out.append(Violation("IfaceNotTotal", r.name, "lhs boundary"))
        return out
    if set(r.iface.values()) != r_in | r_out or \
            len(set(r.iface.values())) != len(r.iface):
        out.append(Violation("IfaceNotTotal", r.name, "rhs boundary"))
        return out
    for lv, rv in r.iface.items():
        if (lv in l_in) != (rv in r_in) or (lv in l_out) != (rv in r_out):
            out.append(Violation("PolarityMismatch", f"{lv}->{rv}"))
        if r.lhs.vertices[lv].type != r.rhs.vertices[rv].type:
            out.append(Violation("IfaceTypeMismatch", f"{lv}->{rv}"))
    return out


def rule_from_boundary_order(name: str, lhs: StringGraph, rhs: StringGraph,
                             **kw) -> RewriteRule:
    """Pair boundaries positionally (i-th input to i-th input, etc.)."""
    iface = dict(zip(lhs.input_order, rhs.input_order))
    iface.update(zip(lhs.output_order, rhs.output_order))
    return RewriteRule(name, lhs, rhs, iface, **kw)


@dataclass
class RewriteSystem:
    name: str
    rules: list[RewriteRule] = field(default_factory=list)

    def __post_init__(self) -> None:
        names = [r.name for r in self.rules]
        if len(set(names)) != len(names):
            raise ValueError("duplicate rule names")

    def rule(self, name: str) -> RewriteRule:
        for r in self.rules:
            if r.name == name:
                return r
        raise KeyError(name)


@dataclass
class Match:
    """An embedding of a rule's lhs into a host.

    ``vmap`` sends pattern vertices to host vertices before expansion;
    ``splits`` lists host wire-vertices that must be split in two because a
    closing and an opening pattern boundary vertex both land there (the
    recorded host expansion).
    """

    rule: RewriteRule
    host: StringGraph
    vmap: dict[int, int]
    emap: dict[int, int]
    splits: tuple[tuple[int, int, int], ...] = ()   # (host v, left pv, right pv)

    def summary(self) -> dict:
        boxes = {pv: hv for pv, hv in self.vmap.items()
                 if self.rule.lhs.vertices[pv].kind == BOX}
        return {"rule": self.rule.name,
                "boxes": sorted(boxes.values()),
                "vertex_image": sorted(set(self.vmap.values())),
                "edge_image": sorted(set(self.emap.values())),
                "expansions": len(self.splits)}

    def embedding(self) -> GraphMap:
        return GraphMap(dict(self.vmap), dict(self.emap))


def _interior(g: StringGraph) -> set[int]:
    bnd = set(g.input_order) | set(g.output_order)
    return set(g.vertices) - bnd


def _host_wire_index(hws: list[Wire]) -> dict[tuple, tuple[Wire, bool]]:
    """Map ("box", box_id, edge_id) anchor -> (wire, from_src_end)."""
    idx: dict[tuple, tuple[Wire, bool]] = {}
    for w in hws:
        if w.kind != "chain":
            continue
        if w.src_end and w.src_end[0] == "box":
            idx[w.src_end] = (w, True)
        if w.tgt_end and w.tgt_end[0] == "box":
            idx[w.tgt_end] = (w, False)
    return idx


def find_matches(rule: RewriteRule, host: StringGraph) -> Iterator[Match]:
    """Enumerate matches of ``rule.lhs`` into minimal-form ``host``.

    Deterministic: pattern boxes are tried in id order against host boxes
    in canonical order; strand and circle placements in canonical order.
    """
    if not is_minimal(host):
        raise HostNotMinimal("normalize_wires(host) first")
    L = rule.lhs
    if L.sig != host.sig:
        return
    rank = {v: i for i, v in enumerate(canonical_order(host))}
    p_boxes = sorted(L.box_vertices())
    h_boxes = sorted(host.box_vertices(), key=lambda v: rank[v])
    h_wires = wires(host)
    h_anchor = _host_wire_index(h_wires)
    h_chains = [w for w in h_wires if w.kind == "chain"]
    h_circles = [w for w in h_wires if w.kind == "circle"]
    p_wires = wires(L)
    l_in, l_out = set(L.input_order), set(L.output_order)

    host_edge_at = {}
    for eid, e in host.edges.items():
        host_edge_at[(e.src, e.tgt)] = eid
    pattern_edge_seq: dict[int, list[int]] = {}   # wire idx -> pattern edge ids

    def wire_edges(g: StringGraph, w: Wire) -> list[int]:
        """Edge ids along a wire, in flow order (incl. box anchor edges)."""
        out = []
        if w.kind == "circle":
            cur = w.vertices[0]
            for _ in w.vertices:
                e = g.out_edge(cur)
                out.append(e)
                cur = g.edges[e].tgt
            return out
        first_in = g.in_edge(w.vertices[0])
        if first_in is not None:
            out.append(first_in)
        for v in w.vertices:
            e = g.out_edge(v)
            if e is not None:
                out.append(e)
        return out

    for i, pw in enumerate(p_wires):
        pattern_edge_seq[i] = wire_edges(L, pw)

    def try_box_map(bmap: dict[int, int]) -> Iterator[Match]:
        # resolve every pattern wire into (host wire, start offset)
        assignments: list[Optional[tuple[Wire, int]]] = [None] * len(p_wires)
        box_anchored: list[int] = []
        strands: list[int] = []
        circles: list[int] = []
        for i, pw in enumerate(p_wires):
            if pw.kind == "circle":
                circles.append(i)
            elif (pw.src_end and pw.src_end[0] == "box") or \
                 (pw.tgt_end and pw.tgt_end[0] == "box"):
                box_anchored.append(i)
            else:
                strands.append(i)

        def resolve_anchored() -> bool:
            for i in box_anchored:
                pw = p_wires[i]
                k = len(pw.vertices)
                if pw.src_end[0] == "box":
                    b, eid = pw.src_end[1], pw.src_end[2]
                    tag = L.edges[eid].tag
                    hb = bmap[b]
                    h_eid = next((he for he, e in host.edges.items()
                                  if e.src == hb and e.tag == tag), None)
                    if h_eid is None:
                        return False
                    got = h_anchor.get(("box", hb, h_eid))
                    if got is None or not got[1]:
                        return False
                    hw = got[0]
                    if hw.obj_type != pw.obj_type:
                        return False
                    if pw.tgt_end[0] == "box":
                        b2, eid2 = pw.tgt_end[1], pw.tgt_end[2]
                        tag2 = L.edges[eid2].tag
                        if hw.tgt_end[0] != "box" or hw.tgt_end[1] != bmap[b2]:
                            return False
                        if host.edges[hw.tgt_end[2]].tag != tag2:
                            return False
                        if len(hw.vertices) != k:
                            return False
                        assignments[i] = ("win", hw, 0)
                    else:
                        if len(hw.vertices) < k:
                            return False
                        assignments[i] = ("win", hw, 0)
                else:
                    # anchored only at the target end
                    b2, eid2 = pw.tgt_end[1], pw.tgt_end[2]
                    tag2 = L.edges[eid2].tag
                    hb = bmap[b2]
                    h_eid = next((he for he, e in host.edges.items()
                                  if e.tgt == hb and e.tag == tag2), None)
                    if h_eid is None:
                        return False
                    got = h_anchor.get(("box", hb, h_eid))
                    if got is None or got[1]:
                        return False
                    hw = got[0]
                    if hw.obj_type != pw.obj_type or len(hw.vertices) < k:
                        return False
                    assignments[i] = ("win", hw, len(hw.vertices) - k)
            return True

        if not resolve_anchored():
            return

        def place_rest(idx: int) -> Iterator[None]:
            if idx == len(strands) + len(circles):
                yield None
                return
            if idx < len(strands):
                i = strands[idx]
                pw = p_wires[i]
                k = len(pw.vertices)
                cands = []
                if k == 2:
                    # a bare strand is an identity wire: it lands on every
                    # host wire, one placement per wire (stretch-equivalent
                    # placements are identified)
                    for hw in h_chains + h_circles:
                        if hw.obj_type != pw.obj_type:
                            continue
                        if len(hw.vertices) >= 2:
                            cands.append(("edge", hw, 0))
                        else:
                            cands.append(("vsplit", hw, 0))
                else:
                    # deliberately stretched strands need that many existing
                    # wire-vertices in a row
                    for hw in h_chains:
                        if hw.obj_type != pw.obj_type:
                            continue
                        for off in range(0, len(hw.vertices) - k + 1):
                            cands.append(("win", hw, off))
                cands.sort(key=lambda c: (rank[c[1].vertices[0]], c[2]))
                for c in cands:
                    assignments[i] = c
                    yield from place_rest(idx + 1)
                assignments[i] = None
            else:
                i = circles[idx - len(strands)]
                pw = p_wires[i]
                used = {assignments[j][1].vertices[0] for j in circles[:idx - len(strands)]
                        if assignments[j] is not None}
                for hw in sorted(h_circles, key=lambda w: rank[w.vertices[0]]):
                    if hw.obj_type != pw.obj_type:
                        continue
                    if len(hw.vertices) != len(pw.vertices):
                        continue
                    if hw.vertices[0] in used:
                        continue
                    assignments[i] = ("win", hw, 0)
                    yield from place_rest(idx + 1)
                assignments[i] = None

        for _ in place_rest(0):
            m = _resolve_assignment(rule, host, bmap, p_wires, assignments,
                                    pattern_edge_seq, host_edge_at,
                                    wire_edges, l_in, l_out)
            if m is not None:
                yield m

    def backtrack_boxes(i: int, bmap: dict[int, int],
                        used: set[int]) -> Iterator[Match]:
        if i == len(p_boxes):
            yield from try_box_map(dict(bmap))
            return
        pb = p_boxes[i]
        pd = L.vertices[pb]
        for hb in h_boxes:
            if hb in used:
                continue
            hd = host.vertices[hb]
            if hd.type != pd.type or hd.data != pd.data:
                continue
            bmap[pb] = hb
            used.add(hb)
            yield from backtrack_boxes(i + 1, bmap, used)
            used.discard(hb)
            del bmap[pb]

    seen: set[tuple] = set()
    for m in backtrack_boxes(0, {}, set()):
        key = (tuple(sorted((pv, hv) for pv, hv in m.vmap.items())), m.splits)
        if key not in seen:
            seen.add(key)
            yield m


def _resolve_assignment(rule, host, bmap, p_wires, assignments,
                        pattern_edge_seq, host_edge_at, wire_edges,
                        l_in, l_out) -> Optional[Match]:
    """Turn wire placements into a vertex/edge map; check collisions."""
    L = rule.lhs
    vmap: dict[int, int] = dict(bmap)
    claims: dict[int, list[tuple[str, int]]] = {}   # host v -> [(need, pv)]
    strand_splits: list[tuple[int, int, int]] = []  # (host v, w_in, w_out)
    for i, pw in enumerate(p_wires):
        mode, hw, off = assignments[i]
        if mode == "vsplit":
            hv = hw.vertices[0]
            w_in, w_out = pw.vertices[0], pw.vertices[1]
            vmap[w_in] = hv
            vmap[w_out] = hv
            claims.setdefault(hv, []).append(("strand", w_in))
            claims.setdefault(hv, []).append(("strand", w_out))
            strand_splits.append((hv, w_in, w_out))
            continue
        if mode == "edge":
            # occupy the first two vertices of the wire
            for t, pv in enumerate(pw.vertices):
                hv = hw.vertices[t]
                vmap[pv] = hv
                need = "open" if pv in l_in else "close"
                claims.setdefault(hv, []).append((need, pv))
            continue
        for t, pv in enumerate(pw.vertices):
            hv = hw.vertices[off + t]
            vmap[pv] = hv
            if pv in l_in and pv in l_out:
                return None     # isolated pattern vertex: not allowed
            if pv in l_in:
                need = "open"    # keeps its out-edge context
            elif pv in l_out:
                need = "close"   # keeps its in-edge context
            else:
                need = "interior"
            claims.setdefault(hv, []).append((need, pv))

    splits: list[tuple[int, int, int, str]] = []
    for hv, cl in claims.items():
        if len(cl) == 1:
            continue
        if len(cl) == 2:
            kinds = sorted(c[0] for c in cl)
            if kinds == ["close", "open"]:
                left = next(pv for need, pv in cl if need == "close")
                right = next(pv for need, pv in cl if need == "open")
                # the split needs an out-edge to hand to the right claimant
                if host.out_edge(hv) is None:
                    return None
                splits.append((hv, left, right, "context"))
                continue
            if kinds == ["strand", "strand"]:
                continue   # pre-declared strand split
        return None
    for hv, w_in, w_out in strand_splits:
        splits.append((hv, w_in, w_out, "strand"))

    # edge map: walk each pattern wire against its host window
    emap: dict[int, int] = {}
    for i, pw in enumerate(p_wires):
        mode, hw, off = assignments[i]
        if mode == "vsplit":
            continue   # the strand's edge maps to the split itself
        if mode == "edge":
            u = hw.vertices[0]
            eid = host.out_edge(u)
            emap[pattern_edge_seq[i][0]] = eid
            continue
        p_edges = pattern_edge_seq[i]
        h_edges = wire_edges(host, hw)
        if pw.kind == "circle":
            if len(p_edges) != len(h_edges):
                return None
            for pe, he in zip(p_edges, h_edges):
                emap[pe] = he
            continue
        # chains: host edge list may include an anchor edge at the src end
        h_has_src_anchor = hw.src_end is not None and hw.src_end[0] == "box"
        p_has_src_anchor = pw.src_end is not None and pw.src_end[0] == "box"
        # index of the edge arriving at hw.vertices[j] (j>=1) is j-1+shift
        shift = 1 if h_has_src_anchor else 0
        pshift = 1 if p_has_src_anchor else 0
        if p_has_src_anchor:
            if off != 0 or not h_has_src_anchor:
                return None
            emap[p_edges[0]] = h_edges[0]
        k = len(pw.vertices)
        for t in range(k - 1):  # mid edges within the window
            pe = p_edges[pshift + t]
            he = h_edges[shift + off + t]
            emap[pe] = he
        if pw.tgt_end is not None and pw.tgt_end[0] == "box":
            pe = p_edges[-1]
            he = h_edges[-1]
            emap[pe] = he
    return Match(rule, host, vmap, emap, tuple(sorted(splits)))


def apply(m: Match) -> StringGraph:
    """Pushout complement then pushout; result wire-normalized."""
    host, L, R = m.host, m.rule.lhs, m.rule.rhs
    for pv, hv in m.vmap.items():
        if hv not in host.vertices or \
                host.vertices[hv].kind != L.vertices[pv].kind:
            raise StaleMatch(f"host vertex {hv} changed")
    for pe, he in m.emap.items():
        if he not in host.edges:
            raise StaleMatch(f"host edge {he} gone")

    b = host.builder()
    vmap = dict(m.vmap)
    emap = dict(m.emap)
    out_order = list(host.output_order)
    # expansion: split host vertices claimed by two pattern boundary vertices
    for hv, left_pv, right_pv, kind in m.splits:
        out_eid = host.out_edge(hv)
        in_eid = host.in_edge(hv)
        nv = b.add_wire(host.vertices[hv].type)
        if out_eid is not None:
            e = b.edges[out_eid]
            b.edges[out_eid] = Edge(nv, e.tgt, e.tag)
            vmap[left_pv] = hv
            vmap[right_pv] = nv
        elif in_eid is not None:
            # boundary-ending wire: hand the in side to the fresh vertex so
            # the host's boundary vertex keeps its identity
            e = b.edges[in_eid]
            b.edges[in_eid] = Edge(e.src, nv, e.tag)
            vmap[left_pv] = nv
            vmap[right_pv] = hv
        else:
            # isolated vertex: the fresh vertex takes the output slot
            if hv in out_order:
                out_order[out_order.index(hv)] = nv
            vmap[left_pv] = hv
            vmap[right_pv] = nv
        if kind == "context":
            # closing/opening pair from different pattern wires: the fresh
            # connecting edge survives the rewrite as context
            b.add_edge(vmap[left_pv], vmap[right_pv], Tag("mid"))

    # pushout complement: remove matched edges and interior vertices
    for he in set(emap.values()):
        if he in b.edges:
            b.remove_edge(he)
    interior_l = _interior(L)
    for pv in interior_l:
        b.remove_vertex(vmap[pv])

    # pushout: glue rhs along the interface
    iface_inv = {rv: lv for lv, rv in m.rule.iface.items()}
    rmap: dict[int, int] = {}
    for rv, rd in sorted(R.vertices.items()):
        if rv in iface_inv:
            rmap[rv] = vmap[iface_inv[rv]]
        elif rd.kind == BOX:
            rmap[rv] = b.add_box(rd.type, rd.data)
        else:
            rmap[rv] = b.add_wire(rd.type)
    for _, e in sorted(R.edges.items()):
        b.add_edge(rmap[e.src], rmap[e.tgt], e.tag)

    out = b.freeze(host.input_order, out_order)
    return normalize_wires(out)


@dataclass
class Limits:
    max_steps: int = 1000


def normalize(g: StringGraph, system: RewriteSystem,
              strategy: str = "first_match",
              limits: Limits = Limits(),
              seed: int = 0) -> tuple[StringGraph, list[dict], str]:
    """Apply rules until none matches or the step budget runs out.

    ``first_match`` walks rules in order taking the first match each step;
    ``random`` samples uniformly over all (rule, match) pairs with ``seed``.
    With an empty system the input is returned untouched.
    """
    if not system.rules:
        return g, [], "normal_form"
    rng = random.Random(seed)
    cur = normalize_wires(g)
    trace: list[dict] = []
    for _ in range(limits.max_steps):
        chosen: Optional[Match] = None
        if strategy == "first_match":
            for rule in system.rules:
                chosen = next(find_matches(rule, cur), None)
                if chosen is not None:
                    break
        elif strategy == "random":
            pool: list[Match] = []
            for rule in system.rules:
                pool.extend(find_matches(rule, cur))
            if pool:
                chosen = pool[rng.randrange(len(pool))]
        else:
            raise ValueError(f"unknown strategy {strategy!r}")
        if chosen is None:
            return cur, trace, "normal_form"
        trace.append(chosen.summary())
        cur = apply(chosen)
    if any(next(find_matches(r, cur), None) is not None for r in system.rules):
        return cur, trace, "step_limit"
    return cur, trace, "normal_form"


def joinable(g: StringGraph, h: StringGraph, system: RewriteSystem,
             limits: Limits = Limits(max_steps=64)) -> bool:
    """Bounded search for a common reduct up to isomorphism."""
    if g.sig != h.sig:
        return False
    g0, h0 = normalize_wires(g), normalize_wires(h)

    def expand(frontier, seen):
        new = []
        for cur in frontier:
            for rule in system.rules:
                for m in find_matches(rule, cur):
                    nxt = apply(m)
                    key = canonical_bytes(nxt)
                    if key not in seen:
                        seen[key] = nxt
                        new.append(nxt)
        return new

    seen_g = {canonical_bytes(g0): g0}
    seen_h = {canonical_bytes(h0): h0}
    front_g, front_h = [g0], [h0]
    budget = limits.max_steps
    while budget > 0:
        if set(seen_g) & set(seen_h):
            return True
        if not front_g and not front_h:
            break
        front_g = expand(front_g, seen_g)[:budget]
        budget -= len(front_g)
        front_h = expand(front_h, seen_h)[:max(budget, 0)]
        budget -= len(front_h)
    return bool(set(seen_g) & set(seen_h))
