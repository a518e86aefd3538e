"""Conjecture synthesis: enumerate string graphs by plugging disconnected
seeds, prune known redexes, classify by tensor semantics, and emit rules
ordered by a reduction measure.

A run (m, n, b, p) enumerates every graph with m inputs and n outputs
obtainable by at most p pluggings of a disjoint union of at most b boxes and
bare strands. Graphs are deduplicated up to isomorphism with unordered
boundaries; equivalence classes are keyed by the tensor value up to scalar
and boundary permutations; each class emits rules pointing every member at
a measure-minimal representative.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

from .canon import boundary_canonical, canonical_bytes, symmetric_bytes
from .errors import MissingValuation
from .graph import (GraphBuilder, StringGraph, normalize_wires, plug_self)
from .rewrite import RewriteRule, RewriteSystem, find_matches
from .signature import MonoidalSignature
from .tensor import (Valuation, boundary_permutation_class,
                     equal_up_to_scalar, evaluate_graph)
from .theories import Theory


@dataclass
class SynthParams:
    """Bounds for one synthesis sweep.

    ``arity_sum`` bounds m+n over runs; ``max_boxes`` and ``max_plugs`` are
    the per-run B and P; ``naive`` disables redex pruning.
    """

    arity_sum: int = 2
    max_boxes: int = 2
    max_plugs: int = 2
    naive: bool = False

    def __post_init__(self) -> None:
        if min(self.arity_sum, self.max_boxes, self.max_plugs) < 0:
            raise ValueError("parameters must be non-negative")

    def runs(self) -> list[tuple[int, int]]:
        out = []
        for total in range(self.arity_sum + 1):
            for m in range(total + 1):
                out.append((m, total - m))
        return out


def omega_key(g: StringGraph) -> tuple:
    """Default reduction measure: lexicographic (boxes, edges, canon bytes)."""
    return (len(g.box_vertices()), len(g.edges), canonical_bytes(g))


@dataclass
class SynthReport:
    rules: RewriteSystem
    congruences: list[tuple[StringGraph, StringGraph]]
    counts: dict[str, int] = field(default_factory=dict)


# -- enumeration -----------------------------------------------------------------


def _box_multisets(sig: MonoidalSignature, max_boxes: int) -> Iterable[tuple[str, ...]]:
    names = sorted(sig.morphisms)
    for size in range(max_boxes + 1):
        yield from itertools.combinations_with_replacement(names, size)


def enumerate_disconnected(sig: MonoidalSignature, inputs: int, outputs: int,
                           max_boxes: int) -> list[StringGraph]:
    """All disjoint unions of single boxes and bare strands with the given
    boundary arities, up to unordered-boundary isomorphism."""
    out: list[StringGraph] = []
    seen: set[bytes] = set()
    for combo in _box_multisets(sig, max_boxes):
        din = sum(len(sig.morphism(f).dom) for f in combo)
        dout = sum(len(sig.morphism(f).cod) for f in combo)
        strands = inputs - din
        if strands < 0 or strands != outputs - dout:
            continue
        b = GraphBuilder(sig)
        for f in combo:
            b.add_generator(f)
        obj = sorted(sig.objects)
        for _ in range(strands):
            # strands over every object type would multiply variants; with a
            # single wire type this is exact, otherwise enumerate types
            pass
        if strands == 0:
            g = b.freeze()
            key = canonical_bytes(boundary_canonical(g))
            if key not in seen:
                seen.add(key)
                out.append(boundary_canonical(g))
            continue
        for types in itertools.combinations_with_replacement(obj, strands):
            b2 = GraphBuilder(sig)
            for f in combo:
                b2.add_generator(f)
            for t in types:
                w1, w2 = b2.add_wire(t), b2.add_wire(t)
                b2.add_edge(w1, w2)
            g = b2.freeze()
            key = canonical_bytes(boundary_canonical(g))
            if key not in seen:
                seen.add(key)
                out.append(boundary_canonical(g))
    return out


class RedexSet:
    """Known reducible subgraphs, used to prune enumeration branches.

    When a symmetry set is given, every port-swap variant of a redex at
    commutative generators is stored too, so containment is checked up to
    commutation (the closure's commutativity laws make those variants
    reducible as well).
    """

    def __init__(self, sym: Optional[set[tuple[str, str]]] = None) -> None:
        self._patterns: list[tuple[RewriteRule, dict[tuple, int]]] = []
        self._keys: set[bytes] = set()
        self._sym = sym or set()

    @staticmethod
    def _box_counter(g: StringGraph) -> dict[tuple, int]:
        out: dict[tuple, int] = {}
        for b in g.box_vertices():
            d = g.vertices[b]
            k = (d.type, repr(d.data))
            out[k] = out.get(k, 0) + 1
        return out

    def _port_orbit(self, g: StringGraph) -> list[StringGraph]:
        from .graph import Edge, Tag
        variants = {canonical_bytes(g): g}
        frontier = [g]
        while frontier:
            cur = frontier.pop()
            for b in cur.box_vertices():
                f = cur.vertices[b].type
                for direction in ("in", "out"):
                    if (f, direction) not in self._sym:
                        continue
                    edits = {}
                    for eid, e in cur.edges.items():
                        hit = (e.tgt == b if direction == "in" else e.src == b)
                        if hit and e.tag.kind == direction:
                            edits[eid] = Edge(e.src, e.tgt,
                                              Tag(direction, e.tag.morphism,
                                                  1 - e.tag.port))
                    if not edits:
                        continue
                    edges = dict(cur.edges)
                    edges.update(edits)
                    v = StringGraph(cur.sig, dict(cur.vertices), edges,
                                    cur.input_order, cur.output_order)
                    key = canonical_bytes(v)
                    if key not in variants:
                        variants[key] = v
                        frontier.append(v)
        return list(variants.values())

    def add(self, g: StringGraph) -> None:
        key = canonical_bytes(boundary_canonical(g))
        if key in self._keys:
            return
        self._keys.add(key)
        from .rewrite import rule_from_boundary_order
        for v in self._port_orbit(g):
            self._patterns.append((rule_from_boundary_order(
                f"redex{len(self._patterns)}", v, v), self._box_counter(v)))

    def __len__(self) -> int:
        return len(self._patterns)

    def contains_redex(self, g: StringGraph) -> bool:
        have = self._box_counter(g)
        for pat, need in self._patterns:
            if any(have.get(k, 0) < n for k, n in need.items()):
                continue
            if next(find_matches(pat, g), None) is not None:
                return True
        return False


def enumerate_pluggings(seed: StringGraph, p: int,
                        redexes: Optional[RedexSet] = None,
                        counter: Optional[dict] = None,
                        ordered: bool = False,
                        sym: Optional[set[tuple[str, str]]] = None) -> list[StringGraph]:
    """All results of ``p`` successive output-to-input pluggings of ``seed``,
    with branches containing a known redex cut.

    By default graphs are deduplicated up to unordered-boundary iso and up
    to port symmetry at generators in ``sym``; with ``ordered`` (the naive
    convention) distinct boundary orderings survive as distinct graphs.
    """
    def canon(g: StringGraph) -> StringGraph:
        g = normalize_wires(g)
        from .canon import canonical_copy
        return canonical_copy(g) if ordered else boundary_canonical(g)

    def key_of(g: StringGraph) -> bytes:
        if not ordered and sym:
            return symmetric_bytes(g, sym)
        return canonical_bytes(g)

    seed = canon(seed)
    level = {key_of(seed): seed}
    if redexes is not None and redexes.contains_redex(seed):
        if counter is not None:
            counter["filtered_by_redex"] = counter.get("filtered_by_redex", 0) + 1
        return []
    for _ in range(p):
        nxt: dict[bytes, StringGraph] = {}
        for g in level.values():
            for o in g.output_order:
                for i in g.input_order:
                    if i == o:
                        continue
                    if g.vertices[o].type != g.vertices[i].type:
                        continue
                    h = canon(plug_self(g, [(o, i)]))
                    key = key_of(h)
                    if key in nxt:
                        continue
                    if counter is not None:
                        counter["enumerated"] = counter.get("enumerated", 0) + 1
                    if redexes is not None and redexes.contains_redex(h):
                        if counter is not None:
                            counter["filtered_by_redex"] = \
                                counter.get("filtered_by_redex", 0) + 1
                        continue
                    nxt[key] = h
        level = nxt
    return list(level.values())


# -- classification ----------------------------------------------------------------


def classify(graphs: Sequence[StringGraph], valuation: Valuation,
             ordered: bool = False,
             sym: Optional[set[tuple[str, str]]] = None) -> list[list[StringGraph]]:
    """Partition by tensor value up to scalar and boundary permutations,
    dropping residual isomorphic duplicates (ordered-boundary iso under the
    naive convention, unordered-with-port-symmetry otherwise)."""
    from .canon import canonical_copy
    classes: dict[bytes, dict[bytes, StringGraph]] = {}
    for g in graphs:
        t = evaluate_graph(g, valuation)
        if t.norm_inf() <= 1e-12:
            continue     # zero-valued graphs make every pairing vacuous
        key = boundary_permutation_class(t)
        if ordered:
            iso_key = canonical_bytes(canonical_copy(g))
        elif sym:
            iso_key = symmetric_bytes(g, sym)
        else:
            iso_key = canonical_bytes(boundary_canonical(g))
        classes.setdefault(key, {}).setdefault(iso_key, g)
    return [list(members.values())
            for _, members in sorted(classes.items(), key=lambda kv: kv[0])]


def _boundary_perm_match(lhs: StringGraph, rhs: StringGraph,
                         valuation: Valuation,
                         tol: float = 1e-9) -> Optional[tuple[RewriteRule, complex]]:
    """A sound rule lhs => rhs under some boundary permutation, if any."""
    tl = evaluate_graph(lhs, valuation)
    li, lo = lhs.input_order, lhs.output_order
    for pi in itertools.permutations(range(len(rhs.input_order))):
        ins = [rhs.input_order[i] for i in pi]
        if [rhs.vertices[v].type for v in ins] != \
                [lhs.vertices[v].type for v in li]:
            continue
        for po in itertools.permutations(range(len(rhs.output_order))):
            outs = [rhs.output_order[j] for j in po]
            if [rhs.vertices[v].type for v in outs] != \
                    [lhs.vertices[v].type for v in lo]:
                continue
            rhs2 = StringGraph(rhs.sig, dict(rhs.vertices), dict(rhs.edges),
                               ins, outs)
            tr = evaluate_graph(rhs2, valuation)
            z = equal_up_to_scalar(tl, tr, tol)
            if z is not None:
                iface = dict(zip(li, ins))
                iface.update(zip(lo, outs))
                rule = RewriteRule("", lhs, rhs2, iface, scalar=z)
                return rule, z
    return None


def generate_rules(classes: Sequence[Sequence[StringGraph]],
                   valuation: Valuation,
                   rng: random.Random,
                   omega: Callable[[StringGraph], tuple] = omega_key,
                   redexes: Optional[RedexSet] = None,
                   name_prefix: str = "syn") -> SynthReport:
    """Per class, direct every member at a random measure-minimal one.

    Classes are processed smallest-first so that redexes recorded for one
    class prune reducible members of later ones: a graph containing an
    already-reducible subgraph never becomes a rule source.
    """
    rules: list[RewriteRule] = []
    congruences: list[tuple[StringGraph, StringGraph]] = []
    n = 0
    ordered = sorted(classes, key=lambda ms: min(omega(g) for g in ms)
                     if ms else ())
    for members in ordered:
        if len(members) < 2:
            continue
        keyed = sorted(members, key=omega)
        min_key = omega(keyed[0])
        minimal = [g for g in keyed if omega(g) == min_key]
        rest = [g for g in keyed if omega(g) != min_key]
        target = rng.choice(sorted(minimal, key=canonical_bytes))
        for t in rest:
            if redexes is not None and redexes.contains_redex(t):
                continue   # already reducible by an emitted or seeded rule
            made = _boundary_perm_match(t, target, valuation)
            if made is None:
                # numerically equal up to permutation but no witness found:
                # drop rather than emit an unsound rule
                continue
            rule, z = made
            rule.name = f"{name_prefix}{n}"
            n += 1
            rules.append(rule)
            if redexes is not None and _is_strict(rule):
                redexes.add(t)
        for other in minimal:
            if other is not target:
                congruences.append((target, other))
    return SynthReport(RewriteSystem("synthesized", rules), congruences,
                       {"classes": len(classes)})


# -- the full loop -------------------------------------------------------------------


def structural_rules(theory: Theory) -> list[RewriteRule]:
    """Size-preserving bundled laws: the reshuffles (associativity,
    commutativity, Frobenius forms) that generate a finite orbit of
    presentations of one diagram."""
    return [r for r in theory.rules.rules
            if (len(r.lhs.box_vertices()), len(r.lhs.edges)) ==
               (len(r.rhs.box_vertices()), len(r.rhs.edges))]


def _orbit(g: StringGraph, moves: Sequence[RewriteRule],
           cap: int = 64) -> list[StringGraph]:
    from .rewrite import apply
    seen = {canonical_bytes(g): g}
    frontier = [g]
    while frontier and len(seen) < cap:
        x = frontier.pop(0)
        for r in moves:
            for m in find_matches(r, x):
                y = apply(m)
                k = canonical_bytes(y)
                if k not in seen:
                    seen[k] = y
                    frontier.append(y)
    return list(seen.values())


def orbit_bytes(g: StringGraph, moves: Sequence[RewriteRule],
                sym: Optional[set[tuple[str, str]]] = None,
                cap: int = 64) -> bytes:
    """Minimum symmetric key over the structural orbit: a congruence-class
    identifier for diagrams equal by pure reshuffling."""
    keys = [symmetric_bytes(v, sym or set()) for v in _orbit(g, moves, cap)]
    return min(keys)


def run_synthesis(theory: Theory, params: SynthParams,
                  seed_rules: Optional[RewriteSystem] = None,
                  seed: int = 0,
                  omega: Callable[[StringGraph], tuple] = omega_key) -> SynthReport:
    """Sweep all runs (m, n) with m+n <= params.arity_sum; deterministic
    for a given seed."""
    val = theory.valuation
    if val is None:
        raise MissingValuation(theory.name)
    rng = random.Random(seed)
    sym = commutative_ports(theory)
    prune = RedexSet(sym)
    if seed_rules is not None:
        for r in seed_rules.rules:
            if _is_strict(r):
                prune.add(r.lhs)
    all_rules: list[RewriteRule] = []
    congruences: list[tuple[StringGraph, StringGraph]] = []
    counts = {"enumerated": 0, "filtered_by_redex": 0, "classes": 0}
    emitted: set[bytes] = set()
    n_rule = 0
    for m, n in params.runs():
        graphs: dict[bytes, StringGraph] = {}
        for p in range(params.max_plugs + 1):
            seeds = enumerate_disconnected(theory.sig, m + p, n + p,
                                           params.max_boxes)
            for s in seeds:
                counts["enumerated"] += 1
                for g in enumerate_pluggings(
                        s, p, None if params.naive else prune, counts,
                        ordered=params.naive,
                        sym=None if params.naive else sym):
                    graphs[canonical_bytes(g)] = g
        classes = classify(list(graphs.values()), val, ordered=params.naive,
                           sym=None if params.naive else sym)
        counts["classes"] += len(classes)
        report = generate_rules(classes, val, rng, omega,
                                None if params.naive else prune,
                                name_prefix=f"syn_{m}_{n}_")
        for r in report.rules.rules:
            key = canonical_bytes(r.lhs) + b"=>" + canonical_bytes(r.rhs)
            if key in emitted:
                continue
            emitted.add(key)
            r.name = f"syn{n_rule}"
            n_rule += 1
            all_rules.append(r)
        congruences.extend(report.congruences)
    if not params.naive:
        all_rules = _subsume(all_rules, seed_rules, omega, sym,
                             structural_rules(theory))
        for i, r in enumerate(all_rules):
            r.name = f"syn{i}"
    counts["rules"] = len(all_rules)
    return SynthReport(RewriteSystem(f"{theory.name}-synthesized", all_rules),
                       congruences, counts)


def _is_strict(rule: RewriteRule) -> bool:
    """A rule that strictly shrinks its graph; only these contribute
    redexes. Size-preserving reshuffles (associativity, commutativity,
    Frobenius moves) never make progress, so pruning by their left sides
    would cull graphs that cannot actually be reduced away."""
    return (len(rule.lhs.box_vertices()), len(rule.lhs.edges)) > \
           (len(rule.rhs.box_vertices()), len(rule.rhs.edges))


def _subsume(rules: list[RewriteRule],
             seed_rules: Optional[RewriteSystem],
             omega: Callable[[StringGraph], tuple],
             sym: Optional[set[tuple[str, str]]] = None,
             moves: Sequence[RewriteRule] = ()) -> list[RewriteRule]:
    """Drop rules that are redundant given smaller kept ones.

    A rule is redundant when some structural-orbit variant of its lhs
    contains a kept redex, or when its (lhs, rhs) pair coincides with a
    kept rule's up to structural congruence. Sweeps smallest lhs first, so
    cross-class subsumption (which run ordering misses) is caught too.
    """
    kept_redexes = RedexSet(sym)
    if seed_rules is not None:
        for r in seed_rules.rules:
            if _is_strict(r):
                kept_redexes.add(r.lhs)
    kept: list[RewriteRule] = []
    kept_pairs: set[bytes] = set()
    for r in sorted(rules, key=lambda r: omega(r.lhs)):
        lhs_orbit = _orbit(r.lhs, moves)
        if any(kept_redexes.contains_redex(v) for v in lhs_orbit):
            continue
        pair = orbit_bytes(r.lhs, moves, sym) + b"=>" +             orbit_bytes(r.rhs, moves, sym)
        if pair in kept_pairs:
            continue
        kept_pairs.add(pair)
        kept.append(r)
        if _is_strict(r):
            kept_redexes.add(r.lhs)
    return kept


def commutative_ports(theory: Theory) -> set[tuple[str, str]]:
    """(morphism, direction) pairs whose ports commute, read off the
    bundled commutativity laws."""
    out: set[tuple[str, str]] = set()
    for r in theory.rules.rules:
        if "commutativity" in r.tags:
            for b in r.lhs.box_vertices():
                out.add((r.lhs.vertices[b].type, "in"))
        if "cocommutativity" in r.tags:
            for b in r.lhs.box_vertices():
                out.add((r.lhs.vertices[b].type, "out"))
    return out


def spider_merge_preload(theory: Theory) -> RewriteSystem:
    """The bundled same-colour merge laws, used to prime the redex set."""
    merge_tags = {"associativity", "coassociativity", "unit", "counit",
                  "frobenius", "special"}
    rules = [r for r in theory.rules.rules
             if set(r.tags) & merge_tags]
    return RewriteSystem("preload", rules)
