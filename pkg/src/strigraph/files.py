"""Canonical document serialization: .graph, .rules, .theory, tensors,
cospans, and derivations.

Dumps are canonical (vertices renumbered in canonical order, stable key
order, two-space indent), so dump(load(dump(x))) is byte-identical to
dump(x). Unknown fields are rejected on load.
"""
from __future__ import annotations

import json
from fractions import Fraction
from typing import Any, Optional

import numpy as np

from .canon import canonical_order
from .cospan import FramedCospan, FramedPointGraph
from .errors import DocumentError
from .graph import BOX, WIRE, Edge, StringGraph, Tag
from .rewrite import RewriteRule, RewriteSystem
from .signature import (DATA_ANGLE, DATA_NONE, MonoidalSignature,
                        MorphismType, ObjectType)
from .tensor import Tensor, Valuation


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2) + "\n"


def loads(text: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise DocumentError("document root must be an object")
    return doc


def _check_fields(obj: dict, required: set[str], optional: set[str],
                  where: str) -> None:
    keys = set(obj)
    missing = required - keys
    unknown = keys - required - optional
    if missing:
        raise DocumentError(f"{where}: missing fields {sorted(missing)}")
    if unknown:
        raise DocumentError(f"{where}: unknown fields {sorted(unknown)}")


# -- graphs --------------------------------------------------------------------


def _data_to_doc(kind: str, data: Any) -> Optional[str]:
    if data is None:
        return None
    if isinstance(data, Fraction):
        return f"{data.numerator}/{data.denominator}"
    return str(data)


def _data_from_doc(kind: str, raw: Optional[str]) -> Any:
    if raw is None:
        return None
    if kind == DATA_ANGLE:
        try:
            if "/" in raw:
                num, den = raw.split("/", 1)
                return Fraction(int(num), int(den))
            return Fraction(int(raw))
        except (ValueError, ZeroDivisionError) as exc:
            raise DocumentError(f"bad angle {raw!r}") from exc
    return raw


def doc_id_maps(g: StringGraph) -> tuple[dict[int, str], dict[int, str]]:
    """Internal vertex/edge ids -> the canonical document ids."""
    order = canonical_order(g)
    vid = {v: f"v{i}" for i, v in enumerate(order)}

    def tag_doc(e) -> dict:
        tag: dict[str, Any] = {"kind": e.tag.kind}
        if e.tag.morphism is not None:
            tag["morphism"] = e.tag.morphism
        if e.tag.port is not None:
            tag["port"] = e.tag.port
        return tag

    rows = sorted(g.edges.items(),
                  key=lambda kv: (vid[kv[1].src], vid[kv[1].tgt],
                                  json.dumps(tag_doc(kv[1]))))
    eid = {internal: f"e{i}" for i, (internal, _) in enumerate(rows)}
    return vid, eid


def graph_to_doc(g: StringGraph) -> dict:
    order = canonical_order(g)
    vid, eid = doc_id_maps(g)
    verts = []
    for v in order:
        d = g.vertices[v]
        entry: dict[str, Any] = {"id": vid[v], "kind": d.kind, "type": d.type}
        kind = DATA_NONE
        if d.kind == BOX:
            kind = g.sig.morphism(d.type).data_kind
        raw = _data_to_doc(kind, d.data)
        if raw is not None:
            entry["data"] = raw
        verts.append(entry)
    edges = []
    for internal, e in sorted(g.edges.items(),
                              key=lambda kv: int(eid[kv[0]][1:])):
        tag: dict[str, Any] = {"kind": e.tag.kind}
        if e.tag.morphism is not None:
            tag["morphism"] = e.tag.morphism
        if e.tag.port is not None:
            tag["port"] = e.tag.port
        edges.append({"id": eid[internal], "src": vid[e.src],
                      "tgt": vid[e.tgt], "tag": tag})
    return {"theory": g.sig.name,
            "vertices": verts,
            "edges": edges,
            "inputs": [vid[v] for v in g.input_order],
            "outputs": [vid[v] for v in g.output_order]}


def graph_from_doc(doc: dict, sig: MonoidalSignature) -> StringGraph:
    _check_fields(doc, {"theory", "vertices", "edges", "inputs", "outputs"},
                  set(), "graph")
    if doc["theory"] != sig.name:
        raise DocumentError(f"graph is over theory {doc['theory']!r}, "
                            f"expected {sig.name!r}")
    vertices = {}
    ids: dict[str, int] = {}
    for i, row in enumerate(doc["vertices"]):
        _check_fields(row, {"id", "kind", "type"}, {"data"}, "vertex")
        if row["id"] in ids:
            raise DocumentError(f"duplicate vertex id {row['id']}")
        ids[row["id"]] = i
        kind = row["kind"]
        if kind not in (WIRE, BOX):
            raise DocumentError(f"bad vertex kind {kind!r}")
        data_kind = DATA_NONE
        if kind == BOX:
            if row["type"] not in sig.morphisms:
                raise DocumentError(f"unknown morphism {row['type']!r}")
            data_kind = sig.morphism(row["type"]).data_kind
        elif row["type"] not in sig.objects:
            raise DocumentError(f"unknown object {row['type']!r}")
        from .graph import Vertex
        vertices[i] = Vertex(kind, row["type"],
                             _data_from_doc(data_kind, row.get("data")))
    edges = {}
    eids: set[str] = set()
    for j, row in enumerate(doc["edges"]):
        _check_fields(row, {"id", "src", "tgt", "tag"}, set(), "edge")
        if row["id"] in eids:
            raise DocumentError(f"duplicate edge id {row['id']}")
        eids.add(row["id"])
        tag = row["tag"]
        _check_fields(tag, {"kind"}, {"morphism", "port"}, "tag")
        if row["src"] not in ids or row["tgt"] not in ids:
            raise DocumentError(f"edge {row['id']} references unknown vertex")
        edges[len(vertices) + j] = Edge(
            ids[row["src"]], ids[row["tgt"]],
            Tag(tag["kind"], tag.get("morphism"), tag.get("port")))
    try:
        ins = [ids[v] for v in doc["inputs"]]
        outs = [ids[v] for v in doc["outputs"]]
    except KeyError as exc:
        raise DocumentError(f"boundary references unknown vertex {exc}") from exc
    g = StringGraph(sig, vertices, edges, ins, outs)
    from .graph import validate
    bad = validate(g)
    if bad:
        raise DocumentError("invalid graph: " + "; ".join(map(str, bad)))
    return g


# -- rules ---------------------------------------------------------------------


def rules_to_doc(system: RewriteSystem, theory: str) -> dict:
    rows = []
    for r in system.rules:
        lhs_doc = graph_to_doc(r.lhs)
        rhs_doc = graph_to_doc(r.rhs)
        lhs_ids = {v: f"v{i}" for i, v in enumerate(canonical_order(r.lhs))}
        rhs_ids = {v: f"v{i}" for i, v in enumerate(canonical_order(r.rhs))}
        iface = sorted([lhs_ids[a], rhs_ids[b]] for a, b in r.iface.items())
        row: dict[str, Any] = {"name": r.name, "lhs": lhs_doc,
                               "rhs": rhs_doc, "iface": iface}
        if r.scalar is not None:
            row["scalar"] = [r.scalar.real, r.scalar.imag]
        if r.tags:
            row["tags"] = list(r.tags)
        rows.append(row)
    return {"theory": theory, "rules": rows}


def rules_from_doc(doc: dict, sig: MonoidalSignature) -> RewriteSystem:
    _check_fields(doc, {"theory", "rules"}, set(), "rules")
    rules = []
    for row in doc["rules"]:
        _check_fields(row, {"name", "lhs", "rhs", "iface"},
                      {"scalar", "tags"}, "rule")
        lhs = graph_from_doc(row["lhs"], sig)
        rhs = graph_from_doc(row["rhs"], sig)
        # doc ids line up with load order (v0 -> 0, ...)
        lhs_ids = {r["id"]: i for i, r in enumerate(row["lhs"]["vertices"])}
        rhs_ids = {r["id"]: i for i, r in enumerate(row["rhs"]["vertices"])}
        try:
            iface = {lhs_ids[a]: rhs_ids[b] for a, b in row["iface"]}
        except KeyError as exc:
            raise DocumentError(f"iface references unknown id {exc}") from exc
        scalar = None
        if "scalar" in row:
            scalar = complex(row["scalar"][0], row["scalar"][1])
        rules.append(RewriteRule(row["name"], lhs, rhs, iface, scalar=scalar,
                                 tags=tuple(row.get("tags", ()))))
    system = RewriteSystem(doc["theory"], rules)
    from .rewrite import validate_rule
    for r in rules:
        bad = validate_rule(r)
        if bad:
            raise DocumentError(f"invalid rule {r.name}: "
                                + "; ".join(map(str, bad)))
    return system


# -- tensors --------------------------------------------------------------------


def tensor_to_doc(t: Tensor) -> dict:
    flat = t.array.ravel()
    return {"lower": [name for name, _ in t.lower],
            "upper": [name for name, _ in t.upper],
            "entries": [[float(z.real), float(z.imag)] for z in flat]}


def tensor_from_doc(doc: dict, dims: dict[str, int]) -> Tensor:
    _check_fields(doc, {"lower", "upper", "entries"}, set(), "tensor")
    upper = tuple((n, dims[n]) for n in doc["upper"])
    lower = tuple((n, dims[n]) for n in doc["lower"])
    flat = np.array([complex(re, im) for re, im in doc["entries"]])
    want = int(np.prod([d for _, d in upper + lower])) if upper + lower else 1
    if flat.size != want:
        raise DocumentError(f"tensor entry count {flat.size} != {want}")
    return Tensor(upper, lower, flat)


# -- theories --------------------------------------------------------------------


def theory_to_doc(name: str, sig: MonoidalSignature,
                  valuation: Optional[Valuation] = None,
                  rules_path: Optional[str] = None) -> dict:
    objs = []
    for oname in sorted(sig.objects):
        row: dict[str, Any] = {"name": oname}
        dim = sig.objects[oname].dim
        if dim is None and valuation is not None and oname in valuation.dims:
            dim = valuation.dims[oname]
        if dim is not None:
            row["dim"] = dim
        objs.append(row)
    morphs = []
    for mname in sorted(sig.morphisms):
        mt = sig.morphism(mname)
        row = {"name": mname, "dom": list(mt.dom), "cod": list(mt.cod)}
        if mt.data_kind != DATA_NONE:
            row["data_kind"] = mt.data_kind
        if valuation is not None and mname in valuation.gens:
            gen = valuation.gens[mname]
            if isinstance(gen, Tensor):
                row["tensor"] = tensor_to_doc(gen)
        morphs.append(row)
    doc: dict[str, Any] = {"name": name, "objects": objs, "morphisms": morphs}
    if rules_path is not None:
        doc["rules"] = rules_path
    return doc


def theory_from_doc(doc: dict) -> tuple[MonoidalSignature, Optional[Valuation],
                                        Optional[str]]:
    _check_fields(doc, {"name", "objects", "morphisms"}, {"rules"}, "theory")
    objects = []
    dims: dict[str, int] = {}
    for row in doc["objects"]:
        _check_fields(row, {"name"}, {"dim"}, "object")
        objects.append(ObjectType(row["name"], row.get("dim")))
        if "dim" in row:
            dims[row["name"]] = row["dim"]
    morphisms = []
    tensors: dict[str, dict] = {}
    for row in doc["morphisms"]:
        _check_fields(row, {"name", "dom", "cod"},
                      {"data_kind", "tensor"}, "morphism")
        morphisms.append(MorphismType(row["name"], tuple(row["dom"]),
                                      tuple(row["cod"]),
                                      row.get("data_kind", DATA_NONE)))
        if "tensor" in row:
            tensors[row["name"]] = row["tensor"]
    sig = MonoidalSignature(doc["name"], objects, morphisms)
    from .signature import validate_signature
    bad = validate_signature(sig)
    if bad:
        raise DocumentError("invalid signature: " + "; ".join(map(str, bad)))
    valuation = None
    if tensors and dims:
        valuation = Valuation(dims, {name: tensor_from_doc(t, dims)
                                     for name, t in tensors.items()})
    return sig, valuation, doc.get("rules")


# -- cospans ---------------------------------------------------------------------


def cospan_to_doc(f: FramedCospan) -> dict:
    doc = graph_to_doc(f.graph)
    order = canonical_order(f.graph)
    vid = {v: f"v{i}" for i, v in enumerate(order)}
    doc["dom"] = [{"type": t, "sign": s} for t, s in f.dom.points]
    doc["cod"] = [{"type": t, "sign": s} for t, s in f.cod.points]
    doc["d"] = [vid[v] for v in f.d]
    doc["c"] = [vid[v] for v in f.c]
    return doc


def cospan_from_doc(doc: dict, sig: MonoidalSignature) -> FramedCospan:
    base = {k: doc[k] for k in
            ("theory", "vertices", "edges", "inputs", "outputs")}
    extra = set(doc) - set(base) - {"dom", "cod", "d", "c"}
    if extra:
        raise DocumentError(f"cospan: unknown fields {sorted(extra)}")
    g = graph_from_doc(base, sig)
    ids = {row["id"]: i for i, row in enumerate(doc["vertices"])}
    dom = FramedPointGraph(tuple((r["type"], r["sign"]) for r in doc["dom"]))
    cod = FramedPointGraph(tuple((r["type"], r["sign"]) for r in doc["cod"]))
    f = FramedCospan(dom, cod, g,
                     tuple(ids[v] for v in doc["d"]),
                     tuple(ids[v] for v in doc["c"]))
    from .cospan import validate_cospan
    bad = validate_cospan(f)
    if bad:
        raise DocumentError("invalid cospan: " + "; ".join(map(str, bad)))
    return f


# -- derivations -------------------------------------------------------------------


def derivation_to_doc(theory: str, steps: list[dict]) -> dict:
    """steps[0] = {"graph": doc}; later steps add "rule" and "match_index"."""
    return {"theory": theory, "steps": steps}


def derivation_from_doc(doc: dict) -> tuple[str, list[dict]]:
    _check_fields(doc, {"theory", "steps"}, set(), "derivation")
    steps = doc["steps"]
    if not steps:
        raise DocumentError("derivation needs at least the initial step")
    for i, s in enumerate(steps):
        need = {"graph"} if i == 0 else {"graph", "rule", "match_index"}
        _check_fields(s, need, set(), f"step {i}")
    return doc["theory"], steps
