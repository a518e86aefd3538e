"""HTTP/JSON service exposing derivation sessions for the interactive UI.

Sessions are in-memory; every mutation of a derivation is serialized by a
per-derivation lock and bumps its revision, so a match handle (rule, index,
revision) can be detected as stale. Engine calls are pure, so concurrent
reads need no locking at all.
"""
from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Any, Optional
from urllib.parse import parse_qs, urlparse

from . import files
from .errors import DocumentError, StrigraphError
from .graph import StringGraph, normalize_wires
from .rewrite import apply as apply_match
from .rewrite import find_matches
from .theories import Theory, gw_pair_theory, gw_theory, zx_theory

BUNDLED = {"zx": zx_theory, "gw": gw_theory, "gw_pair": gw_pair_theory}


class ApiError(Exception):
    def __init__(self, status: int, message: str):
        super().__init__(message)
        self.status = status


@dataclass
class Step:
    graph: StringGraph
    rule: Optional[str] = None
    match_index: Optional[int] = None


@dataclass
class Derivation:
    id: str
    theory: Theory
    steps: list[Step]
    cursor: int = 0
    revision: int = 0
    lock: threading.Lock = field(default_factory=threading.Lock)

    def current(self) -> StringGraph:
        return self.steps[self.cursor].graph

    def snapshot(self) -> dict:
        return {
            "id": self.id,
            "theory": self.theory.name,
            "cursor": self.cursor,
            "revision": self.revision,
            "steps": [self._step_doc(i) for i in range(len(self.steps))],
        }

    def _step_doc(self, i: int) -> dict:
        s = self.steps[i]
        doc: dict[str, Any] = {"graph": files.graph_to_doc(s.graph)}
        if s.rule is not None:
            doc["rule"] = s.rule
            doc["match_index"] = s.match_index
        return doc

    def derivation_doc(self) -> dict:
        # the full recorded history, not just up to the cursor: an undone
        # session still exports a replayable document
        return files.derivation_to_doc(
            self.theory.name, [self._step_doc(i)
                               for i in range(len(self.steps))])


class Workbench:
    """All service state: loaded theories and open derivations."""

    def __init__(self) -> None:
        self.theories: dict[str, Theory] = {}
        self.derivations: dict[str, Derivation] = {}
        self._next = 0
        self._lock = threading.Lock()

    def theory(self, name: str) -> Theory:
        if name in self.theories:
            return self.theories[name]
        if name in BUNDLED:
            self.theories[name] = BUNDLED[name]()
            return self.theories[name]
        raise ApiError(404, f"unknown theory {name!r}")

    def load_theory_doc(self, doc: dict) -> Theory:
        if "name" in doc and doc["name"] in BUNDLED:
            th = self.theory(doc["name"])
            return th
        sig, valuation, _ = files.theory_from_doc(doc)
        from .rewrite import RewriteSystem
        from .tensor import Valuation
        th = Theory(doc["name"], sig, valuation or Valuation({}, {}),
                    RewriteSystem(doc["name"], []), {})
        self.theories[th.name] = th
        return th

    def new_derivation(self, theory: Theory, graph: StringGraph) -> Derivation:
        with self._lock:
            did = f"d{self._next}"
            self._next += 1
        d = Derivation(did, theory, [Step(normalize_wires(graph))])
        self.derivations[did] = d
        return d

    def derivation(self, did: str) -> Derivation:
        if did not in self.derivations:
            raise ApiError(404, f"unknown derivation {did!r}")
        return self.derivations[did]


def _matches_payload(d: Derivation, rule_name: str) -> dict:
    rule = None
    for r in d.theory.rules.rules:
        if r.name == rule_name:
            rule = r
            break
    if rule is None:
        raise ApiError(404, f"unknown rule {rule_name!r}")
    g = d.current()
    vid, eid = files.doc_id_maps(g)
    out = []
    for i, m in enumerate(find_matches(rule, g)):
        s = m.summary()
        s["index"] = i
        # display anchors in the document's id space
        s["anchor_vertices"] = sorted({vid[hv] for hv in m.vmap.values()})
        s["anchor_edges"] = sorted({eid[he] for he in m.emap.values()})
        out.append(s)
    return {"rule": rule_name, "revision": d.revision, "matches": out}


def _apply_payload(d: Derivation, body: dict) -> dict:
    for key in ("rule", "match_index"):
        if key not in body:
            raise ApiError(400, f"missing field {key!r}")
    if "revision" in body and body["revision"] != d.revision:
        raise ApiError(409, "stale match: derivation has advanced")
    rule = None
    for r in d.theory.rules.rules:
        if r.name == body["rule"]:
            rule = r
            break
    if rule is None:
        raise ApiError(404, f"unknown rule {body['rule']!r}")
    idx = body["match_index"]
    # redo: re-applying the recorded next step is idempotent
    if d.cursor + 1 < len(d.steps):
        nxt = d.steps[d.cursor + 1]
        if nxt.rule == body["rule"] and nxt.match_index == idx:
            d.cursor += 1
            d.revision += 1
            return d.snapshot()
    ms = list(find_matches(rule, d.current()))
    if idx >= len(ms):
        raise ApiError(409, f"stale match: only {len(ms)} matches")
    res = apply_match(ms[idx])
    d.steps = d.steps[:d.cursor + 1] + [Step(res, body["rule"], idx)]
    d.cursor += 1
    d.revision += 1
    return d.snapshot()


def make_handler(bench: Workbench):
    class Handler(BaseHTTPRequestHandler):
        def log_message(self, *args) -> None:
            pass

        def _send(self, status: int, doc: dict) -> None:
            payload = json.dumps(doc, indent=2).encode()
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(payload)))
            self.send_header("Access-Control-Allow-Origin", "*")
            self.send_header("Access-Control-Allow-Methods",
                             "GET, POST, OPTIONS")
            self.send_header("Access-Control-Allow-Headers", "Content-Type")
            self.end_headers()
            self.wfile.write(payload)

        def _body(self) -> dict:
            length = int(self.headers.get("Content-Length", 0))
            raw = self.rfile.read(length) if length else b"{}"
            try:
                doc = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise ApiError(400, f"malformed JSON: {exc}")
            if not isinstance(doc, dict):
                raise ApiError(400, "body must be a JSON object")
            return doc

        def do_OPTIONS(self) -> None:
            self._send(200, {})

        def do_GET(self) -> None:
            try:
                self._route("GET")
            except ApiError as exc:
                self._send(exc.status, {"error": str(exc)})
            except (StrigraphError, DocumentError) as exc:
                self._send(422, {"error": str(exc)})

        def do_POST(self) -> None:
            try:
                self._route("POST")
            except ApiError as exc:
                self._send(exc.status, {"error": str(exc)})
            except (StrigraphError, DocumentError) as exc:
                self._send(422, {"error": str(exc)})

        def _route(self, method: str) -> None:
            url = urlparse(self.path)
            parts = [p for p in url.path.split("/") if p]
            if method == "GET" and parts == ["health"]:
                self._send(200, {"status": "ok"})
                return
            if method == "GET" and parts == ["theories"]:
                self._send(200, {"theories": sorted(set(bench.theories)
                                                    | set(BUNDLED))})
                return
            if method == "POST" and parts == ["theories"]:
                body = self._body()
                if set(body) == {"name"}:
                    th = bench.theory(body["name"])
                else:
                    th = bench.load_theory_doc(body)
                self._send(200, {"name": th.name,
                                 "rules": [r.name for r in th.rules.rules]})
                return
            if method == "POST" and parts == ["derivations"]:
                body = self._body()
                for key in ("theory", "graph"):
                    if key not in body:
                        raise ApiError(400, f"missing field {key!r}")
                th = bench.theory(body["theory"])
                g = files.graph_from_doc(body["graph"], th.sig)
                d = bench.new_derivation(th, g)
                self._send(200, d.snapshot())
                return
            if method == "POST" and parts == ["eval"]:
                body = self._body()
                th = bench.theory(body.get("theory", ""))
                g = files.graph_from_doc(body["graph"], th.sig)
                from .tensor import evaluate_graph
                t = evaluate_graph(g, th.valuation)
                self._send(200, files.tensor_to_doc(t))
                return
            if parts and parts[0] == "derivations" and len(parts) >= 2:
                d = bench.derivation(parts[1])
                if method == "GET" and len(parts) == 2:
                    self._send(200, d.snapshot())
                    return
                if method == "GET" and parts[2:] == ["matches"]:
                    q = parse_qs(url.query)
                    if "rule" not in q:
                        raise ApiError(400, "missing query parameter 'rule'")
                    self._send(200, _matches_payload(d, q["rule"][0]))
                    return
                if method == "GET" and parts[2:] == ["export"]:
                    self._send(200, d.derivation_doc())
                    return
                if method == "POST" and parts[2:] == ["apply"]:
                    with d.lock:
                        self._send(200, _apply_payload(d, self._body()))
                    return
                if method == "POST" and parts[2:] == ["undo"]:
                    with d.lock:
                        if d.cursor == 0:
                            raise ApiError(422, "nothing to undo")
                        d.cursor -= 1
                        d.revision += 1
                        self._send(200, d.snapshot())
                    return
            raise ApiError(404, f"no route for {method} {url.path}")

    return Handler


def make_server(port: int, bench: Optional[Workbench] = None) -> ThreadingHTTPServer:
    bench = bench or Workbench()
    server = ThreadingHTTPServer(("127.0.0.1", port), make_handler(bench))
    server.bench = bench
    return server


def serve(port: int) -> None:
    server = make_server(port)
    print(f"strigraph server on http://127.0.0.1:{port}")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        server.shutdown()
