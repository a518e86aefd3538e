"""Command-line front end.

Exit codes: 0 success, 1 domain error (invalid input, no isomorphism,
unsound theory), 2 usage error. All documents print canonically, so a
given invocation and seed produce byte-identical output.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional

from . import files
from .canon import isomorphic
from .errors import DocumentError, StrigraphError
from .graph import StringGraph, normalize_wires, validate
from .rewrite import Limits, RewriteSystem, apply as apply_match
from .rewrite import find_matches, normalize
from .synth import SynthParams, run_synthesis, spider_merge_preload
from .tensor import Valuation
from .theories import Theory, gw_pair_theory, gw_theory, zx_theory

BUNDLED = {"zx": zx_theory, "gw": gw_theory, "gw_pair": gw_pair_theory}


class CliError(StrigraphError):
    pass


def _read_doc(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return files.loads(fh.read())
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}") from exc


def _theory_search_dirs() -> list[str]:
    path = os.environ.get("STRIGRAPH_THEORY_PATH", "")
    return [d for d in path.split(os.pathsep) if d]


def load_theory(ref: Optional[str], needed_by: Optional[str] = None) -> Theory:
    """Resolve a theory by bundled name, file path, or search path lookup."""
    name = ref or needed_by
    if name is None:
        raise CliError("no theory given")
    if name in BUNDLED:
        return BUNDLED[name]()
    candidates = [name]
    if not name.endswith(".theory"):
        candidates += [os.path.join(d, f"{name}.theory")
                       for d in _theory_search_dirs()]
    for cand in candidates:
        if os.path.exists(cand):
            doc = _read_doc(cand)
            sig, valuation, rules_path = files.theory_from_doc(doc)
            if doc["name"] in BUNDLED:
                return BUNDLED[doc["name"]]()
            rules = RewriteSystem(doc["name"], [])
            if rules_path:
                rel = os.path.join(os.path.dirname(cand), rules_path)
                rules = files.rules_from_doc(_read_doc(rel), sig)
            if valuation is None:
                valuation = Valuation({}, {})
            return Theory(doc["name"], sig, valuation, rules, {})
    raise CliError(f"theory {name!r} not found (looked in "
                   f"{_theory_search_dirs() or ['cwd']})")


def _load_graph(path: str, theory_ref: Optional[str]) -> tuple[StringGraph, Theory]:
    doc = _read_doc(path)
    theory = load_theory(theory_ref, doc.get("theory"))
    return files.graph_from_doc(doc, theory.sig), theory


def _emit(doc: dict, fmt: str, text: str) -> None:
    if fmt == "json":
        sys.stdout.write(files.dumps(doc))
    else:
        sys.stdout.write(text + "\n")


def cmd_validate(args) -> int:
    doc = _read_doc(args.graph)
    theory = load_theory(args.theory, doc.get("theory"))
    try:
        g = files.graph_from_doc(doc, theory.sig)
        bad = validate(g)
    except DocumentError as exc:
        _emit({"valid": False, "violations": [str(exc)]}, args.format,
              f"invalid: {exc}")
        return 1
    if bad:
        _emit({"valid": False, "violations": [str(v) for v in bad]},
              args.format, "invalid: " + "; ".join(str(v) for v in bad))
        return 1
    _emit({"valid": True, "violations": []}, args.format, "valid")
    return 0


def cmd_normalize(args) -> int:
    g, theory = _load_graph(args.graph, args.theory)
    system = theory.rules
    if args.rules:
        system = files.rules_from_doc(_read_doc(args.rules), theory.sig)
    res, trace, status = normalize(g, system, strategy=args.strategy,
                                   limits=Limits(max_steps=args.steps),
                                   seed=args.seed)
    out = files.graph_to_doc(res)
    if args.trace:
        with open(args.trace, "w", encoding="utf-8") as fh:
            fh.write(files.dumps({"status": status, "steps": trace}))
    _emit(out, "json", files.dumps(out).rstrip("\n"))
    print(f"status: {status} steps: {len(trace)}", file=sys.stderr)
    return 0


def cmd_match(args) -> int:
    g, theory = _load_graph(args.graph, args.theory)
    system = files.rules_from_doc(_read_doc(args.rules), theory.sig)
    rules = system.rules
    if args.rule:
        rules = [system.rule(args.rule)]
    g = normalize_wires(g)
    report = []
    for rule in rules:
        for i, m in enumerate(find_matches(rule, g)):
            s = m.summary()
            s["index"] = i
            report.append(s)
    _emit({"matches": report}, args.format,
          "\n".join(f"{s['rule']}[{s['index']}]: boxes {s['boxes']}"
                    for s in report) or "no matches")
    return 0


def cmd_rewrite(args) -> int:
    g, theory = _load_graph(args.graph, args.theory)
    system = theory.rules
    if args.rules:
        system = files.rules_from_doc(_read_doc(args.rules), theory.sig)
    rule = system.rule(args.rule)
    g = normalize_wires(g)
    ms = list(find_matches(rule, g))
    if args.match >= len(ms):
        raise CliError(f"match index {args.match} out of range "
                       f"({len(ms)} matches)")
    res = apply_match(ms[args.match])
    _emit(files.graph_to_doc(res), "json",
          files.dumps(files.graph_to_doc(res)).rstrip("\n"))
    return 0


def cmd_eval(args) -> int:
    g, theory = _load_graph(args.graph, args.theory)
    from .tensor import evaluate_graph
    t = evaluate_graph(g, theory.valuation)
    doc = files.tensor_to_doc(t)
    _emit(doc, args.format,
          f"upper: {doc['upper']} lower: {doc['lower']}\n"
          + "\n".join(f"  {re:+.6f}{im:+.6f}i" for re, im in doc["entries"]))
    return 0


def cmd_iso(args) -> int:
    doc1, doc2 = _read_doc(args.g1), _read_doc(args.g2)
    theory = load_theory(args.theory, doc1.get("theory"))
    g1 = files.graph_from_doc(doc1, theory.sig)
    g2 = files.graph_from_doc(doc2, theory.sig)
    m = isomorphic(g1, g2)
    if m is None:
        _emit({"isomorphic": False}, args.format, "not isomorphic")
        return 1
    _emit({"isomorphic": True,
           "vertex_map": {str(k): str(v) for k, v in sorted(m.vmap.items())}},
          args.format, "isomorphic")
    return 0


def cmd_synth(args) -> int:
    theory = load_theory(args.theory, None)
    params = SynthParams(arity_sum=args.M + args.N, max_boxes=args.B,
                         max_plugs=args.P, naive=args.naive)
    preload = None
    if args.preload == "spider":
        preload = spider_merge_preload(theory)
    elif args.preload == "full":
        preload = theory.rules
    report = run_synthesis(theory, params, seed_rules=preload, seed=args.seed)
    rules_doc = files.rules_to_doc(report.rules, theory.name)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(files.dumps(rules_doc))
    out = {"params": {"M": args.M, "N": args.N, "B": args.B, "P": args.P,
                      "naive": args.naive, "seed": args.seed},
           "counts": report.counts,
           "rules": rules_doc,
           "congruences": [[files.graph_to_doc(a), files.graph_to_doc(b)]
                           for a, b in report.congruences]}
    _emit(out, "json", files.dumps(out).rstrip("\n"))
    return 0


def cmd_check_theory(args) -> int:
    theory = load_theory(args.theory_file, None)
    from .theories import check_rule_soundness
    ok = True
    lines = []
    for r in theory.rules.rules:
        try:
            z = check_rule_soundness(r, theory.valuation)
            lines.append({"rule": r.name, "sound": True,
                          "scalar": [z.real, z.imag]})
        except StrigraphError as exc:
            ok = False
            lines.append({"rule": r.name, "sound": False, "error": str(exc)})
    _emit({"theory": theory.name, "rules": lines, "ok": ok}, args.format,
          "\n".join(f"{l['rule']}: {'ok' if l['sound'] else 'UNSOUND'}"
                    for l in lines) + f"\n{'ok' if ok else 'UNSOUND'}")
    return 0 if ok else 1


def cmd_serve(args) -> int:
    from .server import serve
    serve(args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="strigraph",
                                description="string-graph rewriting workbench")
    p.add_argument("--format", choices=["json", "text"], default="text")
    sub = p.add_subparsers(dest="cmd", required=True)

    sp = sub.add_parser("validate", help="check a graph document")
    sp.add_argument("graph")
    sp.add_argument("--theory")
    sp.set_defaults(fn=cmd_validate)

    sp = sub.add_parser("normalize", help="rewrite to a normal form")
    sp.add_argument("graph")
    sp.add_argument("--rules")
    sp.add_argument("--theory")
    sp.add_argument("--steps", type=int, default=1000)
    sp.add_argument("--strategy", choices=["first_match", "random"],
                    default="first_match")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--trace")
    sp.set_defaults(fn=cmd_normalize)

    sp = sub.add_parser("match", help="enumerate matches of rules in a graph")
    sp.add_argument("rules")
    sp.add_argument("graph")
    sp.add_argument("--rule")
    sp.add_argument("--theory")
    sp.set_defaults(fn=cmd_match)

    sp = sub.add_parser("rewrite", help="apply one rule at one match")
    sp.add_argument("graph")
    sp.add_argument("--rule", required=True)
    sp.add_argument("--match", type=int, default=0)
    sp.add_argument("--rules")
    sp.add_argument("--theory")
    sp.set_defaults(fn=cmd_rewrite)

    sp = sub.add_parser("eval", help="tensor value of a graph")
    sp.add_argument("graph")
    sp.add_argument("--theory")
    sp.set_defaults(fn=cmd_eval)

    sp = sub.add_parser("iso", help="decide isomorphism of two graphs")
    sp.add_argument("g1")
    sp.add_argument("g2")
    sp.add_argument("--theory")
    sp.set_defaults(fn=cmd_iso)

    sp = sub.add_parser("synth", help="conjecture synthesis")
    sp.add_argument("--theory", required=True)
    sp.add_argument("-M", type=int, default=1)
    sp.add_argument("-N", type=int, default=1)
    sp.add_argument("-B", type=int, default=2)
    sp.add_argument("-P", type=int, default=2)
    sp.add_argument("--naive", action="store_true")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--preload", choices=["none", "spider", "full"],
                    default="spider")
    sp.add_argument("--jobs", type=int, default=1,
                    help="accepted for compatibility; runs in-process")
    sp.add_argument("--out")
    sp.set_defaults(fn=cmd_synth)

    sp = sub.add_parser("check-theory", help="verify every bundled rule")
    sp.add_argument("theory_file")
    sp.set_defaults(fn=cmd_check_theory)

    sp = sub.add_parser("serve", help="run the derivation HTTP service")
    sp.add_argument("--port", type=int, default=8350)
    sp.set_defaults(fn=cmd_serve)
    return p


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except (StrigraphError, DocumentError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except KeyError as exc:
        print(f"error: unknown name {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
