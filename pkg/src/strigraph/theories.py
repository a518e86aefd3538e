"""Bundled concrete theories: Z/X calculus and the GHZ/W pair, plus
group-algebra strongly-complementary pairs, CP1 arithmetic, and law checkers.

Every bundled rule is verified tensor-sound when the theory is built; the
scalar relating the two sides is recorded on the rule. Law shapes that the
source material gives only as pictures are encoded from their standard
equational forms and gated by the same check.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Optional, Sequence

import numpy as np

from .errors import ShapeMismatch, StrigraphError
from .graph import GraphBuilder, StringGraph, normalize_wires
from .rewrite import RewriteRule, RewriteSystem, rule_from_boundary_order
from .signature import (DATA_ANGLE, MonoidalSignature, MorphismType,
                        ObjectType)
from .tensor import (Tensor, Valuation, equal_up_to_scalar, evaluate_graph,
                     phase_tensor)


@dataclass
class Theory:
    name: str
    sig: MonoidalSignature
    valuation: Valuation
    rules: RewriteSystem
    law_tags: dict[str, tuple[str, ...]] = field(default_factory=dict)


class Wiring:
    """Layer-by-layer circuit-style graph builder.

    Tracks one open wire-vertex per strand position; generators consume and
    produce positions left to right. Positions can be permuted freely since
    string graphs carry no planarity.
    """

    def __init__(self, sig: MonoidalSignature, in_types: Sequence[str]):
        self.sig = sig
        self.b = GraphBuilder(sig)
        self.ins = [self.b.add_wire(t) for t in in_types]
        self.cur = list(self.ins)

    def box(self, name: str, pos: int, data: Any = None) -> "Wiring":
        mt = self.sig.morphism(name)
        k = len(mt.dom)
        taken = self.cur[pos:pos + k]
        if len(taken) != k:
            raise ValueError(f"not enough open wires at {pos} for {name}")
        _, _, outs = self.b.add_generator(name, data, ins=list(taken))
        self.cur[pos:pos + k] = outs
        return self

    def permute(self, perm: Sequence[int]) -> "Wiring":
        self.cur = [self.cur[i] for i in perm]
        return self

    def graph(self) -> StringGraph:
        return self.b.freeze(self.ins, list(self.cur))


def law_graph(sig: MonoidalSignature, in_types: Sequence[str],
              steps: Sequence[tuple]) -> StringGraph:
    """Each step is (generator, position) or (generator, position, data)."""
    w = Wiring(sig, in_types)
    for step in steps:
        w.box(*step)
    return w.graph()


def _rhs_aligned_to_lhs(rule: RewriteRule) -> StringGraph:
    g = rule.rhs
    ins = [rule.iface[v] for v in rule.lhs.input_order]
    outs = [rule.iface[v] for v in rule.lhs.output_order]
    return StringGraph(g.sig, dict(g.vertices), dict(g.edges), ins, outs)


def check_rule_soundness(rule: RewriteRule, valuation: Valuation,
                         tol: float = 1e-9) -> complex:
    """eval(lhs) = scalar * eval(rhs); raises if no such nonzero scalar."""
    tl = evaluate_graph(rule.lhs, valuation)
    tr = evaluate_graph(_rhs_aligned_to_lhs(rule), valuation)
    z = equal_up_to_scalar(tl, tr, tol)
    if z is None:
        raise StrigraphError(f"rule {rule.name} is not tensor-sound")
    return z


def build_theory(name: str, sig: MonoidalSignature, valuation: Valuation,
                 rules: list[RewriteRule],
                 law_tags: Optional[dict[str, tuple[str, ...]]] = None) -> Theory:
    for r in rules:
        r.scalar = check_rule_soundness(r, valuation)
    return Theory(name, sig, valuation, RewriteSystem(name, rules),
                  law_tags or {})


# -- Z/X calculus ---------------------------------------------------------------

SQ2 = math.sqrt(2.0)
Q = "Q"
QD = (Q, 2)

KET0 = np.array([1, 0], dtype=complex)
KET1 = np.array([0, 1], dtype=complex)
HAD = np.array([[1, 1], [1, -1]], dtype=complex) / SQ2


def _t(n_out: int, n_in: int, arr) -> Tensor:
    return Tensor((QD,) * n_out, (QD,) * n_in, np.asarray(arr, dtype=complex))


def _zx_signature() -> MonoidalSignature:
    m = [
        MorphismType("z_mul", (Q, Q), (Q,)),
        MorphismType("z_unit", (), (Q,)),
        MorphismType("z_comul", (Q,), (Q, Q)),
        MorphismType("z_counit", (Q,), ()),
        MorphismType("x_mul", (Q, Q), (Q,)),
        MorphismType("x_unit", (), (Q,)),
        MorphismType("x_comul", (Q,), (Q, Q)),
        MorphismType("x_counit", (Q,), ()),
        MorphismType("z_phase", (Q,), (Q,), DATA_ANGLE),
        MorphismType("x_phase", (Q,), (Q,), DATA_ANGLE),
        MorphismType("had", (Q,), (Q,)),
    ]
    return MonoidalSignature("zx", [ObjectType(Q, 2)], m)


def _zx_valuation() -> Valuation:
    mu_z = np.zeros((2, 2, 2), dtype=complex)
    mu_z[0, 0, 0] = mu_z[1, 1, 1] = 1
    delta_z = mu_z.copy()            # |00><0| + |11><1| after axis reshaping
    eta_z = KET0 + KET1
    eps_z = KET0 + KET1

    def conj_h(arr, n_out, n_in):
        t = np.asarray(arr, dtype=complex)
        for ax in range(n_out + n_in):
            t = np.tensordot(HAD, t, axes=(1, ax))
            t = np.moveaxis(t, 0, ax)
        return t

    mu_x = conj_h(mu_z, 1, 2)
    delta_x = conj_h(delta_z, 2, 1)
    eta_x = HAD @ eta_z
    eps_x = HAD @ eps_z

    def z_phase(angle: Fraction) -> Tensor:
        return phase_tensor(Q, 2, angle)

    def x_phase(angle: Fraction) -> Tensor:
        arr = HAD @ phase_tensor(Q, 2, angle).array @ HAD
        return _t(1, 1, arr)

    return Valuation({Q: 2}, {
        "z_mul": _t(1, 2, mu_z),
        "z_unit": _t(1, 0, eta_z),
        "z_comul": _t(2, 1, delta_z),
        "z_counit": _t(0, 1, eps_z),
        "x_mul": _t(1, 2, mu_x),
        "x_unit": _t(1, 0, eta_x),
        "x_comul": _t(2, 1, delta_x),
        "x_counit": _t(0, 1, eps_x),
        "z_phase": z_phase,
        "x_phase": x_phase,
        "had": _t(1, 1, HAD),
    })


def _cfa_rules(sig: MonoidalSignature, c: str, special: bool) -> list[RewriteRule]:
    """Spider-merge instances (total legs <= 4) for the colour prefix ``c``."""
    mul, unit, comul, counit = f"{c}_mul", f"{c}_unit", f"{c}_comul", f"{c}_counit"
    rules = []

    def rule(name, lhs, rhs, tags=()):
        rules.append(rule_from_boundary_order(name, lhs, rhs, tags=tuple(tags)))

    rule(f"{c}_assoc",
         law_graph(sig, [Q, Q, Q], [(mul, 0), (mul, 0)]),
         law_graph(sig, [Q, Q, Q], [(mul, 1), (mul, 0)]),
         ["associativity"])
    rule(f"{c}_coassoc",
         law_graph(sig, [Q], [(comul, 0), (comul, 0)]),
         law_graph(sig, [Q], [(comul, 0), (comul, 1)]),
         ["coassociativity"])
    rule(f"{c}_unit_l",
         law_graph(sig, [Q], [(unit, 0), (mul, 0)]),
         strand(sig), ["unit"])
    rule(f"{c}_unit_r",
         law_graph(sig, [Q], [(unit, 1), (mul, 0)]),
         strand(sig), ["unit"])
    rule(f"{c}_counit_l",
         law_graph(sig, [Q], [(comul, 0), (counit, 0)]),
         strand(sig), ["counit"])
    rule(f"{c}_counit_r",
         law_graph(sig, [Q], [(comul, 0), (counit, 1)]),
         strand(sig), ["counit"])
    rule(f"{c}_frob_l",
         law_graph(sig, [Q, Q], [(comul, 0), (mul, 1)]),
         law_graph(sig, [Q, Q], [(mul, 0), (comul, 0)]),
         ["frobenius"])
    rule(f"{c}_frob_r",
         law_graph(sig, [Q, Q], [(comul, 1), (mul, 0)]),
         law_graph(sig, [Q, Q], [(mul, 0), (comul, 0)]),
         ["frobenius"])
    rule(f"{c}_comm",
         law_graph(sig, [Q, Q], [(mul, 0)]),
         swapped_inputs(law_graph(sig, [Q, Q], [(mul, 0)])),
         ["commutativity"])
    rule(f"{c}_cocomm",
         law_graph(sig, [Q], [(comul, 0)]),
         swapped_outputs(law_graph(sig, [Q], [(comul, 0)])),
         ["cocommutativity"])
    if special:
        rule(f"{c}_special",
             law_graph(sig, [Q], [(comul, 0), (mul, 0)]),
             strand(sig), ["special"])
    return rules


def strand(sig: MonoidalSignature, t: str = Q) -> StringGraph:
    b = GraphBuilder(sig)
    w1, w2 = b.add_wire(t), b.add_wire(t)
    b.add_edge(w1, w2)
    return b.freeze([w1], [w2])


def swapped_inputs(g: StringGraph) -> StringGraph:
    ins = list(g.input_order)
    ins[0], ins[1] = ins[1], ins[0]
    return StringGraph(g.sig, dict(g.vertices), dict(g.edges), ins,
                       g.output_order)


def swapped_outputs(g: StringGraph) -> StringGraph:
    outs = list(g.output_order)
    outs[0], outs[1] = outs[1], outs[0]
    return StringGraph(g.sig, dict(g.vertices), dict(g.edges), g.input_order,
                       outs)


def _bialgebra_rhs(sig: MonoidalSignature, comul: str, mul: str,
                   obj: str = Q) -> StringGraph:
    w = Wiring(sig, [obj, obj])
    w.box(comul, 0).box(comul, 2)
    w.permute([0, 2, 1, 3])
    w.box(mul, 0).box(mul, 1)
    return w.graph()


def zx_theory() -> Theory:
    sig = _zx_signature()
    val = _zx_valuation()
    rules: list[RewriteRule] = []
    rules += _cfa_rules(sig, "z", special=True)
    rules += _cfa_rules(sig, "x", special=True)

    def rule(name, lhs, rhs, tags=()):
        rules.append(rule_from_boundary_order(name, lhs, rhs, tags=tuple(tags)))

    # copy: each colour's comultiplication copies the other's unit
    rule("z_copies_x_unit",
         law_graph(sig, [], [("x_unit", 0), ("z_comul", 0)]),
         law_graph(sig, [], [("x_unit", 0), ("x_unit", 1)]), ["copy"])
    rule("x_copies_z_unit",
         law_graph(sig, [], [("z_unit", 0), ("x_comul", 0)]),
         law_graph(sig, [], [("z_unit", 0), ("z_unit", 1)]), ["copy"])
    rule("z_counit_deletes_x",
         law_graph(sig, [Q, Q], [("x_mul", 0), ("z_counit", 0)]),
         law_graph(sig, [Q, Q], [("z_counit", 0), ("z_counit", 0)]), ["copy"])
    rule("x_counit_deletes_z",
         law_graph(sig, [Q, Q], [("z_mul", 0), ("x_counit", 0)]),
         law_graph(sig, [Q, Q], [("x_counit", 0), ("x_counit", 0)]), ["copy"])
    # scaled bialgebra
    rule("zx_bialgebra",
         law_graph(sig, [Q, Q], [("x_mul", 0), ("z_comul", 0)]),
         _bialgebra_rhs(sig, "z_comul", "x_mul"), ["bialgebra"])
    rule("xz_bialgebra",
         law_graph(sig, [Q, Q], [("z_mul", 0), ("x_comul", 0)]),
         _bialgebra_rhs(sig, "x_comul", "z_mul"), ["bialgebra"])
    # Hopf law with trivial antipode: the pair disconnects
    rule("zx_hopf",
         law_graph(sig, [Q], [("z_comul", 0), ("x_mul", 0)]),
         law_graph(sig, [Q], [("z_counit", 0), ("x_unit", 0)]), ["hopf"])
    rule("xz_hopf",
         law_graph(sig, [Q], [("x_comul", 0), ("z_mul", 0)]),
         law_graph(sig, [Q], [("x_counit", 0), ("z_unit", 0)]), ["hopf"])
    # colour change through Hadamard
    rule("had_invol",
         law_graph(sig, [Q], [("had", 0), ("had", 0)]),
         strand(sig), ["hadamard"])
    rule("colour_mul",
         law_graph(sig, [Q, Q], [("had", 0), ("had", 1), ("z_mul", 0), ("had", 0)]),
         law_graph(sig, [Q, Q], [("x_mul", 0)]), ["hadamard"])
    rule("colour_comul",
         law_graph(sig, [Q], [("had", 0), ("z_comul", 0), ("had", 0), ("had", 1)]),
         law_graph(sig, [Q], [("x_comul", 0)]), ["hadamard"])
    rule("colour_unit",
         law_graph(sig, [], [("z_unit", 0), ("had", 0)]),
         law_graph(sig, [], [("x_unit", 0)]), ["hadamard"])
    rule("colour_counit",
         law_graph(sig, [Q], [("had", 0), ("z_counit", 0)]),
         law_graph(sig, [Q], [("x_counit", 0)]), ["hadamard"])

    tags = {r.name: r.tags for r in rules}
    return build_theory("zx", sig, val, rules, tags)


def zx_cnot_graph(sig: MonoidalSignature) -> StringGraph:
    """Z dot on the control copied into an X dot on the target."""
    w = Wiring(sig, [Q, Q])
    w.box("z_comul", 0)
    w.permute([0, 2, 1])
    w.box("x_mul", 1)
    return w.graph()


def zx_cnot3_graph(sig: MonoidalSignature) -> StringGraph:
    """Three alternating CNOTs (control 0, control 1, control 0)."""
    w = Wiring(sig, [Q, Q])
    w.box("z_comul", 0).permute([0, 2, 1]).box("x_mul", 1)
    w.box("z_comul", 1).permute([1, 0, 2]).box("x_mul", 0)
    w.box("z_comul", 0).permute([0, 2, 1]).box("x_mul", 1)
    return w.graph()


def swap_graph(sig: MonoidalSignature) -> StringGraph:
    b = GraphBuilder(sig)
    a1, a2 = b.add_wire(Q), b.add_wire(Q)
    b1, b2 = b.add_wire(Q), b.add_wire(Q)
    b.add_edge(a1, a2)
    b.add_edge(b1, b2)
    return b.freeze([a1, b1], [b2, a2])


def euler_hadamard_graph(sig: MonoidalSignature) -> StringGraph:
    """Z(-1/2) X(-1/2) Z(-1/2), proportional to a Hadamard."""
    half = Fraction(-1, 2)
    return law_graph(sig, [Q], [("z_phase", 0, half), ("x_phase", 0, half),
                                ("z_phase", 0, half)])


# -- GHZ/W pair -------------------------------------------------------------------


def _gw_signature() -> MonoidalSignature:
    m = [
        MorphismType("g_mul", (Q, Q), (Q,)),
        MorphismType("g_unit", (), (Q,)),
        MorphismType("g_comul", (Q,), (Q, Q)),
        MorphismType("g_counit", (Q,), ()),
        MorphismType("w_mul", (Q, Q), (Q,)),
        MorphismType("w_unit", (), (Q,)),
        MorphismType("w_comul", (Q,), (Q, Q)),
        MorphismType("w_counit", (Q,), ()),
        MorphismType("tick", (Q,), (Q,)),
    ]
    return MonoidalSignature("gw", [ObjectType(Q, 2)], m)


def _gw_valuation() -> Valuation:
    mu_g = np.zeros((2, 2, 2), dtype=complex)
    mu_g[0, 0, 0] = mu_g[1, 1, 1] = 1
    delta_g = mu_g.copy()
    mu_w = np.zeros((2, 2, 2), dtype=complex)
    mu_w[1, 1, 1] = 1    # |1><11|
    mu_w[0, 0, 1] = 1    # |0><01|
    mu_w[0, 1, 0] = 1    # |0><10|
    delta_w = np.zeros((2, 2, 2), dtype=complex)
    delta_w[0, 0, 0] = 1  # |00><0|
    delta_w[0, 1, 1] = 1  # |01><1|
    delta_w[1, 0, 1] = 1  # |10><1|
    tick = np.array([[0, 1], [1, 0]], dtype=complex)
    return Valuation({Q: 2}, {
        "g_mul": _t(1, 2, mu_g),
        "g_unit": _t(1, 0, KET0 + KET1),
        "g_comul": _t(2, 1, delta_g),
        "g_counit": _t(0, 1, KET0 + KET1),
        "w_mul": _t(1, 2, mu_w),
        "w_unit": _t(1, 0, KET1),
        "w_comul": _t(2, 1, delta_w),
        "w_counit": _t(0, 1, KET0),
        "tick": _t(1, 1, tick),
    })


def _circle(sig: MonoidalSignature) -> GraphBuilder:
    b = GraphBuilder(sig)
    v = b.add_wire(Q)
    b.add_edge(v, v)
    return b


def _lolli_graph(sig: MonoidalSignature) -> StringGraph:
    """Partial trace of w_comul: its second output looped into its input."""
    b = GraphBuilder(sig)
    box, ins, outs = b.add_generator("w_comul")
    g = b.freeze(ins, outs)
    from .graph import plug_self
    return plug_self(g, [(outs[1], ins[0])])


def _cololli_graph(sig: MonoidalSignature) -> StringGraph:
    b = GraphBuilder(sig)
    box, ins, outs = b.add_generator("w_mul")
    g = b.freeze(ins, outs)
    from .graph import plug_self
    return plug_self(g, [(outs[0], ins[1])])


def gw_theory() -> Theory:
    sig = _gw_signature()
    val = _gw_valuation()
    rules: list[RewriteRule] = []
    rules += _cfa_rules(sig, "g", special=True)
    rules += _cfa_rules(sig, "w", special=False)

    def rule(name, lhs, rhs, tags=()):
        rules.append(rule_from_boundary_order(name, lhs, rhs, tags=tuple(tags)))

    from .graph import disjoint_union, plug_self

    # anti-specialness: a circle and a w-loop disconnect into lolli/cololli
    loop = law_graph(sig, [Q], [("w_comul", 0), ("w_mul", 0)])
    lhs_as, _, _ = disjoint_union(_circle(sig).freeze(), loop)
    rhs_as, _, _ = disjoint_union(_cololli_graph(sig), _lolli_graph(sig))
    rule("w_antispecial", lhs_as, rhs_as, ["antispecial"])

    # closure of the W algebra on the G observable
    rule("gw_copy_mul",
         law_graph(sig, [Q, Q], [("w_mul", 0), ("g_comul", 0)]),
         _bialgebra_rhs(sig, "g_comul", "w_mul"), ["closure"])
    rule("gw_copy_unit",
         law_graph(sig, [], [("w_unit", 0), ("g_comul", 0)]),
         law_graph(sig, [], [("w_unit", 0), ("w_unit", 1)]), ["closure"])
    rule("gw_cocopy_comul",
         law_graph(sig, [Q, Q], [("g_mul", 0), ("w_comul", 0)]),
         _bialgebra_rhs(sig, "w_comul", "g_mul"), ["closure"])
    rule("gw_cocopy_counit",
         law_graph(sig, [Q, Q], [("g_mul", 0), ("w_counit", 0)]),
         law_graph(sig, [Q, Q], [("w_counit", 0), ("w_counit", 0)]),
         ["closure"])

    # dualiser laws
    rule("tick_invol",
         law_graph(sig, [Q], [("tick", 0), ("tick", 0)]),
         strand(sig), ["tick"])
    lhs_tu, _, _ = disjoint_union(
        _circle(sig).freeze(),
        law_graph(sig, [], [("w_unit", 0), ("tick", 0)]))
    rule("tick_unit", lhs_tu, _lolli_graph(sig), ["tick"])
    lhs_tc, _, _ = disjoint_union(
        _circle(sig).freeze(),
        law_graph(sig, [Q], [("tick", 0), ("w_counit", 0)]))
    rule("tick_counit", lhs_tc, _cololli_graph(sig), ["tick"])

    # derivation support: copying the tick-dressed unit, cap/tick moves,
    # Frobenius snakes, and the ticked W loop
    rule("gw_copy_unit0",
         law_graph(sig, [], [("w_unit", 0), ("tick", 0), ("g_comul", 0)]),
         law_graph(sig, [], [("w_unit", 0), ("tick", 0),
                             ("w_unit", 1), ("tick", 1)]), ["derived"])
    rule("w_copy_unit0",
         law_graph(sig, [], [("w_unit", 0), ("tick", 0), ("w_comul", 0)]),
         law_graph(sig, [], [("w_unit", 0), ("tick", 0),
                             ("w_unit", 1), ("tick", 1)]), ["derived"])
    cap_w = law_graph(sig, [], [("w_unit", 0), ("w_comul", 0)])
    cap_g = law_graph(sig, [], [("g_unit", 0), ("g_comul", 0)])
    for leg in (0, 1):
        rule(f"tick_cap_w{leg}",
             law_graph(sig, [], [("w_unit", 0), ("w_comul", 0), ("tick", leg)]),
             cap_g, ["tick"])
        rule(f"tick_cap_g{leg}",
             law_graph(sig, [], [("g_unit", 0), ("g_comul", 0), ("tick", leg)]),
             cap_w, ["tick"])
    rule("w_snake_l",
         law_graph(sig, [Q], [("w_unit", 0), ("w_comul", 0), ("w_mul", 1)]),
         law_graph(sig, [Q], [("w_comul", 0)]), ["frobenius"])
    rule("w_snake_r",
         law_graph(sig, [Q], [("w_unit", 1), ("w_comul", 1), ("w_mul", 0)]),
         law_graph(sig, [Q], [("w_comul", 0)]), ["frobenius"])
    rule("w_loop_tick_l",
         law_graph(sig, [Q], [("w_comul", 0), ("tick", 0), ("w_mul", 0)]),
         strand(sig), ["tick"])
    rule("w_loop_tick_r",
         law_graph(sig, [Q], [("w_comul", 0), ("tick", 1), ("w_mul", 0)]),
         strand(sig), ["tick"])
    rule("w_absorb_l",
         law_graph(sig, [Q], [("w_unit", 0), ("tick", 0), ("w_mul", 0)]),
         law_graph(sig, [Q], [("tick", 0), ("w_counit", 0),
                              ("w_unit", 0), ("tick", 0)]), ["derived"])

    tags = {r.name: r.tags for r in rules}
    return build_theory("gw", sig, val, rules, tags)


def gw_pair_theory() -> Theory:
    """The eight GHZ/W maps alone (no dualiser): the synthesis generators."""
    full = gw_theory()
    m = [mt for name, mt in sorted(full.sig.morphisms.items())
         if name != "tick"]
    sig = MonoidalSignature("gw_pair", [ObjectType(Q, 2)], m)
    gens = {k: v for k, v in full.valuation.gens.items() if k != "tick"}
    val = Valuation(full.valuation.dims, gens)
    rules: list[RewriteRule] = []
    rules += _cfa_rules(sig, "g", special=True)
    rules += _cfa_rules(sig, "w", special=False)
    tags = {r.name: r.tags for r in rules}
    return build_theory("gw_pair", sig, val, rules, tags)


def gw_xor_gadget(w: Wiring, pos: int) -> None:
    """Wire ``pos`` (the copied control) XORs into wire ``pos+1``."""
    w.box("w_comul", pos)                 # control -> a1 a2
    w.box("tick", pos)
    w.box("tick", pos + 1)
    w.box("w_mul", pos + 1)               # inner: (tick a2) * target
    w.box("tick", pos + 1)
    w.box("w_mul", pos)                   # outer: (tick a1) * inner
    w.box("tick", pos)


def gw_cnot_graph(sig: MonoidalSignature) -> StringGraph:
    """CNOT from the GHZ/W generators alone (evaluates exactly to CNOT)."""
    w = Wiring(sig, [Q, Q])
    w.box("g_comul", 0)                   # copy the control
    gw_xor_gadget(w, 1)
    return w.graph()


def gw_cnot_control_graph(sig: MonoidalSignature, control: int) -> StringGraph:
    """The CNOT graph with |control> prepared on the control wire."""
    w = Wiring(sig, [Q])
    w.box("w_unit", 0)                    # inserts |1> before the target wire
    if control == 0:
        w.box("tick", 0)                  # |0>
    w.box("g_comul", 0)
    gw_xor_gadget(w, 1)
    return w.graph()


def gw_cnot_expected_graph(sig: MonoidalSignature, control: int) -> StringGraph:
    """What the control-case derivation should reach: |c> on the control
    output, identity (c=0) or a tick (c=1) on the target."""
    b = GraphBuilder(sig)
    _, _, outs = b.add_generator("w_unit")
    cur = outs[0]
    if control == 0:
        _, _, touts = b.add_generator("tick", ins=[cur])
        cur = touts[0]
    t_in = b.add_wire(Q)
    if control == 0:
        t_out = b.add_wire(Q)
        b.add_edge(t_in, t_out)
    else:
        _, _, touts = b.add_generator("tick", ins=[t_in])
        t_out = touts[0]
    return b.freeze([t_in], [cur, t_out])


GW_CNOT_DERIVATION = {
    0: ["gw_copy_unit0", "w_copy_unit0", "tick_invol", "tick_invol",
        "w_unit_l", "w_unit_l", "tick_invol"],
    1: ["gw_copy_unit", "tick_cap_w1", "tick_cap_g0", "w_snake_l",
        "w_loop_tick_r"],
}

# Rewrites CNOT^3 to the bare crossing: one bialgebra expansion, two Hopf
# disconnections, and spider reshuffling in between.
ZX_CNOT3_DERIVATION = [
    ("z_cocomm", 0), ("z_cocomm", 1), ("z_cocomm", 2), ("x_comm", 1),
    ("zx_bialgebra", 1), ("z_coassoc", 0), ("x_assoc", 0), ("zx_hopf", 0),
    ("z_counit_r", 0), ("x_unit_r", 0), ("z_cocomm", 0), ("z_cocomm", 1),
    ("z_coassoc", 0), ("z_cocomm", 0), ("x_comm", 0), ("x_comm", 1),
    ("x_assoc", 0), ("zx_hopf", 0), ("z_counit_r", 0), ("x_unit_r", 0),
]


def run_derivation(theory: Theory, start: StringGraph,
                   steps: Sequence[tuple[str, int]]) -> StringGraph:
    """Replay a scripted (rule, match index) sequence."""
    from .rewrite import apply, find_matches
    g = normalize_wires(start)
    for rname, mi in steps:
        rule = theory.rules.rule(rname)
        ms = list(itertools.islice(find_matches(rule, g), mi + 1))
        if len(ms) <= mi:
            raise StrigraphError(f"derivation stuck at {rname}[{mi}]")
        g = apply(ms[mi])
    return g


# -- special / anti-special checkers -----------------------------------------------


@dataclass
class CFA:
    """A commutative-Frobenius-algebra valuation: four tensors over one object."""

    mu: Tensor
    eta: Tensor
    delta: Tensor
    epsilon: Tensor

    @property
    def dim(self) -> int:
        return self.mu.upper[0][1]

    def obj(self) -> tuple[str, int]:
        return self.mu.upper[0]


def check_special(cfa: CFA, tol: float = 1e-9) -> bool:
    loop = cfa.mu.compose(cfa.delta)
    return bool(np.allclose(loop.as_matrix(), np.eye(cfa.dim), atol=tol))


def lolli_of(cfa: CFA) -> Tensor:
    from .tensor import contract
    return contract(cfa.delta, 0, 1)


def cololli_of(cfa: CFA) -> Tensor:
    from .tensor import contract
    return contract(cfa.mu, 1, 0)


def check_antispecial(cfa: CFA, tol: float = 1e-9) -> bool:
    lolli, cololli = lolli_of(cfa), cololli_of(cfa)
    circ = cfa.epsilon.compose(lolli).array.item()
    lhs = circ * cfa.mu.compose(cfa.delta).as_matrix()
    rhs = np.outer(lolli.array, cololli.array)
    scale = max(np.max(np.abs(lhs)), np.max(np.abs(rhs)), 1.0)
    return bool(np.allclose(lhs, rhs, atol=tol * scale))


# -- group-algebra strongly complementary pairs --------------------------------------


def group_pair(factors: Sequence[int]) -> tuple[CFA, CFA]:
    """Computational-basis SCFA and the group algebra of prod(Z_k)."""
    if not factors or any(k < 1 for k in factors):
        raise ValueError("factors must be positive")
    D = int(np.prod(factors))
    obj = ("G", D)
    elems = list(itertools.product(*[range(k) for k in factors]))
    index = {e: i for i, e in enumerate(elems)}

    def add(a, b):
        return tuple((x + y) % k for x, y, k in zip(a, b, factors))

    mu = np.zeros((D, D, D), dtype=complex)
    delta = np.zeros((D, D, D), dtype=complex)
    for g in range(D):
        mu[g, g, g] = 1
        delta[g, g, g] = 1
    eta = np.ones(D, dtype=complex)
    eps = np.ones(D, dtype=complex)
    basis = CFA(Tensor((obj,), (obj, obj), mu),
                Tensor((obj,), (), eta),
                Tensor((obj, obj), (obj,), delta),
                Tensor((), (obj,), eps))

    mu2 = np.zeros((D, D, D), dtype=complex)
    for a in elems:
        for b in elems:
            mu2[index[add(a, b)], index[a], index[b]] = 1 / math.sqrt(D)
    unit2 = np.zeros(D, dtype=complex)
    unit2[index[tuple(0 for _ in factors)]] = math.sqrt(D)
    grp = CFA(Tensor((obj,), (obj, obj), mu2),
              Tensor((obj,), (), unit2),
              Tensor((obj, obj), (obj,), mu2.transpose(1, 2, 0).copy()),
              Tensor((), (obj,), unit2.copy()))
    # delta' = mu'^dagger and eps' = eta'^dagger (entries are real)
    grp = CFA(grp.mu, grp.eta,
              Tensor((obj, obj), (obj,),
                     np.conj(np.moveaxis(mu2, 0, 2))),
              Tensor((), (obj,), np.conj(unit2)))
    return basis, grp


def _pair_valuation(o: CFA, p: CFA) -> tuple[MonoidalSignature, Valuation]:
    obj, dim = o.obj()
    m = [MorphismType("o_mul", (obj, obj), (obj,)),
         MorphismType("o_unit", (), (obj,)),
         MorphismType("o_comul", (obj,), (obj, obj)),
         MorphismType("o_counit", (obj,), ()),
         MorphismType("p_mul", (obj, obj), (obj,)),
         MorphismType("p_unit", (), (obj,)),
         MorphismType("p_comul", (obj,), (obj, obj)),
         MorphismType("p_counit", (obj,), ())]
    sig = MonoidalSignature("pair", [ObjectType(obj, dim)], m)
    val = Valuation({obj: dim}, {
        "o_mul": o.mu, "o_unit": o.eta, "o_comul": o.delta,
        "o_counit": o.epsilon,
        "p_mul": p.mu, "p_unit": p.eta, "p_comul": p.delta,
        "p_counit": p.epsilon,
    })
    return sig, val


def check_strong_complementarity(o: CFA, p: CFA, tol: float = 1e-9) -> bool:
    """The scaled bialgebra equations, built as graphs and evaluated."""
    sig, val = _pair_valuation(o, p)
    obj = o.obj()[0]
    two = [obj, obj]
    lhs1 = law_graph(sig, two, [("p_mul", 0), ("o_comul", 0)])
    rhs1 = _bialgebra_rhs(sig, "o_comul", "p_mul", obj)
    lhs2 = law_graph(sig, [], [("p_unit", 0), ("o_comul", 0)])
    rhs2 = law_graph(sig, [], [("p_unit", 0), ("p_unit", 1)])
    lhs3 = law_graph(sig, two, [("p_mul", 0), ("o_counit", 0)])
    rhs3 = law_graph(sig, two, [("o_counit", 0), ("o_counit", 0)])
    lhs4 = law_graph(sig, [], [("p_unit", 0), ("o_counit", 0)])
    for lhs, rhs in ((lhs1, rhs1), (lhs2, rhs2), (lhs3, rhs3)):
        tl, tr = evaluate_graph(lhs, val), evaluate_graph(rhs, val)
        try:
            if equal_up_to_scalar(tl, tr, tol) is None:
                return False
        except ShapeMismatch:
            return False
    # the connecting scalar must not vanish
    if abs(evaluate_graph(lhs4, val).array.item()) <= tol:
        return False
    # and symmetrically with the roles swapped
    lhs1b = law_graph(sig, two, [("o_mul", 0), ("p_comul", 0)])
    rhs1b = _bialgebra_rhs(sig, "p_comul", "o_mul", obj)
    lhs2b = law_graph(sig, [], [("o_unit", 0), ("p_comul", 0)])
    rhs2b = law_graph(sig, [], [("o_unit", 0), ("o_unit", 1)])
    lhs3b = law_graph(sig, two, [("o_mul", 0), ("p_counit", 0)])
    rhs3b = law_graph(sig, two, [("p_counit", 0), ("p_counit", 0)])
    for lhs, rhs in ((lhs1b, rhs1b), (lhs2b, rhs2b), (lhs3b, rhs3b)):
        tl, tr = evaluate_graph(lhs, val), evaluate_graph(rhs, val)
        try:
            if equal_up_to_scalar(tl, tr, tol) is None:
                return False
        except ShapeMismatch:
            return False
    return True


def antipode_of(o: CFA, p: CFA) -> Tensor:
    """S = (1 x cup_o) . (cap_p x 1), the dualiser composite."""
    cap = p.delta.compose(p.eta)       # 2 uppers
    cup = o.epsilon.compose(o.mu)      # 2 lowers
    s = np.tensordot(cap.array, cup.array, axes=(1, 0))
    obj = o.obj()
    return Tensor((obj,), (obj,), s)


def check_hopf(o: CFA, p: CFA, tol: float = 1e-9) -> bool:
    """mu_p . (S x 1) . delta_o disconnects into eta_p . eps_o."""
    s = antipode_of(o, p)
    obj, dim = o.obj()
    lhs = p.mu.array.copy()
    # apply S on the first input of mu_p, then compose with delta_o
    lhs = np.tensordot(lhs, s.array, axes=(1, 0))      # (out, in2, in1')
    lhs = np.moveaxis(lhs, 2, 1)                        # (out, in1', in2)
    lhs = np.tensordot(lhs, o.delta.array, axes=([1, 2], [0, 1]))
    rhs = np.outer(p.eta.array, o.epsilon.array)
    tl = Tensor((o.obj(),), (o.obj(),), lhs)
    tr = Tensor((o.obj(),), (o.obj(),), rhs)
    return equal_up_to_scalar(tl, tr, tol) is not None


# -- CP1 arithmetic ------------------------------------------------------------------


INF = "inf"
BOT = "bot"


@dataclass(frozen=True)
class CP1Point:
    kind: str                  # "num" | "inf" | "bot"
    value: complex = 0j

    @staticmethod
    def num(z: complex) -> "CP1Point":
        return CP1Point("num", complex(z))

    @staticmethod
    def infinity() -> "CP1Point":
        return CP1Point(INF)

    @staticmethod
    def bottom() -> "CP1Point":
        return CP1Point(BOT)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CP1Point):
            return NotImplemented
        if self.kind != other.kind:
            return False
        if self.kind == "num":
            return abs(self.value - other.value) <= 1e-9 * max(
                1.0, abs(self.value), abs(other.value))
        return True


def numket(p: CP1Point) -> np.ndarray:
    if p.kind == BOT:
        return np.zeros(2, dtype=complex)
    if p.kind == INF:
        return KET1.copy()
    return KET0 + p.value * KET1


def decode_numket(v: np.ndarray, tol: float = 1e-9) -> CP1Point:
    n = np.max(np.abs(v))
    if n <= tol:
        return CP1Point.bottom()
    if abs(v[0]) <= tol * n:
        return CP1Point.infinity()
    return CP1Point.num(v[1] / v[0])


def cp1_mul(a: CP1Point, b: CP1Point,
            valuation: Optional[Valuation] = None) -> CP1Point:
    val = valuation or _gw_valuation()
    mu = val.tensor_for("g_mul").array
    out = np.einsum("oij,i,j->o", mu, numket(a), numket(b))
    return decode_numket(out)


def cp1_add(a: CP1Point, b: CP1Point,
            valuation: Optional[Valuation] = None) -> CP1Point:
    # the W multiplication conjugated by the dualiser adds projective points
    val = valuation or _gw_valuation()
    mu = val.tensor_for("w_mul").array
    tick = val.tensor_for("tick").array
    out = np.einsum("po,oij,ik,jl,k,l->p", tick, mu, tick, tick,
                    numket(a), numket(b))
    return decode_numket(out)


# -- Frobenius states -----------------------------------------------------------------


def derived_cfa_from_state(psi: Tensor, phi: Tensor, xi: Tensor) -> CFA:
    """The algebra a symmetric tripartite state induces via its two effects."""
    if psi.rank != (3, 0) or phi.rank != (0, 2) or xi.rank != (0, 1):
        raise ShapeMismatch("need a tripartite state and two effects")
    P, F, X = psi.array, phi.array, xi.array
    obj = psi.upper[0]
    mu = np.einsum("abc,bu,cw->auw", P, F, F)
    delta = np.einsum("abc,cv->abv", P, F)
    eta = np.einsum("a,b,abc->c", X, X, P)
    return CFA(Tensor((obj,), (obj, obj), mu),
               Tensor((obj,), (), eta),
               Tensor((obj, obj), (obj,), delta),
               Tensor((), (obj,), X))


def _cfa_laws_hold(cfa: CFA, tol: float = 1e-9) -> bool:
    mu, eta = cfa.mu.array, cfa.eta.array
    delta, eps = cfa.delta.array, cfa.epsilon.array
    d = cfa.dim
    a1 = np.einsum("xwc,wab->xabc", mu, mu)
    a2 = np.einsum("xaw,wbc->xabc", mu, mu)
    if not np.allclose(a1, a2, atol=tol):
        return False
    if not np.allclose(np.einsum("xab,a->xb", mu, eta), np.eye(d), atol=tol):
        return False
    if not np.allclose(np.einsum("xab,b->xa", mu, eta), np.eye(d), atol=tol):
        return False
    c1 = np.einsum("abw,wcv->abcv", delta, delta)
    c2 = np.einsum("bcw,awv->abcv", delta, delta)
    if not np.allclose(c1, c2, atol=tol):
        return False
    if not np.allclose(np.einsum("abv,a->bv", delta, eps), np.eye(d), atol=tol):
        return False
    if not np.allclose(np.einsum("abv,b->av", delta, eps), np.eye(d), atol=tol):
        return False
    # Frobenius: (1 x mu)(delta x 1) == delta . mu == (mu x 1)(1 x delta)
    dm = np.einsum("abw,wxy->abxy", delta, mu)
    left = np.einsum("apx,bpy->abxy", delta, mu)
    right = np.einsum("axp,pby->abxy", mu, delta)
    return bool(np.allclose(left, dm, atol=tol) and
                np.allclose(right, dm, atol=tol))


def check_frobenius_state(psi: Tensor, phi: Tensor, xi: Tensor,
                          tol: float = 1e-9) -> bool:
    P, F, X = psi.array, phi.array, xi.array
    d = P.shape[0]
    # strong SLOCC-maximality: the xi-projected state snakes to the identity
    beta = np.einsum("a,abc->bc", X, P)
    snake = np.einsum("bk,kj->bj", beta, F)
    if equal_up_to_scalar(Tensor(psi.upper[:1], (psi.upper[0],), snake),
                          Tensor(psi.upper[:1], (psi.upper[0],), np.eye(d)),
                          tol) is None:
        return False
    # strong symmetry: gluing two copies through phi stays fully symmetric
    glued = np.einsum("abc,cf,fde->abde", P, F, P)
    for perm in itertools.permutations(range(4)):
        if not np.allclose(glued, glued.transpose(perm), atol=tol * 10):
            return False
    # the induced algebra must satisfy the Frobenius laws
    return _cfa_laws_hold(derived_cfa_from_state(psi, phi, xi), tol)


def ghz_state(d: int = 2) -> Tensor:
    arr = np.zeros((d, d, d), dtype=complex)
    for i in range(d):
        arr[i, i, i] = 1
    return Tensor((("G", d),) * 3, (), arr)


def w_state() -> Tensor:
    arr = np.zeros((2, 2, 2), dtype=complex)
    arr[1, 0, 0] = arr[0, 1, 0] = arr[0, 0, 1] = 1
    return Tensor((("G", 2),) * 3, (), arr)


def bell_effect(d: int = 2) -> Tensor:
    return Tensor((), (("G", d),) * 2, np.eye(d))


def epr_effect() -> Tensor:
    arr = np.zeros((2, 2), dtype=complex)
    arr[0, 1] = arr[1, 0] = 1
    return Tensor((), (("G", 2),) * 2, arr)
