from fractions import Fraction

import pytest

from strigraph.errors import InvalidSignature
from strigraph.signature import (MonoidalSignature, MorphismType, ObjectType,
                                 check_angle, derive_typegraph,
                                 validate_signature)


def abc_sig():
    return MonoidalSignature(
        "abc",
        [ObjectType("A"), ObjectType("B"), ObjectType("C")],
        [MorphismType("f", ("A", "B"), ("C",)),
         MorphismType("g", ("C",), ("C",))])


def test_typegraph_example_counts_and_edges():
    tg = derive_typegraph(abc_sig())
    assert len(tg.vertices) == 5
    mids = [e for e in tg.edges if e.tag == "mid"]
    assert sorted((e.src, e.tgt) for e in mids) == [("A", "A"), ("B", "B"), ("C", "C")]
    ins = sorted((e.morphism, e.port, e.src) for e in tg.edges if e.tag == "in")
    assert ins == [("f", 0, "A"), ("f", 1, "B"), ("g", 0, "C")]
    outs = sorted((e.morphism, e.port, e.tgt) for e in tg.edges if e.tag == "out")
    assert outs == [("f", 0, "C"), ("g", 0, "C")]


def test_typegraph_empty_signature():
    tg = derive_typegraph(MonoidalSignature("empty", [], []))
    assert tg.vertices == () and tg.edges == ()


def test_typegraph_scalar_box():
    sig = MonoidalSignature("s", [], [MorphismType("s", (), ())])
    tg = derive_typegraph(sig)
    assert tg.vertices == ("s",) and tg.edges == ()


def test_typegraph_edge_count_formula():
    sig = abc_sig()
    tg = derive_typegraph(sig)
    expected = len(sig.objects) + sum(
        len(m.dom) + len(m.cod) for m in sig.morphisms.values())
    assert len(tg.edges) == expected


def test_typegraph_deterministic():
    a, b = derive_typegraph(abc_sig()), derive_typegraph(abc_sig())
    assert a == b


def test_validate_well_formed():
    assert validate_signature(abc_sig()) == []


def test_validate_unknown_object():
    sig = MonoidalSignature("bad", [ObjectType("A")],
                            [MorphismType("f", ("Q",), ("A",))])
    codes = [v.code for v in validate_signature(sig)]
    assert "UnknownObject" in codes
    with pytest.raises(InvalidSignature):
        derive_typegraph(sig)


def test_validate_bad_identifier_and_dim():
    sig = MonoidalSignature("bad2", [ObjectType("sp ace", dim=0)], [])
    codes = {v.code for v in validate_signature(sig)}
    assert {"BadIdentifier", "BadDimension"} <= codes


def test_angle_normalization():
    assert check_angle(Fraction(9, 4)) == Fraction(1, 4)
    assert check_angle(Fraction(-1, 2)) == Fraction(3, 2)
    with pytest.raises(InvalidSignature):
        check_angle(Fraction(1, 720))
