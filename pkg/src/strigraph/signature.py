"""Monoidal signatures and their derived typegraphs.

A signature declares named object (wire) types and morphism (box) types
with ordered domain/codomain lists. The derived typegraph is the typed-graph
target that every string graph over the signature maps into: one vertex per
object and morphism, a mid self-loop per object, and one in/out edge per
box port.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

from .errors import InvalidSignature, Violation

IDENT_RE = re.compile(r"^[A-Za-z0-9_]+$")

# data_kind values for MorphismType
DATA_NONE = "none"
DATA_ANGLE = "angle"
DATA_OPAQUE = "opaque"

MAX_ANGLE_DENOMINATOR = 360


@dataclass(frozen=True)
class ObjectType:
    name: str
    dim: Optional[int] = None


@dataclass(frozen=True)
class MorphismType:
    name: str
    dom: tuple[str, ...]
    cod: tuple[str, ...]
    data_kind: str = DATA_NONE

    def __post_init__(self) -> None:
        object.__setattr__(self, "dom", tuple(self.dom))
        object.__setattr__(self, "cod", tuple(self.cod))

    @property
    def arity(self) -> tuple[int, int]:
        return (len(self.dom), len(self.cod))


class MonoidalSignature:
    """Immutable set of object and morphism types, keyed by name."""

    def __init__(self, name: str, objects: Iterable[ObjectType],
                 morphisms: Iterable[MorphismType]):
        self.name = name
        self.objects: dict[str, ObjectType] = {}
        for ot in objects:
            self.objects[ot.name] = ot
        self.morphisms: dict[str, MorphismType] = {}
        for mt in morphisms:
            self.morphisms[mt.name] = mt

    def object(self, name: str) -> ObjectType:
        return self.objects[name]

    def morphism(self, name: str) -> MorphismType:
        return self.morphisms[name]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MonoidalSignature):
            return NotImplemented
        return (self.name == other.name and self.objects == other.objects
                and self.morphisms == other.morphisms)

    def __hash__(self) -> int:
        return hash((self.name, frozenset(self.objects),
                     frozenset(self.morphisms)))

    def __repr__(self) -> str:
        return (f"MonoidalSignature({self.name!r}, "
                f"{len(self.objects)} objects, {len(self.morphisms)} morphisms)")


def validate_signature(sig: MonoidalSignature) -> list[Violation]:
    """Return all invariant violations; empty list means well-formed."""
    out: list[Violation] = []
    seen_names: set[str] = set()
    for name, ot in sig.objects.items():
        if not IDENT_RE.match(name):
            out.append(Violation("BadIdentifier", name, "object name"))
        if name in seen_names:
            out.append(Violation("DuplicateName", name))
        seen_names.add(name)
        if ot.dim is not None and ot.dim < 1:
            out.append(Violation("BadDimension", name, f"dim={ot.dim}"))
    for name, mt in sig.morphisms.items():
        if not IDENT_RE.match(name):
            out.append(Violation("BadIdentifier", name, "morphism name"))
        if name in seen_names:
            out.append(Violation("DuplicateName", name))
        seen_names.add(name)
        if mt.data_kind not in (DATA_NONE, DATA_ANGLE, DATA_OPAQUE):
            out.append(Violation("BadDataKind", name, mt.data_kind))
        for obj in list(mt.dom) + list(mt.cod):
            if obj not in sig.objects:
                out.append(Violation("UnknownObject", obj,
                                     f"referenced by morphism {name}"))
    return out


def check_angle(value: Fraction) -> Fraction:
    """Normalize an exact angle (a rational multiple of pi) into [0, 2)."""
    v = Fraction(value) % 2
    if v.denominator > MAX_ANGLE_DENOMINATOR:
        raise InvalidSignature(
            f"angle denominator {v.denominator} exceeds {MAX_ANGLE_DENOMINATOR}")
    return v


# Typegraph edge tags. mid_X is a self-loop on object X; in_{f,i} connects
# dom(f)[i] to f; out_{f,j} connects f to cod(f)[j].
@dataclass(frozen=True)
class TypeEdge:
    tag: str            # "mid" | "in" | "out"
    src: str
    tgt: str
    morphism: Optional[str] = None
    port: Optional[int] = None


@dataclass(frozen=True)
class TypeGraph:
    vertices: tuple[str, ...]
    edges: tuple[TypeEdge, ...] = field(default_factory=tuple)


def derive_typegraph(sig: MonoidalSignature) -> TypeGraph:
    """Build the typegraph for ``sig``.

    Raises InvalidSignature on dangling object references; otherwise the
    result has |O|+|M| vertices and one mid loop per object plus one edge
    per box port.
    """
    violations = [v for v in validate_signature(sig) if v.code == "UnknownObject"]
    if violations:
        raise InvalidSignature("; ".join(str(v) for v in violations))
    vertices = tuple(sorted(sig.objects)) + tuple(sorted(sig.morphisms))
    edges: list[TypeEdge] = []
    for x in sorted(sig.objects):
        edges.append(TypeEdge("mid", x, x))
    for fname in sorted(sig.morphisms):
        mt = sig.morphisms[fname]
        for i, obj in enumerate(mt.dom):
            edges.append(TypeEdge("in", obj, fname, morphism=fname, port=i))
        for j, obj in enumerate(mt.cod):
            edges.append(TypeEdge("out", fname, obj, morphism=fname, port=j))
    return TypeGraph(vertices, tuple(edges))
