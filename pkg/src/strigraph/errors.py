"""Exception types and validation violation records."""
from __future__ import annotations

from dataclasses import dataclass


class StrigraphError(Exception):
    """Base class for all domain errors."""


class InvalidSignature(StrigraphError):
    pass


class SignatureMismatch(StrigraphError):
    pass


class TypeMismatch(StrigraphError):
    pass


class NotBoundaryCoherent(StrigraphError):
    pass


class NoSuchEdge(StrigraphError):
    pass


class StaleOrder(StrigraphError):
    pass


class HostNotMinimal(StrigraphError):
    pass


class StaleMatch(StrigraphError):
    pass


class FrameMismatch(StrigraphError):
    pass


class DimMismatch(StrigraphError):
    pass


class ShapeMismatch(StrigraphError):
    pass


class MissingValuation(StrigraphError):
    pass


class DocumentError(StrigraphError):
    """Malformed or unknown fields in a serialized document."""


@dataclass(frozen=True)
class Violation:
    """One invariant violation found by a validator.

    ``code`` is a stable machine-readable name, ``subject`` names the
    offending entity (vertex/edge/morphism id), ``detail`` is for humans.
    """

    code: str
    subject: str = ""
    detail: str = ""

    def __str__(self) -> str:
        parts = [self.code]
        if self.subject:
            parts.append(f"({self.subject})")
        if self.detail:
            parts.append(f": {self.detail}")
        return "".join(parts)
