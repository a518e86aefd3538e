"""Dense complex tensor semantics for string graphs.

A Tensor's array axes are all upper (output) indices then all lower (input)
indices, row-major. Graphs evaluate by taking one factor per box (plus an
identity per boundary-to-boundary strand and a dimension scalar per circle)
and contracting one index pair per wire, greedily smallest-intermediate
first; the result is invariant under isomorphism and wire-homeomorphism.
"""
from __future__ import annotations

import cmath
import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Optional, Union

import numpy as np

from .errors import DimMismatch, MissingValuation, ShapeMismatch
from .graph import StringGraph, normalize_wires, wires

Index = tuple[str, int]          # (object type name, dimension)


@dataclass
class Tensor:
    upper: tuple[Index, ...]
    lower: tuple[Index, ...]
    array: np.ndarray

    def __post_init__(self) -> None:
        shape = tuple(d for _, d in self.upper) + tuple(d for _, d in self.lower)
        arr = np.asarray(self.array, dtype=complex).reshape(shape)
        object.__setattr__(self, "array", arr)

    @staticmethod
    def scalar(z: complex) -> "Tensor":
        return Tensor((), (), np.asarray(z, dtype=complex))

    @staticmethod
    def from_matrix(mat, obj: str, dim: int, n_out: int, n_in: int) -> "Tensor":
        """Lift a 2^-style matrix (rows = outputs) over one object type."""
        arr = np.asarray(mat, dtype=complex).reshape((dim,) * (n_out + n_in))
        return Tensor(((obj, dim),) * n_out, ((obj, dim),) * n_in, arr)

    @property
    def rank(self) -> tuple[int, int]:
        return (len(self.upper), len(self.lower))

    def as_matrix(self) -> np.ndarray:
        ud = int(np.prod([d for _, d in self.upper])) if self.upper else 1
        ld = int(np.prod([d for _, d in self.lower])) if self.lower else 1
        return self.array.reshape(ud, ld)

    def dagger(self) -> "Tensor":
        nu, nl = len(self.upper), len(self.lower)
        perm = tuple(range(nu, nu + nl)) + tuple(range(nu))
        return Tensor(self.lower, self.upper, np.conj(self.array.transpose(perm)))

    def kron(self, other: "Tensor") -> "Tensor":
        a, b = self, other
        arr = np.multiply.outer(a.array, b.array)
        na_u, na_l = len(a.upper), len(a.lower)
        nb_u, nb_l = len(b.upper), len(b.lower)
        # outer gives [a.up, a.low, b.up, b.low]; regroup to uppers-then-lowers
        perm = (list(range(na_u)) +
                [na_u + na_l + i for i in range(nb_u)] +
                [na_u + i for i in range(na_l)] +
                [na_u + na_l + nb_u + i for i in range(nb_l)])
        return Tensor(a.upper + b.upper, a.lower + b.lower, arr.transpose(perm))

    def compose(self, other: "Tensor") -> "Tensor":
        """self after other: contract self's lowers with other's uppers."""
        if self.lower != other.upper:
            raise ShapeMismatch(f"{self.lower} vs {other.upper}")
        nu = len(self.upper)
        nl = len(self.lower)
        arr = np.tensordot(self.array, other.array,
                           axes=(tuple(range(nu, nu + nl)), tuple(range(nl))))
        return Tensor(self.upper, other.lower, arr)

    def norm_inf(self) -> float:
        return float(np.max(np.abs(self.array))) if self.array.size else 0.0

    def __mul__(self, z: complex) -> "Tensor":
        return Tensor(self.upper, self.lower, self.array * z)

    __rmul__ = __mul__


def contract(t: Tensor, lower_i: int, upper_j: int) -> Tensor:
    """Trace the i-th lower index against the j-th upper index."""
    if t.lower[lower_i][1] != t.upper[upper_j][1]:
        raise DimMismatch(f"{t.lower[lower_i]} vs {t.upper[upper_j]}")
    nu = len(t.upper)
    arr = np.trace(t.array, axis1=upper_j, axis2=nu + lower_i)
    upper = t.upper[:upper_j] + t.upper[upper_j + 1:]
    lower = t.lower[:lower_i] + t.lower[lower_i + 1:]
    return Tensor(upper, lower, arr)


class Valuation:
    """Object dimensions plus one tensor (or data -> tensor map) per generator."""

    def __init__(self, dims: dict[str, int],
                 gens: dict[str, Union[Tensor, Callable[[Any], Tensor]]]):
        self.dims = dict(dims)
        self.gens = dict(gens)

    def dim(self, obj: str) -> int:
        if obj not in self.dims:
            raise MissingValuation(f"object {obj}")
        return self.dims[obj]

    def tensor_for(self, morphism: str, data: Any = None) -> Tensor:
        if morphism not in self.gens:
            raise MissingValuation(f"morphism {morphism}")
        g = self.gens[morphism]
        return g(data) if callable(g) else g


def phase_tensor(obj: str, dim: int, angle: Fraction) -> Tensor:
    """diag(1, e^{i*pi*angle}, ...) — the standard phase family."""
    diag = [cmath.exp(1j * cmath.pi * float(angle) * k) for k in range(dim)]
    return Tensor(((obj, dim),), ((obj, dim),), np.diag(diag))


# -- evaluation ---------------------------------------------------------------


def evaluate(g, valuation: Valuation) -> Tensor:
    """Tensor of a StringGraph or FramedCospan under ``valuation``."""
    from .cospan import FramedCospan, evaluate_cospan
    if isinstance(g, FramedCospan):
        return evaluate_cospan(g, valuation)
    return evaluate_graph(g, valuation)


def evaluate_graph(g: StringGraph, valuation: Valuation) -> Tensor:
    # canonical relabeling pins the contraction order, so isomorphic and
    # wire-homeomorphic graphs evaluate bit-identically
    from .canon import canonical_copy
    g = canonical_copy(normalize_wires(g))
    ws = wires(g)
    # index ids: one per wire end-to-end connection; strands get two
    factors: list[tuple[np.ndarray, list[int]]] = []
    idx_dim: dict[int, int] = {}
    next_idx = itertools.count()
    scalar = complex(1.0)

    in_slot: dict[int, int] = {}    # graph input vertex -> index id
    out_slot: dict[int, int] = {}   # graph output vertex -> index id
    port_idx: dict[tuple[int, str, int], int] = {}  # (box, dir, port) -> index

    for w in ws:
        dim = valuation.dim(w.obj_type)
        if w.kind == "circle":
            scalar *= dim
            continue
        src_box = w.src_end[0] == "box"
        tgt_box = w.tgt_end[0] == "box"
        if not src_box and not tgt_box:
            i_in, i_out = next(next_idx), next(next_idx)
            idx_dim[i_in] = idx_dim[i_out] = dim
            factors.append((np.eye(dim, dtype=complex), [i_out, i_in]))
            in_slot[w.vertices[0]] = i_in
            out_slot[w.vertices[-1]] = i_out
            continue
        idx = next(next_idx)
        idx_dim[idx] = dim
        if src_box:
            _, b, eid = w.src_end
            e = g.edges[eid]
            port_idx[(b, "out", e.tag.port)] = idx
        else:
            in_slot[w.vertices[0]] = idx
        if tgt_box:
            _, b, eid = w.tgt_end
            e = g.edges[eid]
            port_idx[(b, "in", e.tag.port)] = idx
        else:
            out_slot[w.vertices[-1]] = idx

    for b in sorted(g.box_vertices()):
        d = g.vertices[b]
        t = valuation.tensor_for(d.type, d.data)
        mt = g.sig.morphism(d.type)
        want_u = tuple((o, valuation.dim(o)) for o in mt.cod)
        want_l = tuple((o, valuation.dim(o)) for o in mt.dom)
        if t.upper != want_u or t.lower != want_l:
            raise ShapeMismatch(f"valuation for {d.type}")
        labels = [port_idx[(b, "out", j)] for j in range(len(mt.cod))] + \
                 [port_idx[(b, "in", i)] for i in range(len(mt.dom))]
        factors.append((t.array, labels))

    open_idx = set(in_slot.values()) | set(out_slot.values())
    arr, labels = _contract_network(factors, idx_dim, open_idx)
    arr = arr * scalar

    out_labels = [out_slot[v] for v in g.output_order]
    in_labels = [in_slot[v] for v in g.input_order]
    perm = [labels.index(i) for i in out_labels + in_labels]
    arr = arr.transpose(perm) if perm else arr.reshape(())
    upper = tuple((g.vertices[v].type, valuation.dim(g.vertices[v].type))
                  for v in g.output_order)
    lower = tuple((g.vertices[v].type, valuation.dim(g.vertices[v].type))
                  for v in g.input_order)
    return Tensor(upper, lower, arr)


def _contract_network(factors: list[tuple[np.ndarray, list[int]]],
                      idx_dim: dict[int, int],
                      open_idx: set[int]) -> tuple[np.ndarray, list[int]]:
    """Greedy pairwise contraction; returns (array, open index labels)."""
    if not factors:
        return np.asarray(1.0 + 0j), []
    work = [(arr, list(lab)) for arr, lab in factors]

    def self_contract(arr: np.ndarray, lab: list[int]) -> tuple[np.ndarray, list[int]]:
        while True:
            dup = None
            for i, a in enumerate(lab):
                if a in lab[i + 1:] and a not in open_idx:
                    dup = (i, i + 1 + lab[i + 1:].index(a))
                    break
            if dup is None:
                return arr, lab
            i, j = dup
            arr = np.trace(arr, axis1=i, axis2=j)
            lab = [x for k, x in enumerate(lab) if k not in (i, j)]

    work = [self_contract(a, l) for a, l in work]
    while len(work) > 1:
        best = None
        for i in range(len(work)):
            for j in range(i + 1, len(work)):
                shared = set(work[i][1]) & set(work[j][1]) - open_idx
                if not shared:
                    continue
                size = 1
                for lab in set(work[i][1]) | set(work[j][1]):
                    if lab not in shared:
                        size *= idx_dim[lab]
                if best is None or size < best[0]:
                    best = (size, i, j, shared)
        if best is None:
            # outer product of disconnected parts
            (a1, l1), (a2, l2) = work[0], work[1]
            arr = np.multiply.outer(a1, a2)
            work = [(arr, l1 + l2)] + work[2:]
            continue
        _, i, j, shared = best
        (a1, l1), (a2, l2) = work[i], work[j]
        ax1 = [l1.index(s) for s in sorted(shared)]
        ax2 = [l2.index(s) for s in sorted(shared)]
        arr = np.tensordot(a1, a2, axes=(ax1, ax2))
        lab = [x for x in l1 if x not in shared] + [x for x in l2 if x not in shared]
        work = [w for k, w in enumerate(work) if k not in (i, j)]
        work.append(self_contract(arr, lab))
    return work[0]


# -- comparison ----------------------------------------------------------------


def equal_up_to_scalar(a: Tensor, b: Tensor, tol: float = 1e-9) -> Optional[complex]:
    """The scalar z with a = z*b (within tol), or None."""
    if a.upper != b.upper or a.lower != b.lower:
        raise ShapeMismatch(f"{a.rank} vs {b.rank}")
    fa, fb = a.array.ravel(), b.array.ravel()
    if a.array.size == 0:
        return 1.0
    nb = np.max(np.abs(fb)) if fb.size else 0.0
    na = np.max(np.abs(fa)) if fa.size else 0.0
    if nb == 0.0 and na == 0.0:
        return 1.0
    if nb == 0.0 or na == 0.0:
        return None
    k = int(np.argmax(np.abs(fb)))
    z = fa[k] / fb[k]
    if z == 0:
        return None
    if np.max(np.abs(fa - z * fb)) <= tol * max(na, nb):
        return complex(z)
    return None


def _normalized_bytes(arr: np.ndarray) -> bytes:
    flat = arr.ravel()
    if flat.size == 0 or not np.any(np.abs(flat) > 1e-12):
        return b"zero"
    k = int(np.argmax(np.abs(flat)))
    norm = flat / flat[k]
    re = np.round(norm.real, 9) + 0.0
    im = np.round(norm.imag, 9) + 0.0
    return re.tobytes() + im.tobytes()


def boundary_permutation_class(t: Tensor) -> bytes:
    """Key equal iff tensors agree up to boundary permutations and scalar."""
    nu, nl = len(t.upper), len(t.lower)
    best: Optional[bytes] = None
    for pu in itertools.permutations(range(nu)):
        types_u = tuple(t.upper[i] for i in pu)
        for pl in itertools.permutations(range(nl)):
            types_l = tuple(t.lower[i] for i in pl)
            perm = tuple(pu) + tuple(nu + i for i in pl)
            arr = t.array.transpose(perm) if perm else t.array
            key = repr((types_u, types_l)).encode() + _normalized_bytes(arr)
            if best is None or key < best:
                best = key
    assert best is not None
    return best
