r"""Abc triples, wire layouts and the Gaussian contraction engine.

A Gaussian object is the holomorphic function

.. math::
    F(z) = c \exp\left(\tfrac12 z^T A z + z^T b\right)

whose variables are *wires*: one complex variable per (mode, kind) pair.
Pairing two wires and integrating against :math:`e^{-|w|^2} d^2w/\pi` is the
same as summing over the shared Fock index, which is how objects are composed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import (
    DivergentIntegralError,
    LayoutMismatchError,
    SchemaError,
    SingularContractionError,
    WireKindError,
)

SCHEMA_VERSION = "1"
SYMMETRY_TOL = 1e-8
PINV_RTOL = 1e-10
_SINGULAR_COND = 1e13


class WireKind(str, Enum):
    KET = "ket"
    BRA = "bra"
    OUT_KET = "out-ket"
    OUT_BRA = "out-bra"
    IN_KET = "in-ket"
    IN_BRA = "in-bra"

    @property
    def is_bra(self) -> bool:
        return self in (WireKind.BRA, WireKind.OUT_BRA, WireKind.IN_BRA)

    @property
    def is_input(self) -> bool:
        return self in (WireKind.IN_KET, WireKind.IN_BRA)

    @property
    def is_output(self) -> bool:
        return self in (WireKind.OUT_KET, WireKind.OUT_BRA)

    @property
    def is_state(self) -> bool:
        return self in (WireKind.KET, WireKind.BRA)

    def flipped(self) -> "WireKind":
        """Same direction, opposite side (bra <-> ket)."""
        return _FLIP[self]

    def with_direction(self, direction: str) -> "WireKind":
        """Return the kind on the same side with direction 'state', 'out' or 'in'."""
        side = "bra" if self.is_bra else "ket"
        if direction == "state":
            return WireKind(side)
        return WireKind(f"{direction}-{side}")


_FLIP = {
    WireKind.KET: WireKind.BRA,
    WireKind.BRA: WireKind.KET,
    WireKind.OUT_KET: WireKind.OUT_BRA,
    WireKind.OUT_BRA: WireKind.OUT_KET,
    WireKind.IN_KET: WireKind.IN_BRA,
    WireKind.IN_BRA: WireKind.IN_KET,
}

# Rank of each kind within the type-wise order [out-bra, in-bra, out-ket, in-ket].
_RANK = {
    WireKind.BRA: 0,
    WireKind.OUT_BRA: 0,
    WireKind.IN_BRA: 1,
    WireKind.KET: 2,
    WireKind.OUT_KET: 2,
    WireKind.IN_KET: 3,
}


class Wire(NamedTuple):
    mode: int
    kind: WireKind


def _ordering_key(tag: str):
    if tag == "type-wise":
        return lambda w: (_RANK[w.kind], w.mode)
    if tag == "mode-wise":
        return lambda w: (w.mode, _RANK[w.kind])
    if tag == "output-input":
        return lambda w: (int(w.kind.is_input), int(not w.kind.is_bra), w.mode)
    raise LayoutMismatchError(f"no canonical order for tag {tag!r}")


ORDERING_TAGS = ("type-wise", "output-input", "mode-wise", "custom")


@dataclass(frozen=True)
class WireLayout:
    """Ordered wires of an object plus the ordering convention they follow.

    When ``ordering`` is omitted it is inferred, preferring type-wise, then
    output-input, then mode-wise, falling back to ``"custom"``.
    """

    wires: tuple[Wire, ...]
    ordering: str | None = None

    def __post_init__(self):
        wires = tuple(Wire(int(w[0]), WireKind(w[1])) for w in self.wires)
        object.__setattr__(self, "wires", wires)
        if len(set(wires)) != len(wires):
            raise LayoutMismatchError(f"duplicate wires in layout {wires}")
        if self.ordering is None:
            tag = "custom"
            for cand in ORDERING_TAGS[:-1]:
                if list(wires) == sorted(wires, key=_ordering_key(cand)):
                    tag = cand
                    break
            object.__setattr__(self, "ordering", tag)
        elif self.ordering not in ORDERING_TAGS:
            raise LayoutMismatchError(f"unknown ordering tag {self.ordering!r}")
        elif self.ordering != "custom":
            if list(wires) != sorted(wires, key=_ordering_key(self.ordering)):
                raise LayoutMismatchError(
                    f"wires are not in {self.ordering} order: {wires}"
                )

    def __len__(self) -> int:
        return len(self.wires)

    def __iter__(self):
        return iter(self.wires)

    def __getitem__(self, i):
        return self.wires[i]

    @property
    def modes(self) -> list[int]:
        return sorted({w.mode for w in self.wires})

    def index(self, wire: Wire | tuple) -> int:
        wire = Wire(int(wire[0]), WireKind(wire[1]))
        try:
            return self.wires.index(wire)
        except ValueError:
            raise LayoutMismatchError(f"wire {wire} not in layout") from None

    def sorted(self, tag: str) -> "WireLayout":
        return WireLayout(tuple(sorted(self.wires, key=_ordering_key(tag))), tag)

    def kinds(self) -> set[WireKind]:
        return {w.kind for w in self.wires}

    @property
    def is_state(self) -> bool:
        return all(w.kind.is_state for w in self.wires)

    @property
    def is_ket(self) -> bool:
        return all(w.kind is WireKind.KET for w in self.wires)

    @classmethod
    def ket(cls, modes: Iterable[int]) -> "WireLayout":
        return cls(tuple(Wire(m, WireKind.KET) for m in modes))

    @classmethod
    def dm(cls, modes: Iterable[int]) -> "WireLayout":
        modes = list(modes)
        return cls(
            tuple(Wire(m, WireKind.BRA) for m in modes)
            + tuple(Wire(m, WireKind.KET) for m in modes)
        )

    @classmethod
    def unitary(cls, modes: Iterable[int]) -> "WireLayout":
        modes = list(modes)
        return cls(
            tuple(Wire(m, WireKind.OUT_KET) for m in modes)
            + tuple(Wire(m, WireKind.IN_KET) for m in modes)
        )

    @classmethod
    def channel(cls, modes: Iterable[int], ordering: str = "output-input") -> "WireLayout":
        modes = list(modes)
        kinds = {
            "output-input": (WireKind.OUT_BRA, WireKind.OUT_KET, WireKind.IN_BRA, WireKind.IN_KET),
            "type-wise": (WireKind.OUT_BRA, WireKind.IN_BRA, WireKind.OUT_KET, WireKind.IN_KET),
        }[ordering]
        return cls(tuple(Wire(m, k) for k in kinds for m in modes), ordering)

    def to_list(self) -> list[dict]:
        return [{"mode": w.mode, "kind": w.kind.value} for w in self.wires]


@dataclass(frozen=True)
class AbcTriple:
    """Immutable Gaussian object ``c * exp(z^T A z / 2 + z^T b)`` over ``layout``."""

    A: np.ndarray
    b: np.ndarray
    c: complex
    layout: WireLayout = field(default=None)

    def __post_init__(self):
        A = np.array(self.A, dtype=complex)
        if A.ndim == 0 or A.size == 0:
            A = A.reshape(0, 0) if A.size == 0 else A.reshape(1, 1)
        b = np.array(self.b, dtype=complex).reshape(-1)
        k = b.shape[0]
        if A.shape != (k, k):
            raise LayoutMismatchError(f"A has shape {A.shape} but b has length {k}")
        if k and np.max(np.abs(A - A.T)) > SYMMETRY_TOL * max(1.0, np.max(np.abs(A))):
            raise LayoutMismatchError("A is not symmetric")
        A = (A + A.T) / 2
        layout = self.layout
        if layout is None:
            layout = WireLayout.ket(range(k))
        elif not isinstance(layout, WireLayout):
            layout = WireLayout(tuple(layout))
        if len(layout) != k:
            raise LayoutMismatchError(f"layout has {len(layout)} wires but A is {k}x{k}")
        A.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", complex(self.c))
        object.__setattr__(self, "layout", layout)

    @property
    def dim(self) -> int:
        return self.b.shape[0]

    def __call__(self, z) -> complex:
        z = np.asarray(z, dtype=complex)
        return self.c * np.exp(0.5 * z @ self.A @ z + z @ self.b)

    def replace(self, A=None, b=None, c=None, layout=None) -> "AbcTriple":
        return AbcTriple(
            self.A if A is None else A,
            self.b if b is None else b,
            self.c if c is None else c,
            self.layout if layout is None else layout,
        )

    def relabel(self, wires: Sequence[Wire], ordering: str | None = None) -> "AbcTriple":
        return self.replace(layout=WireLayout(tuple(wires), ordering))

    def allclose(self, other: "AbcTriple", atol: float = 1e-9) -> bool:
        return (
            self.layout.wires == other.layout.wires
            and np.allclose(self.A, other.A, atol=atol, rtol=0)
            and np.allclose(self.b, other.b, atol=atol, rtol=0)
            and abs(self.c - other.c) <= atol * max(1.0, abs(self.c))
        )


@dataclass(frozen=True)
class ContractionPlan:
    """Pairs of (left wire index, right wire index) to integrate over.

    ``conjugate_left`` holds one flag per pair. When the flags are set the
    left object is complex conjugated (bra/ket swapped) before pairing, which
    is how inner products ``<phi|psi>`` are written with two kets. The flags
    must agree because conjugation acts on the whole function.
    """

    pairs: tuple[tuple[int, int], ...]
    conjugate_left: tuple[bool, ...] | None = None

    def __post_init__(self):
        pairs = tuple((int(i), int(j)) for i, j in self.pairs)
        object.__setattr__(self, "pairs", pairs)
        left = [p[0] for p in pairs]
        right = [p[1] for p in pairs]
        if len(set(left)) != len(left) or len(set(right)) != len(right):
            raise LayoutMismatchError("a wire appears in more than one pair")
        flags = self.conjugate_left
        if flags is None:
            flags = (False,) * len(pairs)
        flags = tuple(bool(f) for f in flags)
        if len(flags) != len(pairs):
            raise LayoutMismatchError("one conjugation flag per pair is required")
        if len(set(flags)) > 1:
            raise LayoutMismatchError("conjugation flags must agree across pairs")
        object.__setattr__(self, "conjugate_left", flags)

    @property
    def conjugate(self) -> bool:
        return bool(self.conjugate_left) and self.conjugate_left[0]

    @classmethod
    def from_wires(cls, left: AbcTriple, right: AbcTriple, wire_pairs, conjugate: bool = False):
        pairs = tuple((left.layout.index(a), right.layout.index(b)) for a, b in wire_pairs)
        return cls(pairs, (conjugate,) * len(pairs))


# ---------------------------------------------------------------------------
# Elementary transformations


def reorder(obj: AbcTriple, target: WireLayout | str) -> AbcTriple:
    """Permute the variables of ``obj`` into ``target`` (a layout or an ordering tag)."""
    if isinstance(target, str):
        target = obj.layout.sorted(target)
    if sorted(target.wires) != sorted(obj.layout.wires):
        raise LayoutMismatchError("target layout is not a permutation of the source")
    perm = [obj.layout.index(w) for w in target.wires]
    if perm == list(range(obj.dim)):
        return obj.replace(layout=target)
    return AbcTriple(obj.A[np.ix_(perm, perm)], obj.b[perm], obj.c, target)


def conj(obj: AbcTriple) -> AbcTriple:
    """Complex conjugate: the bra-side counterpart of ``obj`` (kinds flipped)."""
    wires = tuple(Wire(w.mode, w.kind.flipped()) for w in obj.layout)
    return AbcTriple(obj.A.conj(), obj.b.conj(), np.conj(obj.c), WireLayout(wires))


def dagger(op: AbcTriple) -> AbcTriple:
    """Adjoint of a ket-side operator: conjugate and swap input/output labels."""
    if not all(w.kind in (WireKind.OUT_KET, WireKind.IN_KET) for w in op.layout):
        raise WireKindError("dagger expects an operator with out-ket/in-ket wires")
    swap = {WireKind.OUT_KET: WireKind.IN_KET, WireKind.IN_KET: WireKind.OUT_KET}
    wires = tuple(Wire(w.mode, swap[w.kind]) for w in op.layout)
    res = AbcTriple(op.A.conj(), op.b.conj(), np.conj(op.c), WireLayout(wires, "custom"))
    return reorder(res, "type-wise")


def join(left: AbcTriple, right: AbcTriple) -> AbcTriple:
    """Tensor product; wires of the two objects must be distinct."""
    k1, k2 = left.dim, right.dim
    A = np.zeros((k1 + k2, k1 + k2), dtype=complex)
    A[:k1, :k1] = left.A
    A[k1:, k1:] = right.A
    b = np.concatenate([left.b, right.b])
    layout = WireLayout(left.layout.wires + right.layout.wires)
    return AbcTriple(A, b, left.c * right.c, layout)


def join_all(objs: Sequence[AbcTriple]) -> AbcTriple:
    out = objs[0]
    for o in objs[1:]:
        out = join(out, o)
    return out


def _measure_block(M: np.ndarray) -> np.ndarray:
    """Add the -1 couplings of the Gaussian measure for consecutive index pairs."""
    M = M.copy()
    for p in range(M.shape[0] // 2):
        M[2 * p, 2 * p + 1] -= 1
        M[2 * p + 1, 2 * p] -= 1
    return M


def _real_form_max_eig(M: np.ndarray) -> float:
    """Largest eigenvalue of Re(T^T M T) for w = (x + i y)/sqrt(2) per pair.

    The integral over the paired variables converges iff this is negative.
    """
    k = M.shape[0] // 2
    T = np.zeros((2 * k, 2 * k), dtype=complex)
    blk = np.array([[1, -1j], [1, 1j]]) / np.sqrt(2)
    for p in range(k):
        T[2 * p : 2 * p + 2, 2 * p : 2 * p + 2] = blk
    N = (T.T @ M @ T).real
    N = (N + N.T) / 2
    return float(np.linalg.eigvalsh(N).max()) if k else -np.inf


def _sqrt_det_iM(M: np.ndarray) -> complex:
    """Principal square root of det(iM), via an LU-based log-determinant."""
    k = M.shape[0]
    sign, logabs = np.linalg.slogdet(M)
    phase = sign * (1j) ** k
    return np.exp(0.5 * logabs) * np.sqrt(complex(phase))


def gaussian_integral(A, b, c, pairs, check: bool = True):
    """Integrate the variables in ``pairs`` (index pairs of a single object).

    Returns ``(A, b, c, keep)`` where ``keep`` lists the surviving indices.
    """
    A = np.asarray(A, dtype=complex)
    b = np.asarray(b, dtype=complex)
    idx = [i for p in pairs for i in p]
    if len(set(idx)) != len(idx):
        raise LayoutMismatchError("a variable appears in more than one pair")
    chosen = set(idx)
    keep = [i for i in range(b.shape[0]) if i not in chosen]
    if not idx:
        return A, b, complex(c), keep
    M = _measure_block(A[np.ix_(idx, idx)])
    if check:
        lam = _real_form_max_eig(M)
        if not lam < 0:
            raise DivergentIntegralError(
                f"Gaussian integral diverges (largest real-form eigenvalue {lam:.3e})"
            )
    if np.linalg.cond(M) > _SINGULAR_COND:
        raise SingularContractionError("integration block is singular")
    G = A[np.ix_(idx, keep)]
    bI = b[idx]
    sol = np.linalg.solve(M, np.column_stack([G, bI]) if keep else bI[:, None])
    MinvG, Minvb = sol[:, :-1], sol[:, -1]
    A_new = A[np.ix_(keep, keep)] - G.T @ MinvG
    b_new = b[keep] - G.T @ Minvb
    c_new = c * np.exp(-0.5 * bI @ Minvb) / _sqrt_det_iM(M)
    return A_new, b_new, complex(c_new), keep


def check_contraction(left: AbcTriple, right: AbcTriple, plan: ContractionPlan):
    """Return ``(ok, margin)`` with margin the norm of the paired blocks ``A1 + conj(A2)``."""
    if plan.conjugate:
        left = conj(left)
    li = [p[0] for p in plan.pairs]
    ri = [p[1] for p in plan.pairs]
    if not li:
        return True, 0.0
    A1 = left.A[np.ix_(li, li)]
    A2 = right.A[np.ix_(ri, ri)]
    margin = float(np.linalg.norm(A1 + A2.conj(), 2))
    return margin < 2.0, margin


def contract(left: AbcTriple, right: AbcTriple, plan: ContractionPlan, check: bool = True) -> AbcTriple:
    """Integrate the paired wires of ``left`` and ``right``.

    The surviving wires keep their labels, left object first.
    """
    if plan.conjugate:
        left = conj(left)
    for i, j in plan.pairs:
        if not (0 <= i < left.dim and 0 <= j < right.dim):
            raise LayoutMismatchError(f"pair {(i, j)} out of range")
    joint_A = np.zeros((left.dim + right.dim,) * 2, dtype=complex)
    joint_A[: left.dim, : left.dim] = left.A
    joint_A[left.dim :, left.dim :] = right.A
    joint_b = np.concatenate([left.b, right.b])
    pairs = [(i, left.dim + j) for i, j in plan.pairs]
    A, b, c, keep = gaussian_integral(joint_A, joint_b, left.c * right.c, pairs, check)
    wires = left.layout.wires + right.layout.wires
    return AbcTriple(A, b, c, WireLayout(tuple(wires[i] for i in keep)))


def trace_wires(obj: AbcTriple, pairs: Sequence[tuple[int, int]], check: bool = True) -> AbcTriple:
    """Self-contraction of pairs of wires of a single object."""
    A, b, c, keep = gaussian_integral(obj.A, obj.b, obj.c, pairs, check)
    return AbcTriple(A, b, c, WireLayout(tuple(obj.layout[i] for i in keep)))


def partial_trace(obj: AbcTriple, modes: Iterable[int], check: bool = True) -> AbcTriple:
    """Trace out ``modes``: pairs bra/ket (or out-bra/out-ket) wires of each mode."""
    pairs = []
    for m in modes:
        found = None
        for bra, ket in ((WireKind.BRA, WireKind.KET), (WireKind.OUT_BRA, WireKind.OUT_KET)):
            if Wire(m, bra) in obj.layout.wires and Wire(m, ket) in obj.layout.wires:
                found = (obj.layout.index((m, bra)), obj.layout.index((m, ket)))
                break
        if found is None:
            raise WireKindError(f"mode {m} lacks a bra/ket wire pair to trace")
        pairs.append(found)
    return trace_wires(obj, pairs, check)


def project_vacuum(obj: AbcTriple, wires: Iterable[Wire | tuple]) -> AbcTriple:
    """Contract the given wires with the vacuum: delete their rows and columns."""
    drop = {obj.layout.index(w) for w in wires}
    keep = [i for i in range(obj.dim) if i not in drop]
    return AbcTriple(
        obj.A[np.ix_(keep, keep)],
        obj.b[keep],
        obj.c,
        WireLayout(tuple(obj.layout[i] for i in keep)),
    )


def vectorize(obj: AbcTriple) -> AbcTriple:
    """Relabel every wire as a ket, in type-wise order.

    Wire ``i`` of the type-wise order becomes ``Wire(i, ket)``; the function
    itself is untouched.
    """
    if obj.layout.is_ket:
        return obj
    obj = reorder(obj, "type-wise")
    return obj.replace(layout=WireLayout.ket(range(obj.dim)))


# ---------------------------------------------------------------------------
# Convenience compositions


def outer(ket: AbcTriple) -> AbcTriple:
    """``|psi><psi|`` in type-wise order."""
    if not ket.layout.is_ket:
        raise WireKindError("outer expects a ket")
    return reorder(join(conj(ket), ket), "type-wise")


def promote(op: AbcTriple) -> AbcTriple:
    """Turn a ket-side operator ``U`` into the map ``rho -> U rho U^dagger``."""
    if not all(w.kind in (WireKind.OUT_KET, WireKind.IN_KET) for w in op.layout):
        raise WireKindError("promote expects an operator with out-ket/in-ket wires")
    return reorder(join(conj(op), op), "type-wise")


def apply(op: AbcTriple, target: AbcTriple, check: bool = True) -> AbcTriple:
    """Apply an operator or channel to a state (or compose with another operator).

    Input wires of ``op`` are paired with the matching wires of ``target`` on
    the same mode and side. Kets are promoted to density matrices when ``op``
    is a channel and ket-side operators are promoted when ``target`` has bras.
    The result follows the ordering convention of ``target``.
    """
    in_wires = [w for w in op.layout if w.kind.is_input]
    if not in_wires:
        raise WireKindError("operator has no input wires")
    target_bra = any(w.kind.is_bra for w in target.layout)
    op_bra = any(w.kind.is_bra for w in in_wires)
    if target_bra and not op_bra:
        op = promote(op)
    elif op_bra and not target_bra:
        target = outer(target) if target.layout.is_ket else promote(target)
    pairs = []
    replaced = {}
    for i, w in enumerate(op.layout):
        if not w.kind.is_input:
            continue
        cands = [
            j
            for j, t in enumerate(target.layout)
            if t.mode == w.mode and t.kind.is_bra == w.kind.is_bra and not t.kind.is_input
        ]
        if len(cands) != 1:
            raise LayoutMismatchError(f"no unique target wire for {w}")
        pairs.append((i, cands[0]))
        replaced[cands[0]] = target.layout[cands[0]].kind
    res = contract(op, target, ContractionPlan(tuple(pairs)), check)
    n_op_kept = op.dim - len(pairs)
    op_out = list(res.layout.wires[:n_op_kept])
    relabeled = {}
    for w in op_out:
        match = [k for j, k in replaced.items() if target.layout[j].mode == w.mode and k.is_bra == w.kind.is_bra]
        if match:
            kind = match[0]
        elif target.layout.is_state:
            kind = w.kind.with_direction("state")
        else:
            kind = w.kind
        relabeled[w] = Wire(w.mode, kind)
    new_wires = [relabeled[w] for w in op_out] + list(res.layout.wires[n_op_kept:])
    res = res.replace(layout=WireLayout(tuple(new_wires), "custom"))
    tag = target.layout.ordering
    if tag == "custom":
        tag = "type-wise"
    return reorder(res, tag)


def inner(bra: AbcTriple, ket: AbcTriple) -> complex:
    """``<bra|ket>`` for two kets on the same modes (the first is conjugated)."""
    if not (bra.layout.is_ket and ket.layout.is_ket):
        raise WireKindError("inner expects two kets")
    plan = ContractionPlan.from_wires(
        bra, ket, [(w, w) for w in ket.layout], conjugate=True
    )
    return contract(bra, ket, plan).c


def trace(obj: AbcTriple) -> complex:
    return partial_trace(obj, obj.layout.modes).c


def normalize(obj: AbcTriple) -> AbcTriple:
    """Rescale ``c`` so that a ket has unit norm or a density matrix unit trace."""
    if obj.layout.is_ket:
        n = inner(obj, obj).real
        return obj.replace(c=obj.c / np.sqrt(n))
    return obj.replace(c=obj.c / trace(obj))


# ---------------------------------------------------------------------------
# JSON


def _cplx(z) -> list[float]:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def _from_cplx(v) -> complex:
    if not (isinstance(v, (list, tuple)) and len(v) == 2):
        raise SchemaError(f"expected [re, im], got {v!r}")
    return complex(float(v[0]), float(v[1]))


def to_dict(obj: AbcTriple) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "type": "abc-triple",
        "A": [[_cplx(x) for x in row] for row in obj.A],
        "b": [_cplx(x) for x in obj.b],
        "c": _cplx(obj.c),
        "layout": obj.layout.to_list(),
        "ordering": obj.layout.ordering,
    }


def from_dict(d: dict) -> AbcTriple:
    if str(d.get("schema_version")) != SCHEMA_VERSION:
        raise SchemaError(f"unsupported schema_version {d.get('schema_version')!r}")
    try:
        k = len(d["b"])
        A = np.array([[_from_cplx(x) for x in row] for row in d["A"]], dtype=complex).reshape(k, k)
        b = np.array([_from_cplx(x) for x in d["b"]], dtype=complex)
        c = _from_cplx(d["c"])
        wires = tuple(Wire(int(w["mode"]), WireKind(w["kind"])) for w in d["layout"])
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, SchemaError):
            raise
        raise SchemaError(f"malformed triple: {exc}") from exc
    return AbcTriple(A, b, c, WireLayout(wires, d.get("ordering")))


def dumps(obj: AbcTriple, **kw) -> str:
    return json.dumps(to_dict(obj), **kw)


def loads(s: str) -> AbcTriple:
    return from_dict(json.loads(s))
