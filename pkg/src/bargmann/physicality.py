"""Physicality certificates computed from Abc data alone.

Block names follow the type-wise layout ``[bras, kets]`` of a density matrix:
``Gamma`` is the bra-ket block, ``Lambda`` the ket-ket block and ``beta`` the
ket part of ``b``. Maps are handled by bending wires: their type-wise layout
``[out-bra, in-bra, out-ket, in-ket]`` is the layout of the Choi operator.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .core import AbcTriple, WireKind, WireLayout, reorder
from .errors import NumericalDegeneracyError, SingularContractionError, WireKindError

HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-10
C_TOL = 1e-12
STRICT_SLACK = 1e-9
LOG_C_TOL = 1e-8
EQUALITY_TOL = 1e-10


@dataclass
class PhysicalityReport:
    """Outcome of the requested checks; ``None`` means not evaluated."""

    hermitian: bool | None = None
    positive: bool | None = None
    trace_class: bool | None = None
    normalized: bool | None = None
    cp: bool | None = None
    tp: bool | None = None
    margins: dict = field(default_factory=dict)
    ordering_used: WireLayout | None = None

    @property
    def ok(self) -> bool:
        flags = [self.hermitian, self.positive, self.trace_class, self.normalized, self.cp, self.tp]
        return all(f for f in flags if f is not None)

    def merge(self, other: "PhysicalityReport") -> "PhysicalityReport":
        out = PhysicalityReport(**{k: v for k, v in asdict(self).items() if k != "ordering_used"})
        out.margins = dict(self.margins)
        out.ordering_used = self.ordering_used or other.ordering_used
        for k in ("hermitian", "positive", "trace_class", "normalized", "cp", "tp"):
            v = getattr(other, k)
            if v is not None:
                setattr(out, k, v)
        out.margins.update(other.margins)
        return out

    def to_dict(self) -> dict:
        d = {k: getattr(self, k) for k in ("hermitian", "positive", "trace_class", "normalized", "cp", "tp")}
        d = {k: v for k, v in d.items() if v is not None}
        d["margins"] = {k: float(v) for k, v in self.margins.items()}
        if self.ordering_used is not None:
            d["ordering_used"] = self.ordering_used.to_list()
        return d


def _herm(M):
    return (M + M.conj().T) / 2


def min_eig(M) -> float:
    M = np.asarray(M)
    if M.size == 0:
        return np.inf
    return float(np.linalg.eigvalsh(_herm(M)).min())


def _xmat(n: int) -> np.ndarray:
    I = np.eye(n)
    Z = np.zeros((n, n))
    return np.block([[Z, I], [I, Z]])


def _paired(obj: AbcTriple) -> AbcTriple:
    obj = reorder(obj, "type-wise")
    if obj.dim % 2:
        raise WireKindError("odd number of wires: no bra/ket pairing")
    n = obj.dim // 2
    bras, kets = obj.layout.wires[:n], obj.layout.wires[n:]
    if not all(w.kind.is_bra for w in bras) or any(w.kind.is_bra for w in kets):
        raise WireKindError("object needs as many bra wires as ket wires")
    for wb, wk in zip(bras, kets):
        if wb.mode != wk.mode or wb.kind.flipped() is not wk.kind:
            raise WireKindError(f"bra wire {wb} has no matching ket wire")
    return obj


def blocks(obj: AbcTriple):
    """Return ``(Lambda, Gamma, beta)`` of a bra/ket-paired object."""
    obj = _paired(obj)
    n = obj.dim // 2
    return obj.A[n:, n:], obj.A[:n, n:], obj.b[n:]


# ---------------------------------------------------------------------------
# States


def check_hermitian(obj: AbcTriple, tol: float = HERMITIAN_TOL) -> PhysicalityReport:
    """``X A X = A*`` and ``X b = b*`` in type-wise order."""
    obj = _paired(obj)
    X = _xmat(obj.dim // 2)
    dA = np.max(np.abs(X @ obj.A @ X - obj.A.conj()), initial=0.0)
    db = np.max(np.abs(X @ obj.b - obj.b.conj()), initial=0.0)
    dc = abs(obj.c.imag)
    dev = max(dA, db, dc)
    return PhysicalityReport(hermitian=bool(dev <= tol), margins={"hermitian_deviation": dev}, ordering_used=obj.layout)


def check_positive(obj: AbcTriple) -> PhysicalityReport:
    """Positive semidefinite iff ``Gamma >= 0`` and ``c >= 0``."""
    _, G, _ = blocks(obj)
    lam = min_eig(G)
    ok = lam >= -PSD_TOL and obj.c.real >= -C_TOL
    return PhysicalityReport(positive=bool(ok), margins={"gamma_min_eig": lam, "c": obj.c.real})


def _log_c_required(A: np.ndarray, b: np.ndarray) -> complex:
    """``log`` of the ``c`` that gives unit trace: ``sqrt(det(1-XA)) exp(-b^T (1-XA)^-1 X b / 2)``."""
    X = _xmat(A.shape[0] // 2)
    M = np.eye(A.shape[0]) - X @ A
    if np.linalg.cond(M) > 1e13:
        raise SingularContractionError("1 - XA is singular")
    sign, logdet = np.linalg.slogdet(M)
    return 0.5 * (logdet + np.log(complex(sign))) - 0.5 * b @ np.linalg.solve(M, X @ b)


def trace_class_margin(obj: AbcTriple) -> float:
    """Smallest eigenvalue of ``[[1 - Gamma^T, Lambda], [Lambda^*, 1 - Gamma]]``.

    Positive exactly when the trace integral converges, which is the Schur
    form of ``Lambda^dagger (1 - Gamma^T)^-1 Lambda < 1 - Gamma``.
    """
    L, G, _ = blocks(obj)
    n = G.shape[0]
    H = np.block([[np.eye(n) - G.T, L], [L.conj(), np.eye(n) - G]])
    return min_eig(H)


def check_density_matrix(obj: AbcTriple, slack: float = STRICT_SLACK) -> PhysicalityReport:
    """Gaussian density-matrix conditions with their margins."""
    rep = check_hermitian(obj).merge(check_positive(obj))
    obj = _paired(obj)
    L, G, _ = blocks(obj)
    n = G.shape[0]
    eig_g = np.linalg.eigvalsh(_herm(G)) if n else np.array([0.0])
    upper = float(1 - eig_g.max())
    tc = trace_class_margin(obj)
    rep.margins.update({"one_minus_gamma_min_eig": upper, "trace_class_margin": tc})
    rep.trace_class = bool(upper > slack and tc > slack and eig_g.min() >= -PSD_TOL)
    if rep.trace_class:
        lhs = np.log(complex(obj.c)) if obj.c != 0 else -np.inf
        rhs = _log_c_required(obj.A, obj.b)
        dev = abs(lhs - rhs) if np.isfinite(lhs) else np.inf
        # phases of c are compared modulo 2 pi
        dev = min(dev, abs(lhs - rhs - 2j * np.pi), abs(lhs - rhs + 2j * np.pi)) if np.isfinite(dev) else dev
        rep.margins["log_c_deviation"] = float(dev)
        rep.normalized = bool(dev < LOG_C_TOL)
    else:
        rep.normalized = False
    return rep


def check_ket(obj: AbcTriple, slack: float = STRICT_SLACK) -> PhysicalityReport:
    """A ket is normalizable iff ``||A|| < 1``; normalized iff ``<psi|psi> = 1``."""
    if not obj.layout.is_ket:
        raise WireKindError("check_ket expects a ket")
    norm = float(np.linalg.norm(obj.A, 2)) if obj.dim else 0.0
    rep = PhysicalityReport(trace_class=bool(norm < 1 - slack), margins={"norm_slack": 1 - norm})
    if rep.trace_class:
        from .core import inner

        nrm = inner(obj, obj).real
        rep.margins["norm_deviation"] = abs(nrm - 1)
        rep.normalized = bool(abs(np.log(nrm)) < LOG_C_TOL)
    else:
        rep.normalized = False
    return rep


# ---------------------------------------------------------------------------
# Maps


def _map_typewise(obj: AbcTriple) -> AbcTriple:
    kinds = obj.layout.kinds()
    need = {WireKind.OUT_BRA, WireKind.OUT_KET, WireKind.IN_BRA, WireKind.IN_KET}
    if kinds != need:
        raise WireKindError("map needs out/in bra/ket wires")
    return reorder(obj, "type-wise")


def check_cp(obj: AbcTriple) -> PhysicalityReport:
    """Complete positivity: the Choi operator has ``Gamma >= 0`` and ``c >= 0``."""
    obj = _map_typewise(obj)
    n = obj.dim // 2
    G = obj.A[:n, n:]
    lam = min_eig(G)
    c_ok = abs(obj.c.imag) <= C_TOL * max(1.0, abs(obj.c)) and obj.c.real >= -C_TOL
    herm = check_hermitian(_choi_relabel(obj)).hermitian
    return PhysicalityReport(
        cp=bool(lam >= -PSD_TOL and c_ok and herm),
        margins={"choi_gamma_min_eig": lam, "c": obj.c.real},
        ordering_used=obj.layout,
    )


def _choi_relabel(obj: AbcTriple) -> AbcTriple:
    """Bend the input wires: each map wire becomes a state wire on its own mode."""
    n = obj.dim // 2
    modes = list(range(n))
    return obj.replace(layout=WireLayout.dm(modes))


def tp_blocks(obj: AbcTriple):
    """Output-input blocks ``(A_out, R, A_in, b_out, b_in)`` with ``R = A[in, out]``."""
    kinds = obj.layout.kinds()
    need = {WireKind.OUT_BRA, WireKind.OUT_KET, WireKind.IN_BRA, WireKind.IN_KET}
    if kinds != need:
        raise WireKindError("map needs out/in bra/ket wires")
    obj = reorder(obj, "output-input")
    k = sum(1 for w in obj.layout if not w.kind.is_input)
    return obj.A[:k, :k], obj.A[k:, :k], obj.A[k:, k:], obj.b[:k], obj.b[k:], obj


def check_tp(obj: AbcTriple, tol: float = EQUALITY_TOL) -> PhysicalityReport:
    """Trace preservation from the output-input blocks."""
    A_out, R, A_in, b_out, b_in, obj = tp_blocks(obj)
    k = A_out.shape[0]
    X = _xmat(k // 2)
    X_in = _xmat(A_in.shape[0] // 2)
    M = np.eye(k) - X @ A_out
    pos = min_eig(M)
    rep = PhysicalityReport(margins={"one_minus_xa_out_min_eig": pos}, ordering_used=obj.layout)
    K = A_out - X
    if np.linalg.cond(K) > 1e13:
        raise SingularContractionError("A_out - X is singular")
    A_req = R @ np.linalg.solve(K, R.T) + X_in
    b_req = R @ np.linalg.solve(K, b_out)
    dA = float(np.max(np.abs(A_in - A_req), initial=0.0))
    db = float(np.max(np.abs(b_in - b_req), initial=0.0))
    if obj.c == 0:
        dc = np.inf
    else:
        dc = float(abs(np.log(complex(obj.c)) - _log_c_required(A_out, b_out)))
    rep.margins.update({"a_in_deviation": dA, "b_in_deviation": db, "log_c_deviation": dc})
    rep.tp = bool(pos > -STRICT_SLACK and dA <= tol and db <= tol and dc < LOG_C_TOL)
    return rep


def check(obj: AbcTriple, as_: str) -> PhysicalityReport:
    """Run the checks appropriate to ``as_`` in {"ket", "dm", "channel"}."""
    if as_ == "ket":
        return check_ket(obj)
    if as_ == "dm":
        return check_density_matrix(obj)
    if as_ == "channel":
        return check_cp(obj).merge(check_tp(obj))
    raise WireKindError(f"unknown object kind {as_!r}")


# ---------------------------------------------------------------------------
# Brute-force oracles


def fock_density_matrix(obj: AbcTriple, cutoff: int) -> np.ndarray:
    """Truncated matrix ``rho[ket, bra]`` of a density matrix (or Choi operator)."""
    from .fock import fock_amplitudes

    if obj.layout.kinds() >= {WireKind.IN_KET}:
        obj = _choi_relabel(_map_typewise(obj))
    obj = _paired(obj)
    n = obj.dim // 2
    G = fock_amplitudes(obj, cutoff, guard=False).data
    # G[bra multi-index, ket multi-index] = <ket|rho|bra>
    G = G.reshape(cutoff**n, cutoff**n)
    return G.T


def fock_min_eig(obj: AbcTriple, cutoff: int = 8) -> float:
    return min_eig(fock_density_matrix(obj, cutoff))


def schur_psd(P, Q, R, tol: float = PSD_TOL) -> bool:
    """``[[P, Q], [Q^dagger, R]] >= 0`` via ``P > 0`` and ``R - Q^dagger P^-1 Q >= 0``."""
    if min_eig(P) <= tol:
        raise NumericalDegeneracyError("Schur test needs P to be positive definite")
    S = R - Q.conj().T @ np.linalg.solve(P, Q)
    return min_eig(S) >= -tol
