"""Stellar decompositions: Gaussian core states plus a Gaussian transform.

A bipartite object over modes ``M`` (kept) and ``N`` (to be measured) is a
*core* when the ``M`` block of ``A`` and the ``M`` part of ``b`` vanish. The
decompositions below write an arbitrary object as a transform on ``M``
applied to a core:

* ``pure_decompose``: ket = unitary on ``M`` times a core ket.
* ``mixed_decompose``: density matrix = channel on ``M`` applied to a core.
* ``pure_core_decompose``: as above with a pure core (needs ``m >= n``).
* ``formal_decompose``: always exists for any vector, with a non-physical
  operator ``T`` as transform.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import (
    AbcTriple,
    Wire,
    WireKind,
    WireLayout,
    apply,
    dagger,
    join,
    partial_trace,
    reorder,
    trace,
)
from .errors import DegenerateMarginalError, DomainError, LayoutMismatchError, NumericalDegeneracyError

CORE_TOL = 1e-10
CLAMP_TOL = 1e-12
RANK_RTOL = 1e-8
PINV_RTOL = 1e-10


def _xmat(n: int) -> np.ndarray:
    I = np.eye(n)
    Z = np.zeros((n, n))
    return np.block([[Z, I], [I, Z]])


def _psd_sqrt(H: np.ndarray) -> np.ndarray:
    H = (H + H.conj().T) / 2
    w, V = np.linalg.eigh(H)
    w = np.where(w < CLAMP_TOL * max(1.0, np.abs(w).max(initial=0.0)), 0.0, w)
    return (V * np.sqrt(w)) @ V.conj().T


def _pinv(M: np.ndarray) -> np.ndarray:
    return np.linalg.pinv(M, rcond=PINV_RTOL)


def _kept_modes(obj: AbcTriple, m) -> list[int]:
    """Modes of ``M``: the first ``m`` modes in layout order, or an explicit list."""
    modes = []
    for w in obj.layout:
        if w.mode not in modes:
            modes.append(w.mode)
    if isinstance(m, (int, np.integer)):
        if not 0 <= m <= len(modes):
            raise DomainError(f"m={m} is not between 0 and {len(modes)}")
        return modes[: int(m)]
    m = [int(x) for x in m]
    if any(x not in modes for x in m) or len(set(m)) != len(m):
        raise LayoutMismatchError(f"bad partition {m} for modes {modes}")
    return m


def _wire_split(obj: AbcTriple, M_modes):
    iM = [i for i, w in enumerate(obj.layout) if w.mode in M_modes]
    iN = [i for i, w in enumerate(obj.layout) if w.mode not in M_modes]
    return iM, iN


# ---------------------------------------------------------------------------
# Core predicate


def is_core(obj: AbcTriple, partition) -> tuple[bool, dict]:
    """Check the core block pattern; ``partition`` is ``M`` or ``(M, N)``."""
    if isinstance(partition, tuple) and len(partition) == 2 and not isinstance(partition[0], (int, np.integer)):
        M, N = (list(partition[0]), list(partition[1]))
        if sorted(M + N) != sorted(obj.layout.modes) or set(M) & set(N):
            raise LayoutMismatchError("partition must cover the modes exactly once")
    else:
        M = list(partition)
        if any(x not in obj.layout.modes for x in M):
            raise LayoutMismatchError("partition names unknown modes")
    iM, _ = _wire_split(obj, M)
    a = float(np.max(np.abs(obj.A[np.ix_(iM, iM)]), initial=0.0))
    b = float(np.max(np.abs(obj.b[iM]), initial=0.0))
    return (a <= CORE_TOL and b <= CORE_TOL), {"a_block": a, "b_block": b}


# ---------------------------------------------------------------------------
# Pure case


@dataclass(frozen=True)
class PureDecomposition:
    core: AbcTriple
    unitary: AbcTriple

    def recompose(self) -> AbcTriple:
        return reorder(apply(self.unitary, self.core), self.core.layout)


def _ket_blocks(ket: AbcTriple, M_modes):
    iM, iN = _wire_split(ket, M_modes)
    A = ket.A
    return iM, iN, A[np.ix_(iM, iM)], A[np.ix_(iN, iM)], A[np.ix_(iN, iN)], ket.b[iM], ket.b[iN]


def pure_decompose(ket: AbcTriple, m) -> PureDecomposition:
    """Split a ket into an ``m``-mode unitary and a core ket.

    ``m`` is either a count (the first ``m`` modes in layout order) or a list
    of modes. The unitary has the gauge ``W = 1`` and ``c`` phase chosen so
    the core ``c`` absorbs the rest.
    """
    if not ket.layout.is_ket:
        raise LayoutMismatchError("pure_decompose expects a ket")
    M_modes = _kept_modes(ket, m)
    iM, iN, Am, R, An, bm, bn = _ket_blocks(ket, M_modes)
    k = len(iM)
    I = np.eye(k)
    Gsq = I - Am.conj() @ Am
    if k and np.linalg.eigvalsh((Gsq + Gsq.conj().T) / 2).min() <= 1e-12:
        raise DegenerateMarginalError("||A_M|| = 1: the M marginal is not normalizable")
    G = _psd_sqrt(Gsq)
    Ginv = np.linalg.inv(G) if k else G
    gamma = np.linalg.solve(G.T, bm) if k else bm
    A_U = np.block([[Am, G.T], [G, -Am.conj()]])
    b_U = np.concatenate([bm, -Am.conj() @ gamma - gamma.conj()])
    M_wires = [ket.layout[i] for i in iM]
    out = [Wire(w.mode, WireKind.OUT_KET) for w in M_wires]
    inn = [Wire(w.mode, WireKind.IN_KET) for w in M_wires]
    U = AbcTriple(A_U, b_U, 1.0, WireLayout(tuple(out + inn), "custom"))
    U = reorder(U, "type-wise")
    U = U.replace(c=1.0 / np.sqrt(abs(_unitary_norm(U))))

    Rc = R @ Ginv
    Ac = An + Rc @ Am.conj() @ Rc.T
    bc_n = bn - Rc @ b_U[k:]
    A_core = np.zeros_like(ket.A)
    A_core[np.ix_(iN, iN)] = Ac
    A_core[np.ix_(iN, iM)] = Rc
    A_core[np.ix_(iM, iN)] = Rc.T
    b_core = np.zeros_like(ket.b)
    b_core[iN] = bc_n
    core = AbcTriple(A_core, b_core, 1.0, ket.layout)
    # fix c from the vacuum amplitude of the recomposed object
    trial = reorder(apply(U, core), ket.layout)
    core = core.replace(c=ket.c / trial.c)
    return PureDecomposition(core, U)


def _unitary_norm(U: AbcTriple) -> complex:
    """``c`` of ``U^dagger U`` for the given ``U`` (1 when U is unitary with |c| = 1)."""
    return apply(dagger(U), U).c


# ---------------------------------------------------------------------------
# Mixed case


@dataclass(frozen=True)
class FormalDecomposition:
    core_vector: AbcTriple
    t_operator: AbcTriple
    wire_map: tuple = ()

    def recompose(self) -> AbcTriple:
        return reorder(apply(self.t_operator, self.core_vector), self.core_vector.layout)


@dataclass(frozen=True)
class MixedDecomposition:
    core: AbcTriple | None
    channel: AbcTriple | None
    feasible: bool
    rank_witness: int
    pure_core: bool = False
    formal: FormalDecomposition | None = None
    witnesses: dict = field(default_factory=dict)

    def recompose(self) -> AbcTriple:
        if not self.feasible:
            raise DomainError("no physical decomposition to recompose")
        out = apply(self.channel, self.core)
        return out


def _dm_split(dm: AbcTriple, M_modes):
    """Reorder to ``[M bras, M kets, N bras, N kets]`` and return the blocks."""
    N_modes = [x for x in _ordered_modes(dm) if x not in M_modes]
    B, K = WireKind.BRA, WireKind.KET
    wires = (
        [Wire(x, B) for x in M_modes]
        + [Wire(x, K) for x in M_modes]
        + [Wire(x, B) for x in N_modes]
        + [Wire(x, K) for x in N_modes]
    )
    try:
        sub = reorder(dm, WireLayout(tuple(wires), "custom"))
    except LayoutMismatchError as exc:
        raise LayoutMismatchError("mixed decomposition expects a density matrix") from exc
    return sub, N_modes


def _ordered_modes(obj: AbcTriple) -> list[int]:
    modes = []
    for w in obj.layout:
        if w.mode not in modes:
            modes.append(w.mode)
    return modes


def rank_witness(dm: AbcTriple, m, rtol: float = RANK_RTOL) -> int:
    """``rank(r r^dagger + sigma sigma^dagger)`` of the N-M coupling blocks."""
    M_modes = _kept_modes(dm, m)
    sub, N_modes = _dm_split(dm, M_modes)
    k, n = len(M_modes), len(N_modes)
    R = sub.A[2 * k :, : 2 * k]
    r, s = R[n:, k:], R[n:, :k]
    return _rank(r @ r.conj().T + s @ s.conj().T, rtol)


def _rank(H: np.ndarray, rtol: float) -> int:
    if H.size == 0:
        return 0
    sv = np.linalg.svd(H, compute_uv=False)
    if sv.max() == 0:
        return 0
    return int(np.sum(sv > rtol * sv.max()))


def _channel_from_blocks(A_out, Gam, M_modes) -> AbcTriple:
    """TP completion of a map with output block ``A_out`` and in-out block ``Gam``."""
    k2 = A_out.shape[0]
    X = _xmat(k2 // 2)
    A_in = Gam @ np.linalg.solve(A_out - X, Gam.T) + X
    A = np.block([[A_out, Gam.T], [Gam, A_in]])
    sign, logdet = np.linalg.slogdet(np.eye(k2) - X @ A_out)
    c = np.exp(0.5 * logdet) * np.sqrt(complex(sign))
    B = WireKind
    wires = (
        [Wire(x, B.OUT_BRA) for x in M_modes]
        + [Wire(x, B.OUT_KET) for x in M_modes]
        + [Wire(x, B.IN_BRA) for x in M_modes]
        + [Wire(x, B.IN_KET) for x in M_modes]
    )
    return reorder(AbcTriple(A, np.zeros(2 * k2), c, WireLayout(tuple(wires))), "output-input")


def _mode_means(dm: AbcTriple, modes) -> np.ndarray:
    """Complex amplitudes ``<a_j>`` of a Gaussian density matrix."""
    from .phase_space import abc_to_state

    tw = reorder(dm, "type-wise")
    ps = abc_to_state(tw, hbar=2.0)
    n = ps.n
    alpha = (ps.mu[:n] + 1j * ps.mu[n:]) / 2
    order = [w.mode for w in tw.layout.wires[n:]]
    return np.array([alpha[order.index(x)] for x in modes])


def _displace(obj: AbcTriple, alpha, modes) -> AbcTriple:
    from .catalog import displacement

    if not np.any(np.abs(alpha) > 0):
        return obj
    D = _multimode_displacement(alpha, modes, displacement)
    return reorder(apply(D, obj), obj.layout)


def _finish(dm_sub: AbcTriple, core_A: np.ndarray, channel: AbcTriple, M_modes, N_modes):
    """Attach ``b`` and ``c`` to a core whose ``A`` was built from the centred input.

    The N-mode mean goes into the core, the M-mode mean into the channel
    output; the M part of the core ``b`` created by the first step is then
    absorbed into the channel input.
    """
    from .catalog import displacement

    alpha_M = _mode_means(dm_sub, M_modes)
    alpha_N = _mode_means(dm_sub, N_modes)
    core = AbcTriple(core_A, np.zeros(dm_sub.dim), 1.0, dm_sub.layout)
    core = _displace(core, alpha_N, N_modes)
    core, gamma = absorb_displacement(core, M_modes)
    if np.any(gamma != 0):
        D = _multimode_displacement(-gamma, M_modes, displacement)
        channel = reorder(apply(channel, D), channel.layout)
    if np.any(alpha_M != 0):
        D = _multimode_displacement(alpha_M, M_modes, displacement)
        channel = reorder(apply(D, channel), channel.layout)
    core = core.replace(c=core.c * trace(dm_sub) / trace(core))
    return core, channel


def _multimode_displacement(gamma, modes, displacement):
    ops = [displacement(g, mode=x) for g, x in zip(gamma, modes)]
    out = ops[0]
    for o in ops[1:]:
        out = join(out, o)
    return reorder(out, "type-wise")


def absorb_displacement(core: AbcTriple, m) -> tuple[AbcTriple, np.ndarray]:
    """Displace the ``M`` modes of a core candidate so its ``M`` part of ``b`` vanishes.

    Returns ``(displaced core, gamma)`` with ``gamma = -(b_M)_ket``; the
    transform must then be composed with ``D(gamma)^dagger``.
    """
    from .catalog import displacement

    M_modes = _kept_modes(core, m)
    ket_idx = [core.layout.index((x, WireKind.KET)) for x in M_modes]
    gamma = -np.asarray(core.b[ket_idx])
    if not np.any(np.abs(gamma) > 0):
        return core, np.zeros(len(M_modes), dtype=complex)
    D = _multimode_displacement(gamma, M_modes, displacement)
    out = reorder(apply(D, core), core.layout)
    iM, _ = _wire_split(out, M_modes)
    b = np.array(out.b)
    b[iM] = 0.0
    return out.replace(b=b), gamma


def mixed_decompose(dm: AbcTriple, m, rank_tol: float = RANK_RTOL) -> MixedDecomposition:
    """Channel on ``M`` applied to a Gaussian core density matrix, when one exists.

    For ``m >= n`` the pure-core construction is used. Otherwise the rank
    witness decides feasibility; infeasible inputs return the formal
    decomposition of the vectorized density matrix instead.
    """
    from .physicality import check_density_matrix

    M_modes = _kept_modes(dm, m)
    sub, N_modes = _dm_split(dm, M_modes)
    rep = check_density_matrix(sub)
    if not (rep.hermitian and rep.positive and rep.trace_class):
        raise DomainError(f"input is not a physical density matrix: {rep.to_dict()}")
    k, n = len(M_modes), len(N_modes)
    wit = rank_witness(sub, M_modes, rank_tol)
    if n == 0 or k >= n:
        dec = pure_core_decompose(dm, M_modes)
        return MixedDecomposition(dec.core, dec.channel, True, wit, True, None, dec.witnesses)
    if wit > k:
        formal = formal_decompose(dm, M_modes)
        return MixedDecomposition(None, None, False, wit, False, formal, {"rank_witness": wit})

    A = sub.A
    Am = A[: 2 * k, : 2 * k]
    R = A[2 * k :, : 2 * k]
    An = A[2 * k :, 2 * k :]
    X = _xmat(k)
    S = R @ np.linalg.solve(X - Am, R.T)
    alpha = Am[k:, :k]
    sigma = R[n:, :k]
    an = An[n:, n:]
    alpha_n = An[n:, :n]
    Skk, Skb = S[n:, n:], S[n:, :n]
    extra = sigma @ _pinv(alpha) @ sigma.conj().T
    P = Skb + extra
    P = (P + P.conj().T) / 2
    w, V = np.linalg.eigh(P)
    if w.min(initial=0.0) < -1e-8 * max(1.0, abs(w).max(initial=0.0)):
        raise NumericalDegeneracyError(f"Gram matrix has a negative eigenvalue {w.min():.3e}")
    top = np.argsort(w)[::-1][:k]
    rc = V[:, top] * np.sqrt(np.clip(w[top], 0, None))
    if rc.shape[1] < k:
        rc = np.hstack([rc, np.zeros((n, k - rc.shape[1]))])
    ac = an + Skk
    alpha_c = alpha_n - extra
    Z = np.zeros((n, k))
    Rc = np.block([[rc.conj(), Z], [Z, rc]])
    core_A = np.zeros_like(A)
    core_A[2 * k :, : 2 * k] = Rc
    core_A[: 2 * k, 2 * k :] = Rc.T
    core_A[2 * k :, 2 * k :] = np.block([[ac.conj(), alpha_c.T], [alpha_c, ac]])
    Gam = _pinv(Rc) @ R
    res = float(np.max(np.abs(Rc @ Gam - R), initial=0.0))
    if res > 1e-8:
        raise NumericalDegeneracyError(f"coupling block is outside the core range (residual {res:.2e})")
    channel = _channel_from_blocks(Am, Gam, M_modes)
    core, channel = _finish(sub, core_A, channel, M_modes, N_modes)
    return MixedDecomposition(core, channel, True, wit, False, None, {"rank_witness": wit, "range_residual": res})


def pure_core_decompose(dm: AbcTriple, m) -> MixedDecomposition:
    """Channel on ``M`` applied to a pure core ket.

    Needs ``m >= n``; otherwise ``n - m`` vacuum ancillas are added to ``M``
    and traced out of the channel output afterwards.
    """
    from .catalog import vacuum

    M_modes = _kept_modes(dm, m)
    sub, N_modes = _dm_split(dm, M_modes)
    k, n = len(M_modes), len(N_modes)
    anc = []
    if k < n:
        top = max(_ordered_modes(dm)) + 1
        anc = list(range(top, top + n - k))
        vac = reorder(_promote_ket(vacuum(len(anc), modes=anc)), "type-wise")
        sub, N_modes = _dm_split(join(dm, vac), M_modes + anc)
        M_modes = M_modes + anc
        k = len(M_modes)

    A = sub.A
    Am = A[: 2 * k, : 2 * k]
    R = A[2 * k :, : 2 * k]
    An = A[2 * k :, 2 * k :]
    X = _xmat(k)
    S = R @ np.linalg.solve(X - Am, R.T)
    T = An + S
    a = T[n:, n:]
    P = T[n:, :n]
    P = (P + P.conj().T) / 2
    w, V = np.linalg.eigh(P) if n else (np.zeros(0), np.zeros((0, 0)))
    if n and w.min() < -1e-8 * max(1.0, abs(w).max()):
        raise NumericalDegeneracyError(f"marginal equation has no pure solution (eigenvalue {w.min():.3e})")
    rc = (V * np.sqrt(np.clip(w, 0, None))) @ V.conj().T if n else np.zeros((0, 0))
    rc = np.hstack([rc, np.zeros((n, k - n))])
    Z = np.zeros((n, k))
    Rc = np.block([[rc.conj(), Z], [Z, rc]])
    Gam = _pinv(Rc) @ R
    res = float(np.max(np.abs(Rc @ Gam - R), initial=0.0))
    if res > 1e-8:
        raise NumericalDegeneracyError(f"coupling block is outside the core range (residual {res:.2e})")
    channel = _channel_from_blocks(Am, Gam, M_modes)

    # pure core as a ket over [M, N]
    A_ket = np.zeros((k + n, k + n), dtype=complex)
    A_ket[k:, :k] = rc
    A_ket[:k, k:] = rc.T
    A_ket[k:, k:] = a
    ket_layout = WireLayout.ket(M_modes + N_modes)
    ket0 = AbcTriple(A_ket, np.zeros(k + n), 1.0, WireLayout(ket_layout.wires, "custom"))
    core_dm_A = _promote_ket(ket0)
    core_dm_A = reorder(core_dm_A, sub.layout).A
    core, channel = _finish(sub, core_dm_A, channel, M_modes, N_modes)
    ket = _ket_from_pure_dm(core, M_modes + N_modes)
    if anc:
        channel = partial_trace(channel, anc)
    return MixedDecomposition(
        ket, channel, True, rank_witness(sub, M_modes), True, None,
        {"range_residual": res, "ancillas": anc},
    )


def _promote_ket(ket: AbcTriple) -> AbcTriple:
    from .core import outer

    return outer(ket)


def _ket_from_pure_dm(dm: AbcTriple, modes) -> AbcTriple:
    """Ket ``psi`` with ``|psi><psi| = dm`` for a pure Gaussian ``dm`` (global phase 0)."""
    kets = [dm.layout.index((x, WireKind.KET)) for x in modes]
    bras = [dm.layout.index((x, WireKind.BRA)) for x in modes]
    cross = float(np.max(np.abs(dm.A[np.ix_(kets, bras)]), initial=0.0))
    if cross > 1e-8:
        raise NumericalDegeneracyError(f"core is not pure (bra-ket block {cross:.2e})")
    c = np.sqrt(abs(dm.c))
    return AbcTriple(dm.A[np.ix_(kets, kets)], dm.b[kets], c, WireLayout.ket(modes))


# ---------------------------------------------------------------------------
# Formal case


def formal_decompose(g: AbcTriple, m) -> FormalDecomposition:
    """Core vector plus ``T`` operator with ``A_T = [[A_M, 1], [1, 0]]``.

    ``g`` is vectorized first: every wire becomes a ket on its own index,
    ``M`` wires first. ``wire_map`` records the original wire of each index.
    """
    M_modes = _kept_modes(g, m)
    g = reorder(g, "type-wise")
    iM, iN = _wire_split(g, M_modes)
    order = iM + iN
    k = len(iM)
    A = g.A[np.ix_(order, order)]
    b = g.b[order]
    wire_map = tuple(g.layout[i] for i in order)
    Am = A[:k, :k]
    A_core = np.array(A)
    A_core[:k, :k] = 0.0
    b_core = np.array(b)
    b_core[:k] = 0.0
    core = AbcTriple(A_core, b_core, g.c, WireLayout.ket(range(len(order))))
    I = np.eye(k)
    A_T = np.block([[Am, I], [I, np.zeros((k, k))]])
    b_T = np.concatenate([b[:k], np.zeros(k)])
    T = AbcTriple(A_T, b_T, 1.0, WireLayout.unitary(range(k)))
    return FormalDecomposition(core, T, wire_map)


def vectorized(g: AbcTriple, dec: FormalDecomposition) -> AbcTriple:
    """``g`` in the vector labelling used by ``dec``."""
    idx = [g.layout.index(w) for w in dec.wire_map]
    return AbcTriple(g.A[np.ix_(idx, idx)], g.b[idx], g.c, WireLayout.ket(range(len(idx))))
