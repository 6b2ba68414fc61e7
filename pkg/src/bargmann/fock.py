r"""Fock amplitudes of Abc triples and exact heralding.

The rescaled Taylor coefficients ``G_k`` of ``c exp(z^T A z/2 + z^T b)`` obey

.. math::
    G_{k+1_i} = \frac{b_i G_k + \sum_j \sqrt{k_j} A_{ij} G_{k-1_j}}{\sqrt{k_i+1}},
    \qquad G_0 = c,

and they are exactly the Fock amplitudes of the object along its wires.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import AbcTriple, Wire, WireKind, WireLayout, reorder
from .errors import DivergentIntegralError, DomainError, LayoutMismatchError

MAX_ELEMENTS = 10**8


@dataclass(frozen=True)
class FockArray:
    """Dense Fock tensor; axis ``i`` runs over the photon number of ``layout[i]``."""

    data: np.ndarray
    layout: WireLayout

    def __post_init__(self):
        data = np.asarray(self.data, dtype=complex)
        if data.ndim != len(self.layout):
            raise LayoutMismatchError("one axis per wire is required")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    cutoffs = shape


@dataclass(frozen=True)
class HeraldSpec:
    measured_modes: tuple[int, ...]
    pattern: tuple[int, ...]

    def __post_init__(self):
        modes = tuple(int(m) for m in self.measured_modes)
        pattern = tuple(int(k) for k in self.pattern)
        if len(modes) != len(pattern):
            raise DomainError("one photon count per measured mode is required")
        if any(k < 0 for k in pattern):
            raise DomainError("photon counts must be non-negative")
        if len(set(modes)) != len(modes):
            raise DomainError("measured modes must be distinct")
        object.__setattr__(self, "measured_modes", modes)
        object.__setattr__(self, "pattern", pattern)

    @property
    def total(self) -> int:
        return sum(self.pattern)


@dataclass(frozen=True)
class HeraldResult:
    """Conditional (unnormalized) Fock data on the unmeasured modes.

    With ``exact`` set, ``amplitudes`` is the heralded core object and
    ``transform`` (a unitary or channel triple) must still be applied to it.
    Otherwise the amplitudes are a truncation of the heralded object itself and
    ``witness`` is the norm carried by the last two total-degree shells.
    """

    amplitudes: FockArray
    transform: AbcTriple | None
    exact: bool
    witness: float = 0.0
    extra: dict = field(default_factory=dict)

    @property
    def probability(self) -> float:
        d = self.amplitudes.data
        if all(w.kind is WireKind.KET for w in self.amplitudes.layout):
            return float(np.sum(np.abs(d) ** 2))
        n = len(self.amplitudes.layout) // 2
        dim = int(np.prod(d.shape[:n]))
        return float(np.trace(d.reshape(dim, dim)).real)


def _index_order(shape):
    idx = np.array(list(np.ndindex(*shape)), dtype=np.int64).reshape(-1, len(shape))
    order = np.argsort(idx.sum(axis=1), kind="stable")
    return idx[order]


def _check_args(obj: AbcTriple, cutoffs, guard):
    if isinstance(cutoffs, (int, np.integer)):
        cutoffs = [int(cutoffs)] * obj.dim
    cutoffs = tuple(int(c) for c in cutoffs)
    if len(cutoffs) != obj.dim:
        raise DomainError(f"expected {obj.dim} cutoffs, got {len(cutoffs)}")
    if any(c < 1 for c in cutoffs):
        raise DomainError("cutoffs must be positive")
    if math.prod(cutoffs) > MAX_ELEMENTS:
        raise DomainError("requested Fock tensor exceeds the element guard")
    if guard is None:
        guard = obj.layout.is_ket
    if guard and obj.dim and np.linalg.norm(obj.A, 2) >= 1:
        raise DivergentIntegralError("||A|| >= 1: Fock amplitudes are not normalizable")
    return cutoffs


def _recurrence(A, b, c, cutoffs, stable: bool) -> np.ndarray:
    N = len(cutoffs)
    G = np.zeros(cutoffs, dtype=complex)
    if N == 0:
        return np.array(c, dtype=complex)
    flat = G.reshape(-1)
    strides = [int(np.prod(cutoffs[i + 1 :])) for i in range(N)]
    sq = np.sqrt(np.arange(max(cutoffs) + 1))
    A = np.asarray(A)
    b = np.asarray(b)
    flat[0] = c
    for k in _index_order(cutoffs)[1:]:
        pos = int(np.dot(k, strides))
        active = [i for i in range(N) if k[i] > 0]
        if not stable:
            active = active[:1]
        total = 0j
        for i in active:
            p = pos - strides[i]
            val = b[i] * flat[p]
            for j in range(N):
                kj = k[j] - (1 if j == i else 0)
                if kj > 0:
                    val += sq[kj] * A[i, j] * flat[p - strides[j]]
            total += val / sq[k[i]]
        flat[pos] = total / len(active)
    return G


def fock_amplitudes(obj: AbcTriple, cutoffs, guard: bool | None = None) -> FockArray:
    """Fock tensor of ``obj`` from the single-predecessor recursion.

    ``guard`` rejects ``||A|| >= 1``; by default it is on for states only since
    operators such as unitaries sit at ``||A|| = 1``.
    """
    cutoffs = _check_args(obj, cutoffs, guard)
    return FockArray(_recurrence(obj.A, obj.b, obj.c, cutoffs, False), obj.layout)


def fock_amplitudes_stable(obj: AbcTriple, cutoffs, guard: bool | None = None) -> FockArray:
    """Same tensor as :func:`fock_amplitudes`, averaging over all predecessors."""
    cutoffs = _check_args(obj, cutoffs, guard)
    return FockArray(_recurrence(obj.A, obj.b, obj.c, cutoffs, True), obj.layout)


def tail_witness(data: np.ndarray, shells: int = 2) -> float:
    """Norm of the entries in the last ``shells`` total-degree shells of ``data``."""
    if data.ndim == 0:
        return 0.0
    deg = np.indices(data.shape).sum(axis=0)
    top = deg.max()
    return float(np.sqrt(np.sum(np.abs(data[deg > top - shells]) ** 2)))


def _split_modes(obj: AbcTriple, spec: HeraldSpec):
    modes = obj.layout.modes
    for m in spec.measured_modes:
        if m not in modes:
            raise DomainError(f"measured mode {m} is not a mode of the object")
    keep = [m for m in modes if m not in spec.measured_modes]
    return keep, list(spec.measured_modes)


def herald(obj: AbcTriple, spec: HeraldSpec, decompose: bool = True, cutoff=None) -> HeraldResult:
    """Project ``spec.measured_modes`` onto ``spec.pattern`` photons.

    With ``decompose`` the object is first split into a Gaussian core and a
    transform; the heralded core then has finite support (total photon number
    at most ``sum(pattern)``) and is returned exactly, with the transform.
    Without it, ``cutoff`` (per kept mode) sets a truncation window.
    """
    from . import stellar

    keep, meas = _split_modes(obj, spec)
    is_ket = obj.layout.is_ket
    if not is_ket and not obj.layout.is_state:
        raise LayoutMismatchError("herald expects a ket or a density matrix")
    kinds = [WireKind.KET] if is_ket else [WireKind.BRA, WireKind.KET]
    order = [Wire(m, k) for k in kinds for m in keep] if not is_ket else [Wire(m, WireKind.KET) for m in keep]
    meas_wires = [Wire(m, k) for k in kinds for m in meas]
    # subsystem-wise layout: kept wires then measured wires
    sub = reorder(obj, WireLayout(tuple(order + meas_wires), "custom"))
    m = len(keep)
    K = spec.total
    pat = list(spec.pattern) * len(kinds)

    if decompose:
        if is_ket:
            dec = stellar.pure_decompose(sub, m)
            core, transform = dec.core, dec.unitary
            feasible = True
        else:
            dec = stellar.mixed_decompose(_dm_subsystem(obj, keep, meas), m)
            feasible = dec.feasible
            core, transform = dec.core, dec.channel
        if feasible:
            core_is_ket = core.layout.is_ket
            ck = [WireKind.KET] if core_is_ket else [WireKind.BRA, WireKind.KET]
            if not core_is_ket:
                core = reorder(core, WireLayout(tuple(
                    [Wire(x, k) for k in ck for x in keep] + [Wire(x, k) for k in ck for x in meas]
                ), "custom"))
            pat_c = list(spec.pattern) * len(ck)
            cut = [K + 1] * (m * len(ck)) + [k + 1 for k in pat_c]
            G = fock_amplitudes(core, cut, guard=False).data
            sl = (slice(None),) * (m * len(ck)) + tuple(pat_c)
            kept_layout = WireLayout(tuple(core.layout[: m * len(ck)]), "custom")
            return HeraldResult(FockArray(G[sl], kept_layout), transform, True, 0.0)
        if cutoff is None:
            raise DomainError(
                f"no physical stellar decomposition (rank witness {dec.rank_witness}); pass a cutoff"
            )

    if cutoff is None:
        raise DomainError("a cutoff is required without decomposition")
    if isinstance(cutoff, (int, np.integer)):
        cutoff = [int(cutoff)] * m
    cut = list(cutoff) * len(kinds) + [k + 1 for k in pat]
    G = fock_amplitudes(sub, cut).data
    sl = (slice(None),) * (m * len(kinds)) + tuple(pat)
    amps = G[sl]
    kept_layout = WireLayout(tuple(order), "custom")
    return HeraldResult(FockArray(amps, kept_layout), None, False, tail_witness(amps))


def _dm_subsystem(obj: AbcTriple, keep, meas) -> AbcTriple:
    """Density matrix in subsystem-wise order [M bras, M kets, N bras, N kets]."""
    wires = (
        [Wire(m, WireKind.BRA) for m in keep]
        + [Wire(m, WireKind.KET) for m in keep]
        + [Wire(m, WireKind.BRA) for m in meas]
        + [Wire(m, WireKind.KET) for m in meas]
    )
    return reorder(obj, WireLayout(tuple(wires), "custom"))


def unitary_matrix(U: AbcTriple, cutoff_out: int, cutoff_in: int) -> np.ndarray:
    """Truncated Fock matrix ``<out|U|in>`` of a single-mode operator."""
    U = reorder(U, "type-wise")
    return fock_amplitudes(U, (cutoff_out, cutoff_in), guard=False).data


def apply_unitary(U: AbcTriple, vec: np.ndarray, cutoff: int) -> np.ndarray:
    """``U vec`` truncated to ``cutoff`` output photons per mode.

    ``vec`` is a tensor with one axis per mode of ``U``; since it has finite
    support the input side of ``U`` needs no truncation.
    """
    U = reorder(U, "type-wise")
    vec = np.asarray(vec, dtype=complex)
    n = vec.ndim
    T = fock_amplitudes(U, [cutoff] * n + list(vec.shape), guard=False).data
    return np.tensordot(T, vec, axes=(list(range(n, 2 * n)), list(range(n))))


def displacement_matrix_elements(alpha: complex, cutoff: int) -> np.ndarray:
    """``<m|D(alpha)|n>`` for ``m, n < cutoff`` from the associated-Laguerre recurrence."""
    if cutoff < 1:
        raise DomainError("cutoff must be positive")
    alpha = complex(alpha)
    x = abs(alpha) ** 2
    phase = alpha / abs(alpha) if x > 0 else 1.0
    D = np.zeros((cutoff, cutoff), dtype=complex)
    env = math.exp(-x / 2)
    for k in range(cutoff):
        # g_n = sqrt(n!/(n+k)!) x^{k/2} L_n^{(k)}(x), n = 0..cutoff-1-k
        L = cutoff - k
        g = np.zeros(L)
        if x > 0:
            g[0] = math.exp(0.5 * k * math.log(x) - 0.5 * math.lgamma(k + 1))
        else:
            g[0] = 1.0 if k == 0 else 0.0
        if L > 1:
            g[1] = g[0] * (1 + k - x) / math.sqrt(k + 1)
        for n in range(1, L - 1):
            g[n + 1] = (2 * n + 1 + k - x) * g[n] / math.sqrt((n + 1) * (n + k + 1)) - math.sqrt(
                n * (n + k) / ((n + 1) * (n + k + 1))
            ) * g[n - 1]
        n = np.arange(L)
        D[n + k, n] = env * phase**k * g
        if k:
            D[n, n + k] = env * (-np.conj(phase)) ** k * g
    return D


def displacement_expectation(state: np.ndarray, alpha: complex) -> complex:
    """``tr(rho D(alpha))`` for a finite Fock vector or density matrix.

    Vectors are normalized first; matrices follow the ``G[bra, ket]`` convention
    and are divided by their trace.
    """
    state = np.asarray(state, dtype=complex)
    C = state.shape[0]
    D = displacement_matrix_elements(alpha, C)
    if state.ndim == 1:
        nrm = np.vdot(state, state).real
        if nrm == 0:
            raise DomainError("zero-norm state")
        return np.vdot(state, D @ state) / nrm
    tr = np.trace(state)
    if tr == 0:
        raise DomainError("zero-trace state")
    # G[n, m] = <m|rho|n>, so tr(rho D) = sum_{n,m} G[n, m] D[n, m]
    return np.sum(state * D) / tr


def effective_squeezing_exact(core_fock, U: AbcTriple | None, direction, hbar: float = 2.0) -> float:
    """``(2/pi) log(1/|tr(rho D_v)|)`` with ``v = sqrt(2 pi hbar) direction``.

    ``D_v`` is the Weyl operator ``exp(i v.r / hbar)``, a phase-space shift by
    ``Omega v``. ``rho = U rho_core U^dagger``; the shift is pulled through ``U``
    using its symplectic action so only finite Fock sums are needed.
    """
    from .phase_space import abc_to_unitary

    data = core_fock.data if isinstance(core_fock, FockArray) else np.asarray(core_fock)
    v = np.sqrt(2 * np.pi * hbar) * np.asarray(direction, dtype=float)
    w = np.array([v[1], -v[0]])
    if U is not None:
        su = abc_to_unitary(U, hbar)
        w = np.linalg.solve(su.S, w)
    alpha = (w[0] + 1j * w[1]) / np.sqrt(2 * hbar)
    val = abs(displacement_expectation(data, alpha))
    if val == 0:
        return math.inf
    return float(2 / np.pi * np.log(1 / val))
