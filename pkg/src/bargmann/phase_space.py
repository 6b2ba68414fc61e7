r"""Conversions between phase-space data and Abc triples.

Phase-space vectors are ``(x_1..x_n, p_1..p_n)`` internally (``xxpp``); the
``xpxp`` ordering is accepted at the boundaries. The complex rotation

.. math::
    W = \frac{1}{\sqrt 2}\begin{bmatrix} 1 & i 1 \\ 1 & -i 1\end{bmatrix}

maps ``(x, p)`` to ``(alpha, alpha*)`` in units of ``sqrt(hbar)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import AbcTriple, WireKind, WireLayout, reorder
from .errors import DomainError, SingularContractionError

IMAG_TOL = 1e-8


def omega(n: int) -> np.ndarray:
    """Symplectic form in xxpp order."""
    I = np.eye(n)
    Z = np.zeros((n, n))
    return np.block([[Z, I], [-I, Z]])


def wmat(n: int) -> np.ndarray:
    I = np.eye(n)
    return np.block([[I, 1j * I], [I, -1j * I]]) / np.sqrt(2)


def xmat(n: int) -> np.ndarray:
    I = np.eye(n)
    Z = np.zeros((n, n))
    return np.block([[Z, I], [I, Z]])


def xpxp_to_xxpp(n: int) -> np.ndarray:
    """Index array ``perm`` with ``v_xxpp = v_xpxp[perm]``."""
    return np.concatenate([np.arange(0, 2 * n, 2), np.arange(1, 2 * n, 2)])


def _to_xxpp_vec(v, ordering: str):
    v = np.asarray(v, dtype=float)
    if ordering == "xxpp":
        return v
    if ordering != "xpxp":
        raise DomainError(f"unknown phase-space ordering {ordering!r}")
    return v[xpxp_to_xxpp(v.shape[0] // 2)]


def _to_xxpp_mat(M, ordering: str):
    M = np.asarray(M, dtype=float)
    if ordering == "xxpp":
        return M
    if ordering != "xpxp":
        raise DomainError(f"unknown phase-space ordering {ordering!r}")
    p = xpxp_to_xxpp(M.shape[0] // 2)
    return M[np.ix_(p, p)]


def _from_xxpp_vec(v, ordering: str):
    if ordering == "xxpp":
        return v
    inv = np.argsort(xpxp_to_xxpp(v.shape[0] // 2))
    return v[inv]


def _from_xxpp_mat(M, ordering: str):
    if ordering == "xxpp":
        return M
    inv = np.argsort(xpxp_to_xxpp(M.shape[0] // 2))
    return M[np.ix_(inv, inv)]


def _real(M, what: str):
    M = np.asarray(M)
    if np.max(np.abs(M.imag), initial=0.0) > IMAG_TOL * max(1.0, np.max(np.abs(M), initial=0.0)):
        raise DomainError(f"{what} has a significant imaginary part")
    return M.real


@dataclass(frozen=True)
class PhaseSpaceState:
    sigma: np.ndarray
    mu: np.ndarray
    hbar: float = 2.0
    ordering: str = "xxpp"

    def __post_init__(self):
        sigma = np.array(self.sigma, dtype=float)
        n2 = sigma.shape[0]
        mu = np.zeros(n2) if self.mu is None else np.array(self.mu, dtype=float)
        if sigma.shape != (n2, n2) or mu.shape != (n2,) or n2 % 2:
            raise DomainError("sigma must be 2n x 2n and mu of length 2n")
        if np.max(np.abs(sigma - sigma.T)) > 1e-10 * max(1.0, np.max(np.abs(sigma))):
            raise DomainError("covariance matrix is not symmetric")
        object.__setattr__(self, "sigma", (sigma + sigma.T) / 2)
        object.__setattr__(self, "mu", mu)
        if self.ordering not in ("xxpp", "xpxp"):
            raise DomainError(f"unknown phase-space ordering {self.ordering!r}")

    @property
    def n(self) -> int:
        return self.sigma.shape[0] // 2

    def to(self, ordering: str) -> "PhaseSpaceState":
        s = _to_xxpp_mat(self.sigma, self.ordering)
        m = _to_xxpp_vec(self.mu, self.ordering)
        return PhaseSpaceState(_from_xxpp_mat(s, ordering), _from_xxpp_vec(m, ordering), self.hbar, ordering)

    def physical_margin(self) -> float:
        """Smallest eigenvalue of ``(2/hbar) Sigma - i Omega``."""
        s = self.to("xxpp")
        H = 2 / self.hbar * s.sigma - 1j * omega(self.n)
        return float(np.linalg.eigvalsh((H + H.conj().T) / 2).min())

    def is_physical(self, tol: float = 1e-10) -> bool:
        return self.physical_margin() >= -tol


@dataclass(frozen=True)
class SymplecticUnitary:
    S: np.ndarray
    d: np.ndarray
    ordering: str = "xxpp"

    def __post_init__(self):
        S = np.array(self.S, dtype=float)
        n2 = S.shape[0]
        d = np.zeros(n2) if self.d is None else np.array(self.d, dtype=float)
        object.__setattr__(self, "S", S)
        object.__setattr__(self, "d", d)
        Sx = _to_xxpp_mat(S, self.ordering)
        Om = omega(n2 // 2)
        if np.max(np.abs(Sx.T @ Om @ Sx - Om)) > 1e-10 * max(1.0, np.max(np.abs(Sx)) ** 2):
            raise DomainError("S is not symplectic")

    @property
    def n(self) -> int:
        return self.S.shape[0] // 2

    def to(self, ordering: str) -> "SymplecticUnitary":
        S = _to_xxpp_mat(self.S, self.ordering)
        d = _to_xxpp_vec(self.d, self.ordering)
        return SymplecticUnitary(_from_xxpp_mat(S, ordering), _from_xxpp_vec(d, ordering), ordering)


@dataclass(frozen=True)
class ChannelXY:
    """Gaussian channel acting as ``Sigma -> X Sigma X^T + Y`` and ``mu -> X mu + d``."""

    X: np.ndarray
    Y: np.ndarray
    d: np.ndarray = None
    ordering: str = "xxpp"

    def __post_init__(self):
        X = np.array(self.X, dtype=float)
        Y = np.array(self.Y, dtype=float)
        n2 = X.shape[0]
        d = np.zeros(n2) if self.d is None else np.array(self.d, dtype=float)
        if X.shape != (n2, n2) or Y.shape != (n2, n2) or d.shape != (n2,):
            raise DomainError("X, Y must be 2m x 2m and d of length 2m")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "Y", (Y + Y.T) / 2)
        object.__setattr__(self, "d", d)

    @property
    def n(self) -> int:
        return self.X.shape[0] // 2

    def to(self, ordering: str) -> "ChannelXY":
        X = _to_xxpp_mat(self.X, self.ordering)
        Y = _to_xxpp_mat(self.Y, self.ordering)
        d = _to_xxpp_vec(self.d, self.ordering)
        return ChannelXY(
            _from_xxpp_mat(X, ordering), _from_xxpp_mat(Y, ordering), _from_xxpp_vec(d, ordering), ordering
        )

    def cptp_margin(self, hbar: float = 2.0) -> float:
        """Smallest eigenvalue of ``(2/hbar) Y + i X Omega X^T - i Omega``."""
        ch = self.to("xxpp")
        Om = omega(self.n)
        H = 2 / hbar * ch.Y + 1j * ch.X @ Om @ ch.X.T - 1j * Om
        return float(np.linalg.eigvalsh((H + H.conj().T) / 2).min())

    def apply(self, ps: PhaseSpaceState) -> PhaseSpaceState:
        ch = self.to("xxpp")
        s = ps.to("xxpp")
        out = PhaseSpaceState(ch.X @ s.sigma @ ch.X.T + ch.Y, ch.X @ s.mu + ch.d, ps.hbar, "xxpp")
        return out.to(ps.ordering)


# ---------------------------------------------------------------------------
# States


def state_to_abc(ps: PhaseSpaceState, modes=None) -> AbcTriple:
    """Density-matrix triple (type-wise) of a Gaussian state."""
    s = ps.to("xxpp")
    n, hbar = s.n, s.hbar
    W = wmat(n)
    V = s.sigma / hbar + np.eye(2 * n) / 2
    Q = W @ V @ W.conj().T
    if np.linalg.cond(Q) > 1e13:
        raise SingularContractionError("Q is singular")
    Qinv = np.linalg.inv(Q)
    beta = W @ s.mu / np.sqrt(hbar)
    X = xmat(n)
    A = X @ (np.eye(2 * n) - Qinv)
    b = X @ Qinv @ beta
    c = np.exp(-0.5 / hbar * s.mu @ np.linalg.solve(V, s.mu)) / np.sqrt(np.linalg.det(V))
    modes = list(range(n)) if modes is None else list(modes)
    return AbcTriple(A, b, c, WireLayout.dm(modes))


def abc_to_state(obj: AbcTriple, hbar: float = 2.0, ordering: str = "xxpp") -> PhaseSpaceState:
    """Covariance and mean of a Gaussian density matrix (normalization is not checked)."""
    obj = reorder(obj, "type-wise")
    if not all(w.kind.is_state for w in obj.layout) or obj.dim % 2:
        raise DomainError("abc_to_state expects a density matrix")
    n = obj.dim // 2
    X = xmat(n)
    W = wmat(n)
    Qinv = np.eye(2 * n) - X @ obj.A
    if np.linalg.cond(Qinv) > 1e13:
        raise SingularContractionError("1 - XA is singular")
    Q = np.linalg.inv(Qinv)
    sigma = hbar * (_real(W.conj().T @ Q @ W, "covariance") - np.eye(2 * n) / 2)
    beta = Q @ X @ obj.b
    mu = np.sqrt(hbar) * _real(W.conj().T @ beta, "mean")
    return PhaseSpaceState(sigma, mu, hbar, "xxpp").to(ordering)


# ---------------------------------------------------------------------------
# Unitaries


def unitary_to_abc(su: SymplecticUnitary, hbar: float = 2.0, modes=None) -> AbcTriple:
    """Triple of the unitary with symplectic action ``S`` and displacement ``d``.

    The phase of ``c`` cannot be recovered from phase-space data and is set to 0.
    """
    su = su.to("xxpp")
    n = su.n
    W = wmat(n)
    K = W @ su.S @ W.conj().T
    S1, S2 = K[:n, :n], K[:n, n:]
    S1c_inv = np.linalg.inv(S1.conj())
    gamma = (W @ su.d)[:n] / np.sqrt(hbar)
    A = np.block([[S2 @ S1c_inv, np.linalg.inv(S1.conj().T)], [S1c_inv, -S1c_inv @ S2.conj()]])
    b = np.concatenate([-S2 @ S1c_inv @ gamma.conj() + gamma, -S1c_inv @ gamma.conj()])
    SS = su.S @ su.S.T
    I = np.eye(2 * n)
    c = np.exp(-0.5 / hbar * su.d @ np.linalg.solve(I + SS, su.d)) / np.linalg.det((SS + I) / 2) ** 0.25
    modes = list(range(n)) if modes is None else list(modes)
    return AbcTriple(A, b, c, WireLayout.unitary(modes))


def abc_to_unitary(obj: AbcTriple, hbar: float = 2.0) -> SymplecticUnitary:
    obj = reorder(obj, "type-wise")
    if not all(w.kind in (WireKind.OUT_KET, WireKind.IN_KET) for w in obj.layout):
        raise DomainError("abc_to_unitary expects out-ket/in-ket wires")
    n = obj.dim // 2
    A = obj.A
    if np.max(np.abs(A @ A.conj().T - np.eye(2 * n))) > 1e-8:
        raise DomainError("A is not unitary")
    S1c = np.linalg.inv(A[n:, :n])
    S1 = S1c.conj()
    S2 = A[:n, :n] @ S1c
    K = np.block([[S1, S2], [S2.conj(), S1c]])
    W = wmat(n)
    S = _real(W.conj().T @ K @ W, "symplectic matrix")
    gamma = -S1 @ obj.b[n:].conj()
    d = np.sqrt(hbar) * _real(W.conj().T @ np.concatenate([gamma, gamma.conj()]), "displacement")
    return SymplecticUnitary(S, d)


# ---------------------------------------------------------------------------
# Channels


def _lmat(m: int) -> np.ndarray:
    I = np.eye(m)
    Z = np.zeros((m, m))
    return np.block(
        [[I, 1j * I, Z, Z], [Z, Z, I, -1j * I], [I, -1j * I, Z, Z], [Z, Z, I, 1j * I]]
    ) / np.sqrt(2)


# Row permutation taking the closed-form block layout to output-input order.
def _closed_form_to_output_input(m: int) -> np.ndarray:
    r = np.arange(m)
    return np.concatenate([r, 2 * m + r, m + r, 3 * m + r])


def channel_to_abc(ch: ChannelXY, hbar: float = 2.0, modes=None) -> AbcTriple:
    """Output-input triple of the channel ``(X, Y, d)``."""
    ch = ch.to("xxpp")
    m = ch.n
    I = np.eye(2 * m)
    xi = 0.5 * (I + ch.X @ ch.X.T + 2 * ch.Y / hbar)
    if np.linalg.cond(xi) > 1e13:
        raise SingularContractionError("xi is singular")
    xinv = np.linalg.inv(xi)
    L = _lmat(m)
    inner = np.block([[I - xinv, xinv @ ch.X], [ch.X.T @ xinv, I - ch.X.T @ xinv @ ch.X]])
    A = xmat(2 * m) @ L @ inner @ L.conj().T
    b = L.conj() @ np.concatenate([xinv @ ch.d, -ch.X.T @ xinv @ ch.d]) / np.sqrt(hbar)
    c = np.exp(-0.5 / hbar * ch.d @ xinv @ ch.d) / np.sqrt(np.linalg.det(xi))
    p = _closed_form_to_output_input(m)
    modes = list(range(m)) if modes is None else list(modes)
    return AbcTriple(A[np.ix_(p, p)], b[p], c, WireLayout.channel(modes))


def abc_to_channel(obj: AbcTriple, hbar: float = 2.0) -> ChannelXY:
    obj = reorder(obj, "output-input")
    kinds = obj.layout.kinds()
    if kinds != {WireKind.OUT_BRA, WireKind.OUT_KET, WireKind.IN_BRA, WireKind.IN_KET}:
        raise DomainError("abc_to_channel expects a channel layout")
    m = obj.dim // 4
    A_out = obj.A[: 2 * m, : 2 * m]
    G = obj.A[2 * m :, : 2 * m]
    X = xmat(m)
    W = wmat(m)
    Mo = np.eye(2 * m) - X @ A_out
    if np.linalg.cond(Mo) > 1e13:
        raise SingularContractionError("1 - X A_out is singular")
    Minv = np.linalg.inv(Mo)
    XF = _real(W.conj().T @ Minv @ X @ G.T @ X @ W, "X matrix")
    YF = hbar * (_real(W.conj().T @ Minv @ W, "Y matrix") - 0.5 * np.eye(2 * m) - 0.5 * XF @ XF.T)
    # the output mean for vacuum input is d
    beta = Minv @ X @ obj.b[: 2 * m]
    d = np.sqrt(hbar) * _real(W.conj().T @ beta, "displacement")
    return ChannelXY(XF, YF, d)


def conjugate_displacement(ch: ChannelXY, v, hbar: float = 2.0):
    """Pull ``D_v`` through the adjoint channel.

    Returns ``(u, factor)`` with ``|tr(Phi(sigma) D_v)| = factor * |tr(sigma D_u)|``.
    ``D_v`` displaces by ``v``; the factor is ``exp(-(Omega v)^T Y (Omega v) / (2 hbar^2))``.
    """
    ch = ch.to("xxpp")
    v = np.asarray(v, dtype=float)
    Om = omega(ch.n)
    u = -Om @ ch.X.T @ Om @ v
    w = Om @ v
    return u, float(np.exp(-(w @ ch.Y @ w) / (2 * hbar**2)))


def symplectic_of(obj: AbcTriple, hbar: float = 2.0) -> np.ndarray:
    return abc_to_unitary(obj, hbar).S
