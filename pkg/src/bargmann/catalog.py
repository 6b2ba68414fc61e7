r"""Abc triples of standard Gaussian states, unitaries, channels and kernels.

Conventions:

* kets use ``ket`` wires; density matrices are type-wise ``[bras..., kets...]``
  and their Fock tensor ``G[n, m]`` is ``<m|rho|n>``;
* unitaries are ``[out-kets..., in-kets...]`` and ``G[out, in]`` is
  ``<out|U|in>``;
* channels are returned in output-input order
  ``[out-bras, out-kets, in-bras, in-kets]``.

Squeezing follows ``S(r e^{i phi}) = exp((r e^{-i phi} a^2 - r e^{i phi} a^{dagger 2})/2)``
so that ``S(r)|0>`` has ``A = -tanh r``. Squeezing in dB uses
``dB = 10 log10(e^{2r})``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import AbcTriple, Wire, WireKind, WireLayout
from .errors import DomainError, UnknownNameError

X2 = np.array([[0, 1], [1, 0]], dtype=complex)


def db_to_r(db: float) -> float:
    """Squeezing parameter for a squeezing level in dB (``dB = 10 log10 e^{2r}``)."""
    return float(db) * np.log(10) / 20


def r_to_db(r: float) -> float:
    return 20 * float(r) / np.log(10)


def _xmat(n: int) -> np.ndarray:
    I = np.eye(n)
    return np.block([[np.zeros((n, n)), I], [I, np.zeros((n, n))]]).astype(complex)


def _require(cond: bool, msg: str):
    if not cond:
        raise DomainError(msg)


# ---------------------------------------------------------------------------
# States


def vacuum(n: int = 1, modes=None) -> AbcTriple:
    modes = list(range(n)) if modes is None else list(modes)
    k = len(modes)
    return AbcTriple(np.zeros((k, k)), np.zeros(k), 1.0, WireLayout.ket(modes))


def coherent(alpha: complex, mode: int = 0) -> AbcTriple:
    alpha = complex(alpha)
    return AbcTriple([[0]], [alpha], np.exp(-abs(alpha) ** 2 / 2), WireLayout.ket([mode]))


def squeezed_vacuum(r: float, phi: float = 0.0, mode: int = 0) -> AbcTriple:
    _require(r >= 0, "squeezing r must be non-negative")
    return AbcTriple(
        [[-np.exp(1j * phi) * np.tanh(r)]], [0], 1 / np.sqrt(np.cosh(r)), WireLayout.ket([mode])
    )


def displaced_squeezed(alpha: complex, r: float, phi: float = 0.0, mode: int = 0) -> AbcTriple:
    """``D(alpha) S(r, phi)|0>``."""
    _require(r >= 0, "squeezing r must be non-negative")
    alpha = complex(alpha)
    et = np.exp(1j * phi) * np.tanh(r)
    b = alpha + np.conj(alpha) * et
    c = np.exp(-0.5 * abs(alpha) ** 2 - 0.5 * np.conj(alpha) ** 2 * et) / np.sqrt(np.cosh(r))
    return AbcTriple([[-et]], [b], c, WireLayout.ket([mode]))


def two_mode_squeezed_vacuum(r: float, phi: float = 0.0, modes=(0, 1)) -> AbcTriple:
    _require(r >= 0, "squeezing r must be non-negative")
    A = np.exp(1j * phi) * np.tanh(r) * X2
    return AbcTriple(A, [0, 0], 1 / np.cosh(r), WireLayout.ket(modes))


def quadrature_eigenstate(x: float, phi: float = 0.0, hbar: float = 2.0, mode: int = 0) -> AbcTriple:
    """Improper eigenstate ``|x>_phi`` of the rotated quadrature (not normalizable)."""
    A = -np.exp(2j * phi)
    b = np.sqrt(2 / hbar) * x * np.exp(1j * phi)
    c = np.exp(-(x**2) / (2 * hbar)) / (np.pi * hbar) ** 0.25
    return AbcTriple([[A]], [b], c, WireLayout.ket([mode]))


def thermal(nbar: float, mode: int = 0) -> AbcTriple:
    _require(nbar >= 0, "mean photon number must be non-negative")
    return AbcTriple(nbar / (nbar + 1) * X2, [0, 0], 1 / (nbar + 1), WireLayout.dm([mode]))


# ---------------------------------------------------------------------------
# Unitaries


def identity(n: int = 1, modes=None) -> AbcTriple:
    modes = list(range(n)) if modes is None else list(modes)
    k = len(modes)
    return AbcTriple(_xmat(k), np.zeros(2 * k), 1.0, WireLayout.unitary(modes))


def rotation(theta: float, mode: int = 0) -> AbcTriple:
    return AbcTriple(np.exp(1j * theta) * X2, [0, 0], 1.0, WireLayout.unitary([mode]))


def displacement(alpha: complex, mode: int = 0) -> AbcTriple:
    alpha = complex(alpha)
    return AbcTriple(X2, [alpha, -np.conj(alpha)], np.exp(-abs(alpha) ** 2 / 2), WireLayout.unitary([mode]))


def squeezer(r: float, phi: float = 0.0, mode: int = 0) -> AbcTriple:
    t, s = np.tanh(r), 1 / np.cosh(r)
    A = [[-np.exp(1j * phi) * t, s], [s, np.exp(-1j * phi) * t]]
    return AbcTriple(A, [0, 0], 1 / np.sqrt(np.cosh(r)), WireLayout.unitary([mode]))


def beamsplitter(theta: float, phi: float = 0.0, modes=(0, 1)) -> AbcTriple:
    c, s = np.cos(theta), np.sin(theta)
    e = np.exp(1j * phi)
    U = np.array([[c, -np.conj(e) * s], [e * s, c]])
    return _passive(U, modes)


def _passive(U: np.ndarray, modes) -> AbcTriple:
    n = U.shape[0]
    A = np.block([[np.zeros((n, n)), U], [U.T, np.zeros((n, n))]])
    return AbcTriple(A, np.zeros(2 * n), 1.0, WireLayout.unitary(modes))


def interferometer(U, modes=None) -> AbcTriple:
    """Passive linear optics with mode transformation matrix ``U`` (unitary)."""
    U = np.asarray(U, dtype=complex)
    n = U.shape[0]
    if np.max(np.abs(U.conj().T @ U - np.eye(n))) > 1e-8:
        raise DomainError("interferometer matrix is not unitary")
    return _passive(U, list(range(n)) if modes is None else modes)


def real_interferometer(V, modes=None) -> AbcTriple:
    V = np.asarray(V, dtype=float)
    if np.max(np.abs(V.T @ V - np.eye(V.shape[0]))) > 1e-8:
        raise DomainError("real interferometer matrix is not orthogonal")
    return interferometer(V, modes)


def two_mode_squeezer(r: float, phi: float = 0.0, modes=(0, 1)) -> AbcTriple:
    t, s = np.tanh(r), 1 / np.cosh(r)
    e = np.exp(1j * phi)
    A = np.array(
        [
            [0, e * t, s, 0],
            [e * t, 0, 0, s],
            [s, 0, 0, -np.conj(e) * t],
            [0, s, -np.conj(e) * t, 0],
        ]
    )
    return AbcTriple(A, np.zeros(4), 1 / np.cosh(r), WireLayout.unitary(modes))


# ---------------------------------------------------------------------------
# Channels and operators


def loss(eta: float, mode: int = 0) -> AbcTriple:
    """Pure-loss channel with transmissivity ``eta`` (output-input order)."""
    _require(0 <= eta <= 1, "transmissivity must lie in [0, 1]")
    s = np.sqrt(eta)
    A = np.array(
        [[0, 0, s, 0], [0, 0, 0, s], [s, 0, 0, 1 - eta], [0, s, 1 - eta, 0]], dtype=complex
    )
    return AbcTriple(A, np.zeros(4), 1.0, WireLayout.channel([mode]))


def amplifier(g: float, mode: int = 0) -> AbcTriple:
    """Phase-insensitive amplifier with gain ``g >= 1`` (output-input order)."""
    _require(g >= 1, "gain must be at least 1")
    s, t = 1 / np.sqrt(g), 1 - 1 / g
    A = np.array([[0, t, s, 0], [t, 0, 0, s], [s, 0, 0, 0], [0, s, 0, 0]], dtype=complex)
    return AbcTriple(A, np.zeros(4), 1 / g, WireLayout.channel([mode]))


def fock_damping(beta: float, mode: int = 0) -> AbcTriple:
    """The operator ``exp(-beta N)``."""
    _require(beta >= 0, "damping beta must be non-negative")
    return AbcTriple(np.exp(-beta) * X2, [0, 0], 1.0, WireLayout.unitary([mode]))


def loss_kraus(eta: float, mode: int = 0, env_mode: int = 1) -> AbcTriple:
    """Continuous Kraus family of the loss channel.

    The Kraus index is an ``out-ket`` wire on ``env_mode``; tracing it against
    the conjugate family (see :func:`~bargmann.core.partial_trace`) rebuilds
    the channel. Variables are ordered (index, out, in).
    """
    _require(0 <= eta <= 1, "transmissivity must lie in [0, 1]")
    s, t = np.sqrt(1 - eta), np.sqrt(eta)
    A = np.array([[0, 0, -s], [0, 0, t], [-s, t, 0]], dtype=complex)
    wires = (
        Wire(env_mode, WireKind.OUT_KET),
        Wire(mode, WireKind.OUT_KET),
        Wire(mode, WireKind.IN_KET),
    )
    return AbcTriple(A, np.zeros(3), 1.0, WireLayout(wires, "custom"))


# ---------------------------------------------------------------------------
# Representation kernels


def quadrature_kernel(phi: float = 0.0, hbar: float = 2.0, mode: int = 0) -> AbcTriple:
    """``K_phi(lambda, z)``: the out wire carries the quadrature variable."""
    e = np.exp(-1j * phi)
    A = np.array([[-1 / hbar, e * np.sqrt(2 / hbar)], [e * np.sqrt(2 / hbar), -(e**2)]])
    return AbcTriple(A, [0, 0], (np.pi * hbar) ** -0.25, WireLayout.unitary([mode]))


def stratonovich_weyl(s: float, n: int = 1) -> AbcTriple:
    """``Delta_s`` over variables ``(z, z*, w, y)`` with the first pair as outputs."""
    if s == 1:
        raise DomainError("the s = 1 Stratonovich-Weyl kernel is singular")
    X = _xmat(n)
    I = np.eye(2 * n)
    A = 2 / (s - 1) * np.block([[X, -I], [-I, (s + 1) / 2 * X]])
    c = 2**n / (np.pi**n * abs(s - 1) ** n)
    return AbcTriple(A, np.zeros(4 * n), c, WireLayout.channel(range(n)))


def characteristic_kernel(s: float, n: int = 1) -> AbcTriple:
    """``T_s`` over variables ``(z, z*, w, y)`` with the first pair as outputs."""
    X = _xmat(n)
    Om = np.block([[np.zeros((n, n)), np.eye(n)], [-np.eye(n), np.zeros((n, n))]])
    A = np.block([[(s - 1) / 2 * X, Om.T], [Om, X]])
    return AbcTriple(A, np.zeros(4 * n), 1.0, WireLayout.channel(range(n)))


# ---------------------------------------------------------------------------
# Name-based lookup


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    parameters: tuple[str, ...]
    builder: Callable[..., AbcTriple]

    def __call__(self, **params) -> AbcTriple:
        unknown = set(params) - set(self.parameters) - {"mode", "modes", "hbar", "n"}
        if unknown:
            raise DomainError(f"{self.name}: unknown parameters {sorted(unknown)}")
        return self.builder(**params)


STATES = {
    e.name: e
    for e in [
        CatalogEntry("vacuum", (), vacuum),
        CatalogEntry("coherent", ("alpha",), coherent),
        CatalogEntry("squeezed_vacuum", ("r", "phi"), squeezed_vacuum),
        CatalogEntry("displaced_squeezed", ("alpha", "r", "phi"), displaced_squeezed),
        CatalogEntry("two_mode_squeezed_vacuum", ("r", "phi"), two_mode_squeezed_vacuum),
        CatalogEntry("quadrature_eigenstate", ("x", "phi"), quadrature_eigenstate),
        CatalogEntry("thermal", ("nbar",), thermal),
    ]
}

UNITARIES = {
    e.name: e
    for e in [
        CatalogEntry("identity", (), identity),
        CatalogEntry("rotation", ("theta",), rotation),
        CatalogEntry("displacement", ("alpha",), displacement),
        CatalogEntry("squeezer", ("r", "phi"), squeezer),
        CatalogEntry("beamsplitter", ("theta", "phi"), beamsplitter),
        CatalogEntry("interferometer", ("U",), interferometer),
        CatalogEntry("real_interferometer", ("V",), real_interferometer),
        CatalogEntry("two_mode_squeezer", ("r", "phi"), two_mode_squeezer),
    ]
}

CHANNELS = {
    e.name: e
    for e in [
        CatalogEntry("loss", ("eta",), loss),
        CatalogEntry("amplifier", ("g",), amplifier),
        CatalogEntry("fock_damping", ("beta",), fock_damping),
        CatalogEntry("loss_kraus", ("eta", "env_mode"), loss_kraus),
    ]
}

KERNELS = {
    e.name: e
    for e in [
        CatalogEntry("quadrature_kernel", ("phi",), quadrature_kernel),
        CatalogEntry("stratonovich_weyl", ("s",), stratonovich_weyl),
        CatalogEntry("characteristic_kernel", ("s",), characteristic_kernel),
    ]
}

ALL = {**STATES, **UNITARIES, **CHANNELS, **KERNELS}


def _lookup(table: dict, name: str) -> CatalogEntry:
    try:
        return table[name]
    except KeyError:
        raise UnknownNameError(f"unknown catalog entry {name!r}") from None


def state(name: str, **params) -> AbcTriple:
    return _lookup(STATES, name)(**params)


def unitary(name: str, **params) -> AbcTriple:
    return _lookup(UNITARIES, name)(**params)


def channel(name: str, **params) -> AbcTriple:
    return _lookup(CHANNELS, name)(**params)


def kernel(name: str, **params) -> AbcTriple:
    return _lookup(KERNELS, name)(**params)


def build(name: str, **params) -> AbcTriple:
    """Look ``name`` up in every table."""
    return _lookup(ALL, name)(**params)
