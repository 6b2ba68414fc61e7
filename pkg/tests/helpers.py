"""Random physical instances and comparison helpers shared by the tests."""

import numpy as np
from scipy.linalg import expm

from bargmann import catalog, core
from bargmann import phase_space as ps

HBAR = 2.0


def rand_symplectic(rng, n, scale=0.4):
    H = rng.normal(size=(2 * n, 2 * n))
    H = (H + H.T) / 2 * scale
    return expm(ps.omega(n) @ H)


def rand_state(rng, n, hbar=HBAR, max_nbar=1.0, mean=0.5):
    """Random mixed Gaussian state as a phase-space object (xxpp)."""
    S = rand_symplectic(rng, n)
    nb = rng.uniform(0, max_nbar, n)
    D = np.diag(np.concatenate([nb + 0.5, nb + 0.5])) * hbar
    return ps.PhaseSpaceState(S @ D @ S.T, rng.normal(size=2 * n) * mean, hbar)


def rand_pure_state(rng, n, hbar=HBAR, mean=0.5):
    S = rand_symplectic(rng, n)
    return ps.PhaseSpaceState(S @ S.T * hbar / 2, rng.normal(size=2 * n) * mean, hbar)


def rand_unitary(rng, n, hbar=HBAR, mean=0.3):
    return ps.SymplecticUnitary(rand_symplectic(rng, n), rng.normal(size=2 * n) * mean)


def rand_ket(rng, n, hbar=HBAR):
    """Random normalized Gaussian ket: a random Gaussian unitary on vacuum."""
    U = ps.unitary_to_abc(rand_unitary(rng, n, hbar), hbar)
    return core.reorder(core.apply(U, catalog.vacuum(n)), "type-wise")


def rand_channel(rng, m, hbar=HBAR, max_nbar=0.5, mean=0.3):
    """Random Gaussian channel from a symplectic dilation with a thermal environment."""
    S = rand_symplectic(rng, 2 * m)
    nb = rng.uniform(0, max_nbar, m)
    idx = np.r_[0:m, 2 * m : 3 * m]
    env = np.r_[m : 2 * m, 3 * m : 4 * m]
    X = S[np.ix_(idx, idx)]
    Se = S[np.ix_(idx, env)]
    Y = Se @ (hbar * np.diag(np.r_[nb + 0.5, nb + 0.5])) @ Se.T
    return ps.ChannelXY(X, Y, rng.normal(size=2 * m) * mean)


def lossy_state(rng, n, lossy_modes, eta, hbar=HBAR):
    """Random pure state followed by loss ``eta`` (transmissivity) on ``lossy_modes``."""
    st = rand_pure_state(rng, n, hbar)
    X = np.eye(2 * n)
    Y = np.zeros((2 * n, 2 * n))
    for j in lossy_modes:
        for q in (j, j + n):
            X[q, q] = np.sqrt(eta)
            Y[q, q] = hbar / 2 * (1 - eta)
    return ps.PhaseSpaceState(X @ st.sigma @ X.T + Y, X @ st.mu, hbar)


def triple_error(a, b):
    """Max of entrywise A, b errors and the relative |c| error, after aligning layouts."""
    b = core.reorder(b, a.layout)
    return max(
        float(np.abs(a.A - b.A).max(initial=0.0)),
        float(np.abs(a.b - b.b).max(initial=0.0)),
        abs(abs(a.c) / abs(b.c) - 1),
    )
