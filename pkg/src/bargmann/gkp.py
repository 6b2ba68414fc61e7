"""Bounds on the GKP quality reachable by heralding a Gaussian state.

Stabilizer labels follow the convention in which the Weyl operator ``D_v``
satisfies ``|tr(rho D_v)| = exp(-v^T Sigma v / (2 hbar^2))`` for a Gaussian
state with covariance ``Sigma`` (``D_v`` shifts phase space by ``Omega v``).
With ``v = sqrt(2 pi hbar) e_j`` the effective squeezing reads
``sigma_j^2 = 2 Sigma_jj / hbar`` and the vacuum sits at 0 dB.

All covariance matrices here use xpxp ordering unless stated otherwise.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from . import catalog, stellar
from .core import AbcTriple, apply, join_all, outer, reorder
from .errors import DomainError
from .fock import displacement_expectation
from .phase_space import PhaseSpaceState, abc_to_channel, abc_to_state
from .sdp import GAP_TOL, LmiBlock, SdpProblem, solve

DIRECTIONS = ("q", "p", "sym")


def omega_xpxp(n: int) -> np.ndarray:
    return np.kron(np.eye(n), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def sigma2_from_expectation(value: complex) -> float:
    """``(2/pi) log(1/|value|)``; infinite when the expectation vanishes."""
    a = abs(value)
    if a == 0:
        return math.inf
    return 2 / math.pi * math.log(1 / a)


def to_db(sigma2: float) -> float:
    """Effective squeezing in dB, ``-10 log10(sigma^2)``."""
    if sigma2 == math.inf:
        return -math.inf
    if sigma2 <= 0:
        return math.inf
    return -10 * math.log10(sigma2)


@dataclass(frozen=True)
class EffectiveSqueezing:
    sigma_q2: float
    sigma_p2: float
    sigma_sym2: float
    db_sym: float

    @classmethod
    def from_sigmas(cls, sigma_q2: float, sigma_p2: float) -> "EffectiveSqueezing":
        sym = (sigma_q2 + sigma_p2) / 2
        return cls(float(sigma_q2), float(sigma_p2), float(sym), to_db(sym))

    def to_dict(self) -> dict:
        return {"sigma_q2": self.sigma_q2, "sigma_p2": self.sigma_p2, "sigma_sym2": self.sigma_sym2, "db_sym": self.db_sym}


def stabilizer(direction: str, hbar: float = 2.0) -> np.ndarray:
    if direction == "q":
        e = np.array([1.0, 0.0])
    elif direction == "p":
        e = np.array([0.0, 1.0])
    else:
        raise DomainError(f"direction must be 'q' or 'p', got {direction!r}")
    return math.sqrt(2 * math.pi * hbar) * e


def effective_squeezing(state, hbar: float = 2.0) -> EffectiveSqueezing:
    """Effective squeezing of a single-mode state.

    ``state`` is a Gaussian ket or density matrix (closed-form characteristic
    function), or a finite Fock vector / density matrix ``G[bra, ket]`` (exact
    displacement matrix elements).
    """
    if isinstance(state, AbcTriple):
        if state.layout.is_ket:
            state = outer(state)
        ps = abc_to_state(state, hbar, "xpxp")
        if ps.n != 1:
            raise DomainError("effective squeezing is defined for single-mode states")
        s = ps.sigma
        return EffectiveSqueezing.from_sigmas(2 * s[0, 0] / hbar, 2 * s[1, 1] / hbar)
    data = np.asarray(state, dtype=complex)
    if data.ndim not in (1, 2):
        raise DomainError("Fock input must be a vector or a square matrix")
    out = []
    for d in ("q", "p"):
        v = stabilizer(d, hbar)
        w = np.array([v[1], -v[0]])
        alpha = (w[0] + 1j * w[1]) / math.sqrt(2 * hbar)
        out.append(sigma2_from_expectation(displacement_expectation(data, alpha)))
    return EffectiveSqueezing.from_sigmas(*out)


def channel_factor_bound(Y, v, hbar: float = 2.0) -> float:
    """Upper bound ``exp(-v^T Y v / (2 hbar^2))`` on ``|tr(rho D_v)|``."""
    Y = np.asarray(Y, dtype=float)
    v = np.asarray(v, dtype=float)
    return float(np.exp(-(v @ Y @ v) / (2 * hbar**2)))


def channel_factor_db(Y, hbar: float = 2.0) -> float:
    """Symmetric effective-squeezing bound (dB) implied by a factored single-mode channel."""
    s = [sigma2_from_expectation(channel_factor_bound(Y, stabilizer(d, hbar), hbar)) for d in ("q", "p")]
    return to_db((s[0] + s[1]) / 2)


# ---------------------------------------------------------------------------
# SDP bound


def figure_of_merit(direction="sym", m: int = 1, hbar: float = 2.0, v=None, lattice=None) -> np.ndarray:
    """The objective matrix ``M``.

    ``v`` gives ``v v^T / (pi hbar^2)``; ``direction`` 'q'/'p' uses the sensor
    stabilizer of mode 0; 'sym' gives ``1/hbar``; ``lattice`` (a symplectic
    ``S``) gives ``S^T S / hbar``.
    """
    if v is not None:
        v = np.asarray(v, dtype=float)
        if v.shape != (2 * m,):
            raise DomainError("stabilizer vector must have length 2m")
        return np.outer(v, v) / (math.pi * hbar**2)
    if lattice is not None:
        S = np.asarray(lattice, dtype=float)
        return S.T @ S / hbar
    if direction == "sym":
        return np.eye(2 * m) / hbar
    if m != 1:
        raise DomainError("'q'/'p' directions need m = 1; pass v for multimode targets")
    return figure_of_merit(m=1, hbar=hbar, v=stabilizer(direction, hbar))


def _xpxp_sigma(sigma, hbar: float) -> np.ndarray:
    if isinstance(sigma, PhaseSpaceState):
        return sigma.to("xpxp").sigma
    if isinstance(sigma, AbcTriple):
        return abc_to_state(sigma, hbar, "xpxp").sigma
    S = np.asarray(sigma, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1] or S.shape[0] % 2:
        raise DomainError("covariance must be a 2N x 2N matrix")
    return (S + S.T) / 2


def bound_problems(sigma, m: int, M, hbar: float = 2.0, signs: str = "consistent"):
    """Primal and dual SDPs for factoring a channel out of the first ``m`` modes.

    ``signs='consistent'`` uses ``Z >= -i hbar/2 Omega_m`` together with the
    ``+i hbar/2 Omega_n`` padding, so that the two LMIs add up to the
    uncertainty relation of ``sigma``. ``signs='as-displayed'`` flips the
    first LMI to ``Z >= +i hbar/2 Omega_m``.
    """
    S = _xpxp_sigma(sigma, hbar)
    N = S.shape[0] // 2
    n = N - m
    if m < 1 or n < 0:
        raise DomainError("need 1 <= m <= number of modes")
    if signs not in ("consistent", "as-displayed"):
        raise DomainError("signs must be 'consistent' or 'as-displayed'")
    s1 = 1.0 if signs == "consistent" else -1.0
    Om_m = omega_xpxp(m)
    pad = np.zeros((2 * N, 2 * N), dtype=complex)
    pad[2 * m :, 2 * m :] = 1j * hbar / 2 * omega_xpxp(n)
    K = S + pad
    P = np.zeros((2 * N, 2 * m))
    P[: 2 * m, : 2 * m] = np.eye(2 * m)
    M = np.asarray(M, dtype=float)
    primal = SdpProblem(
        M,
        [LmiBlock(s1 * 1j * hbar / 2 * Om_m, [(1.0, np.eye(2 * m))]), LmiBlock(K, [(-1.0, P)])],
        2 * m,
        "max",
    )
    # Lagrangian dual: stationarity forces W_11 = M + W1 with W1 >= 0
    Kd = K.copy()
    Kd[: 2 * m, : 2 * m] += s1 * 1j * hbar / 2 * Om_m
    dual = SdpProblem(
        Kd,
        [LmiBlock(-M.astype(complex), [(1.0, P.T)]), LmiBlock(np.zeros((2 * N, 2 * N)), [(1.0, np.eye(2 * N))])],
        2 * N,
        "min",
    )
    return primal, dual


@dataclass
class BoundResult:
    objective: float
    Z: np.ndarray | None
    bound_on_abs_trace: float
    effective_squeezing_bound_db: float
    gap: float
    dual_value: float = math.nan
    status: str = "optimal"
    residual: float = math.nan
    path: str = "primal"

    def to_dict(self) -> dict:
        Z = None if self.Z is None else {"re": self.Z.real.tolist(), "im": self.Z.imag.tolist()}
        return {
            "objective": self.objective,
            "dual_value": self.dual_value,
            "gap": self.gap,
            "status": self.status,
            "bound_on_abs_trace": self.bound_on_abs_trace,
            "effective_squeezing_bound_db": self.effective_squeezing_bound_db,
            "lmi_residual": self.residual,
            "Z": Z,
        }


def sdp_bound(
    sigma,
    m: int = 1,
    direction: str = "sym",
    hbar: float = 2.0,
    v=None,
    lattice=None,
    tol: float = GAP_TOL,
    signs: str = "consistent",
    certify: bool = True,
) -> BoundResult:
    """Best channel-factoring bound on the effective squeezing of the first ``m`` modes.

    The objective ``t`` is a lower bound on ``sigma^2`` (on ``sigma_sym^2`` for
    the symmetric figure of merit), hence the dB bound ``-10 log10 t``.
    ``bound_on_abs_trace`` is ``exp(-pi t / 2)``, which for a stabilizer ``v``
    equals ``exp(-v^T Re(Z) v / (2 hbar^2))``.
    """
    M = figure_of_merit(direction, m, hbar, v, lattice)
    primal, dual = bound_problems(sigma, m, M, hbar, signs)
    sol = solve(primal, tol=tol, dual=dual if certify else None)
    if sol.status != "optimal":
        return BoundResult(sol.value, sol.variable, math.nan, math.nan, sol.gap, sol.dual_value, sol.status, sol.residual, sol.path)
    t = sol.value
    return BoundResult(
        t, sol.variable, math.exp(-math.pi * t / 2), to_db(t), sol.gap, sol.dual_value, sol.status, sol.residual, sol.path
    )


def schur_bound(sigma, m: int = 1, direction: str = "sym", hbar: float = 2.0, v=None, lattice=None) -> float:
    """Closed-form optimum ``tr(M S)`` with ``S`` the Schur complement of the padded covariance.

    Valid when ``Sigma_N + i hbar/2 Omega_n`` is positive definite: then
    ``Z = S`` is feasible and dominates every feasible ``Z``.
    """
    M = figure_of_merit(direction, m, hbar, v, lattice)
    S = _xpxp_sigma(sigma, hbar)
    B = S[2 * m :, 2 * m :] + 1j * hbar / 2 * omega_xpxp(S.shape[0] // 2 - m)
    if B.size and np.linalg.eigvalsh(B).min() <= 0:
        raise DomainError("heralded block is not positive definite; closed form does not apply")
    C = S[: 2 * m, 2 * m :]
    Z = S[: 2 * m, : 2 * m] - (C @ np.linalg.solve(B, C.T) if B.size else 0)
    return float(np.real(np.trace(M @ Z)))


# ---------------------------------------------------------------------------
# Stellar (channel-factoring) bound


@dataclass
class StellarBound:
    objective: float
    Y: np.ndarray
    effective_squeezing_bound_db: float
    feasible: bool = True

    def to_dict(self) -> dict:
        return {
            "objective": self.objective,
            "Y": self.Y.tolist(),
            "effective_squeezing_bound_db": self.effective_squeezing_bound_db,
            "feasible": self.feasible,
        }


def stellar_bound(dm: AbcTriple, m: int = 1, direction: str = "sym", hbar: float = 2.0, v=None) -> StellarBound:
    """Bound from the channel of a physical stellar decomposition of ``dm``.

    Uses the pure-core construction when ``m >= n`` and the general mixed
    construction otherwise; raises when no physical decomposition exists.
    """
    n = len({w.mode for w in dm.layout}) - m
    dec = stellar.pure_core_decompose(dm, m) if m >= n else stellar.mixed_decompose(dm, m)
    if not dec.feasible:
        raise DomainError("the state admits no physical stellar decomposition for this split")
    Y = abc_to_channel(dec.channel, hbar).to("xpxp").Y
    M = figure_of_merit(direction, m, hbar, v)
    t = float(np.trace(M @ Y))
    return StellarBound(t, Y, to_db(t))


# ---------------------------------------------------------------------------
# Staircase circuits


@dataclass(frozen=True)
class StaircaseSpec:
    """Squeezed vacua ``S(+-r_i)|0>`` chained by beamsplitters, loss before each detector.

    ``output_loss`` additionally applies the same loss to the candidate mode.
    """

    squeezings_db: tuple
    thetas: tuple
    loss_eta: float
    output_loss: bool = False

    def __post_init__(self):
        sq = tuple(float(x) for x in self.squeezings_db)
        th = tuple(float(x) for x in self.thetas)
        object.__setattr__(self, "squeezings_db", sq)
        object.__setattr__(self, "thetas", th)
        if len(sq) < 2:
            raise DomainError("a staircase needs at least two modes")
        if len(th) != len(sq) - 1:
            raise DomainError("need one beamsplitter angle per neighbouring pair of modes")
        if any(x < 0 for x in sq):
            raise DomainError("squeezing levels must be non-negative (dB)")
        if not 0 <= self.loss_eta <= 1:
            raise DomainError("loss must lie in [0, 1]")

    @property
    def modes(self) -> int:
        return len(self.squeezings_db)


def build_staircase(spec: StaircaseSpec, hbar: float = 2.0) -> tuple[AbcTriple, PhaseSpaceState]:
    """Density matrix (type-wise) and xpxp covariance of the staircase output.

    Mode 0 is the candidate; modes ``1..M-1`` are heralded. Squeezing signs
    alternate, ``S(r)`` on even and ``S(-r)`` on odd modes; beamsplitter ``i``
    acts on modes ``(i, i+1)`` in increasing order of ``i``.
    """
    M = spec.modes
    kets = [
        catalog.squeezed_vacuum(catalog.db_to_r(db), 0.0 if i % 2 == 0 else math.pi, mode=i)
        for i, db in enumerate(spec.squeezings_db)
    ]
    psi = join_all(kets)
    for i, th in enumerate(spec.thetas):
        psi = apply(catalog.beamsplitter(th, 0.0, (i, i + 1)), psi)
    rho = outer(psi)
    lossy = range(M) if spec.output_loss else range(1, M)
    if spec.loss_eta > 0:
        for i in lossy:
            rho = apply(catalog.loss(1 - spec.loss_eta, i), rho)
    rho = reorder(rho, "type-wise")
    return rho, abc_to_state(rho, hbar, "xpxp")


def staircase_bound(spec: StaircaseSpec, direction: str = "sym", hbar: float = 2.0, tol: float = GAP_TOL) -> BoundResult:
    _, ps = build_staircase(spec, hbar)
    return sdp_bound(ps, 1, direction, hbar, tol=tol)


@dataclass
class InvarianceReport:
    widths: list
    bounds: list
    max_rel_dev: float
    ok: bool
    statuses: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "widths": self.widths,
            "objectives": [b.objective for b in self.bounds],
            "bounds_db": [b.effective_squeezing_bound_db for b in self.bounds],
            "gaps": [b.gap for b in self.bounds],
            "statuses": self.statuses,
            "max_rel_dev": self.max_rel_dev,
            "ok": self.ok,
        }


def staircase_invariance_check(specs, direction: str = "sym", hbar: float = 2.0, rtol: float = 1e-6) -> InvarianceReport:
    """SDP bounds of staircases of different widths sharing the first two modes."""
    specs = list(specs)
    ref = specs[0]
    for s in specs[1:]:
        if (
            s.squeezings_db[:2] != ref.squeezings_db[:2]
            or s.thetas[:1] != ref.thetas[:1]
            or s.loss_eta != ref.loss_eta
            or s.output_loss != ref.output_loss
        ):
            raise DomainError("staircases must share the first two squeezings, the first angle and the loss")
    bounds = [staircase_bound(s, direction, hbar) for s in specs]
    statuses = [b.status for b in bounds]
    vals = [b.objective for b in bounds]
    if all(st == "optimal" for st in statuses):
        dev = max(abs(x - vals[0]) / max(abs(vals[0]), 1e-300) for x in vals)
    else:
        dev = math.nan
    ok = all(st == "optimal" for st in statuses) and dev <= rtol
    return InvarianceReport([s.modes for s in specs], bounds, dev, ok, statuses)


# ---------------------------------------------------------------------------
# Loss sweeps


def loss_grid(start: float, stop: float, count: int) -> np.ndarray:
    if count < 1:
        raise DomainError("sweep needs at least one point")
    return np.linspace(start, stop, count)


def loss_sweep(squeezings_db, thetas, etas, hbar: float = 2.0, output_loss: bool = False, stellar_too: bool = True):
    """Rows ``(eta, bound_db_sdp, bound_db_stellar, gap)`` for the symmetric figure of merit.

    The stellar column uses the pure-core decomposition and is NaN where
    that decomposition is unavailable.
    """
    rows = []
    for eta in etas:
        spec = StaircaseSpec(squeezings_db, thetas, float(eta), output_loss)
        dm, ps = build_staircase(spec, hbar)
        b = sdp_bound(ps, 1, "sym", hbar)
        st = math.nan
        if stellar_too:
            try:
                st = stellar_bound(dm, 1, "sym", hbar).effective_squeezing_bound_db
            except (DomainError, ArithmeticError, np.linalg.LinAlgError, ValueError):
                st = math.nan
        rows.append((float(eta), b.effective_squeezing_bound_db, st, b.gap))
    return rows


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["eta", "bound_db_sdp", "bound_db_stellar", "gap"])
    for r in rows:
        w.writerow([format(float(x), ".17g") for x in r])
    return buf.getvalue()
