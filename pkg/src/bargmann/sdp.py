"""Small dense SDP solver with a log-barrier path-following method.

Problems have one Hermitian matrix variable ``Z`` and constraints of the form

    F0 + sum_j coeff_j * P_j Z P_j^dagger  >= 0,

with a linear objective ``Re tr(C Z)``. Internally ``Z`` is written in an
orthonormal basis of Hermitian matrices, so the unknowns are real numbers
and every constraint is an affine map from ``R^N`` to Hermitian matrices.

When the primal has no strictly feasible point (common for pure-state
data) facial reduction restores one: a certificate ``W >= 0`` orthogonal to
every constraint direction pins the feasible set to a face, which becomes a
set of linear equalities plus smaller LMI blocks. Iterates stay inside a
large box so that unbounded problems are reported instead of diverging.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import null_space

from .errors import DomainError

GAP_TOL = 1e-8
FEAS_TOL = 1e-9
MU = 4.0  # barrier parameter growth (centering parameter 1/MU = 0.25)
NEWTON_TOL = 1e-8  # half squared Newton decrement at which a point counts as centred


@dataclass(frozen=True)
class LmiBlock:
    """``constant + sum(coeff * P @ Z @ P^dagger) >= 0``."""

    constant: np.ndarray
    terms: tuple = ()

    def __post_init__(self):
        F0 = np.array(self.constant, dtype=complex)
        if F0.ndim != 2 or F0.shape[0] != F0.shape[1]:
            raise DomainError("LMI constant must be square")
        if np.max(np.abs(F0 - F0.conj().T), initial=0.0) > 1e-12 * max(1.0, np.abs(F0).max(initial=0.0)):
            raise DomainError("LMI constant must be Hermitian")
        object.__setattr__(self, "constant", (F0 + F0.conj().T) / 2)
        terms = tuple((float(a), np.array(P, dtype=complex)) for a, P in self.terms)
        for _, P in terms:
            if P.shape[0] != F0.shape[0]:
                raise DomainError("LMI term has the wrong number of rows")
        object.__setattr__(self, "terms", terms)

    @property
    def dim(self) -> int:
        return self.constant.shape[0]

    def evaluate(self, Z: np.ndarray) -> np.ndarray:
        out = self.constant.copy()
        for a, P in self.terms:
            out = out + a * P @ Z @ P.conj().T
        return (out + out.conj().T) / 2


@dataclass(frozen=True)
class SdpProblem:
    objective: np.ndarray
    constraints: tuple
    variable_dim: int
    sense: str = "max"
    real_variable: bool = False

    def __post_init__(self):
        C = np.array(self.objective, dtype=complex)
        if C.shape != (self.variable_dim, self.variable_dim):
            raise DomainError("objective must match the variable dimension")
        if self.sense not in ("max", "min"):
            raise DomainError("sense must be 'max' or 'min'")
        object.__setattr__(self, "objective", (C + C.conj().T) / 2)
        object.__setattr__(self, "constraints", tuple(self.constraints))

    def value(self, Z) -> float:
        return float(np.real(np.trace(self.objective @ Z)))

    def residual(self, Z) -> float:
        """Smallest eigenvalue over all constraint blocks at ``Z``."""
        return min(float(np.linalg.eigvalsh(c.evaluate(Z)).min()) for c in self.constraints)


@dataclass
class SdpSolution:
    value: float
    variable: np.ndarray | None
    dual_value: float
    gap: float
    status: str
    iterations: int = 0
    residual: float = np.nan
    path: str = "primal"
    dual_variables: list = field(default_factory=list)


# ---------------------------------------------------------------------------
# Real parametrization


def hermitian_basis(n: int, real: bool = False) -> np.ndarray:
    """Orthonormal basis (Frobenius) of n x n Hermitian (or real symmetric) matrices."""
    B = []
    for j in range(n):
        E = np.zeros((n, n), dtype=complex)
        E[j, j] = 1
        B.append(E)
    s = 1 / np.sqrt(2)
    for j in range(n):
        for k in range(j + 1, n):
            E = np.zeros((n, n), dtype=complex)
            E[j, k] = E[k, j] = s
            B.append(E)
            if not real:
                E = np.zeros((n, n), dtype=complex)
                E[j, k] = 1j * s
                E[k, j] = -1j * s
                B.append(E)
    return np.array(B)


def _block_coeffs(block: LmiBlock, basis: np.ndarray) -> np.ndarray:
    out = np.zeros((len(basis), block.dim, block.dim), dtype=complex)
    for a, P in block.terms:
        out += a * np.einsum("ij,kjl,ml->kim", P, basis, P.conj())
    return out


@dataclass
class _Affine:
    """``G_i(y) = G0_i + sum_k y_k Gk_i[k]`` per block, plus scalar rows ``l0 + y @ lk >= 0``."""

    G0: list
    Gk: list
    l0: np.ndarray = None
    lk: np.ndarray = None

    def __post_init__(self):
        if self.l0 is None:
            n = self.Gk[0].shape[0] if self.Gk else 0
            self.l0 = np.zeros(0)
            self.lk = np.zeros((n, 0))

    @property
    def m(self) -> int:
        return sum(g.shape[0] for g in self.G0) + len(self.l0)

    def at(self, y):
        return [G0 + np.tensordot(y, Gk, axes=1) for G0, Gk in zip(self.G0, self.Gk)]

    def lin(self, y):
        return self.l0 + y @ self.lk


def _chol(M):
    try:
        return np.linalg.cholesky((M + M.conj().T) / 2)
    except np.linalg.LinAlgError:
        return None


def _barrier_parts(aff: _Affine, y):
    """Barrier value, gradient and Hessian of ``-sum logdet G_i(y)``; None outside."""
    n = len(y)
    val = 0.0
    g = np.zeros(n)
    H = np.zeros((n, n))
    for G0, Gk in zip(aff.G0, aff.Gk):
        G = G0 + np.tensordot(y, Gk, axes=1)
        L = _chol(G)
        if L is None:
            return None
        val -= 2 * np.sum(np.log(np.real(np.diag(L))))
        Li = np.linalg.inv(L)
        T = np.einsum("ij,kjl,ml->kim", Li, Gk, Li.conj())
        g -= np.real(np.einsum("kii->k", T))
        H += np.real(np.einsum("kab,lab->kl", T, T.conj()))
    if len(aff.l0):
        l = aff.lin(y)
        if np.any(l <= 0):
            return None
        val -= np.sum(np.log(l))
        g -= aff.lk @ (1 / l)
        H += (aff.lk / l**2) @ aff.lk.T
    return val, g, H


def _barrier_value(aff: _Affine, y):
    val = 0.0
    if len(aff.l0):
        l = aff.lin(y)
        if np.any(l <= 0):
            return None
        val -= np.sum(np.log(l))
    for G in aff.at(y):
        L = _chol(G)
        if L is None:
            return None
        val -= 2 * np.sum(np.log(np.real(np.diag(L))))
    return val


def _max_step(aff: _Affine, y, d) -> float:
    """Largest ``a`` keeping every constraint of ``y + a d`` strictly satisfied."""
    amax = np.inf
    for G, Gk in zip(aff.at(y), aff.Gk):
        L = _chol(G)
        Li = np.linalg.inv(L)
        D = np.tensordot(d, Gk, axes=1)
        lo = float(np.linalg.eigvalsh(Li @ D @ Li.conj().T).min())
        if lo < 0:
            amax = min(amax, -1.0 / lo)
    if len(aff.l0):
        l = aff.lin(y)
        dl = d @ aff.lk
        neg = dl < 0
        if np.any(neg):
            amax = min(amax, float(np.min(-l[neg] / dl[neg])))
    return amax


def _center(aff, f, y, t, N, max_newton=60):
    """Damped Newton centering of ``t f.y + barrier`` over ``y + N z``."""
    its = 0
    for _ in range(max_newton):
        its += 1
        parts = _barrier_parts(aff, y)
        if parts is None:
            raise RuntimeError("iterate left the feasible set")
        phi, g, H = parts
        g = t * f + g
        gz = N.T @ g
        Hz = N.T @ H @ N
        Hz = (Hz + Hz.T) / 2
        try:
            dz = -np.linalg.solve(Hz, gz)
        except np.linalg.LinAlgError:
            dz = -np.linalg.lstsq(Hz, gz, rcond=None)[0]
        lam2 = float(-gz @ dz)
        if lam2 / 2 <= NEWTON_TOL:
            break
        d = N @ dz
        slope = t * float(f @ d)
        lam = np.sqrt(max(lam2, 0.0))
        a = 1.0 if lam < 0.25 else 1.0 / (1.0 + lam)
        a = min(a, 0.99 * _max_step(aff, y, d))
        while a > 1e-14:
            yn = y + a * d
            pv = _barrier_value(aff, yn)
            # compare increments: absolute objective values lose precision at large t
            if pv is not None and a * slope + (pv - phi) <= -0.25 * a * lam2:
                break
            a *= 0.5
        else:
            break
        y = yn
        if np.max(np.abs(y)) > 1e12:
            raise OverflowError("unbounded")
    return y, its


def _path_follow(aff, f, y, N, tol, max_iter, t0=1.0, stop=None):
    """Minimize ``f.y`` subject to ``G_i(y) > 0``; returns (y, t, iterations, status)."""
    t = t0
    total = 0
    status = "optimal"
    for _ in range(max_iter):
        y, its = _center(aff, f, y, t, N)
        total += its
        if stop is not None and stop(y):
            return y, t, total, "stopped"
        if aff.m / t < tol:
            return y, t, total, status
        t *= MU
    return y, t, total, "max-iter"


def _phase_one(aff: _Affine, y0, N, tol, early: bool = True, R: float | None = None):
    """Maximize ``s`` with ``G_i(y) - s I >= 0``; returns ``(y, s)``.

    Stops as soon as a centred iterate is strictly feasible. A box keeps the
    auxiliary problem bounded.
    """
    n = len(y0)
    s0 = min(float(np.linalg.eigvalsh(G).min()) for G in aff.at(y0)) - 1.0
    if len(aff.l0):
        s0 = min(s0, float(aff.lin(y0).min()) - 1.0)
    s0 = min(s0, 0.0)
    if R is None:
        R = 1e4 * (1.0 + np.max(np.abs(y0), initial=0.0))
    Gk = [np.concatenate([gk, -np.eye(g.shape[0])[None]], axis=0) for g, gk in zip(aff.G0, aff.Gk)]
    nz = N.shape[1]
    # box |z_j| <= R on the free coordinates z = N^T (y - y0), as scalar rows
    box_k = np.vstack([np.hstack([N, -N]), np.zeros((1, 2 * nz))])
    box_0 = np.concatenate([R - N.T @ y0, R + N.T @ y0])
    # cap s <= 1 so that scaling a strictly feasible point cannot run off
    cap = np.zeros((n + 1, 1))
    cap[n, 0] = -1.0
    box_k = np.hstack([box_k, cap])
    box_0 = np.concatenate([box_0, [1.0]])
    lk = np.vstack([aff.lk, -np.ones((1, len(aff.l0)))])
    aux = _Affine(list(aff.G0), Gk, np.concatenate([aff.l0, box_0]), np.hstack([lk, box_k]))
    f = np.zeros(n + 1)
    f[-1] = -1.0
    Naux = np.zeros((n + 1, nz + 1))
    Naux[:n, :nz] = N
    Naux[n, nz] = 1.0
    w = np.concatenate([y0, [s0]])
    margin = 1e-3 * tol
    stop = (lambda v: v[-1] > margin) if early else None
    w, t, _, status = _path_follow(aux, f, w, Naux, tol * 1e-3, 80, stop=stop)
    return w[:n], float(w[-1]), status


# ---------------------------------------------------------------------------
# Facial reduction


def _fr_certificate(aff: _Affine, tol: float):
    """Ranges ``U_i`` of some ``W_i >= 0`` with ``sum tr(G_i(y) W_i) = 0`` for all ``y``.

    Such a ``W`` proves that every feasible point satisfies ``G_i(y) U_i = 0``.
    It is found as the maximizer of the smallest eigenvalue of ``W`` over the
    normalized certificate subspace. Returns None when no certificate exists.
    """
    bases = [hermitian_basis(G.shape[0]) for G in aff.G0]
    sizes = [len(b) for b in bases]
    nW = sum(sizes)
    f = np.concatenate([np.real(np.einsum("ij,kji->k", G0, b)) for G0, b in zip(aff.G0, bases)])
    E = np.concatenate([np.real(np.einsum("kij,lji->kl", Gk, b)) for Gk, b in zip(aff.Gk, bases)], axis=1)
    tr = np.concatenate([np.real(np.einsum("kii->k", b)) for b in bases])
    Eaug = np.vstack([E, f[None], tr[None]])
    eaug = np.zeros(Eaug.shape[0])
    eaug[-1] = 1.0
    y0 = np.linalg.lstsq(Eaug, eaug, rcond=None)[0]
    if np.max(np.abs(Eaug @ y0 - eaug)) > 1e-9:
        return None
    N = null_space(Eaug)
    G0s, Gks = [], []
    off = 0
    for b, sz in zip(bases, sizes):
        d = b.shape[1]
        Gk = np.zeros((nW, d, d), dtype=complex)
        Gk[off : off + sz] = b
        G0s.append(np.zeros((d, d), dtype=complex))
        Gks.append(Gk)
        off += sz
    waff = _Affine(G0s, Gks)
    if N.shape[1] == 0:
        y, s = y0, min(float(np.linalg.eigvalsh(W).min()) for W in waff.at(y0))
    else:
        y, s, _ = _phase_one(waff, y0, N, 1e-7, early=False)
    if s < -1e-7:
        return None
    Ws = waff.at(y)
    top = max(float(np.linalg.eigvalsh(W).max()) for W in Ws)
    out = []
    for W in Ws:
        w, V = np.linalg.eigh((W + W.conj().T) / 2)
        out.append(V[:, w > 1e-6 * top])
    return out


@dataclass
class _Reduced:
    """Primal variables ``x = x0 + N z`` and block restrictions ``V_i^dagger F_i V_i``."""

    x0: np.ndarray
    N: np.ndarray
    V: list

    def affine(self, aff: _Affine) -> _Affine:
        G0, Gk = [], []
        for F0, Fk, V in zip(aff.G0, aff.Gk, self.V):
            Fx0 = F0 + np.tensordot(self.x0, Fk, axes=1)
            G0.append(V.conj().T @ Fx0 @ V)
            FkN = np.tensordot(self.N.T, Fk, axes=1)
            Gk.append(np.einsum("ia,kij,jb->kab", V.conj(), FkN, V))
        return _Affine(G0, Gk)

    def reduce(self, aff: _Affine, U: list) -> "_Reduced | None":
        rows, rhs = [], []
        newV = []
        for F0, Fk, V, Ui in zip(aff.G0, aff.Gk, self.V, U):
            if Ui.shape[1] == 0:
                newV.append(V)
                continue
            Uf = V @ Ui
            Fx0 = F0 + np.tensordot(self.x0, Fk, axes=1)
            FkN = np.tensordot(self.N.T, Fk, axes=1)
            lhs = np.einsum("kij,ja->kia", FkN, Uf).reshape(FkN.shape[0], -1).T
            r = -(Fx0 @ Uf).reshape(-1)
            rows += [lhs.real, lhs.imag]
            rhs += [r.real, r.imag]
            # orthogonal complement of U inside span(V)
            Q = null_space(Ui.conj().T)
            newV.append(V @ Q)
        if not rows:
            return None
        A = np.vstack(rows)
        b = np.concatenate(rhs)
        z0 = np.linalg.lstsq(A, b, rcond=None)[0]
        if np.max(np.abs(A @ z0 - b), initial=0.0) > 1e-6 * max(1.0, np.abs(b).max(initial=0.0)):
            return None
        # certificates are accurate to ~1e-9, so near-dependent equalities are merged
        N2 = null_space(A, rcond=1e-6)
        return _Reduced(self.x0 + self.N @ z0, self.N @ N2, newV)


# ---------------------------------------------------------------------------
# Public solver


def _primal_affine(p: SdpProblem):
    basis = hermitian_basis(p.variable_dim, p.real_variable)
    sgn = 1.0 if p.sense == "max" else -1.0
    c = sgn * np.real(np.einsum("ij,kji->k", p.objective, basis))
    aff = _Affine([b.constant for b in p.constraints], [_block_coeffs(b, basis) for b in p.constraints])
    return basis, c, aff


def _with_box(aff: _Affine, R: float) -> _Affine:
    n = aff.Gk[0].shape[0] if aff.Gk else len(aff.lk)
    I = np.eye(n)
    return _Affine(
        list(aff.G0),
        list(aff.Gk),
        np.concatenate([aff.l0, np.full(2 * n, R)]),
        np.hstack([aff.lk, I, -I]),
    )


MAX_REDUCTIONS = 4
BOX = 1e3


def _boxed(raff: _Affine, cz, z, R, tol, max_iter):
    """Minimize ``-cz.z`` inside ``|z_j| <= R``.

    Also returns the first-order change of the optimum per unit growth of
    ``R``, read off the box multipliers ``1 / (t * slack)``. It is of order
    ``1/t`` when only the barrier pushes into the box (a recession direction
    of constant objective) and large when the objective is unbounded.
    """
    baff = _with_box(raff, R)
    z, t, its, status = _path_follow(baff, -cz, z, np.eye(len(z)), tol, max_iter)
    slack = baff.lin(z)[len(raff.l0):]
    sens = float(np.sum(1.0 / (t * slack)))
    return z, t, its, status, sens


def solve(p: SdpProblem, tol: float = GAP_TOL, max_iter: int = 100, dual: SdpProblem | None = None) -> SdpSolution:
    """Solve ``p``; when ``dual`` is given its optimum is used as the certificate.

    The reported ``gap`` is the barrier duality gap ``m / t`` or, with
    ``dual``, the difference between the two optimal values.
    """
    basis, c, aff = _primal_affine(p)
    n = len(basis)
    sgn = 1.0 if p.sense == "max" else -1.0
    scale = 1.0 + max(np.abs(G).max(initial=0.0) for G in aff.G0)
    red = _Reduced(np.zeros(n), np.eye(n), [np.eye(G.shape[0]) for G in aff.G0])
    path = "primal"
    for _ in range(MAX_REDUCTIONS + 1):
        raff = red.affine(aff)
        nz = red.N.shape[1]
        if nz == 0:
            s = min(float(np.linalg.eigvalsh(G).min()) for G in raff.G0 if G.size) if raff.m else 1.0
            z = np.zeros(0)
        else:
            z, s, _ = _phase_one(raff, np.zeros(nz), np.eye(nz), tol, R=BOX * scale / 2)
        if s > FEAS_TOL * scale:
            break
        if s < -1e-7 * scale:
            return SdpSolution(np.nan, None, np.nan, np.nan, "infeasible")
        U = _fr_certificate(raff, tol)
        new = red.reduce(aff, U) if U is not None else None
        if new is None:
            return SdpSolution(np.nan, None, np.nan, np.nan, "infeasible" if U is None else "max-iter")
        red = new
        path = "reduced"
    else:
        return SdpSolution(np.nan, None, np.nan, np.nan, "max-iter")

    cz = red.N.T @ c
    status, its, t, z = "optimal", 0, np.inf, z
    if nz:
        R = BOX * scale
        z, t, its, status, sens = _boxed(raff, cz, z, R, tol, max_iter)
        if sens * R > 0.1 * (1.0 + abs(float(cz @ z))):
            return SdpSolution(sgn * np.inf, None, sgn * np.inf, np.nan, "unbounded")
    x = red.x0 + red.N @ z
    Z = np.tensordot(x, basis, axes=1)
    value = sgn * float(c @ x)
    gap = (raff.m + 2 * nz) / t if nz else 0.0
    W = [np.linalg.inv(G) / t for G in raff.at(z)] if nz and np.isfinite(t) else []
    sol = SdpSolution(value, Z, value + sgn * gap, gap, status, its, p.residual(Z), path, W)
    if dual is not None and sol.status == "optimal":
        dsol = solve(dual, tol, max_iter)
        sol.dual_value = dsol.value
        sol.gap = abs(sol.value - dsol.value)
        if dsol.status != "optimal":
            sol.status = dsol.status
    return sol
