import numpy as np
import pytest

from bargmann import sdp
from bargmann.errors import DomainError

I2 = np.eye(2)
OM = np.array([[0.0, 1.0], [-1.0, 0.0]])


def box(C, lo=0.0, hi=1.0, n=2):
    I = np.eye(n)
    return sdp.SdpProblem(C, [sdp.LmiBlock(-lo * I, [(1, I)]), sdp.LmiBlock(hi * I, [(-1, I)])], n)


def test_box_problem():
    sol = sdp.solve(box(np.eye(2)))
    assert sol.status == "optimal"
    assert sol.value == pytest.approx(2.0, abs=1e-7)
    assert np.abs(sol.variable - np.eye(2)).max() < 1e-6
    assert sol.gap <= 1e-7 and sol.residual >= -1e-8


def test_min_sense():
    p = box(np.diag([1.0, -1.0]))
    pmin = sdp.SdpProblem(p.objective, p.constraints, 2, sense="min")
    assert sdp.solve(p).value == pytest.approx(1.0, abs=1e-7)
    assert sdp.solve(pmin).value == pytest.approx(-1.0, abs=1e-7)


def test_uncertainty_instance_is_4pi():
    # max v^T Z v with Z <= 1 and Z >= i Omega: the vacuum covariance is optimal
    v = np.sqrt(4 * np.pi) * np.array([0.0, 1.0])
    p = sdp.SdpProblem(np.outer(v, v), [sdp.LmiBlock(I2, [(-1, I2)]), sdp.LmiBlock(-1j * OM, [(1, I2)])], 2)
    sol = sdp.solve(p)
    assert sol.status == "optimal"
    assert sol.value == pytest.approx(4 * np.pi, abs=1e-7)
    # no strictly feasible point exists, so facial reduction is used
    assert sol.path == "reduced"


def test_infeasible():
    p = box(np.eye(2), lo=2.0, hi=1.0)
    assert sdp.solve(p).status == "infeasible"


def test_unbounded():
    p = sdp.SdpProblem(np.eye(2), [sdp.LmiBlock(np.zeros((2, 2)), [(1, I2)])], 2)
    sol = sdp.solve(p)
    assert sol.status == "unbounded" and sol.value == np.inf


def test_deterministic():
    rng = np.random.default_rng(40)
    G = rng.normal(size=(3, 3))
    C = G + G.T
    a, b = sdp.solve(box(C, n=3)), sdp.solve(box(C, n=3))
    assert a.value == b.value and np.array_equal(a.variable, b.variable)


def test_box_optimum_is_sum_of_positive_eigenvalues():
    rng = np.random.default_rng(41)
    for _ in range(5):
        G = rng.normal(size=(3, 3))
        C = G + G.T
        w = np.linalg.eigvalsh(C)
        assert sdp.solve(box(C, n=3)).value == pytest.approx(w[w > 0].sum(), abs=1e-6)


def test_dual_certificate():
    # primal max tr(CZ), 0 <= Z <= I; dual min tr(W), W >= C, W >= 0
    C = np.diag([1.5, -0.5])
    dual = sdp.SdpProblem(
        np.eye(2), [sdp.LmiBlock(-C, [(1, I2)]), sdp.LmiBlock(np.zeros((2, 2)), [(1, I2)])], 2, sense="min"
    )
    sol = sdp.solve(box(C), dual=dual)
    assert sol.status == "optimal"
    assert sol.dual_value == pytest.approx(1.5, abs=1e-7)
    assert sol.gap <= 1e-7


def test_validation():
    with pytest.raises(DomainError):
        sdp.LmiBlock(np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(DomainError):
        sdp.SdpProblem(np.eye(3), [], 2)
    with pytest.raises(DomainError):
        sdp.SdpProblem(np.eye(2), [], 2, sense="sideways")


def test_hermitian_basis_spans():
    B = sdp.hermitian_basis(3)
    assert B.shape[0] == 9
    M = np.stack([b.ravel() for b in B])
    assert np.linalg.matrix_rank(np.vstack([M.real, M.imag])) == 9
    assert sdp.hermitian_basis(3, real=True).shape[0] == 6
