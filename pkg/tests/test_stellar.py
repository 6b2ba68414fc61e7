import math

import numpy as np
import pytest

from bargmann import catalog, core, fock, stellar
from bargmann import phase_space as ps
from bargmann.errors import DegenerateMarginalError, DomainError, LayoutMismatchError

from helpers import lossy_state, rand_ket, rand_state, triple_error


def test_is_core_examples():
    tms = catalog.two_mode_squeezed_vacuum(0.5)
    ok, margins = stellar.is_core(tms, [0])
    assert ok and margins["a_block"] == 0
    prod = core.join(catalog.squeezed_vacuum(0.4, mode=0), catalog.vacuum(modes=[1]))
    assert not stellar.is_core(prod, [0])[0]
    assert stellar.is_core(prod, [1])[0]
    assert stellar.is_core(prod, ([1], [0]))[0]
    with pytest.raises(LayoutMismatchError):
        stellar.is_core(prod, ([1], [1]))


def test_pure_decompose_of_core_is_trivial():
    tms = catalog.two_mode_squeezed_vacuum(0.7)
    dec = stellar.pure_decompose(tms, 1)
    assert triple_error(catalog.identity(1), dec.unitary) < 1e-12
    assert triple_error(tms, dec.core) < 1e-12


def test_pure_decompose_strips_local_squeezer():
    tms = catalog.two_mode_squeezed_vacuum(0.7)
    psi = core.reorder(core.apply(catalog.squeezer(0.5, 0.2, mode=0), tms), "type-wise")
    dec = stellar.pure_decompose(psi, [0])
    assert stellar.is_core(dec.core, [0])[0]
    assert triple_error(psi, dec.recompose()) < 1e-10
    # Schmidt coefficients are unchanged by a local unitary
    G = fock.fock_amplitudes(dec.core, 30).data
    sv = np.linalg.svd(G, compute_uv=False)[:5]
    ref = np.tanh(0.7) ** np.arange(5) / np.cosh(0.7)
    assert np.abs(sv - ref).max() < 1e-8


def test_pure_decompose_with_displacement():
    psi = core.reorder(
        core.apply(catalog.displacement(0.4 - 0.3j, mode=0), catalog.two_mode_squeezed_vacuum(0.4)), "type-wise"
    )
    dec = stellar.pure_decompose(psi, [0])
    ok, margins = stellar.is_core(dec.core, [0])
    assert ok, margins
    assert triple_error(psi, dec.recompose()) < 1e-10


def test_pure_decompose_random_and_unitarity():
    rng = np.random.default_rng(20)
    for _ in range(10):
        ket = rand_ket(rng, 3)
        dec = stellar.pure_decompose(ket, 2)
        assert stellar.is_core(dec.core, ket.layout.modes[:2])[0]
        assert triple_error(ket, dec.recompose()) < 1e-9
        A = dec.unitary.A
        assert np.abs(A.conj().T @ A - np.eye(A.shape[0])).max() < 1e-10


def test_pure_decompose_rejects_unit_norm_marginal():
    with pytest.raises(DegenerateMarginalError):
        stellar.pure_decompose(core.AbcTriple([[1.0]], [0], 1.0), 1)
    with pytest.raises(LayoutMismatchError):
        stellar.pure_decompose(catalog.thermal(0.1), 1)


def test_mixed_pure_core_for_m_ge_n():
    rng = np.random.default_rng(21)
    rho = ps.state_to_abc(rand_state(rng, 2))
    dec = stellar.mixed_decompose(rho, 1)
    assert dec.feasible and dec.pure_core
    assert dec.core.layout.is_ket
    assert stellar.is_core(core.outer(dec.core), [0])[0]
    assert triple_error(rho, dec.recompose()) < 1e-9


def test_mixed_thermal_product():
    rho = core.join(catalog.thermal(0.3, mode=0), catalog.thermal(0.6, mode=1))
    rho = core.reorder(rho, "type-wise")
    dec = stellar.pure_core_decompose(rho, [0])
    assert triple_error(rho, dec.recompose()) < 1e-10


def test_mixed_feasible_below_half():
    rng = np.random.default_rng(22)
    rho = ps.state_to_abc(lossy_state(rng, 3, [0], 0.6))
    dec = stellar.mixed_decompose(rho, 1)
    assert dec.feasible and not dec.pure_core
    assert dec.rank_witness <= 1
    assert triple_error(rho, dec.recompose()) < 1e-9


def test_mixed_infeasible_returns_formal():
    rng = np.random.default_rng(23)
    rho = ps.state_to_abc(lossy_state(rng, 3, [1, 2], 0.7))
    dec = stellar.mixed_decompose(rho, 1)
    assert not dec.feasible and dec.rank_witness == 2
    assert dec.core is None and dec.formal is not None
    assert triple_error(stellar.vectorized(rho, dec.formal), dec.formal.recompose()) < 1e-12
    with pytest.raises(DomainError):
        dec.recompose()


def test_pure_core_of_staircase_style_state():
    # two squeezed modes mixed on a beamsplitter, loss on one arm
    psi = core.join(catalog.squeezed_vacuum(0.8, mode=0), catalog.squeezed_vacuum(0.5, math.pi, mode=1))
    psi = core.apply(catalog.beamsplitter(0.6, 0.0, modes=(0, 1)), psi)
    rho = core.apply(catalog.loss(0.8, mode=1), core.outer(psi))
    rho = core.reorder(rho, "type-wise")
    dec = stellar.pure_core_decompose(rho, [0])
    assert dec.core.layout.is_ket
    assert triple_error(rho, dec.recompose()) < 1e-9


def test_formal_examples():
    rho = catalog.thermal(0.5)
    f = stellar.formal_decompose(rho, 1)
    # one mode carries a bra and a ket wire, so M has two indices
    T = f.t_operator.A
    assert np.array_equal(T[2:, 2:], np.zeros((2, 2))) and np.array_equal(T[:2, 2:], np.eye(2))
    assert np.allclose(f.core_vector.A[:2, :2], 0)
    assert triple_error(stellar.vectorized(rho, f), f.recompose()) < 1e-12

    tms = catalog.two_mode_squeezed_vacuum(0.3)
    f = stellar.formal_decompose(tms, 1)
    assert np.allclose(f.t_operator.A, [[0, 1], [1, 0]])

    rng = np.random.default_rng(24)
    for _ in range(5):
        g = ps.state_to_abc(rand_state(rng, 3))
        f = stellar.formal_decompose(g, 2)
        assert triple_error(stellar.vectorized(g, f), f.recompose()) < 1e-12


def test_absorb_displacement():
    ket = catalog.coherent(0.3 + 0.2j)
    out, gamma = stellar.absorb_displacement(ket, 1)
    assert np.allclose(out.b, 0)
    assert np.allclose(gamma, [-(0.3 + 0.2j)])
    same, g0 = stellar.absorb_displacement(catalog.vacuum(), 1)
    assert same is not None and np.all(g0 == 0)


def test_gauge_freedom_leaves_recomposition_fixed():
    # a local rotation on M changes the core but not the state
    rng = np.random.default_rng(25)
    ket = rand_ket(rng, 2)
    dec = stellar.pure_decompose(ket, [0])
    R = catalog.rotation(0.8, mode=0)
    core2 = core.reorder(core.apply(R, dec.core), dec.core.layout)
    U2 = core.apply(dec.unitary, core.dagger(R))
    assert stellar.is_core(core2, [0])[0]
    out = core.reorder(core.apply(U2, core2), ket.layout)
    assert triple_error(ket, out) < 1e-10
