import numpy as np
import pytest

from bargmann import catalog, core, physicality as ph
from bargmann import phase_space as ps
from bargmann.core import AbcTriple, WireLayout
from bargmann.errors import NumericalDegeneracyError, WireKindError

from helpers import HBAR, rand_channel, rand_ket, rand_state

X2 = np.array([[0, 1], [1, 0]])


def dm1(gamma, lam=0.0, b=(0, 0), c=1.0):
    A = np.array([[np.conj(lam), gamma], [gamma, lam]])
    return AbcTriple(A, b, c, WireLayout.dm([0]))


def test_thermal_hermitian_with_gamma():
    nbar = 0.5
    rep = ph.check_hermitian(catalog.thermal(nbar))
    assert rep.hermitian
    _, G, _ = ph.blocks(catalog.thermal(nbar))
    assert np.allclose(G, nbar / (nbar + 1))


def test_outer_product_is_hermitian():
    rng = np.random.default_rng(0)
    assert ph.check_hermitian(core.outer(rand_ket(rng, 2))).hermitian


def test_non_hermitian_b():
    bad = AbcTriple(np.zeros((2, 2)), [1, 2j], 1.0, WireLayout.dm([0]))
    assert not ph.check_hermitian(bad).hermitian


def test_positivity_examples():
    rep = ph.check_positive(catalog.thermal(0.5))
    assert rep.positive and rep.margins["gamma_min_eig"] == pytest.approx(1 / 3)
    rep = ph.check_positive(core.outer(catalog.vacuum()))
    assert rep.positive and rep.margins["gamma_min_eig"] == 0
    A = np.zeros((4, 4))
    A[:2, 2:] = A[2:, :2] = np.diag([1.0, -0.2])
    bad = AbcTriple(A * 0.5, np.zeros(4), 1.0, WireLayout.dm([0, 1]))
    assert not ph.check_positive(bad).positive
    assert ph.fock_min_eig(bad, 8) < -1e-6


def test_density_matrix_examples():
    for rho in (
        catalog.thermal(0.7),
        core.apply(catalog.loss(0.6), core.outer(catalog.squeezed_vacuum(0.8, 0.3))),
        core.outer(catalog.displaced_squeezed(0.2 - 0.3j, 0.5, 0.2)),
    ):
        rep = ph.check_density_matrix(rho)
        assert rep.ok, rep.to_dict()
    rep = ph.check_density_matrix(dm1(1.0))
    assert not rep.trace_class and not rep.ok


def test_pure_dm_matches_ket_norm_condition():
    for a in (0.3, 0.9, 0.99):
        ket = AbcTriple([[a]], [0], 1.0)
        rho = core.outer(ket)
        assert ph.check_density_matrix(rho).trace_class == ph.check_ket(ket).trace_class
    ket = AbcTriple([[1.0]], [0], 1.0)
    assert not ph.check_ket(ket).trace_class


def test_random_states_pass_and_have_positive_fock_spectrum():
    rng = np.random.default_rng(1)
    for _ in range(20):
        rho = ps.state_to_abc(rand_state(rng, int(rng.integers(1, 3)), max_nbar=0.5))
        assert ph.check_density_matrix(rho).ok
        if rho.dim == 2:
            assert ph.fock_min_eig(rho, 10) >= -1e-8


def test_unnormalized_state_is_flagged():
    rho = catalog.thermal(0.3)
    rep = ph.check_density_matrix(rho.replace(c=2 * rho.c))
    assert rep.trace_class and not rep.normalized


def test_cp_examples():
    assert ph.check_cp(catalog.loss(0.4)).cp
    assert ph.check_cp(catalog.amplifier(2.0)).cp
    L = catalog.loss(0.4)
    Lt = core.reorder(L, "type-wise")
    A = np.array(Lt.A)
    A[:2, 2:] = A[2:, :2] = -0.3 * np.eye(2)
    bad = Lt.replace(A=A)
    assert not ph.check_cp(bad).cp
    assert ph.fock_min_eig(bad, 6) < 0


@pytest.mark.parametrize("eta", [0.1, 0.5, 0.9])
def test_tp_loss(eta):
    rep = ph.check_tp(catalog.loss(eta))
    assert rep.tp
    assert rep.margins["a_in_deviation"] < 1e-10


def test_tp_examples():
    fd = catalog.fock_damping(0.4)
    fd_map = core.promote(fd)
    assert not ph.check_tp(fd_map).tp
    ident = core.promote(catalog.identity(1))
    rep = ph.check_tp(ident)
    assert rep.tp and rep.margins["a_in_deviation"] == 0


def test_tp_maps_preserve_trace():
    rng = np.random.default_rng(2)
    for _ in range(10):
        ch = ps.channel_to_abc(rand_channel(rng, 1), HBAR)
        assert ph.check(ch, "channel").ok
        for rho in (catalog.thermal(0.4), core.outer(catalog.coherent(0.3 + 0.2j))):
            assert abs(core.trace(core.apply(ch, rho)) - 1) < 1e-8


def test_xy_cptp_agrees_with_abc_checks():
    rng = np.random.default_rng(3)
    agree = 0
    for _ in range(20):
        ch = rand_channel(rng, 1)
        if rng.random() < 0.5:
            ch = ps.ChannelXY(ch.X, ch.Y - 0.4 * HBAR * np.eye(2) * rng.random(), ch.d)
        margin = ch.cptp_margin(HBAR)
        if abs(margin) < 1e-6:
            continue
        try:
            rep = ph.check(ps.channel_to_abc(ch, HBAR), "channel")
            verdict = rep.cp and rep.tp
        except Exception:
            verdict = False
        assert verdict == (margin > 0)
        agree += 1
    assert agree > 10


def test_map_checks_need_map_wires():
    with pytest.raises(WireKindError):
        ph.check_cp(catalog.thermal(0.2))
    with pytest.raises(WireKindError):
        ph.check(catalog.thermal(0.2), "nonsense")


def test_schur_helper():
    rng = np.random.default_rng(4)
    for _ in range(10):
        G = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        H = G @ G.conj().T + 0.1 * np.eye(4)
        assert ph.schur_psd(H[:2, :2], H[:2, 2:], H[2:, 2:])
        assert ph.min_eig(H) > 0
        H2 = H.copy()
        H2[2:, 2:] -= 10 * np.eye(2) * np.linalg.norm(H)
        assert not ph.schur_psd(H2[:2, :2], H2[:2, 2:], H2[2:, 2:])
        assert ph.min_eig(H2) < 0
    with pytest.raises(NumericalDegeneracyError):
        ph.schur_psd(np.zeros((1, 1)), np.ones((1, 1)), np.ones((1, 1)))


def test_report_serializes():
    d = ph.check(catalog.loss(0.3), "channel").to_dict()
    assert d["cp"] is True and d["tp"] is True
    assert isinstance(d["ordering_used"], list)


def test_trace_class_margin_on_many_random_states():
    # regression: a swapped Lambda block used to reject some physical states
    rng = np.random.default_rng(5)
    for _ in range(300):
        n = int(rng.integers(1, 4))
        rho = ps.state_to_abc(rand_state(rng, n))
        assert ph.check_density_matrix(rho).trace_class
