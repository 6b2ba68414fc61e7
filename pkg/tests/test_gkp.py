import math

import numpy as np
import pytest

from bargmann import catalog, core, fock, gkp
from bargmann import phase_space as ps
from bargmann.errors import DomainError

from helpers import HBAR, rand_state, rand_unitary

SQ, TH = [15.0, 15.0], [0.4]


def test_vacuum_is_zero_db():
    es = gkp.effective_squeezing(catalog.vacuum())
    assert es.sigma_q2 == pytest.approx(1.0) and es.sigma_p2 == pytest.approx(1.0)
    assert es.db_sym == pytest.approx(0.0, abs=1e-12)
    fk = gkp.effective_squeezing(np.array([1.0, 0, 0]))
    assert fk.db_sym == pytest.approx(0.0, abs=1e-12)


def test_squeezed_state_and_rotation():
    r = 0.4
    sq = catalog.squeezed_vacuum(r, math.pi)
    es = gkp.effective_squeezing(sq)
    assert es.sigma_p2 == pytest.approx(math.exp(-2 * r))
    assert es.sigma_q2 == pytest.approx(math.exp(2 * r))
    # the Fock path agrees
    G = fock.fock_amplitudes(sq, 80).data
    fk = gkp.effective_squeezing(G)
    assert fk.sigma_p2 == pytest.approx(es.sigma_p2, abs=1e-9)
    assert fk.sigma_q2 == pytest.approx(es.sigma_q2, abs=1e-9)
    # a quarter turn swaps the quadratures
    rot = core.apply(catalog.rotation(math.pi / 2), sq)
    er = gkp.effective_squeezing(rot)
    assert er.sigma_q2 == pytest.approx(es.sigma_p2) and er.sigma_p2 == pytest.approx(es.sigma_q2)


def test_to_db_edges():
    assert gkp.to_db(1.0) == 0.0
    assert gkp.to_db(0.1) == pytest.approx(10.0)
    assert gkp.to_db(math.inf) == -math.inf
    assert gkp.sigma2_from_expectation(0) == math.inf


def test_channel_factor_bound_examples():
    v = gkp.stabilizer("p", HBAR)
    assert gkp.channel_factor_bound(np.zeros((2, 2)), v, HBAR) == 1.0
    eta = 0.7
    Y = HBAR / 2 * (1 - eta) * np.eye(2)
    assert gkp.channel_factor_bound(Y, v, HBAR) == pytest.approx(math.exp(-math.pi * (1 - eta) / 2))
    with pytest.raises(DomainError):
        gkp.stabilizer("x")


def test_sdp_bound_of_vacuum():
    res = gkp.sdp_bound(ps.PhaseSpaceState(HBAR / 2 * np.eye(2), None, HBAR), 1, "sym", HBAR)
    assert res.status == "optimal"
    assert res.effective_squeezing_bound_db == pytest.approx(0.0, abs=1e-6)


def test_schur_matches_sdp_on_staircase():
    _, cov = gkp.build_staircase(gkp.StaircaseSpec(SQ, TH, 0.08), HBAR)
    for d in ("sym", "p", "q"):
        res = gkp.sdp_bound(cov, 1, d, HBAR)
        assert res.objective == pytest.approx(gkp.schur_bound(cov, 1, d, HBAR), rel=1e-7)


def test_stellar_matches_sdp():
    dm, cov = gkp.build_staircase(gkp.StaircaseSpec(SQ, TH, 0.05), HBAR)
    st = gkp.stellar_bound(dm, 1, "sym", HBAR)
    res = gkp.sdp_bound(cov, 1, "sym", HBAR)
    assert st.objective == pytest.approx(res.objective, rel=1e-6)


def test_bound_is_valid_for_heralded_states():
    # herald mode 1 of a random two-mode state onto a random Gaussian ket;
    # the heralded state must respect the bound in every direction
    rng = np.random.default_rng(50)
    for _ in range(20):
        st = rand_state(rng, 2, max_nbar=0.3, mean=0.3)
        rho = ps.state_to_abc(st)
        U = ps.unitary_to_abc(rand_unitary(rng, 1), HBAR, modes=[1])
        rho1 = core.apply(U, rho)
        out = core.normalize(core.project_vacuum(rho1, [(1, "bra"), (1, "ket")]))
        G = fock.fock_amplitudes(core.reorder(out, "type-wise"), 60).data
        es = gkp.effective_squeezing(G)
        for d, s2 in (("q", es.sigma_q2), ("p", es.sigma_p2)):
            b = gkp.sdp_bound(st, 1, d, HBAR)
            expect = math.exp(-math.pi * s2 / 2)
            assert expect <= b.bound_on_abs_trace + 1e-7


def test_monotone_in_loss():
    rows = gkp.loss_sweep(SQ, TH, gkp.loss_grid(0.005, 0.2, 50), HBAR, stellar_too=False)
    db = [r[1] for r in rows]
    assert all(a > b for a, b in zip(db, db[1:]))


def test_lossless_two_mode_staircase_is_pure():
    dm, cov = gkp.build_staircase(gkp.StaircaseSpec(SQ, TH, 0.0), HBAR)
    n = dm.dim // 2
    assert np.abs(dm.A[:n, n:]).max() < 1e-12
    assert abs(np.linalg.det(cov.sigma) - (HBAR / 2) ** 4) < 1e-6 * (HBAR / 2) ** 4


def test_staircase_marginal():
    spec = gkp.StaircaseSpec([12.0, 10.0, 8.0, 6.0], [0.4, 0.7, 0.3], 0.05)
    dm, cov = gkp.build_staircase(spec, HBAR)
    red = core.partial_trace(dm, [1, 2, 3])
    ref = ps.abc_to_state(red, HBAR, "xpxp").sigma
    assert np.abs(ref - cov.sigma[:2, :2]).max() < 1e-9


def test_invariance_example():
    specs = [
        gkp.StaircaseSpec(SQ, TH, 0.05),
        gkp.StaircaseSpec(SQ + [10.0], TH + [0.7], 0.05),
        gkp.StaircaseSpec(SQ + [10.0, 12.0], TH + [0.7, 0.3], 0.05),
    ]
    rep = gkp.staircase_invariance_check(specs, "sym", HBAR)
    assert rep.ok and rep.widths == [2, 3, 4]
    with pytest.raises(DomainError):
        gkp.staircase_invariance_check([specs[0], gkp.StaircaseSpec([15.0, 14.0], TH, 0.05)])


def test_csv_is_deterministic():
    etas = gkp.loss_grid(0.01, 0.1, 4)
    a = gkp.rows_to_csv(gkp.loss_sweep(SQ, TH, etas, HBAR))
    b = gkp.rows_to_csv(gkp.loss_sweep(SQ, TH, etas, HBAR))
    assert a == b
    lines = a.splitlines()
    assert lines[0] == "eta,bound_db_sdp,bound_db_stellar,gap" and len(lines) == 5


def test_as_displayed_signs_are_infeasible_for_entangled_states():
    _, cov = gkp.build_staircase(gkp.StaircaseSpec(SQ, TH, 0.03), HBAR)
    res = gkp.sdp_bound(cov, 1, "sym", HBAR, signs="as-displayed")
    assert res.status == "infeasible"


def test_staircase_spec_validation():
    with pytest.raises(DomainError):
        gkp.StaircaseSpec([15.0], [], 0.1)
    with pytest.raises(DomainError):
        gkp.StaircaseSpec(SQ, [0.1, 0.2], 0.1)
    with pytest.raises(DomainError):
        gkp.StaircaseSpec(SQ, TH, 1.5)
