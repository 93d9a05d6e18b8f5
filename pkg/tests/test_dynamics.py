import numpy as np
import pytest

from common.errors import DegenerateSpin, MechanicsError, SingularChart, ZeroVelocity
from core.utils.sampling import sample_contact_state, sample_dynamics_state, sample_parametrization, sample_pirani_state
from mechanics.dynamics import (
    CONTACT_SIGNATURE,
    Jet3,
    KinState,
    Params,
    autoparallel_rhs,
    first_integral,
    lagrangian_along,
    lagrangian_contact,
    lagrangian_homogeneous,
    mathisson_spin_factor,
    pirani_value,
    psi_ansatz,
    psi_from_rhs,
    residual_dan,
    residual_euler_poisson,
    residual_mathisson_flat,
    solved_jet,
)
from mechanics.minkowski import EUCLIDEAN, MINKOWSKI, dot, norm_abs, spin_vector_to_tensor
from mechanics.variational import compose_derivatives


def _relative(residual, *scales):
    return float(np.max(np.abs(residual))) / max(1.0, *(float(np.max(np.abs(s))) for s in scales))


def test_params_validation():
    with pytest.raises(ValueError):
        Params(m=0.0, m0=1.0, s=[0, 0, 0, 1])
    with pytest.raises(ValueError):
        Params(m=1.0, m0=1.0, s=[0, 0, 1])
    with pytest.raises(DegenerateSpin):
        Params(m=1.0, m0=1.0, s=[0, 0, 0, 0])


def test_kin_state_array_order():
    st = KinState(np.arange(4), np.arange(4, 8), np.arange(8, 12))
    assert np.array_equal(st.as_array(), np.arange(12))
    assert np.array_equal(KinState.from_array(np.arange(12.0)).a, np.arange(8, 12))


def test_residuals_vanish_on_straight_line():
    st, p = sample_dynamics_state(w=0.0)
    jet = Jet3(st, np.zeros(4))
    assert np.allclose(residual_dan(jet, p).c, 0.0)
    assert np.allclose(residual_euler_poisson(jet, p).c, 0.0)
    assert np.allclose(autoparallel_rhs(st, p).c, 0.0)


def test_zero_velocity_is_reported():
    _, p = sample_dynamics_state()
    st = KinState(np.zeros(4), [1.0, 1.0, 0.0, 0.0], np.zeros(4))
    with pytest.raises(ZeroVelocity):
        residual_euler_poisson(Jet3(st, np.zeros(4)), p)


def test_spin_parallel_to_velocity_is_degenerate():
    p = Params(m=1.0, m0=1.0, s=[0.0, 0.0, 0.0, 1.0])
    st = KinState(np.zeros(4), [1.0, 0.0, 0.0, 2.0], np.zeros(4))
    p_parallel = p.with_spin([1.0, 0.0, 0.0, 2.0])
    with pytest.raises(DegenerateSpin):
        residual_euler_poisson(Jet3(st, np.zeros(4)), p_parallel)


@pytest.mark.parametrize('A', [0.0, 0.5, 1.0])
def test_solved_jet_closes_euler_poisson(rng, A):
    for _ in range(20):
        st, p = sample_pirani_state(rng, A=A)
        jet = solved_jet(st, p)
        residual = residual_euler_poisson(jet, p).c
        assert _relative(residual, jet.j, st.a) <= 1e-9


def test_dan_is_parallel_to_euler_poisson(rng):
    for _ in range(20):
        st, p = sample_pirani_state(rng)
        jet = Jet3(st, rng.normal(size=4))
        dan = residual_dan(jet, p).c
        ep = residual_euler_poisson(jet, p).c
        n = norm_abs(p.s) * norm_abs(st.u)
        assert np.allclose(ep, -dan / n ** 3, rtol=1e-9, atol=1e-9 * np.max(np.abs(ep)))


def test_psi_recovered_from_rhs(rng):
    for A in (0.0, 0.7):
        st, p = sample_pirani_state(rng, A=A)
        assert psi_from_rhs(st, p) == pytest.approx(psi_ansatz(st.u, st.a, A), rel=1e-10, abs=1e-10)


def test_psi_ansatz_rest_frame():
    u = np.array([1.0, 0.0, 0.0, 0.0])
    a = np.array([0.0, 2.0, 0.0, 0.0])
    # 3 (a.a / 2 + A |a^u|^(4/3)) with a.a = -4 and |a^u| = 2
    assert psi_ansatz(u, a, 0.0) == pytest.approx(-6.0)
    assert psi_ansatz(u, a, 1.0) == pytest.approx(-6.0 + 3.0 * 2.0 ** (4.0 / 3.0))


def test_pirani_surface_values(pirani_state):
    st, p = pirani_state
    assert abs(first_integral(st.u, p)) <= 1e-12
    assert abs(pirani_value(st.u, p)) <= 1e-12
    assert abs(dot(p.s, st.a)) <= 1e-10 * max(1.0, float(np.max(np.abs(st.a))))


def test_mathisson_holds_on_proper_time_solutions(rng):
    for _ in range(10):
        st, p = sample_pirani_state(rng)
        # proper-time gauge: u.u = 1 and u.udot = 0
        n = norm_abs(st.u)
        a = (st.a - dot(st.a, st.u) / dot(st.u, st.u) * st.u) / n ** 2
        st = KinState(st.x, st.u / n, a)
        jet = solved_jet(st, p)
        k = mathisson_spin_factor(st.u)
        S = spin_vector_to_tensor(k * p.s, st.u)
        residual = residual_mathisson_flat(jet, S, p).c
        assert _relative(residual, jet.j, st.a) <= 1e-7


def test_mathisson_spin_factor_sign():
    assert mathisson_spin_factor([1.0, 0.0, 0.0, 0.0]) == -1.0
    assert mathisson_spin_factor([1.0, 0.0, 0.0, 0.0], EUCLIDEAN) == 1.0


def test_lagrangian_along_basis_matches_chart(lagrangian_state):
    st, p = lagrangian_state
    for alpha in range(4):
        assert lagrangian_along(np.eye(4)[alpha], st, p) == lagrangian_homogeneous(alpha, st, p)


def test_lagrangian_rejects_bad_chart_index(lagrangian_state):
    st, p = lagrangian_state
    with pytest.raises(ValueError):
        lagrangian_homogeneous(4, st, p)


def test_lagrangian_singular_chart():
    # e_0 along u and s along e_3: the e_0 chart denominator vanishes
    p = Params(m=1.0, m0=1.0, s=[0.0, 0.0, 0.0, 1.0])
    st = KinState(np.zeros(4), [1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0])
    with pytest.raises(SingularChart):
        lagrangian_homogeneous(0, st, p)


@pytest.mark.parametrize('i', [1, 2, 3])
def test_contact_lagrangian_matches_four_dimensional_chart(rng, i):
    # spin orthogonal to the chart direction
    checked = 0
    for _ in range(20):
        cs = sample_contact_state(rng)
        svec = cs.svec.copy()
        svec[i - 1] = 0.0
        cs = type(cs)(t=cs.t, xs=cs.xs, v=cs.v, vp=cs.vp, vpp=cs.vpp, s0=cs.s0, svec=svec)
        p = Params(m=1.3, m0=1.3, s=np.concatenate([[cs.s0], svec]), g=CONTACT_SIGNATURE)
        st = KinState(np.concatenate([[cs.t], cs.xs]), np.concatenate([[1.0], cs.v]),
                      np.concatenate([[0.0], cs.vp]))
        try:
            contact = lagrangian_contact(i, cs, 1.3)
            expected = lagrangian_homogeneous(i, st, p)
        except MechanicsError:
            continue
        checked += 1
        assert contact == pytest.approx(expected, rel=1e-9, abs=1e-12)
    assert checked >= 5


def test_contact_lagrangian_rejects_time_chart():
    cs = sample_contact_state(np.random.default_rng(3))
    with pytest.raises(ValueError):
        lagrangian_contact(0, cs, 1.0)


def test_dan_is_reparametrization_invariant(rng):
    for _ in range(20):
        st, p = sample_pirani_state(rng)
        jet = Jet3(st, rng.normal(size=4))
        t1, t2, t3 = sample_parametrization(rng)
        u, a, j = compose_derivatives(jet.u, jet.a, jet.j, t1, t2, t3)
        moved = residual_dan(Jet3(KinState(st.x, u, a), j), p).c
        original = residual_dan(jet, p).c
        # the chain-rule terms cancel, leaving the weight t'^4
        assert _relative(moved - t1 ** 4 * original, moved, t1 ** 4 * original) <= 1e-9
