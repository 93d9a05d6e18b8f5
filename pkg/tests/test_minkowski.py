import numpy as np
import pytest
from hypothesis import given, settings

from common.enums import Variance
from common.errors import NotLorentz, NotSkew, PiraniViolated, ZeroVelocity
from mechanics.minkowski import (
    EUCLIDEAN,
    MINKOWSKI,
    FourVector,
    Signature,
    SkewTensor,
    SpinTensor,
    check_lorentz,
    dot,
    generator_action,
    hodge_quad,
    hodge_triple,
    lorentz_apply,
    lower,
    norm_abs,
    spin_tensor_to_vector,
    spin_vector_to_tensor,
    wedge_norm_sq,
)
from tests.conftest import four_vectors

E = np.eye(4)


def _boost_x(rapidity):
    ch, sh = np.cosh(rapidity), np.sinh(rapidity)
    lam = np.eye(4)
    lam[0, 0] = lam[1, 1] = ch
    lam[0, 1] = lam[1, 0] = sh
    return lam


def test_signature_rejects_bad_entries():
    with pytest.raises(ValueError):
        Signature(diag=(1, 2, -1, -1))
    with pytest.raises(ValueError):
        Signature(orientation=0)


def test_epsilon_upper_carries_determinant():
    assert MINKOWSKI.det == -1
    assert MINKOWSKI.epsilon_lower[0, 1, 2, 3] == 1
    assert MINKOWSKI.epsilon_upper[0, 1, 2, 3] == -1
    assert EUCLIDEAN.epsilon_upper[0, 1, 2, 3] == 1


def test_dot_uses_mostly_minus_signature():
    assert dot(E[0], E[0]) == 1.0
    assert dot(E[1], E[1]) == -1.0
    assert dot([1, 2, 0, 0], [3, 1, 0, 0]) == 1.0
    assert norm_abs([0, 3, 4, 0]) == 5.0


def test_covariant_input_is_raised_before_pairing():
    u = FourVector.co([1.0, -2.0, 0.0, 0.0])
    assert np.allclose(u.raised(), [1.0, 2.0, 0.0, 0.0])
    assert dot(u, E[1]) == -2.0


def test_four_vector_validates_components():
    with pytest.raises(ValueError):
        FourVector.contra([1.0, 2.0, 3.0])
    with pytest.raises(ValueError):
        FourVector.contra([1.0, np.nan, 0.0, 0.0])


@settings(max_examples=50)
@given(four_vectors, four_vectors, four_vectors)
def test_dot_is_symmetric_and_bilinear(a, b, c):
    assert dot(a, b) == pytest.approx(dot(b, a))
    assert dot(2.0 * a + c, b) == pytest.approx(2.0 * dot(a, b) + dot(c, b), abs=1e-9)


def test_wedge_norm_sq_is_signed_gram_determinant():
    assert wedge_norm_sq(E[0], E[1]) == -1.0
    assert wedge_norm_sq(E[1], E[2]) == 1.0
    assert wedge_norm_sq(E[0], 2.0 * E[0]) == 0.0


def test_hodge_triple_free_index_first():
    star = hodge_triple(E[0], E[1], E[2])
    assert star.variance is Variance.COVARIANT
    assert np.allclose(star.c, [0.0, 0.0, 0.0, -1.0])


def test_hodge_quad_is_alternating():
    assert hodge_quad(E[0], E[1], E[2], E[3]) == 1.0
    assert hodge_quad(E[1], E[0], E[2], E[3]) == -1.0
    assert hodge_quad(E[0], E[0], E[2], E[3]) == 0.0
    flipped = Signature(orientation=-1)
    assert hodge_quad(E[0], E[1], E[2], E[3], flipped) == -1.0


@settings(max_examples=50)
@given(four_vectors, four_vectors, four_vectors)
def test_hodge_triple_is_orthogonal_to_its_arguments(a, b, c):
    star = hodge_triple(a, b, c).c
    scale = max(1.0, float(np.abs(a).max() * np.abs(b).max() * np.abs(c).max()))
    for v in (a, b, c):
        assert abs(star @ v) <= 1e-9 * scale * max(1.0, float(np.abs(v).max()))


def test_skew_tensor_rejects_symmetric_part():
    m = np.zeros((4, 4))
    m[0, 1] = 1.0
    with pytest.raises(NotSkew):
        SkewTensor.from_matrix(m)
    with pytest.raises(NotSkew):
        SkewTensor.from_pairs({(2, 2): 1.0})


def test_rest_frame_spin_conversion():
    sigma = 2.0
    S = SpinTensor.from_pairs({(1, 2): sigma})
    s = spin_tensor_to_vector(S, E[0])
    assert s.variance is Variance.COVARIANT
    assert np.allclose(s.c, [0.0, 0.0, 0.0, sigma])


def test_spin_vector_round_trip_returns_covariant_components(pirani_state):
    st, p = pirani_state
    S = spin_vector_to_tensor(p.s, st.u)
    back = spin_tensor_to_vector(S, st.u)
    assert np.allclose(back.c, lower(p.s), rtol=1e-12, atol=1e-12)


def test_spin_vector_to_tensor_requires_pirani():
    with pytest.raises(PiraniViolated):
        spin_vector_to_tensor([1.0, 0.0, 0.0, 1.0], E[0])


def test_conversion_rejects_null_velocity():
    with pytest.raises(ZeroVelocity):
        spin_tensor_to_vector(SpinTensor.from_pairs({(1, 2): 1.0}), [1.0, 1.0, 0.0, 0.0])


def test_check_lorentz():
    check_lorentz(_boost_x(0.7))
    with pytest.raises(NotLorentz):
        check_lorentz(np.diag([2.0, 1.0, 1.0, 1.0]))
    with pytest.raises(NotLorentz):
        check_lorentz(np.eye(3))


def test_boost_moves_rest_frame():
    moved = lorentz_apply(_boost_x(0.5), E[0])
    assert np.allclose(moved.c, [np.cosh(0.5), np.sinh(0.5), 0.0, 0.0])


@settings(max_examples=50)
@given(four_vectors, four_vectors)
def test_covector_pairing_is_invariant(a, b):
    lam = _boost_x(0.8)
    co = FourVector.co(lower(a))
    paired = float(lorentz_apply(lam, co).c @ lorentz_apply(lam, b).c)
    assert paired == pytest.approx(float(co.c @ b), abs=1e-8 * max(1.0, abs(float(co.c @ b))))


def test_generator_action_of_boost_generator():
    omega = SkewTensor.from_pairs({(0, 1): 1.0})
    assert np.allclose(generator_action(omega, E[0]).c, [0.0, 1.0, 0.0, 0.0])
