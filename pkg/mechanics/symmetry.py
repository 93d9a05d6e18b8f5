"""
Finite and infinitesimal Lorentz transformations acting on states,
spins and residuals, plus the covariance harness used by the checks.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import factorial
from typing import Callable, Sequence, Union

import numpy as np

from common.enums import LorentzKind, Variance
from common.errors import NotSkew
from mechanics.dynamics import Jet3, KinState, Params
from mechanics.minkowski import (
    MINKOWSKI,
    FourVector,
    Signature,
    SkewTensor,
    SpinTensor,
    check_lorentz,
    lorentz_apply,
)

_TAYLOR_ORDER = 13


@dataclass(frozen=True, eq=False)
class LorentzElement:
    matrix: np.ndarray
    kind: LorentzKind = LorentzKind.PRODUCT
    g: Signature = MINKOWSKI

    def __post_init__(self):
        lam = np.array(check_lorentz(self.matrix, self.g), dtype=float)
        lam.setflags(write=False)
        object.__setattr__(self, 'matrix', lam)

    @classmethod
    def identity(cls, g: Signature = MINKOWSKI) -> 'LorentzElement':
        return cls(np.eye(4), LorentzKind.ROTATION, g)

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.matrix))

    def inverse(self) -> 'LorentzElement':
        eta = self.g.eta
        return LorentzElement(eta @ self.matrix.T @ eta, self.kind, self.g)

    def apply(self, v: Union[FourVector, np.ndarray]) -> FourVector:
        return lorentz_apply(self.matrix, v, self.g)


def _expm(m: np.ndarray) -> np.ndarray:
    '''Matrix exponential by scaling and squaring of a truncated Taylor series.'''
    norm = float(np.linalg.norm(m, 1))
    squarings = max(0, int(np.ceil(np.log2(norm))) + 1) if norm > 0.5 else 0
    scaled = m / 2.0 ** squarings
    result = np.eye(m.shape[0])
    term = np.eye(m.shape[0])
    for k in range(1, _TAYLOR_ORDER + 1):
        term = term @ scaled
        result = result + term / factorial(k)
    for _ in range(squarings):
        result = result @ result
    return result


def _generator_kind(omega: np.ndarray) -> LorentzKind:
    mixed = np.any(omega[0, 1:] != 0)
    spatial = np.any(omega[1:, 1:] != 0)
    if mixed and not spatial:
        return LorentzKind.BOOST
    if spatial and not mixed:
        return LorentzKind.ROTATION
    return LorentzKind.PRODUCT if mixed else LorentzKind.ROTATION


def generator_matrix(omega: Union[SkewTensor, np.ndarray], g: Signature = MINKOWSKI) -> np.ndarray:
    '''G^a_c = -eta^{ab} Omega_{bc}, i.e. G v = Omega^{ab} v_a.'''
    if isinstance(omega, SkewTensor):
        upper = omega.matrix
    else:
        upper = SkewTensor.from_matrix(omega).matrix
    return -upper @ g.eta


def exp_generator(omega: Union[SkewTensor, np.ndarray], eps: float,
                  g: Signature = MINKOWSKI) -> LorentzElement:
    if not isinstance(omega, SkewTensor):
        arr = np.asarray(omega, dtype=float)
        if arr.shape != (4, 4):
            raise NotSkew(f'expected a 4x4 generator, got shape {arr.shape}')
        omega = SkewTensor.from_matrix(arr)
    lam = _expm(eps * generator_matrix(omega, g))
    return LorentzElement(lam, _generator_kind(omega.matrix), g)


def boost(axis: int, rapidity: float, g: Signature = MINKOWSKI) -> LorentzElement:
    '''Pure boost along a spatial axis; e0 -> (cosh, sinh) for (+,-,-,-).'''
    if axis not in (1, 2, 3):
        raise ValueError(f'boost axis must be 1..3, got {axis}')
    omega = np.zeros((4, 4))
    omega[0, axis] = g.diag[0]
    omega[axis, 0] = -g.diag[0]
    return exp_generator(omega, rapidity, g)


def rotation(plane: tuple[int, int], angle: float, g: Signature = MINKOWSKI) -> LorentzElement:
    '''Rotation in a spatial plane (i, j) taking e_i towards e_j.'''
    i, j = plane
    if i == j or i not in (1, 2, 3) or j not in (1, 2, 3):
        raise ValueError(f'rotation plane must be two distinct spatial axes, got {plane}')
    omega = np.zeros((4, 4))
    omega[i, j] = g.diag[j]
    omega[j, i] = -g.diag[j]
    return exp_generator(omega, angle, g)


def compose(first: LorentzElement, second: LorentzElement) -> LorentzElement:
    '''first . second, i.e. second is applied first.'''
    if first.g != second.g:
        raise ValueError('cannot compose elements of different signatures')
    kind = first.kind if first.kind is second.kind else LorentzKind.PRODUCT
    return LorentzElement(first.matrix @ second.matrix, kind, first.g)


def random_proper_lorentz(rng: np.random.Generator, max_rapidity: float = 2.0,
                          g: Signature = MINKOWSKI) -> LorentzElement:
    '''Random rotation composed with a boost of rapidity up to max_rapidity.'''
    direction = rng.normal(size=3)
    direction /= np.linalg.norm(direction)
    boost_gen = np.zeros((4, 4))
    boost_gen[0, 1:] = g.diag[0] * direction
    boost_gen[1:, 0] = -g.diag[0] * direction
    lam_boost = exp_generator(boost_gen, rng.uniform(0.0, max_rapidity), g)

    axis = rng.normal(size=3)
    axis /= np.linalg.norm(axis)
    rot_gen = np.zeros((4, 4))
    for (i, j), w in zip(((2, 3), (3, 1), (1, 2)), axis):
        rot_gen[i, j] = w
        rot_gen[j, i] = -w
    lam_rot = exp_generator(rot_gen, rng.uniform(0.0, np.pi), g)
    return compose(lam_rot, lam_boost)


def transform_state(lam: LorentzElement, st: Union[KinState, Jet3]):
    '''Apply lam to every vector of the state; tau is not touched.'''
    m = lam.matrix
    if isinstance(st, Jet3):
        return Jet3(transform_state(lam, st.base), m @ st.j)
    return KinState(m @ st.x, m @ st.u, m @ st.a)


def transform_params(lam: LorentzElement, p: Params) -> Params:
    return p.with_spin(lam.matrix @ p.s)


def transform_tensor(lam: LorentzElement, S: SkewTensor) -> SkewTensor:
    out = lam.matrix @ S.matrix @ lam.matrix.T
    return type(S).from_matrix(out)


def _transform(lam: LorentzElement, value):
    if isinstance(value, (KinState, Jet3)):
        return transform_state(lam, value)
    if isinstance(value, Params):
        return transform_params(lam, value)
    if isinstance(value, SkewTensor):
        return transform_tensor(lam, value)
    if isinstance(value, FourVector):
        return lam.apply(value)
    if isinstance(value, np.ndarray) and value.shape == (4,):
        return lam.matrix @ value
    return value


def _components(value) -> np.ndarray:
    if isinstance(value, FourVector):
        return value.c
    if isinstance(value, SkewTensor):
        return value.matrix.reshape(-1)
    return np.atleast_1d(np.asarray(value, dtype=float)).reshape(-1)


def covariance_residual(op: Callable[..., object], lam: LorentzElement, inputs: Sequence,
                        relative: bool = False) -> float:
    '''
    Max-norm distance between op(lam . inputs) and lam . op(inputs).

    Inputs may be states, jets, parameters, vectors, skew tensors or plain
    scalars (left unchanged). FourVector outputs keep their variance.
    '''
    original = op(*inputs)
    moved = op(*(_transform(lam, value) for value in inputs))
    expected = _transform(lam, original)
    if isinstance(moved, FourVector) and isinstance(expected, FourVector):
        if moved.variance is not expected.variance:
            moved = FourVector(
                moved.raised(lam.g) if expected.variance is Variance.CONTRAVARIANT else moved.lowered(lam.g),
                expected.variance,
            )
    diff = float(np.max(np.abs(_components(moved) - _components(expected))))
    if relative:
        return diff / max(1.0, float(np.max(np.abs(_components(original)))))
    return diff
