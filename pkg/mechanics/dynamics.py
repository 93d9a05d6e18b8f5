"""
Equations of motion of the free spinning particle in flat space.

Every formulation is evaluated as a residual on jets of the world line:
the third-order covector form, flat Mathisson, the Euler-Poisson form and
its contact (three-dimensional) counterpart, plus the Lagrange functions
producing them and the solved second-order-connection right-hand side.

Conventions:
  * hodge_triple(a, b, c)_a = eps_{abcd} a^b b^c c^d (free index first).
  * The starred 3-vector of the Euler-Poisson form is the free-index-last
    dual, (*a^b^c)_a = eps_{bcda} a^b b^c c^d = -hodge_triple(a, b, c)_a.
  * (s^u)^2 is the signed Gram determinant, |s^u| its absolute square root.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from common.errors import DegenerateSpin, SingularChart, ZeroVelocity
from core.app_config import ToleranceConfig
from mechanics.minkowski import (
    MINKOWSKI,
    FourVector,
    Signature,
    SpinTensor,
    VectorLike,
    contravariant,
    dot,
    lower,
    norm_abs,
    wedge_norm,
    wedge_norm_sq,
)

# m / m0 for which the Euler-Poisson residual is parallel to the
# third-order residual on the Pirani surface.
EULER_POISSON_MASS_RATIO = 1.0

# The contact-manifold formulas are the Euclidean images of the
# four-dimensional ones with this orientation.
CONTACT_SIGNATURE = Signature(diag=(1, 1, 1, 1), orientation=-1)


def _vec(values) -> np.ndarray:
    arr = np.array(values, dtype=float).reshape(-1)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class KinState:
    """Point (x, u, a) of the second-order jet; a is du/dtau."""
    x: np.ndarray
    u: np.ndarray
    a: np.ndarray

    def __post_init__(self):
        for name in ('x', 'u', 'a'):
            arr = _vec(getattr(self, name))
            if arr.shape != (4,) or not np.all(np.isfinite(arr)):
                raise ValueError(f'{name} must be 4 finite components, got {arr}')
            object.__setattr__(self, name, arr)

    @classmethod
    def from_vectors(cls, x: VectorLike, u: VectorLike, a: VectorLike,
                     g: Signature = MINKOWSKI) -> 'KinState':
        return cls(contravariant(x, g), contravariant(u, g), contravariant(a, g))

    def as_array(self) -> np.ndarray:
        '''State vector in the fixed order (x0..x3, u0..u3, a0..a3).'''
        return np.concatenate([self.x, self.u, self.a])

    @classmethod
    def from_array(cls, y: np.ndarray) -> 'KinState':
        return cls(y[0:4], y[4:8], y[8:12])


@dataclass(frozen=True, eq=False)
class Jet3:
    base: KinState
    j: np.ndarray

    def __post_init__(self):
        arr = _vec(self.j)
        if arr.shape != (4,) or not np.all(np.isfinite(arr)):
            raise ValueError(f'j must be 4 finite components, got {arr}')
        object.__setattr__(self, 'j', arr)

    @property
    def x(self) -> np.ndarray:
        return self.base.x

    @property
    def u(self) -> np.ndarray:
        return self.base.u

    @property
    def a(self) -> np.ndarray:
        return self.base.a


@dataclass(frozen=True, eq=False)
class Params:
    m: float
    m0: float
    s: np.ndarray
    A: float = 0.0
    g: Signature = field(default=MINKOWSKI)

    def __post_init__(self):
        if not self.m > 0:
            raise ValueError(f'm must be positive, got {self.m}')
        if not self.m0 > 0:
            raise ValueError(f'm0 must be positive, got {self.m0}')
        s = _vec(contravariant(self.s, self.g))
        if s.shape != (4,) or not np.all(np.isfinite(s)):
            raise ValueError(f's must be 4 finite components, got {s}')
        object.__setattr__(self, 's', s)
        if norm_abs(s, self.g) <= ToleranceConfig.DEGENERACY_TOL:
            raise DegenerateSpin('spin vector has zero norm', s=s.tolist())

    def with_spin(self, s) -> 'Params':
        return replace(self, s=s)


@dataclass(frozen=True, eq=False)
class ContactState:
    """Coordinates on the third-order contact manifold plus the spin."""
    t: float
    xs: np.ndarray
    v: np.ndarray
    vp: np.ndarray
    vpp: np.ndarray
    s0: float
    svec: np.ndarray

    def __post_init__(self):
        for name in ('xs', 'v', 'vp', 'vpp', 'svec'):
            arr = _vec(getattr(self, name))
            if arr.shape != (3,) or not np.all(np.isfinite(arr)):
                raise ValueError(f'{name} must be 3 finite components, got {arr}')
            object.__setattr__(self, name, arr)


def _triple(a: np.ndarray, b: np.ndarray, c: np.ndarray, g: Signature) -> np.ndarray:
    return np.einsum('abcd,b,c,d->a', g.epsilon_lower, a, b, c)


def _star(a: np.ndarray, b: np.ndarray, c: np.ndarray, g: Signature) -> np.ndarray:
    return -_triple(a, b, c, g)


def _velocity_norm(u: np.ndarray, g: Signature) -> float:
    n = norm_abs(u, g)
    if n <= ToleranceConfig.DEGENERACY_TOL:
        raise ZeroVelocity('velocity has zero norm', u=u.tolist())
    return n


def _spin_wedge(s: np.ndarray, u: np.ndarray, g: Signature) -> tuple[float, float]:
    '''Signed (s^u)^2 and |s^u|; raises when s and u are parallel.'''
    w = wedge_norm_sq(s, u, g)
    wn = float(np.sqrt(abs(w)))
    scale = norm_abs(s, g) * norm_abs(u, g)
    if wn <= ToleranceConfig.DEGENERACY_TOL * max(scale, 1.0):
        raise DegenerateSpin('spin and velocity are linearly dependent', wedge_norm=wn)
    return w, wn


def residual_dan(jet: Jet3, p: Params) -> FourVector:
    g, s = p.g, p.s
    u, a, j = jet.u, jet.a, jet.j
    n2 = _velocity_norm(u, g) ** 2
    au = dot(a, u, g)
    spin_part = _triple(j, u, s, g) - 3.0 * au / n2 * _triple(a, u, s, g)
    mass_part = p.m0 * (n2 * lower(a, g) - au * lower(u, g))
    return FourVector.co(spin_part - mass_part)


def residual_mathisson_flat(jet: Jet3, S: SpinTensor, p: Params) -> FourVector:
    '''m0 du^a/dtau - S^{ab} d2u_b/dtau2 with zero curvature.'''
    return FourVector.contra(p.m0 * jet.a - S.matrix @ lower(jet.j, p.g))


def residual_euler_poisson(jet: Jet3, p: Params) -> FourVector:
    g, s = p.g, p.s
    u, a, j = jet.u, jet.a, jet.j
    n = _velocity_norm(u, g)
    w, wn = _spin_wedge(s, u, g)
    s_norm = norm_abs(s, g)
    au = dot(a, u, g)
    # (a^s).(u^s) as a signed bivector product
    middle = au * dot(s, s, g) - dot(a, s, g) * dot(s, u, g)
    spin_part = (_star(j, u, s, g) - 3.0 * middle / w * _star(a, u, s, g)) / wn ** 3
    mass_part = p.m / s_norm ** 3 * (lower(a, g) / n - au * lower(u, g) / n ** 3)
    return FourVector.co(spin_part + mass_part)


def _basis(alpha: int) -> np.ndarray:
    if alpha not in (0, 1, 2, 3):
        raise ValueError(f'alpha must be 0..3, got {alpha}')
    e = np.zeros(4)
    e[alpha] = 1.0
    return e


def chart_denominator(alpha: int, u: np.ndarray, p: Params) -> float:
    '''(u_a s - s_a u)^2 - (e_a.e_a)(s^u)^2 for the chart of e_(alpha).'''
    return _chart_denominator_along(_basis(alpha), u, p)


def _chart_denominator_along(e: np.ndarray, u: np.ndarray, p: Params) -> float:
    g, s = p.g, p.s
    d = dot(u, e, g) * s - dot(s, e, g) * u
    return dot(d, d, g) - dot(e, e, g) * wedge_norm_sq(s, u, g)


def lagrangian_along(e: VectorLike, st: KinState, p: Params) -> float:
    '''Homogeneous Lagrange function built on an arbitrary vector e.'''
    g, s = p.g, p.s
    e = contravariant(e, g)
    u, a = st.u, st.a
    n = _velocity_norm(u, g)
    _, wn = _spin_wedge(s, u, g)
    s_norm = norm_abs(s, g)

    denom = _chart_denominator_along(e, u, p)
    if abs(denom) <= ToleranceConfig.DEGENERACY_TOL * s_norm ** 2 * n ** 2:
        raise SingularChart('chart is singular here', e=e.tolist(), denominator=denom)

    quad = float(np.einsum('abcd,a,b,c,d->', g.epsilon_lower, a, u, s, e))
    numerator = dot(s, s, g) * dot(u, e, g) - dot(s, u, g) * dot(s, e, g)
    spin_part = quad / (s_norm ** 2 * wn) * numerator / denom
    return spin_part - p.m / s_norm ** 3 * n


def lagrangian_homogeneous(alpha: int, st: KinState, p: Params) -> float:
    return lagrangian_along(_basis(alpha), st, p)


def lagrangian_contact(i: int, cs: ContactState, m: float) -> float:
    if i not in (1, 2, 3):
        raise ValueError(f'i must be 1..3, got {i}')
    e = np.zeros(3)
    e[i - 1] = 1.0
    S, V, W, s0 = cs.svec, cs.v, cs.vp, cs.s0
    s_i, v_i = S[i - 1], V[i - 1]

    k = S - s_i * e
    r = S - s0 * V
    z = r - (s_i - s0 * v_i) * e
    q = s0 ** 2 + k @ k
    kz = k @ z
    den_chart = q * (z @ z) - kz ** 2
    bracket = r @ r + np.cross(S, V) @ np.cross(S, V)
    spin_sq = s0 ** 2 + S @ S
    if abs(den_chart) <= ToleranceConfig.DEGENERACY_TOL * max(spin_sq, 1.0) ** 2:
        raise SingularChart(f'contact chart of e_({i}) is singular here', i=i, denominator=den_chart)
    if bracket <= ToleranceConfig.DEGENERACY_TOL:
        raise SingularChart('spin parallel to the contact velocity', bracket=bracket)

    factor = s0 / spin_sq * (q * (s_i - s0 * v_i) - s_i * kz) / den_chart
    spin_part = factor * (W @ np.cross(r, e)) / np.sqrt(bracket)
    return spin_part - m * np.sqrt(1.0 + V @ V) / spin_sq ** 1.5


def residual_contact(cs: ContactState, m: float) -> np.ndarray:
    v, vp, vpp, s0, s = cs.v, cs.vp, cs.vpp, cs.s0, cs.svec
    spin_sq = s0 ** 2 + s @ s
    lorentz_sq = 1.0 + v @ v
    bracket = lorentz_sq * spin_sq - (s0 + s @ v) ** 2
    if bracket <= ToleranceConfig.DEGENERACY_TOL * spin_sq:
        raise SingularChart('contact bracket vanishes', bracket=bracket)
    r = s - s0 * v
    middle = spin_sq * (vp @ v) - (s0 + s @ v) * (s @ vp)
    spin_part = np.cross(vpp, r) / bracket ** 1.5 - 3.0 * middle / bracket ** 2.5 * np.cross(vp, r)
    mass_part = m * (lorentz_sq * vp - (vp @ v) * v) / (lorentz_sq ** 1.5 * spin_sq ** 1.5)
    return spin_part + mass_part


def first_integral(u: VectorLike, p: Params) -> float:
    u_c = contravariant(u, p.g)
    return dot(p.s, u_c, p.g) / _velocity_norm(u_c, p.g)


def pirani_value(u: VectorLike, p: Params) -> float:
    '''Normalized Pirani defect s.u / (|s| |u|).'''
    u_c = contravariant(u, p.g)
    return dot(p.s, u_c, p.g) / (norm_abs(p.s, p.g) * _velocity_norm(u_c, p.g))


def psi_ansatz(u: VectorLike, udot: VectorLike, A: float, g: Signature = MINKOWSKI) -> float:
    u_c, a_c = contravariant(u, g), contravariant(udot, g)
    n2 = _velocity_norm(u_c, g) ** 2
    return 3.0 / n2 * (0.5 * dot(a_c, a_c, g) + A * wedge_norm(a_c, u_c, g) ** (4.0 / 3.0))


def spin_term_coefficient(u: np.ndarray, p: Params) -> float:
    '''m |u^s| / (|s|^3 |u|)'''
    n = _velocity_norm(u, p.g)
    _, wn = _spin_wedge(p.s, u, p.g)
    return p.m * wn / (norm_abs(p.s, p.g) ** 3 * n)


PsiFunction = Callable[[KinState, Params], float]


def autoparallel_rhs_general(st: KinState, p: Params, psi: PsiFunction) -> FourVector:
    '''Solved Euler-Poisson form with an arbitrary parametrization scalar psi.'''
    g = p.g
    u, a = st.u, st.a
    n2 = _velocity_norm(u, g) ** 2
    au = dot(a, u, g)
    coeff = spin_term_coefficient(u, p)
    spin_term = g.eta_diag * _triple(a, u, p.s, g)
    jerk = 3.0 * au / n2 * a - 3.0 * au ** 2 / n2 ** 2 * u + psi(st, p) * u - coeff * spin_term
    return FourVector.contra(jerk)


def _psi_of_state(st: KinState, p: Params) -> float:
    return psi_ansatz(st.u, st.a, p.A, p.g)


def autoparallel_rhs(st: KinState, p: Params) -> FourVector:
    return autoparallel_rhs_general(st, p, _psi_of_state)


def psi_from_rhs(st: KinState, p: Params) -> float:
    jerk = autoparallel_rhs(st, p).c
    return dot(jerk, st.u, p.g) / norm_abs(st.u, p.g) ** 2


def mathisson_spin_factor(u: VectorLike, g: Signature = MINKOWSKI) -> float:
    '''
    Sign k relating Mathisson's spin tensor to the spin vector of the
    third-order form: with S = spin_vector_to_tensor(k s, u) the flat
    Mathisson residual vanishes on solutions carrying spin s.
    '''
    return float(g.det * np.sign(dot(u, u, g)))


def solved_jet(st: KinState, p: Params) -> Jet3:
    return Jet3(st, autoparallel_rhs(st, p).c)
