"""
Calculus of variations at one independent parameter, done numerically.

Lagrange functions are plain callables L(x, u, udot) of contravariant
component arrays. Euler-Lagrange expressions, homogeneity checks and the
autoparallel constraints are all evaluated by central differences with
a Richardson table over halved steps.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np

from common.errors import ChartExit, MechanicsError, SingularParametrization
from core.app_config import FiniteDifferenceConfig, ToleranceConfig
from mechanics.dynamics import ContactState, KinState, Params, lagrangian_contact, lagrangian_homogeneous
from mechanics.minkowski import FourVector, contravariant

ScalarField2 = Callable[[np.ndarray, np.ndarray, np.ndarray], float]
ScalarField1 = Callable[[np.ndarray, np.ndarray], float]
ScalarField3 = Callable[[np.ndarray, np.ndarray, np.ndarray, np.ndarray], float]
# L(t, x^i, dx^i/dt, d2x^i/dt2)
ContactLagrangian = Callable[[float, np.ndarray, np.ndarray, np.ndarray], float]
RhsFunction = Callable[[KinState], Union[FourVector, np.ndarray]]


def _as4(values, name: str) -> np.ndarray:
    arr = np.array(contravariant(values), dtype=float).reshape(-1)
    if arr.shape != (4,) or not np.all(np.isfinite(arr)):
        raise ValueError(f'{name} must be 4 finite components, got {arr}')
    arr.setflags(write=False)
    return arr


def _as3(values, name: str) -> np.ndarray:
    arr = np.array(values, dtype=float).reshape(-1)
    if arr.shape != (3,) or not np.all(np.isfinite(arr)):
        raise ValueError(f'{name} must be 3 finite components, got {arr}')
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Jet4:
    """Derivatives of x with respect to tau, orders 0 through 4."""
    x: np.ndarray
    u: np.ndarray
    udot: np.ndarray
    uddot: np.ndarray
    u3: np.ndarray

    def __post_init__(self):
        for name in ('x', 'u', 'udot', 'uddot', 'u3'):
            object.__setattr__(self, name, _as4(getattr(self, name), name))

    def curve(self, tau: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        '''(x, u, udot) along the quartic Taylor curve through the jet.'''
        x = self.x + self.u * tau + self.udot * tau ** 2 / 2 + self.uddot * tau ** 3 / 6 + self.u3 * tau ** 4 / 24
        u = self.u + self.udot * tau + self.uddot * tau ** 2 / 2 + self.u3 * tau ** 3 / 6
        a = self.udot + self.uddot * tau + self.u3 * tau ** 2 / 2
        return x, u, a


@dataclass(frozen=True, eq=False)
class ContactJet3:
    """Point t, x^i with t-derivatives v1, v2, v3 of x^i."""
    t: float
    x: np.ndarray
    v1: np.ndarray
    v2: np.ndarray
    v3: np.ndarray

    def __post_init__(self):
        if not np.isfinite(self.t):
            raise ValueError(f't must be finite, got {self.t}')
        object.__setattr__(self, 't', float(self.t))
        for name in ('x', 'v1', 'v2', 'v3'):
            object.__setattr__(self, name, _as3(getattr(self, name), name))


@dataclass(frozen=True, eq=False)
class HomogeneousJet3:
    """tau-derivatives of (t, x^i) up to order 3; component 0 is t."""
    x: np.ndarray
    u: np.ndarray
    udot: np.ndarray
    uddot: np.ndarray

    def __post_init__(self):
        for name in ('x', 'u', 'udot', 'uddot'):
            object.__setattr__(self, name, _as4(getattr(self, name), name))


@dataclass(frozen=True)
class ZermeloResidual:
    r1: float
    r2: float
    r3: Optional[float] = None

    def max_abs(self) -> float:
        values = [self.r1, self.r2] + ([self.r3] if self.r3 is not None else [])
        return float(max(abs(v) for v in values))


@dataclass(frozen=True, eq=False)
class AutoparallelCheck:
    c1: np.ndarray
    c2: np.ndarray
    kappa: float
    mu: float


# --- finite-difference primitives ---

def _evaluate(L: Callable[..., float], *args, tau: Optional[float] = None) -> float:
    try:
        value = float(L(*args))
    except ChartExit:
        raise
    except MechanicsError as err:
        raise ChartExit(f'evaluation point left the chart: {err}', tau=tau) from err
    if not np.isfinite(value):
        raise ChartExit('function is not finite at an evaluation point', tau=tau)
    return value


def _extrapolate(diff: Callable[[float], np.ndarray], step: float, richardson: bool):
    '''
    Richardson table over steps h, h/2, h/4, ... for a central difference,
    whose error expansion holds even powers of h only.
    '''
    if not richardson:
        return diff(step)
    levels = FiniteDifferenceConfig.RICHARDSON_LEVELS
    row = [diff(step / 2.0 ** i) for i in range(levels + 1)]
    for k in range(1, levels + 1):
        factor = 4.0 ** k
        row = [(factor * row[i + 1] - row[i]) / (factor - 1.0) for i in range(len(row) - 1)]
    return row[0]


def _central(f: Callable[[float], np.ndarray], step: float, richardson: bool):
    def diff(h):
        return (f(h) - f(-h)) / (2.0 * h)
    return _extrapolate(diff, step, richardson)


def _central_second(f: Callable[[float], np.ndarray], step: float, richardson: bool):
    centre = f(0.0)

    def diff(h):
        return (f(h) - 2.0 * centre + f(-h)) / (h * h)
    return _extrapolate(diff, step, richardson)


def _gradient(L: Callable[..., float], point: Sequence[np.ndarray], block: int,
              h: float, richardson: bool, tau: Optional[float] = None) -> np.ndarray:
    '''Gradient of L with respect to one argument block of the point.'''
    z = np.asarray(point[block], dtype=float)
    grad = np.zeros(z.shape[0])
    for k in range(z.shape[0]):
        step = h * max(1.0, abs(z[k]))

        def shifted(d, k=k):
            args = list(point)
            moved = z.copy()
            moved[k] += d
            args[block] = moved
            return _evaluate(L, *args, tau=tau)
        grad[k] = _central(shifted, step, richardson)
    return grad


def euler_lagrange_fd(L: ScalarField2, jet: Jet4, h: Optional[float] = None,
                      tau_h: Optional[float] = None,
                      richardson: bool = FiniteDifferenceConfig.RICHARDSON) -> FourVector:
    '''
    E_a = dL/dx^a - D(dL/du^a) + D^2(dL/dudot^a) on a fourth-order jet.

    Partials use step h relative to max(1, |coordinate|); the total
    derivatives D, D^2 are taken along the Taylor curve of the jet with
    step tau_h.
    '''
    if not isinstance(jet, Jet4):
        raise TypeError(f'Euler-Lagrange expressions need a Jet4, got {type(jet).__name__}')
    h = FiniteDifferenceConfig.PARTIAL_STEP if h is None else h
    tau_h = FiniteDifferenceConfig.TAU_STEP if tau_h is None else tau_h

    def grad_along(block: int):
        def at(tau: float) -> np.ndarray:
            return _gradient(L, jet.curve(tau), block, h, richardson, tau=tau)
        return at

    dx = _gradient(L, (jet.x, jet.u, jet.udot), 0, h, richardson, tau=0.0)
    d_du = _central(grad_along(1), tau_h, richardson)
    dd_da = _central_second(grad_along(2), tau_h, richardson)
    return FourVector.co(dx - d_du + dd_da)


# --- parameter invariance ---

def zermelo_check(L: ScalarField2, st: KinState, h: Optional[float] = None,
                  richardson: bool = FiniteDifferenceConfig.RICHARDSON) -> ZermeloResidual:
    '''
    r1 = zeta1(L) - L and r2 = zeta2(L) with
    zeta1 = u d/du + 2 udot d/dudot and zeta2 = u d/dudot.
    '''
    h = FiniteDifferenceConfig.JACOBIAN_STEP if h is None else h
    x, u, a = st.x, st.u, st.a
    base = _evaluate(L, x, u, a)
    zeta1 = _central(lambda e: _evaluate(L, x, u + e * u, a + 2.0 * e * a), h, richardson)
    zeta2 = _central(lambda e: _evaluate(L, x, u, a + e * u), h, richardson)
    return ZermeloResidual(r1=float(zeta1 - base), r2=float(zeta2))


def zermelo_check_order3(L: ScalarField3, x: np.ndarray, u: np.ndarray, a: np.ndarray,
                         j: np.ndarray, h: Optional[float] = None,
                         richardson: bool = FiniteDifferenceConfig.RICHARDSON) -> ZermeloResidual:
    '''
    Third-order variant for L(x, u, udot, uddot):
    zeta1 = u d/du + 2 udot d/dudot + 3 uddot d/duddot,
    zeta2 = u d/dudot + 3 udot d/duddot, zeta3 = u d/duddot.
    '''
    h = FiniteDifferenceConfig.JACOBIAN_STEP if h is None else h
    x, u, a, j = (_as4(v, name) for v, name in ((x, 'x'), (u, 'u'), (a, 'udot'), (j, 'uddot')))
    base = _evaluate(L, x, u, a, j)
    zeta1 = _central(lambda e: _evaluate(L, x, u + e * u, a + 2.0 * e * a, j + 3.0 * e * j), h, richardson)
    zeta2 = _central(lambda e: _evaluate(L, x, u, a + e * u, j + 3.0 * e * a), h, richardson)
    zeta3 = _central(lambda e: _evaluate(L, x, u, a, j + e * u), h, richardson)
    return ZermeloResidual(r1=float(zeta1 - base), r2=float(zeta2), r3=float(zeta3))


def zermelo_finite(L: ScalarField2, st: KinState, lam: float, mu: float) -> float:
    '''L(x, lam u, lam^2 udot + lam mu u) - lam L(x, u, udot)'''
    if not lam > 0:
        raise ValueError(f'lambda must be positive, got {lam}')
    x, u, a = st.x, st.u, st.a
    moved = _evaluate(L, x, lam * u, lam ** 2 * a + lam * mu * u)
    return moved - lam * _evaluate(L, x, u, a)


# --- contact and homogeneous jets ---

def compose_derivatives(d1, d2, d3, t1: float, t2: float, t3: float):
    """
    Derivatives of y(t(tau)) given dy/dt up to order 3 and t', t'', t'''.
    """
    d1, d2, d3 = (np.asarray(d, dtype=float) for d in (d1, d2, d3))
    u1 = d1 * t1
    u2 = d2 * t1 ** 2 + d1 * t2
    u3 = d3 * t1 ** 3 + 3.0 * d2 * t1 * t2 + d1 * t3
    return u1, u2, u3


def decompose_derivatives(u1, u2, u3, t1: float, t2: float, t3: float):
    '''Inverse of compose_derivatives by back-substitution.'''
    if abs(t1) <= ToleranceConfig.DEGENERACY_TOL:
        raise SingularParametrization('dt/dtau vanishes', t_prime=t1)
    u1, u2, u3 = (np.asarray(v, dtype=float) for v in (u1, u2, u3))
    d1 = u1 / t1
    d2 = (u2 - d1 * t2) / t1 ** 2
    d3 = (u3 - 3.0 * d2 * t1 * t2 - d1 * t3) / t1 ** 3
    return d1, d2, d3


def contact_to_homogeneous(cj: ContactJet3, t_derivs: Sequence[float]) -> HomogeneousJet3:
    t1, t2, t3 = (float(v) for v in t_derivs)
    if abs(t1) <= ToleranceConfig.DEGENERACY_TOL:
        raise SingularParametrization('dt/dtau vanishes', t_prime=t1)
    u1, u2, u3 = compose_derivatives(cj.v1, cj.v2, cj.v3, t1, t2, t3)
    return HomogeneousJet3(
        x=np.concatenate([[cj.t], cj.x]),
        u=np.concatenate([[t1], u1]),
        udot=np.concatenate([[t2], u2]),
        uddot=np.concatenate([[t3], u3]),
    )


def homogeneous_to_contact(hj: HomogeneousJet3) -> ContactJet3:
    t1, t2, t3 = hj.u[0], hj.udot[0], hj.uddot[0]
    v1, v2, v3 = decompose_derivatives(hj.u[1:], hj.udot[1:], hj.uddot[1:], t1, t2, t3)
    return ContactJet3(t=hj.x[0], x=hj.x[1:], v1=v1, v2=v2, v3=v3)


def homogenize_lagrangian(L: ContactLagrangian) -> ScalarField2:
    '''The parameter-invariant Lagrange function L(contact image) * dt/dtau.'''
    def homogeneous(x, u, a) -> float:
        t1 = float(u[0])
        if abs(t1) <= ToleranceConfig.DEGENERACY_TOL:
            raise SingularParametrization('dt/dtau vanishes', t_prime=t1)
        v1 = np.asarray(u[1:], dtype=float) / t1
        v2 = (np.asarray(a[1:], dtype=float) - v1 * a[0]) / t1 ** 2
        return float(L(float(x[0]), np.asarray(x[1:], dtype=float), v1, v2)) * t1
    return homogeneous


def homogenize_euler_poisson(E, hj: Union[HomogeneousJet3, np.ndarray]) -> FourVector:
    '''-(dx^i/dtau) E_i dt + (dt/dtau) E_i dx^i'''
    E = _as3(E, 'E')
    u = hj.u if isinstance(hj, HomogeneousJet3) else _as4(hj, 'u')
    return FourVector.co(np.concatenate([[-float(u[1:] @ E)], u[0] * E]))


def contact_field(i: int, s0: float, svec, m: float) -> ContactLagrangian:
    '''lagrangian_contact of chart e_(i) as a function of (t, x, v, v').'''
    svec = _as3(svec, 'svec')

    def field(t, xs, v, vp) -> float:
        cs = ContactState(t=t, xs=xs, v=v, vp=vp, vpp=np.zeros(3), s0=s0, svec=svec)
        return lagrangian_contact(i, cs, m)
    return field


def homogeneous_field(alpha: int, p: Params) -> ScalarField2:
    '''lagrangian_homogeneous of chart e_(alpha) as a ScalarField2.'''
    def field(x, u, a) -> float:
        return lagrangian_homogeneous(alpha, KinState(x, u, a), p)
    return field


def total_derivative_lagrangian(G: ScalarField1, h: float = 1e-2,
                                richardson: bool = FiniteDifferenceConfig.RICHARDSON) -> ScalarField2:
    '''Null Lagrangian DG = u dG/dx + udot dG/du of a first-order G.'''
    def total(x, u, a) -> float:
        x, u, a = (np.asarray(v, dtype=float) for v in (x, u, a))
        return float(_central(lambda e: _evaluate(G, x + e * u, u + e * a), h, richardson))
    return total


# --- autoparallel constraints ---

def _jacobian(xi: RhsFunction, st: KinState, block: str, h: float, richardson: bool) -> np.ndarray:
    z = getattr(st, block)
    jac = np.zeros((4, 4))
    for k in range(4):
        step = h * max(1.0, abs(z[k]))

        def shifted(d, k=k):
            moved = z.copy()
            moved[k] += d
            state = KinState(st.x, moved, st.a) if block == 'u' else KinState(st.x, st.u, moved)
            try:
                out = contravariant(xi(state))
            except ChartExit:
                raise
            except MechanicsError as err:
                raise ChartExit(f'evaluation point left the chart: {err}') from err
            return np.asarray(out, dtype=float)
        jac[:, k] = _central(shifted, step, richardson)
    return jac


def autoparallel_condition_check(xi: RhsFunction, st: KinState, h: Optional[float] = None,
                                 richardson: bool = FiniteDifferenceConfig.RICHARDSON) -> AutoparallelCheck:
    '''
    Residuals of the two commutation conditions

        udot - 1/3 (dxi/dudot) u = kappa u
        xi - 1/3 (dxi/du) u - 2/3 (dxi/dudot) udot = mu u

    with kappa and mu fitted by least squares along u.
    '''
    h = FiniteDifferenceConfig.JACOBIAN_STEP if h is None else h
    u, a = st.u, st.a
    xi0 = np.asarray(contravariant(xi(st)), dtype=float)
    j_u = _jacobian(xi, st, 'u', h, richardson)
    j_a = _jacobian(xi, st, 'a', h, richardson)

    raw1 = a - j_a @ u / 3.0
    raw2 = xi0 - j_u @ u / 3.0 - 2.0 * j_a @ a / 3.0
    column = u.reshape(4, 1)
    kappa = float(np.linalg.lstsq(column, raw1, rcond=None)[0][0])
    mu = float(np.linalg.lstsq(column, raw2, rcond=None)[0][0])
    return AutoparallelCheck(c1=raw1 - kappa * u, c2=raw2 - mu * u, kappa=kappa, mu=mu)


def convergence_slope(steps: Sequence[float], errors: Sequence[float]) -> float:
    '''Slope of log(error) against log(step).'''
    steps = np.asarray(steps, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if steps.shape != errors.shape or steps.size < 2:
        raise ValueError('need at least two (step, error) pairs')
    if np.any(steps <= 0) or np.any(errors <= 0):
        raise ValueError('steps and errors must be positive')
    return float(np.polyfit(np.log(steps), np.log(errors), 1)[0])
