"""
Integration of the solved equations of motion as the first-order system

    x' = u,  u' = a,  a' = xi(x, u, a)

with a fixed-step classical Runge-Kutta scheme or the Dormand-Prince 5(4)
pair under PI step control. Accepted steps are kept; cubic Hermite
interpolation between them gives dense output.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from common.enums import IntegratorMethod
from common.errors import ChartExit, EmptyTrajectory, MaxStepsExceeded, MechanicsError, NotTimelike, StepUnderflow
from common.models import DiagnosticsSummary, IntegratorConfig
from core.app_config import IntegratorDefaults
from core.logger_config import logger
from mechanics.dynamics import Jet3, KinState, Params, first_integral, pirani_value, residual_euler_poisson
from mechanics.minkowski import FourVector, contravariant, dot
from mechanics.variational import decompose_derivatives

SystemRHS = Callable[[float, np.ndarray], np.ndarray]
StateRHS = Callable[[KinState, Params], FourVector]

# Dormand-Prince 5(4) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B5 - _B4


@dataclass(frozen=True, eq=False)
class SystemSolution:
    taus: np.ndarray
    ys: np.ndarray
    fs: np.ndarray
    rejected: int = 0


def _evaluate(f: SystemRHS, tau: float, y: np.ndarray) -> np.ndarray:
    try:
        dy = np.asarray(f(tau, y), dtype=float)
    except ChartExit:
        raise
    except MechanicsError as err:
        raise ChartExit(f'right-hand side left its chart: {err}', tau=tau) from err
    if not np.all(np.isfinite(dy)):
        raise ChartExit('right-hand side is not finite', tau=tau)
    return dy


def _rk4(f: SystemRHS, y0: np.ndarray, tau_end: float, cfg: IntegratorConfig) -> SystemSolution:
    n_steps = max(1, int(np.ceil(tau_end / cfg.h0 - 1e-12)))
    if n_steps > cfg.max_steps:
        raise MaxStepsExceeded('fixed step needs more steps than allowed', tau=0.0, steps=n_steps)
    h = tau_end / n_steps
    taus = [0.0]
    ys = [y0]
    fs = [_evaluate(f, 0.0, y0)]
    y = y0
    for i in range(n_steps):
        tau = i * h
        k1 = fs[-1]
        k2 = _evaluate(f, tau + h / 2, y + h / 2 * k1)
        k3 = _evaluate(f, tau + h / 2, y + h / 2 * k2)
        k4 = _evaluate(f, tau + h, y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        tau_next = (i + 1) * h
        taus.append(tau_next)
        ys.append(y)
        fs.append(_evaluate(f, tau_next, y))
    return SystemSolution(np.array(taus), np.array(ys), np.array(fs))


def _dopri45(f: SystemRHS, y0: np.ndarray, tau_end: float, cfg: IntegratorConfig) -> SystemSolution:
    h_max = cfg.h_max if cfg.h_max is not None else np.inf
    h = min(cfg.h0, h_max, tau_end)
    tau, y = 0.0, y0
    k_first = _evaluate(f, tau, y)
    taus, ys, fs = [tau], [y], [k_first]
    err_prev = 1.0
    attempts = rejected = 0

    while tau < tau_end:
        attempts += 1
        if attempts > cfg.max_steps:
            raise MaxStepsExceeded('adaptive integration exceeded the step cap', tau=tau, steps=attempts - 1)
        if h < 16.0 * np.finfo(float).eps * max(1.0, abs(tau)):
            raise StepUnderflow('step size underflow', tau=tau, step=h)
        last = tau + h >= tau_end
        if last:
            h = tau_end - tau

        k = [k_first]
        for stage in range(1, 7):
            incr = sum(a * ks for a, ks in zip(_A[stage], k))
            k.append(_evaluate(f, tau + _C[stage] * h, y + h * incr))
        y_new = y + h * sum(b * ks for b, ks in zip(_B5, k) if b != 0.0)
        err_vec = h * sum(e * ks for e, ks in zip(_E, k))
        scale = cfg.tol_abs + cfg.tol_rel * np.maximum(np.abs(y), np.abs(y_new))
        err = float(np.max(np.abs(err_vec) / scale))

        if err <= 1.0:
            tau = tau_end if last else tau + h
            y = y_new
            k_first = k[6]
            taus.append(tau)
            ys.append(y)
            fs.append(k_first)
            err = max(err, 1e-10)
            factor = IntegratorDefaults.SAFETY * err ** -IntegratorDefaults.PI_ALPHA * err_prev ** IntegratorDefaults.PI_BETA
            factor = min(IntegratorDefaults.MAX_FACTOR, max(IntegratorDefaults.MIN_FACTOR, factor))
            err_prev = err
        else:
            rejected += 1
            factor = max(IntegratorDefaults.MIN_FACTOR, IntegratorDefaults.SAFETY * err ** -0.2)
        h = min(h * factor, h_max)

    logger.debug(f'dopri45: {len(taus) - 1} accepted, {rejected} rejected steps')
    return SystemSolution(np.array(taus), np.array(ys), np.array(fs), rejected)


def integrate_system(f: SystemRHS, y0: Sequence[float], tau_end: float,
                     cfg: IntegratorConfig) -> SystemSolution:
    '''Integrate y' = f(tau, y) from tau = 0 to tau_end.'''
    y0 = np.asarray(y0, dtype=float)
    if not np.all(np.isfinite(y0)):
        raise ValueError('initial state must be finite')
    if tau_end < 0:
        raise ValueError(f'tau_end must be non-negative, got {tau_end}')
    if tau_end == 0:
        return SystemSolution(np.array([0.0]), y0[None, :], _evaluate(f, 0.0, y0)[None, :])
    if cfg.method is IntegratorMethod.RK4_FIXED:
        return _rk4(f, y0, tau_end, cfg)
    return _dopri45(f, y0, tau_end, cfg)


@dataclass(frozen=True, eq=False)
class Trajectory:
    """
    Accepted samples of one integration. states holds (x, u, a) in the
    fixed state order; jerks the matching right-hand side values.
    """
    taus: np.ndarray
    states: np.ndarray
    jerks: np.ndarray
    proper_time: np.ndarray
    params: Params
    first_integral: np.ndarray
    pirani: np.ndarray
    residual_norm: np.ndarray

    def __len__(self) -> int:
        return int(self.taus.shape[0])

    def state(self, i: int) -> KinState:
        return KinState.from_array(self.states[i])

    @property
    def samples(self) -> list[tuple[float, KinState]]:
        return [(float(t), self.state(i)) for i, t in enumerate(self.taus)]

    @property
    def positions(self) -> np.ndarray:
        return self.states[:, 0:4]

    @property
    def velocities(self) -> np.ndarray:
        return self.states[:, 4:8]


def _diagnostics(states: np.ndarray, jerks: np.ndarray, p: Params):
    fi = np.empty(len(states))
    pv = np.empty(len(states))
    rn = np.empty(len(states))
    for i, (y, j) in enumerate(zip(states, jerks)):
        st = KinState.from_array(y)
        fi[i] = first_integral(st.u, p)
        pv[i] = pirani_value(st.u, p)
        rn[i] = float(np.linalg.norm(residual_euler_poisson(Jet3(st, j), p).c))
    return fi, pv, rn


def _build(taus, states, jerks, proper_time, p: Params) -> Trajectory:
    fi, pv, rn = _diagnostics(states, jerks, p)
    return Trajectory(np.asarray(taus, dtype=float), np.asarray(states, dtype=float),
                      np.asarray(jerks, dtype=float), np.asarray(proper_time, dtype=float),
                      p, fi, pv, rn)


def integrate(rhs: StateRHS, y0: KinState, p: Params, cfg: IntegratorConfig) -> Trajectory:
    '''
    Integrate the world line from y0 over [0, cfg.tau_end]. Proper time
    (arc length |u| dtau) is carried as a thirteenth component.
    '''
    g = p.g

    def system(tau: float, y: np.ndarray) -> np.ndarray:
        st = KinState.from_array(y[:12])
        jerk = contravariant(rhs(st, p), g)
        return np.concatenate([st.u, st.a, jerk, [np.sqrt(abs(dot(st.u, st.u, g)))]])

    y_init = np.concatenate([y0.as_array(), [0.0]])
    sol = integrate_system(system, y_init, cfg.tau_end, cfg)
    logger.info(f'integrated {len(sol.taus)} samples to tau={sol.taus[-1]:.6g} with {cfg.method.value}')
    return _build(sol.taus, sol.ys[:, :12], sol.fs[:, 8:12], sol.ys[:, 12], p)


def reverse_rhs(rhs: StateRHS) -> StateRHS:
    '''
    Right-hand side of the time-reversed world line x(-tau): integrating
    it from (x, -u, a) retraces the original motion backwards.
    '''
    def reversed_rhs(st: KinState, p: Params) -> FourVector:
        jerk = contravariant(rhs(KinState(st.x, -st.u, st.a), p), p.g)
        return FourVector.contra(-jerk)
    return reversed_rhs


def _locate(taus: np.ndarray, tau: float) -> int:
    if not taus[0] <= tau <= taus[-1]:
        raise ValueError(f'tau={tau} outside the trajectory range [{taus[0]}, {taus[-1]}]')
    return int(min(max(np.searchsorted(taus, tau, side='right') - 1, 0), len(taus) - 2))


def _hermite(t0, t1, y0, y1, d0, d1, tau):
    h = t1 - t0
    s = (tau - t0) / h
    h00 = 2 * s ** 3 - 3 * s ** 2 + 1
    h10 = s ** 3 - 2 * s ** 2 + s
    h01 = -2 * s ** 3 + 3 * s ** 2
    h11 = s ** 3 - s ** 2
    return h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1


def dense_evaluate(tr: Trajectory, tau: float) -> KinState:
    '''Cubic Hermite interpolation of (x, u, a) between accepted samples.'''
    if len(tr) == 0:
        raise EmptyTrajectory('trajectory has no samples')
    if len(tr) == 1:
        if tau != tr.taus[0]:
            raise ValueError(f'tau={tau} outside a single-sample trajectory')
        return tr.state(0)
    i = _locate(tr.taus, tau)
    d0 = np.concatenate([tr.states[i, 4:12], tr.jerks[i]])
    d1 = np.concatenate([tr.states[i + 1, 4:12], tr.jerks[i + 1]])
    y = _hermite(tr.taus[i], tr.taus[i + 1], tr.states[i], tr.states[i + 1], d0, d1, tau)
    return KinState.from_array(y)


def resample_positions(tr: Trajectory, grid: Sequence[float]) -> np.ndarray:
    return np.array([dense_evaluate(tr, float(t)).x for t in grid])


def proper_time_reparametrize(tr: Trajectory) -> Trajectory:
    '''
    The same world line parametrized by proper time: u.u = 1 at every
    sample, with a and the jerk transformed by the chain rule.
    '''
    if len(tr) == 0:
        raise EmptyTrajectory('trajectory has no samples')
    g = tr.params.g
    states = np.empty_like(tr.states)
    jerks = np.empty_like(tr.jerks)
    for i, (y, j) in enumerate(zip(tr.states, tr.jerks)):
        x, u, a = y[0:4], y[4:8], y[8:12]
        uu = dot(u, u, g)
        if uu <= 0:
            raise NotTimelike('velocity is not timelike', tau=float(tr.taus[i]), u_dot_u=uu)
        n = np.sqrt(uu)
        ua = dot(u, a, g)
        n1 = ua / n
        n2 = (dot(a, a, g) + dot(u, j, g)) / n - ua ** 2 / n ** 3
        d1, d2, d3 = decompose_derivatives(u, a, j, n, n1, n2)
        states[i] = np.concatenate([x, d1, d2])
        jerks[i] = d3
    s = tr.proper_time
    return _build(s, states, jerks, s, tr.params)


def world_line_distance(tr_a: Trajectory, tr_b: Trajectory, n: int = 200) -> float:
    '''Max Euclidean distance of positions on a common proper-time grid.'''
    pa = proper_time_reparametrize(tr_a)
    pb = proper_time_reparametrize(tr_b)
    end = min(pa.taus[-1], pb.taus[-1])
    grid = np.linspace(0.0, end, n)
    diff = resample_positions(pa, grid) - resample_positions(pb, grid)
    return float(np.max(np.linalg.norm(diff, axis=1)))


def diagnostics_summary(tr: Trajectory) -> DiagnosticsSummary:
    if len(tr) == 0:
        raise EmptyTrajectory('trajectory has no samples')
    return DiagnosticsSummary(
        max_first_integral_drift=float(np.max(np.abs(tr.first_integral - tr.first_integral[0]))),
        max_pirani_drift=float(np.max(np.abs(tr.pirani - tr.pirani[0]))),
        max_residual_norm=float(np.max(np.abs(tr.residual_norm))),
        samples=len(tr),
    )
