from dataclasses import dataclass
from typing import Optional

import numpy as np

from common.errors import ConfigParseError, PiraniViolated
from common.models import DiagnosticsSummary, RunConfig, TrajectoryMetadata
from core.app_config import ToleranceConfig
from core.logger_config import logger
from core.utils.sampling import project_pirani
from mechanics.dynamics import KinState, Params, autoparallel_rhs, pirani_value
from mechanics.integrator import Trajectory, diagnostics_summary, integrate
from mechanics.minkowski import Signature, dot, norm_abs


@dataclass(frozen=True)
class SimulationResult:
    trajectory: Trajectory
    summary: DiagnosticsSummary
    metadata: TrajectoryMetadata


class SimulationHandler:
    @staticmethod
    def initial_data(config: RunConfig) -> tuple[KinState, Params]:
        g = Signature(diag=tuple(config.signature), orientation=config.orientation)
        s = np.array(config.s, dtype=float)
        u = np.array(config.u0, dtype=float)
        a = np.array(config.a0, dtype=float)
        if config.pirani_project:
            before = pirani_value(u, Params(m=config.m, m0=config.rest_mass, s=s, g=g))
            s = project_pirani(s, u, g)
            if norm_abs(s, g) <= ToleranceConfig.DEGENERACY_TOL:
                raise ConfigParseError('s', 'spin is parallel to u0, nothing is left after the Pirani projection')
            # keep the derivative of the constraint satisfied as well
            a = a - dot(s, a, g) / dot(s, s, g) * s
            p = Params(m=config.m, m0=config.rest_mass, s=s, A=config.A, g=g)
            after = pirani_value(u, p)
            logger.info(f'Projected spin onto the Pirani surface: {before:.3e} -> {after:.3e}')
            if abs(after) > ToleranceConfig.PIRANI_TOL:
                raise PiraniViolated('projection did not reach the Pirani surface', pirani=after)
        else:
            p = Params(m=config.m, m0=config.rest_mass, s=s, A=config.A, g=g)
        return KinState(np.array(config.x0, dtype=float), u, a), p

    @staticmethod
    def run(config: RunConfig, seed: Optional[int] = None) -> SimulationResult:
        st, p = SimulationHandler.initial_data(config)
        logger.info(f'Simulating to tau={config.integrator.tau_end} with {config.integrator.method.value}')
        trajectory = integrate(autoparallel_rhs, st, p, config.integrator)
        summary = diagnostics_summary(trajectory)
        metadata = TrajectoryMetadata(
            signature=list(config.signature),
            orientation=config.orientation,
            method=config.integrator.method,
            tol_abs=config.integrator.tol_abs,
            tol_rel=config.integrator.tol_rel,
            m=config.m,
            m0=config.rest_mass,
            A=config.A,
            s=[float(v) for v in p.s],
            seed=seed,
            diagnostics=summary,
        )
        return SimulationResult(trajectory, summary, metadata)
