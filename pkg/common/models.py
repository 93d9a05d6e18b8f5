from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
import math
from typing import Optional

from common.enums import IntegratorMethod, OutputFormat, PropertyStatus, SuiteName
from common.errors import ConfigParseError
from core.app_config import IntegratorDefaults, OutputConfig, ToleranceConfig
from mechanics.minkowski import Signature, norm_abs

class IntegratorConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    method: IntegratorMethod = Field(default=IntegratorMethod(IntegratorDefaults.METHOD), description="Stepping scheme")
    h0: float = Field(default=IntegratorDefaults.H0, gt=0, description="Initial (or fixed) step in tau")
    tol_abs: float = Field(default=IntegratorDefaults.TOL_ABS, gt=0, description="Absolute local error tolerance")
    tol_rel: float = Field(default=IntegratorDefaults.TOL_REL, gt=0, description="Relative local error tolerance")
    tau_end: float = Field(default=IntegratorDefaults.TAU_END, ge=0, description="Integration horizon")
    max_steps: int = Field(default=IntegratorDefaults.MAX_STEPS, ge=1, description="Cap on attempted steps")
    h_max: Optional[float] = Field(default=None, gt=0, description="Optional step ceiling")

class RunConfig(BaseModel):
    """Everything needed to reproduce one simulation."""
    model_config = ConfigDict(frozen=True)

    m: float = Field(gt=0, description="Mass parameter of the Euler-Poisson form")
    m0: Optional[float] = Field(default=None, gt=0, description="Rest mass of the third-order form, defaults to m")
    A: float = Field(default=0.0, description="Parametrization family constant")
    s: list[float] = Field(description="Spin vector, contravariant")
    x0: list[float] = Field(default_factory=lambda: [0.0, 0.0, 0.0, 0.0])
    u0: list[float] = Field(description="Initial velocity, contravariant")
    a0: list[float] = Field(description="Initial acceleration, contravariant")
    signature: list[int] = Field(default_factory=lambda: [1, -1, -1, -1])
    orientation: int = Field(default=1)
    pirani_project: bool = Field(default=False, description="Project s and a onto the Pirani surface before integrating")
    integrator: IntegratorConfig = Field(default_factory=IntegratorConfig)
    output: Optional[str] = Field(default=None, description="Trajectory file path, stdout when unset")
    format: OutputFormat = Field(default=OutputFormat.CSV)

    @field_validator('s', 'x0', 'u0', 'a0', 'signature')
    @classmethod
    def _four_components(cls, value):
        if len(value) != 4:
            raise ValueError(f'expected 4 components, got {len(value)}')
        if any(not math.isfinite(v) for v in value):
            raise ValueError('components must be finite')
        return value

    @field_validator('signature')
    @classmethod
    def _signs(cls, value):
        if any(v not in (1, -1) for v in value):
            raise ValueError(f'signature entries must be +1 or -1, got {value}')
        return value

    @field_validator('orientation')
    @classmethod
    def _orientation(cls, value):
        if value not in (1, -1):
            raise ValueError(f'orientation must be +1 or -1, got {value}')
        return value

    @model_validator(mode='after')
    def _non_degenerate(self):
        # raised as-is so the offending key reaches the CLI
        g = Signature(diag=tuple(self.signature), orientation=self.orientation)
        if norm_abs(self.s, g) <= ToleranceConfig.DEGENERACY_TOL:
            raise ConfigParseError('s', f'spin vector has zero norm under signature {g.describe()}')
        if norm_abs(self.u0, g) <= ToleranceConfig.DEGENERACY_TOL:
            raise ConfigParseError('u0', f'velocity has zero norm under signature {g.describe()}')
        return self

    @property
    def rest_mass(self) -> float:
        return self.m if self.m0 is None else self.m0

class DiagnosticsSummary(BaseModel):
    max_first_integral_drift: float = Field(description="max |I(tau) - I(0)|")
    max_pirani_drift: float = Field(description="max |P(tau) - P(0)| of the normalized Pirani value")
    max_residual_norm: float = Field(description="max Euler-Poisson residual norm")
    samples: int = Field(description="Number of samples")

class PropertyResult(BaseModel):
    name: str = Field(description="Property checked, e.g. closure or dan_parallel")
    status: PropertyStatus
    cases: int = Field(description="Sampled cases evaluated")
    failures: int = Field(default=0, description="Cases beyond tolerance")
    skipped: int = Field(default=0, description="Cases rejected near a chart singularity")
    max_residual: float = Field(default=0.0, description="Worst measured residual")
    tolerance: float = Field(description="Acceptance tolerance")
    detail: Optional[str] = Field(default=None, description="Worst-case description on failure")

class SuiteReport(BaseModel):
    suite: SuiteName
    seed: int
    results: list[PropertyResult] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.status is PropertyStatus.PASSED for r in self.results)

class TrajectoryMetadata(BaseModel):
    artifact_version: str = Field(default=OutputConfig.ARTIFACT_VERSION)
    state_order: str = Field(default='x0..x3,u0..u3,a0..a3')
    signature: list[int]
    orientation: int
    method: IntegratorMethod
    tol_abs: float
    tol_rel: float
    m: float
    m0: float
    A: float
    s: list[float]
    seed: Optional[int] = None
    diagnostics: Optional[DiagnosticsSummary] = None
