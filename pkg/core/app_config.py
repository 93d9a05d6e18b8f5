import os
from dotenv import load_dotenv
# Load environment variables from .env file
load_dotenv()

def _env_float(name: str, default: float) -> float:
    return float(os.getenv(name, default))

def _env_int(name: str, default: int) -> int:
    return int(os.getenv(name, default))

# Constraint predicates and singular-set detection
class ToleranceConfig:
    PIRANI_TOL = _env_float('MATHISSON_TOP_PIRANI_TOL', 1e-9)
    LORENTZ_TOL = _env_float('MATHISSON_TOP_LORENTZ_TOL', 1e-12)
    DEGENERACY_TOL = _env_float('MATHISSON_TOP_DEGENERACY_TOL', 1e-12)
    # Relative distance from singular sets kept by the random samplers
    SAMPLE_MARGIN = 0.05

class FiniteDifferenceConfig:
    # Step for partial derivatives, relative to max(1, |coordinate|)
    PARTIAL_STEP = _env_float('MATHISSON_TOP_FD_STEP', 2e-3)
    # Step for total derivatives along the jet curve
    TAU_STEP = _env_float('MATHISSON_TOP_FD_TAU_STEP', 1e-2)
    RICHARDSON = True
    # Extrapolation levels; each one removes the next even power of the step
    RICHARDSON_LEVELS = _env_int('MATHISSON_TOP_FD_RICHARDSON_LEVELS', 2)
    JACOBIAN_STEP = 1e-5

class IntegratorDefaults:
    METHOD = 'rk45-adaptive'
    H0 = 1e-2
    TOL_ABS = 1e-10
    TOL_REL = 1e-10
    TAU_END = 10.0
    MAX_STEPS = _env_int('MATHISSON_TOP_MAX_STEPS', 200_000)
    SAFETY = 0.9
    MIN_FACTOR = 0.2
    MAX_FACTOR = 5.0
    # PI controller exponents for a 5th-order error estimate
    PI_ALPHA = 0.7 / 5
    PI_BETA = 0.4 / 5

class SeedConfig:
    DEFAULT_SEED = 20240607
    SEED_ENV_VAR = 'MATHISSON_TOP_SEED'

    @classmethod
    def resolve(cls, flag_seed: int | None = None) -> int:
        '''Flag wins over environment, environment over default.'''
        if flag_seed is not None:
            return flag_seed
        env_seed = os.getenv(cls.SEED_ENV_VAR)
        if env_seed is not None and env_seed.strip():
            return int(env_seed)
        return cls.DEFAULT_SEED

class LoggingConfig:
    LOG_LEVEL = os.getenv('MATHISSON_TOP_LOG_LEVEL', 'INFO')

class CheckConfig:
    WORKERS = _env_int('MATHISSON_TOP_WORKERS', 4)
    # Sample counts per property; the acceptance sizes
    VARIATIONALITY_SAMPLES = 200
    ZERMELO_SAMPLES = 200
    AUTOPARALLEL_SAMPLES = 100
    CLOSURE_SAMPLES = 200
    COVARIANCE_SAMPLES = 100
    JET_SAMPLES = 500
    HOMOGENIZATION_SAMPLES = 100

class OutputConfig:
    ARTIFACT_VERSION = '1.0.0'
    CSV_COLUMNS = [
        'tau',
        'x0', 'x1', 'x2', 'x3',
        'u0', 'u1', 'u2', 'u3',
        'a0', 'a1', 'a2', 'a3',
        'first_integral', 'pirani', 'residual_norm',
    ]
    SIGNIFICANT_DIGITS = 17
