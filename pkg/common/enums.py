from enum import Enum

class Variance(Enum):
    CONTRAVARIANT = 'contravariant'
    COVARIANT = 'covariant'

class LorentzKind(Enum):
    ROTATION = 'rotation'
    BOOST = 'boost'
    PRODUCT = 'product'

class IntegratorMethod(str, Enum):
    RK4_FIXED = 'rk4-fixed'
    RK45_ADAPTIVE = 'rk45-adaptive'

class OutputFormat(str, Enum):
    CSV = 'csv'
    JSON = 'json'

class SuiteName(str, Enum):
    VARIATIONALITY = 'variationality'
    ZERMELO = 'zermelo'
    COVARIANCE = 'covariance'
    CONSERVATION = 'conservation'
    EQUIVALENCE = 'equivalence'
    AUTOPARALLEL = 'autoparallel'
    JETS = 'jets'
    HOMOGENIZATION = 'homogenization'
    INTEGRATOR = 'integrator'
    ALL = 'all'

class PropertyStatus(Enum):
    PASSED = 'pass'
    FAILED = 'fail'
