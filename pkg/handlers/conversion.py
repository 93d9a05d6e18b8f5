from typing import Sequence

import numpy as np

from common.errors import ConfigParseError, PiraniViolated
from core.app_config import ToleranceConfig
from core.logger_config import logger
from mechanics.minkowski import (
    MINKOWSKI,
    FourVector,
    Signature,
    SpinTensor,
    contravariant,
    lower,
    spin_tensor_to_vector,
    spin_vector_to_tensor,
)


class ConversionHandler:
    """Spin tensor <-> spin vector for a given velocity."""
    @staticmethod
    def velocity(values: Sequence[float]) -> FourVector:
        if len(values) != 4:
            raise ConfigParseError('u', f'expected 4 reals, got {len(values)}')
        return FourVector.contra(values)

    @staticmethod
    def tensor_to_vector(S: SpinTensor, u: FourVector, g: Signature = MINKOWSKI) -> FourVector:
        # Pirani condition u_b S^{ab} = 0
        defect = S.matrix @ lower(u, g)
        scale = float(np.linalg.norm(S.matrix)) * float(np.linalg.norm(contravariant(u, g)))
        if float(np.linalg.norm(defect)) > ToleranceConfig.PIRANI_TOL * max(scale, ToleranceConfig.DEGENERACY_TOL):
            raise PiraniViolated('spin tensor does not satisfy u_b S^ab = 0', defect=defect.tolist())
        s = spin_tensor_to_vector(S, u, g)
        logger.debug(f'Converted spin tensor to covariant spin vector {s.c.tolist()}')
        return s

    @staticmethod
    def vector_to_tensor(s: FourVector, u: FourVector, g: Signature = MINKOWSKI) -> SpinTensor:
        S = spin_vector_to_tensor(s, u, g)
        logger.debug('Converted spin vector to spin tensor')
        return S
