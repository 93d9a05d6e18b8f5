from pathlib import Path
from typing import Union
import math
import re

import numpy as np

from common.errors import ConfigParseError, NotSkew
from core.app_config import OutputConfig
from mechanics.minkowski import FourVector, SpinTensor

_SEPARATORS = re.compile(r'[,\s]+')


def _numbers(path: Union[str, Path]) -> list[list[float]]:
    try:
        text = Path(path).read_text(encoding='utf-8')
    except (OSError, UnicodeDecodeError) as e:
        raise ConfigParseError('spin file', f'cannot read {path}: {e}')
    rows = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        try:
            row = [float(v) for v in _SEPARATORS.split(line) if v]
        except ValueError:
            raise ConfigParseError(f'line {number}', f'expected real numbers, got {line!r}')
        if not all(math.isfinite(v) for v in row):
            raise ConfigParseError(f'line {number}', 'values must be finite')
        rows.append(row)
    return rows


def format_number(value: float) -> str:
    # adding 0.0 folds -0.0 into 0.0
    return f'{float(value) + 0.0:.{OutputConfig.SIGNIFICANT_DIGITS}g}'


class SpinFile:
    """
    Spin tensors are stored as four rows of four reals (S^{ab}, upper
    indices); spin vectors as one row of four covariant components s_a.
    """
    @staticmethod
    def read_tensor(path: Union[str, Path]) -> SpinTensor:
        rows = _numbers(path)
        if len(rows) != 4 or any(len(r) != 4 for r in rows):
            raise ConfigParseError('tensor', 'expected 4 rows of 4 reals')
        try:
            return SpinTensor.from_matrix(np.array(rows))
        except NotSkew as e:
            raise ConfigParseError('tensor', str(e))

    @staticmethod
    def read_vector(path: Union[str, Path]) -> FourVector:
        values = [v for row in _numbers(path) for v in row]
        if len(values) != 4:
            raise ConfigParseError('vector', f'expected 4 reals, got {len(values)}')
        return FourVector.co(values)

    @staticmethod
    def format_tensor(S: SpinTensor) -> str:
        return '\n'.join(' '.join(format_number(v) for v in row) for row in S.matrix) + '\n'

    @staticmethod
    def format_vector(s: FourVector) -> str:
        return ' '.join(format_number(v) for v in s.c) + '\n'
