from pathlib import Path
from typing import Any, Dict, Union
import math

from pydantic import ValidationError

from common.errors import ConfigParseError
from common.models import IntegratorConfig, RunConfig
from core.logger_config import logger

# key -> (RunConfig field, value kind)
_RUN_KEYS = {
    'm': ('m', 'float'),
    'm0': ('m0', 'float'),
    'a': ('A', 'float'),
    's': ('s', 'vector'),
    'x': ('x0', 'vector'),
    'x0': ('x0', 'vector'),
    'u': ('u0', 'vector'),
    'u0': ('u0', 'vector'),
    'udot': ('a0', 'vector'),
    'a0': ('a0', 'vector'),
    'signature': ('signature', 'signs'),
    'orientation': ('orientation', 'int'),
    'pirani_project': ('pirani_project', 'bool'),
    'output': ('output', 'str'),
    'format': ('format', 'str'),
}

_INTEGRATOR_KEYS = {
    'method': ('method', 'str'),
    'h0': ('h0', 'float'),
    'tol_abs': ('tol_abs', 'float'),
    'tolabs': ('tol_abs', 'float'),
    'tol_rel': ('tol_rel', 'float'),
    'tolrel': ('tol_rel', 'float'),
    'tau_end': ('tau_end', 'float'),
    'tauend': ('tau_end', 'float'),
    'max_steps': ('max_steps', 'int'),
    'maxsteps': ('max_steps', 'int'),
    'h_max': ('h_max', 'float'),
}

_TRUE = {'true', 'yes', 'on', '1'}
_FALSE = {'false', 'no', 'off', '0'}


def _parse_float(key: str, text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ConfigParseError(key, f'expected a real number, got {text!r}')
    if not math.isfinite(value):
        raise ConfigParseError(key, f'value must be finite, got {text!r}')
    return value


def _parse_value(key: str, kind: str, text: str) -> Any:
    if not text:
        raise ConfigParseError(key, 'empty value')
    if kind == 'float':
        return _parse_float(key, text)
    if kind == 'int':
        try:
            return int(text)
        except ValueError:
            raise ConfigParseError(key, f'expected an integer, got {text!r}')
    if kind == 'bool':
        lowered = text.lower()
        if lowered in _TRUE:
            return True
        if lowered in _FALSE:
            return False
        raise ConfigParseError(key, f'expected true or false, got {text!r}')
    if kind == 'vector':
        parts = [p.strip() for p in text.split(',')]
        if len(parts) != 4:
            raise ConfigParseError(key, f'expected 4 comma-separated reals, got {len(parts)}')
        return [_parse_float(key, p) for p in parts]
    if kind == 'signs':
        parts = [p.strip() for p in text.split(',')]
        if len(parts) != 4 or any(p not in ('+1', '1', '-1', '+', '-') for p in parts):
            raise ConfigParseError(key, f'expected 4 signs such as +1,-1,-1,-1, got {text!r}')
        return [-1 if p.startswith('-') else 1 for p in parts]
    return text


class RunConfigFile:
    """
    Flat `key = value` run configuration with `#` comments.
    """
    @staticmethod
    def parse_text(text: str) -> RunConfig:
        run: Dict[str, Any] = {}
        integrator: Dict[str, Any] = {}
        seen = set()
        for number, raw in enumerate(text.splitlines(), start=1):
            line = raw.split('#', 1)[0].strip()
            if not line:
                continue
            if '=' not in line:
                raise ConfigParseError(f'line {number}', f'expected key = value, got {line!r}')
            key, value = (part.strip() for part in line.split('=', 1))
            key = key.lower()
            if key in seen:
                raise ConfigParseError(key, 'duplicate key')
            seen.add(key)
            if key in _RUN_KEYS:
                field, kind = _RUN_KEYS[key]
                run[field] = _parse_value(key, kind, value)
            elif key in _INTEGRATOR_KEYS:
                field, kind = _INTEGRATOR_KEYS[key]
                integrator[field] = _parse_value(key, kind, value)
            else:
                raise ConfigParseError(key, 'unknown key')
        try:
            run['integrator'] = IntegratorConfig(**integrator)
            config = RunConfig(**run)
        except ValidationError as e:
            error = e.errors()[0]
            field = '.'.join(str(part) for part in error['loc']) or 'config'
            raise ConfigParseError(field, error['msg'])
        logger.info(f'Parsed run config: m={config.m}, A={config.A}, method={config.integrator.method.value}')
        return config

    @staticmethod
    def load(path: Union[str, Path]) -> RunConfig:
        try:
            text = Path(path).read_text(encoding='utf-8')
        except (OSError, UnicodeDecodeError) as e:
            raise ConfigParseError('config', f'cannot read {path}: {e}')
        return RunConfigFile.parse_text(text)
