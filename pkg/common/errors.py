"""
Error hierarchy shared by the numerical library and the CLI.

Every error carries an exit_code so the CLI can map failures without
inspecting messages.
"""
from typing import Optional


class MechanicsError(Exception):
    exit_code = 2

    def __init__(self, message: str, **context):
        super().__init__(message)
        self.context = context

    def __str__(self) -> str:
        base = super().__str__()
        if not self.context:
            return base
        details = ', '.join(f'{k}={v}' for k, v in self.context.items())
        return f'{base} ({details})'


# --- algebra ---
class ZeroVelocity(MechanicsError):
    pass

class PiraniViolated(MechanicsError):
    pass

class NotLorentz(MechanicsError):
    pass

class NotSkew(MechanicsError):
    pass

class DegenerateSpin(MechanicsError):
    pass

class SingularChart(MechanicsError):
    pass

class SingularParametrization(MechanicsError):
    pass


# --- finite differences ---
class ChartExit(MechanicsError):
    """An evaluation point (or integrator stage) left the domain of the function."""
    def __init__(self, message: str, tau: Optional[float] = None, **context):
        if tau is not None:
            context['tau'] = tau
        super().__init__(message, **context)
        self.tau = tau


# --- integrator ---
class StepUnderflow(MechanicsError):
    def __init__(self, message: str, tau: float, step: float):
        super().__init__(message, tau=tau, step=step)
        self.tau = tau

class MaxStepsExceeded(MechanicsError):
    def __init__(self, message: str, tau: float, steps: int):
        super().__init__(message, tau=tau, steps=steps)
        self.tau = tau

class EmptyTrajectory(MechanicsError):
    pass

class NotTimelike(MechanicsError):
    pass


# --- configuration / reporting ---
class ConfigParseError(MechanicsError):
    exit_code = 1

    def __init__(self, key: str, reason: str):
        super().__init__(f"invalid value for '{key}': {reason}", key=key)
        self.key = key
        self.reason = reason

class PropertyFailure(MechanicsError):
    exit_code = 3
