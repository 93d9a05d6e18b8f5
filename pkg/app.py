from pathlib import Path
from typing import Optional, Tuple
import json
import sys

import typer

from common.enums import OutputFormat, SuiteName
from common.errors import ConfigParseError, MechanicsError, PropertyFailure
from common.models import DiagnosticsSummary, SuiteReport
from core.app_config import CheckConfig, SeedConfig
from core.logger_config import logger, setup_logger
from file_ops.run_config import RunConfigFile
from file_ops.spin_io import SpinFile, format_number
from file_ops.trajectory_io import TrajectoryWriter
from handlers.conversion import ConversionHandler
from handlers.simulation import SimulationHandler
from handlers.verification import VerificationHandler

app = typer.Typer(add_completion=False, help='Free relativistic spinning particle: simulate, check, convert.')


class GlobalOptions:
    seed: Optional[int] = None
    format: Optional[OutputFormat] = None
    out: Optional[Path] = None


options = GlobalOptions()


@app.callback()
def main(
    seed: Optional[int] = typer.Option(None, '--seed', help='RNG seed (overrides MATHISSON_TOP_SEED)'),
    fmt: Optional[OutputFormat] = typer.Option(None, '--format', help='Output format'),
    out: Optional[Path] = typer.Option(None, '--out', help='Output path'),
    verbose: bool = typer.Option(False, '--verbose', help='Debug logging'),
):
    options.seed = seed
    options.format = fmt
    options.out = out
    if verbose:
        setup_logger('DEBUG')


def _fail(error: MechanicsError):
    logger.error(f'{type(error).__name__}: {error}')
    raise typer.Exit(code=error.exit_code)


def _summary_text(summary: DiagnosticsSummary) -> str:
    return (
        f'samples: {summary.samples}\n'
        f'max_first_integral_drift: {format_number(summary.max_first_integral_drift)}\n'
        f'max_pirani_drift: {format_number(summary.max_pirani_drift)}\n'
        f'max_residual_norm: {format_number(summary.max_residual_norm)}\n'
    )


def _report_text(reports: list[SuiteReport]) -> str:
    lines = []
    for report in reports:
        lines.append(f'suite {report.suite.value} (seed {report.seed})')
        for r in report.results:
            line = (f'  {r.status.value.upper():4} {r.name:40} cases={r.cases} skipped={r.skipped} '
                    f'failures={r.failures} max={r.max_residual:.3e} tol={r.tolerance:.1e}')
            if r.detail:
                line += f'  [{r.detail}]'
            lines.append(line)
    return '\n'.join(lines) + '\n'


@app.command()
def simulate(config: Path = typer.Argument(..., help='Run configuration file')):
    """Integrate the world line described by a run configuration."""
    try:
        run = RunConfigFile.load(config)
        fmt = options.format or run.format
        out = options.out or (Path(run.output) if run.output else None)
        seed = SeedConfig.resolve(options.seed)
        result = SimulationHandler.run(run, seed=seed)
        if out is not None:
            TrajectoryWriter.write(result.trajectory, fmt, result.metadata, path=out)
            logger.info(f'Wrote {len(result.trajectory)} samples to {out}')
            typer.echo(_summary_text(result.summary), nl=False)
        else:
            TrajectoryWriter.write(result.trajectory, fmt, result.metadata, stream=sys.stdout)
            typer.echo(_summary_text(result.summary), nl=False, err=True)
    except MechanicsError as e:
        _fail(e)


@app.command()
def check(
    suite: SuiteName = typer.Argument(..., help='Property suite to run'),
    workers: int = typer.Option(CheckConfig.WORKERS, '--workers', min=1, help='Worker threads'),
    samples: Optional[int] = typer.Option(None, '--samples', min=1, help='Cap on cases per property'),
):
    """Run a verification suite; exit 3 when any property fails."""
    seed = SeedConfig.resolve(options.seed)
    try:
        reports = VerificationHandler(seed, workers=workers, samples=samples).run(suite)
    except MechanicsError as e:
        _fail(e)
    if options.format is OutputFormat.JSON:
        text = json.dumps([r.model_dump(mode='json') for r in reports], indent=2) + '\n'
    else:
        text = _report_text(reports)
    if options.out is not None:
        options.out.write_text(text, encoding='utf-8')
    typer.echo(text, nl=False)
    if not all(r.passed for r in reports):
        failed = [r.name for report in reports for r in report.results if r.status.value == 'fail']
        _fail(PropertyFailure('properties failed', failed=failed))


@app.command()
def convert(
    tensor: Optional[Path] = typer.Option(None, '--tensor', help='Spin tensor file (4 rows of 4 reals)'),
    vector: Optional[Path] = typer.Option(None, '--vector', help='Spin vector file (4 covariant reals)'),
    u: Tuple[float, float, float, float] = typer.Option(..., '--u', help='Velocity, 4 reals'),
):
    """Convert between spin tensor and spin vector."""
    try:
        if (tensor is None) == (vector is None):
            raise ConfigParseError('convert', 'give exactly one of --tensor or --vector')
        velocity = ConversionHandler.velocity(u)
        if tensor is not None:
            text = SpinFile.format_vector(ConversionHandler.tensor_to_vector(SpinFile.read_tensor(tensor), velocity))
        else:
            text = SpinFile.format_tensor(ConversionHandler.vector_to_tensor(SpinFile.read_vector(vector), velocity))
        if options.out is not None:
            options.out.write_text(text, encoding='utf-8')
        typer.echo(text, nl=False)
    except MechanicsError as e:
        _fail(e)


if __name__ == '__main__':
    app()
