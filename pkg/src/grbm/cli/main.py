"""
Command-line interface for the GRBM ergodicity toolkit.

Every experiment kind is a subcommand driven by a YAML config plus
command-line overrides. Exit codes: 0 success, 1 domain failure (failed
check, instability, rejected certificate), 2 usage or configuration error,
3 numeric breakdown.
"""

import logging
import os
import sys
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

import click
import yaml

from .. import __version__
from ..constants import (
    EXIT_DOMAIN_FAILURE,
    EXIT_NUMERIC,
    EXIT_OK,
    EXIT_USAGE,
    REPORT_FILE,
)
from ..errors import (
    BlowUpError,
    ConfigurationError,
    FitError,
    GRBMError,
    InputError,
    NumericError,
    PreconditionError,
)
from ..reports.html_generator import HTMLReportGenerator
from ..storage.artifact_store import ArtifactStore, load_manifest, verify_manifest
from .config import ExperimentConfig, build_config
from .experiments import RUNNERS, RunContext

CONFIG_DIR = Path("config") / "experiments"


def exit_code_for(error: GRBMError) -> int:
    """Map a toolkit error onto the exit-code contract."""
    if isinstance(error, (ConfigurationError, InputError)):
        return EXIT_USAGE
    if isinstance(error, NumericError):
        return EXIT_NUMERIC
    if isinstance(error, (PreconditionError, FitError)):
        return EXIT_DOMAIN_FAILURE
    return EXIT_NUMERIC


def setup_logging(verbose: bool, quiet: bool) -> None:
    level = logging.DEBUG if verbose else (logging.ERROR if quiet else logging.WARNING)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", force=True)


EXPERIMENT_OPTIONS = [
    click.option('--config', '-c', 'config_path', type=click.Path(dir_okay=False),
                 help='Experiment config (YAML or JSON)'),
    click.option('--seed', type=click.IntRange(0, 2 ** 64 - 1), help='Override run.seed'),
    click.option('--workers', '-w', type=click.IntRange(min=1), default=None,
                 help='Worker processes (default: all cores); results do not depend on it'),
    click.option('--out', '-o', 'output_dir', help='Output directory (overrides output_dir)'),
    click.option('--set', 'overrides', multiple=True, metavar='KEY=VALUE',
                 help='Override a config entry, e.g. --set run.T=20 (value parsed as YAML)'),
    click.option('--verbose', '-v', is_flag=True, help='Debug logging'),
    click.option('--quiet', '-q', is_flag=True, help='No progress bars, errors only'),
]


def experiment_options(func):
    """Options shared by every experiment subcommand."""
    for option in reversed(EXPERIMENT_OPTIONS):
        func = option(func)
    return func


def _rejection(kind: str, error: GRBMError) -> Dict[str, Any]:
    """Report for a run stopped by a violated hypothesis or a numeric breakdown."""
    summary: Dict[str, Any] = {"error": type(error).__name__, "exit_code": exit_code_for(error)}
    if isinstance(error, BlowUpError):
        summary["blow_up"] = {"step": error.step, "path_index": error.path_index}
    return {"kind": kind, "passed": False, "summary": summary, "messages": [str(error)]}


def _write_report(store: ArtifactStore, config: ExperimentConfig, report: Dict[str, Any]) -> None:
    report["config_digest"] = config.digest()
    store.write_json(REPORT_FILE, report)
    store.write_manifest(config.digest(), config.run.seed, __version__)


def run_experiment(
    kind: str,
    config_path: Optional[str],
    seed: Optional[int],
    workers: Optional[int],
    output_dir: Optional[str],
    overrides: Tuple[str, ...],
    verbose: bool,
    quiet: bool,
) -> None:
    """Load the config, run one experiment, write report and manifest, exit with its code."""
    setup_logging(verbose, quiet)
    try:
        config = build_config(config_path, overrides, kind=kind, seed=seed, output_dir=output_dir)
    except (ConfigurationError, InputError) as exc:
        click.echo(click.style(f"❌ Configuration error: {exc}", fg="red"), err=True)
        sys.exit(EXIT_USAGE)

    workers = workers or os.cpu_count() or 1
    if not quiet:
        click.echo(f"\n🧪 Running {click.style(kind, fg='cyan', bold=True)}")
        click.echo(f"   Config digest: {config.digest()[:16]}")
        click.echo(f"   Seed: {config.run.seed} | Workers: {workers}")
        click.echo(f"   Output: {config.output_dir}\n")

    store = ArtifactStore(config.output_dir)
    ctx = RunContext(store=store, workers=workers, progress=not quiet)
    try:
        result = RUNNERS[kind](config, ctx)
    except GRBMError as exc:
        code = exit_code_for(exc)
        click.echo(click.style(f"❌ {type(exc).__name__}: {exc}", fg="red"), err=True)
        if code != EXIT_USAGE:
            _write_report(store, config, _rejection(kind, exc))
        sys.exit(code)

    _write_report(store, config, result.to_dict())

    for message in result.messages:
        click.echo(f"   - {message}")
    if result.passed:
        click.echo(click.style(f"\n✅ {kind} passed", fg="green", bold=True))
        click.echo(f"   Artifacts: {', '.join(sorted(store.hashes))}")
        sys.exit(EXIT_OK)
    click.echo(click.style(f"\n❌ {kind} failed", fg="red", bold=True), err=True)
    sys.exit(EXIT_DOMAIN_FAILURE)


@click.group()
@click.version_option(version=__version__)
def cli():
    """
    GRBM ergodicity toolkit

    Simulation and numerical verification for generalized reflected
    Brownian motions: drift certificates, stationary laws, mixing rates
    and the hard-versus-soft reflection rate scaling.
    """
    pass


# Usage examples:
#   grbm validate -c config/experiments/validate_oconnell_yor.yaml
#   grbm validate -c config/experiments/validate_oconnell_yor.yaml --set model.mu=[1,-1]
@cli.command()
@experiment_options
def validate(**options):
    """Check the model assumptions (exit 1 if any check fails)."""
    run_experiment('validate', **options)


# Usage examples:
#   grbm simulate -c config/experiments/simulate_oconnell_yor.yaml
#   grbm simulate -c config/experiments/simulate_oconnell_yor.yaml --set run.n_paths=1000
@cli.command()
@experiment_options
def simulate(**options):
    """Simulate one path (trajectory CSV) or an ensemble (terminal-state CSV)."""
    run_experiment('simulate', **options)


# Usage examples:
#   grbm drift-check -c config/experiments/drift_check_d2.yaml
#   grbm drift-check -c config/experiments/drift_check_d2.yaml --set analysis.r=64
@cli.command('drift-check')
@experiment_options
def drift_check(**options):
    """Sample the exponential drift condition and report the certificate."""
    run_experiment('drift-check', **options)


# Usage examples:
#   grbm stationary-check -c config/experiments/stationary_d1.yaml
#   grbm stationary-check -c config/experiments/stationary_hard_gap.yaml -w 8
@cli.command('stationary-check')
@experiment_options
def stationary_check(**options):
    """Compare terminal ensembles with the analytic stationary law."""
    run_experiment('stationary-check', **options)


# Usage examples:
#   grbm mixing -c config/experiments/mixing_d1.yaml
#   grbm mixing -c config/experiments/mixing_delta_table.yaml
@cli.command()
@experiment_options
def mixing(**options):
    """Estimate the total-variation decay exponent."""
    run_experiment('mixing', **options)


# Usage examples:
#   grbm rate-scaling -c config/experiments/rate_scaling.yaml
#   grbm rate-scaling --set analysis.d_list=[8]
@cli.command('rate-scaling')
@experiment_options
def rate_scaling(**options):
    """Tabulate K^h and K^s over particle counts with log-log slopes."""
    run_experiment('rate-scaling', **options)


# Usage examples:
#   grbm penalty-limit -c config/experiments/penalty_limit.yaml
@cli.command('penalty-limit')
@experiment_options
def penalty_limit(**options):
    """Distance between soft-reflection and hard-reflection gaps as beta grows."""
    run_experiment('penalty-limit', **options)


# Usage examples:
#   grbm report results/drift_check_d2
#   grbm report results/mixing_d1 -o mixing.html
@cli.command()
@click.argument('output_dir', type=click.Path(exists=True, file_okay=False))
@click.option('--output', '-o', help='Output file path (default: OUTPUT_DIR/report.html)')
def report(output_dir: str, output: Optional[str]):
    """Build an interactive HTML report from an experiment output directory."""
    click.echo(f"📊 Generating HTML report for: "
               f"{click.style(output_dir, fg='cyan', bold=True)}\n")
    generator = HTMLReportGenerator(output_dir)
    output_path = generator.generate(Path(output) if output else None)
    click.echo(click.style("✅ Report generated successfully!", fg="green"))
    click.echo(f"📄 Output: {output_path}")


# Usage examples:
#   grbm verify results/drift_check_d2
@cli.command()
@click.argument('output_dir', type=click.Path(exists=True, file_okay=False))
def verify(output_dir: str):
    """Check every artifact against the sha256 recorded in manifest.json."""
    manifest = load_manifest(output_dir)
    if manifest is None:
        click.echo(click.style(f"❌ No manifest in {output_dir}", fg="red"), err=True)
        sys.exit(EXIT_USAGE)
    bad = verify_manifest(output_dir)
    if bad:
        click.echo(click.style("❌ Artifacts differ from the manifest:", fg="red"), err=True)
        for name in bad:
            click.echo(f"   - {name}", err=True)
        sys.exit(EXIT_DOMAIN_FAILURE)
    click.echo(click.style(f"✅ {len(manifest.artifacts)} artifacts match the manifest",
                           fg="green"))
    click.echo(f"   Config digest: {manifest.config_digest}")
    click.echo(f"   Seed: {manifest.seed} | Tool version: {manifest.tool_version}")


@cli.command('list-configs')
@click.option('--directory', '-d', default=str(CONFIG_DIR), show_default=True,
              type=click.Path(file_okay=False))
def list_configs(directory: str):
    """List the ready-to-run experiment configs."""
    paths = sorted(Path(directory).glob("*.yaml"))
    if not paths:
        click.echo(click.style(f"⚠️  No configs found in {directory}", fg="yellow"))
        return
    click.echo(click.style("\n📝 Available experiments:\n", fg="cyan", bold=True))
    for path in paths:
        with open(path) as f:
            data = yaml.safe_load(f) or {}
        click.echo(f"  {click.style(path.name, fg='green', bold=True)}")
        click.echo(f"    Kind: {data.get('kind', '?')}")
        click.echo(f"    Output: {data.get('output_dir', 'results')}")
        click.echo()


def main():
    cli()


if __name__ == '__main__':
    main()
