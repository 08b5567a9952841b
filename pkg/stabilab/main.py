"""
Main command line application
Stabilization policy laboratory
"""
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import click
import yaml
from loguru import logger
from pydantic import ValidationError

from stabilab.config import get_settings
from stabilab.exceptions import ComputationError, ConfigError, InvalidParameters
from stabilab.routers import compare, control, estimation, games, model
from stabilab.routers.base import RunContext, ScenarioApp
from stabilab.schemas.estimation import RegressionResult
from stabilab.utils.csv_io import write_frame, write_regression
from stabilab.utils.formatting import format_summary

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_COMPUTATION = 3

CONFIG_SUFFIXES = (".yaml", ".yml", ".json")
TOP_LEVEL_KEYS = ("scenario", "seed", "output_path")

settings = get_settings()

# Include routers
app = ScenarioApp()
app.include_router(model.router)
app.include_router(control.router)
app.include_router(games.router)
app.include_router(estimation.router)
app.include_router(compare.router)


@dataclass
class RunOutcome:
    code: int
    message: str
    written: List[Path]


# ============================================
# Helper Functions
# ============================================

def configure_logging(verbose: bool = False) -> None:
    logger.remove()
    logger.add(sys.stderr, level="DEBUG" if verbose else settings.log_level)


def load_config(path: Path) -> Any:
    """
    Parse a YAML or JSON scenario config.

    Raises:
        OSError: if the file cannot be read
        ConfigError: if it is not valid YAML
    """
    text = Path(path).read_text()
    try:
        return yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise ConfigError(f"{path}: not valid YAML/JSON ({e})")


def apply_overrides(raw: Any, overrides: Sequence[str]) -> Any:
    """
    Apply ``key=value`` overrides; values are parsed as YAML scalars.

    ``scenario``, ``seed`` and ``output_path`` address the top level, anything
    else the parameters. Dotted keys reach into nested parameters.
    """
    if not overrides:
        return raw
    if not isinstance(raw, dict):
        raise ConfigError("overrides need a mapping config")

    for item in overrides:
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise ConfigError(f"override '{item}' is not of the form key=value")
        if key in TOP_LEVEL_KEYS:
            raw[key] = yaml.safe_load(value)
            continue

        parts = key.split(".")
        if parts[0] == "parameters":
            parts = parts[1:]
        if not parts:
            raise ConfigError(f"override '{item}' names no parameter")
        target = raw.setdefault("parameters", {})
        for part in parts[:-1]:
            target = target.setdefault(part, {}) if isinstance(target, dict) else None
        if not isinstance(target, dict):
            raise ConfigError(f"override '{key}' goes through a non-mapping value")
        target[parts[-1]] = yaml.safe_load(value)
    return raw


def validate(config_path: Path, overrides: Sequence[str] = ()) -> List[str]:
    """Diagnostics for a config file without running it; empty when it would run"""
    try:
        raw = apply_overrides(load_config(config_path), overrides)
    except ConfigError as e:
        return [e.detail]
    return app.diagnostics(raw, Path(config_path).parent)


def write_artifacts(artifacts: Dict[str, Any], output_dir: Path) -> List[Path]:
    written = []
    for stem, artifact in artifacts.items():
        path = output_dir / f"{stem}.csv"
        if isinstance(artifact, RegressionResult):
            written.append(write_regression(artifact, path))
        else:
            written.append(write_frame(artifact, path))
    return written


def run(
    config_path: Path,
    seed: Optional[int] = None,
    out: Optional[Path] = None,
    overrides: Sequence[str] = (),
) -> RunOutcome:
    """
    Run one scenario config and write its artifacts.

    Returns:
        RunOutcome with exit code 0 on success, 2 for a config problem and 3
        when the computation fails
    """
    try:
        raw = apply_overrides(load_config(config_path), overrides)
        config, params = app.parse(raw, Path(config_path).parent)
        resolved_seed = next(s for s in (seed, config.seed, settings.default_seed) if s is not None)
        output_dir = Path(out or config.output_path or settings.output_dir)
        context = RunContext(seed=resolved_seed, output_dir=output_dir, config_dir=Path(config_path).parent)
        result = app.dispatch(config, params, context)
        written = write_artifacts(result.artifacts, output_dir)
    except ConfigError as e:
        return RunOutcome(EXIT_CONFIG, f"{e.name}: {e.detail}", [])
    except ValidationError as e:
        return RunOutcome(EXIT_CONFIG, f"ConfigError: {e}", [])
    except (ComputationError, InvalidParameters) as e:
        logger.debug(f"Scenario {config_path} failed with {e.name}")
        return RunOutcome(EXIT_COMPUTATION, f"{e.name}: {e.detail}", [])

    logger.info(f"Wrote {len(written)} artifact(s) to {output_dir}")
    title = f"{config.scenario.value} (seed {resolved_seed})"
    return RunOutcome(EXIT_OK, format_summary(title, result.summary), written)


def run_batch(directory: Path, seed: Optional[int], out: Path, overrides: Sequence[str]) -> List[RunOutcome]:
    """Run every config in a directory in parallel, each into ``out/<config stem>``"""
    configs = sorted(p for p in Path(directory).iterdir() if p.suffix in CONFIG_SUFFIXES)
    if not configs:
        return []
    with ThreadPoolExecutor(max_workers=min(8, len(configs))) as pool:
        futures = [pool.submit(run, path, seed, out / path.stem, overrides) for path in configs]
        return [future.result() for future in futures]


# ============================================
# Command
# ============================================

@click.command()
@click.argument("config", required=False, type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--seed", type=int, default=None, help="Generator seed (overrides the config)")
@click.option("--out", "out", type=click.Path(file_okay=False, path_type=Path), default=None,
              help=f"Output directory (default: config output_path or '{settings.output_dir}')")
@click.option("--set", "overrides", multiple=True, metavar="KEY=VALUE",
              help="Override a config entry. Can be used multiple times.")
@click.option("--validate", "validate_only", is_flag=True, help="List config problems without running")
@click.option("--batch", type=click.Path(exists=True, file_okay=False, path_type=Path), default=None,
              help="Run every config in a directory")
@click.option("--verbose", "-v", is_flag=True, help="Debug logging")
@click.version_option(settings.app_version, prog_name=settings.app_name)
def cli(config, seed, out, overrides, validate_only, batch, verbose):
    """Run a stabilization policy scenario from a YAML or JSON config."""
    configure_logging(verbose)

    if batch is not None:
        outcomes = run_batch(batch, seed, Path(out or settings.output_dir), overrides)
        for outcome in outcomes:
            click.echo(outcome.message, err=outcome.code != EXIT_OK)
        sys.exit(max((o.code for o in outcomes), default=EXIT_OK))

    if config is None:
        raise click.UsageError("CONFIG is required unless --batch is given")

    if validate_only:
        diagnostics = validate(config, overrides)
        for line in diagnostics:
            click.echo(line)
        sys.exit(EXIT_CONFIG if diagnostics else EXIT_OK)

    outcome = run(config, seed=seed, out=out, overrides=overrides)
    click.echo(outcome.message, err=outcome.code != EXIT_OK)
    sys.exit(outcome.code)


if __name__ == "__main__":
    cli()
