import logging
import sys
from pathlib import Path

import click

logging.basicConfig(
    level=logging.INFO,
    format="%(asctime)s %(levelname)s %(message)s",
    datefmt="%H:%M:%S",
)
logger = logging.getLogger(__name__)

EXIT_CONFIG = 2
EXIT_RESOLUTION = 3

RESOLUTION_HINT = "widen [grid]/[meter_grid] x_min/x_max or raise n_points so the shifted state stays on the grid"


@click.group()
def cli():
    """QND tomography - simulate endoscopic quantum-state tomography through a QND coupling."""
    pass


@cli.command("run")
@click.argument("config_path", type=click.Path(path_type=Path))
@click.option("--seed", type=int, default=None, help="RNG seed; required for sampling scenarios.")
@click.option("--out", "out_dir", type=click.Path(path_type=Path), default=None, help="Output directory.")
@click.option("--phases", type=int, default=None, help="Number of pump phases (tomography).")
@click.option("--shots", type=int, default=None, help="Homodyne shots per phase.")
def run(config_path, seed, out_dir, phases, shots):
    """Run the scenario described by a TOML config file."""
    from output.formatter import print_summary
    from output.writer import write_result
    from quadrature.grid import ResolutionError
    from scenarios.base import ConfigError, load_config
    from scenarios.registry import auto_discover, get_scenario

    try:
        config = load_config(config_path).with_overrides(seed=seed, output_dir=out_dir, phases=phases, shots=shots)
        auto_discover()
        scenario = get_scenario(config.scenario)
        scenario.validate(config)
        click.echo(f"Running scenario [{scenario.name}] from {config_path}...")
        result = scenario.run(config)
    except ConfigError as e:
        click.echo(str(e), err=True)
        sys.exit(EXIT_CONFIG)
    except ResolutionError as e:
        click.echo(f"Resolution error: {e}", err=True)
        click.echo(f"Hint: {RESOLUTION_HINT}", err=True)
        sys.exit(EXIT_RESOLUTION)
    except ValueError as e:
        click.echo(f"Error: {e}", err=True)
        sys.exit(1)

    manifest = write_result(result, config, config.output_dir)
    print_summary(result, config.output_dir)
    click.echo(f"Manifest written to {manifest}")


@cli.command("check")
@click.option("--out", "out_dir", type=click.Path(path_type=Path), default=None, help="Write checks.csv here.")
@click.option("--quick", is_flag=True, help="Only the corners of each sweep.")
def check(out_dir, quick):
    """Run the identity suite and print a pass/fail table."""
    from config import CSV_FLOAT_FORMAT
    from output.formatter import print_checks
    from scenarios.identity_checks import checks_frame, run_identity_suite

    results = run_identity_suite(quick=quick)
    print_checks(results)

    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        path = out_dir / "checks.csv"
        checks_frame(results).to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT)
        click.echo(f"CSV exported to {path}")

    if not all(r.passed for r in results):
        sys.exit(1)


@cli.command("list-scenarios")
def list_scenarios_cmd():
    """List all registered scenarios."""
    from output.formatter import print_scenarios
    from scenarios.registry import auto_discover, list_scenarios

    auto_discover()
    scenarios = list_scenarios()
    if not scenarios:
        click.echo("No scenarios found.")
        return
    print_scenarios(scenarios)


if __name__ == "__main__":
    cli()
