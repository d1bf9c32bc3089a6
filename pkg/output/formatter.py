from rich.console import Console
from rich.table import Table

from scenarios.base import ScenarioResult

STATUS_COLORS = {
    "PASS": "bold green",
    "FAIL": "bold red",
}


def _format_value(value) -> str:
    if isinstance(value, bool):
        return str(value)
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def print_summary(result: ScenarioResult, output_dir=None):
    """Print scenario metrics as a Rich console table."""
    console = Console()

    table = Table(title=f"Scenario: {result.scenario}", show_lines=False)
    table.add_column("Metric", style="bold cyan", no_wrap=True)
    table.add_column("Value", justify="right", no_wrap=True)
    for key, value in result.metrics.items():
        table.add_row(key, _format_value(value))
    console.print(table)

    for flag in result.flags:
        console.print(f"[yellow]flag:[/yellow] {flag}")
    if output_dir is not None:
        console.print(f"\n[dim]{len(result.frames) + len(result.documents)} artifacts written to {output_dir}[/dim]")


def print_checks(results) -> None:
    """Pass/fail table for the identity suite."""
    console = Console()

    table = Table(title="Identity checks", show_lines=False)
    table.add_column("#", style="dim", width=3, no_wrap=True)
    table.add_column("Check", style="bold cyan")
    table.add_column("Residual", justify="right", no_wrap=True)
    table.add_column("Tolerance", justify="right", no_wrap=True)
    table.add_column("Status", no_wrap=True)

    for i, r in enumerate(results, 1):
        status = "PASS" if r.passed else "FAIL"
        color = STATUS_COLORS[status]
        table.add_row(str(i), r.name, f"{r.residual:.2e}", f"{r.tolerance:.0e}", f"[{color}]{status}[/{color}]")

    console.print(table)
    passed = sum(r.passed for r in results)
    console.print(f"\n[dim]{passed}/{len(results)} checks passed.[/dim]")


def print_scenarios(scenarios: dict[str, str]) -> None:
    console = Console()
    table = Table(title="Scenarios", show_lines=False)
    table.add_column("Name", style="bold cyan", no_wrap=True)
    table.add_column("Description")
    for name, description in sorted(scenarios.items()):
        table.add_row(name, description)
    console.print(table)
