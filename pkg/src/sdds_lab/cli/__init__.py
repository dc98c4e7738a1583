"""CLI interface for sdds-lab."""

import typer

# Import subcommand modules
from .experiment import grid_command, report_command, train_command
from .explain import explain_command
from .generate import generate_command

# Main app
app = typer.Typer(
    name="sdds",
    help="Surface defect detection strategy lab: synthetic corpora, scenario grid and reports",
    no_args_is_help=True,
)

app.command(name="generate")(generate_command)
app.command(name="train")(train_command)
app.command(name="grid")(grid_command)
app.command(name="report")(report_command)
app.command(name="explain")(explain_command)


def main():
    """Main entry point for the CLI."""
    app()


__all__ = ["app", "main"]
