"""
Harnack Lab - Command Line
Action tables, condition certificates, PDE solves and Harnack scans from a
JSON run configuration
"""

import logging

import click
from dotenv import load_dotenv
from rich.logging import RichHandler

from cli.commands import check, geodesic, nested, omega, sharpness, solve_command, verify

LEVELS = {0: logging.WARNING, 1: logging.INFO}


@click.group()
@click.option('-v', '--verbose', count=True, help='-v for progress, -vv for solver detail')
def cli(verbose):
    """Harnack inequality verification for Schrodinger heat equations"""
    load_dotenv()
    logging.basicConfig(
        level=LEVELS.get(verbose, logging.DEBUG),
        format='%(message)s',
        handlers=[RichHandler(show_path=False)],
        force=True,
    )


cli.add_command(omega)
cli.add_command(geodesic)
cli.add_command(solve_command)
cli.add_command(check)
cli.add_command(verify)
cli.add_command(sharpness)
cli.add_command(nested)


if __name__ == '__main__':
    cli()
