"""Entry point for python -m pdgd_ftc."""

from .cli.commands import cli

if __name__ == "__main__":
    cli()
