"""CLI 入口点"""

from totient_pell.app import cli

if __name__ == "__main__":
    cli()
