"""Main entry point for DIPQRB."""

from dipqrb.cli import run

if __name__ == "__main__":
    run()
