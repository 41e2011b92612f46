"""Main entry point for mixphase CLI."""

from mixphase.cli.main import main

if __name__ == "__main__":
    main()
