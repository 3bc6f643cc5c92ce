"""Allow ``python -m survivorbound`` to run the command-line interface."""

if __name__ == "__main__":
    from survivorbound.cli import main

    raise SystemExit(main())
