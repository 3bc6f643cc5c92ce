"""Allow ``python -m survivorbound.cli``."""

if __name__ == "__main__":
    from survivorbound.cli import main

    raise SystemExit(main())
