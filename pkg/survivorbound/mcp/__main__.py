"""Allow ``python -m survivorbound.mcp`` to start the MCP server."""

if __name__ == "__main__":
    from survivorbound.mcp import main

    main()
