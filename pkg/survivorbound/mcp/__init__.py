"""survivorbound MCP server: always-survivor analyses as tools for MCP clients."""

from __future__ import annotations

from dotenv import load_dotenv


def main() -> None:
    """Entry point for the ``survivorbound-mcp`` console script."""
    load_dotenv()
    from survivorbound.mcp.server import mcp

    mcp.run(transport="stdio")
