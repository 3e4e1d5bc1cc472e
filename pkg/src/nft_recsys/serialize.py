"""Canonical JSON rendering shared by the CLI and the HTTP server.

Both surfaces must emit byte-identical payloads for identical queries, so
every JSON body goes through render_json.
"""
from __future__ import annotations

import json


def render_json(payload) -> str:
    """Stable human-readable JSON with a trailing newline."""
    return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"
