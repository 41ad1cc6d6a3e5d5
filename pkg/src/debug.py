"""
Debug utilities: JSON capture on numerical failures.

Saves diagnostic files to <outdir>/debug/ with automatic cleanup
to avoid filling disk.
"""

from __future__ import annotations

import json
import logging
from datetime import datetime, timezone
from pathlib import Path

log = logging.getLogger("lp-lab")

MAX_DEBUG_FILES = 40


def ensure_debug_dir(debug_dir: Path):
    """Create debug directory and clean old files."""
    debug_dir.mkdir(parents=True, exist_ok=True)
    files = sorted(debug_dir.iterdir(), key=lambda f: (f.stat().st_mtime, f.name))
    while len(files) > MAX_DEBUG_FILES:
        files.pop(0).unlink()


def capture(
    command: str,
    error_msg: str,
    debug_dir: Path,
    config: dict | None = None,
    details: dict | None = None,
) -> Path | None:
    """
    Save the error, the effective config and any offending records.

    Files are named with timestamp + command for easy correlation:
        20260217_190900_sharpness-scan.json
    """
    try:
        debug_dir.mkdir(parents=True, exist_ok=True)
        timestamp = datetime.now(timezone.utc).strftime("%Y%m%d_%H%M%S_%f")
        path = debug_dir / f"{timestamp}_{command}.json"
        payload = {
            "command": command,
            "error": error_msg,
            "config": config,
            "details": details or {},
        }
        with open(path, "w", encoding="utf-8") as f:
            json.dump(payload, f, indent=2, sort_keys=True, default=str)
        ensure_debug_dir(debug_dir)
        log.info("Debug capture saved: %s", path)
        return path
    except Exception as e:
        log.warning("Failed to capture debug info: %s", e)
        return None
