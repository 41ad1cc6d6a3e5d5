"""JSON summary: fits, checks, notes, the effective config and the run timestamp."""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import TYPE_CHECKING

import numpy as np

from . import Report

if TYPE_CHECKING:
    from ..config import RunConfig

log = logging.getLogger("lp-lab")


def _plain(value):
    """numpy scalars and arrays to JSON-native values."""
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, tuple):
        return list(value)
    raise TypeError(f"not JSON serializable: {type(value).__name__}")


class SummaryWriter:
    def __init__(self, outdir: Path, config: RunConfig | None = None):
        self.outdir = Path(outdir)
        self.config = config

    def write(self, report: Report) -> list[Path]:
        from ..experiments import utc_now

        self.outdir.mkdir(parents=True, exist_ok=True)
        path = self.outdir / f"{report.command}.summary.json"
        payload = {
            "command": report.command,
            "timestamp": utc_now(),
            "config": self.config.to_dict() if self.config else None,
            **report.summary,
        }
        with open(path, "w", encoding="utf-8") as f:
            json.dump(payload, f, indent=2, sort_keys=True, default=_plain)
            f.write("\n")
        return [path]
