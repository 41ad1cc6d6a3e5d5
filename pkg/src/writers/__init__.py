"""
Output writers: pluggable artifact writers with a common protocol.

Adding a new writer:
    1. Create a module in this package (e.g., table.py)
    2. Implement the Writer protocol
    3. Add it to build_writers() below
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING, Protocol

if TYPE_CHECKING:
    from ..config import RunConfig
    from ..experiments import ScanResult

log = logging.getLogger("lp-lab")


# ---------------------------------------------------------------------------
# Report (passed to writers)
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class PlotSpec:
    x: str
    y: str
    logscale: bool = True
    title: str = ""


@dataclass
class Report:
    """Everything one command produced: a main table, sidecar tables and a summary."""

    command: str
    columns: list[str] = field(default_factory=list)
    rows: list[list] = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    extra_tables: dict[str, tuple[list[str], list[list]]] = field(default_factory=dict)
    plot: PlotSpec | None = None
    failed_checks: list[str] = field(default_factory=list)
    stdout: dict | None = None  # set by commands that print instead of writing files

    @property
    def has_table(self) -> bool:
        return bool(self.columns)


def report_from_scan(command: str, result: ScanResult, plot: PlotSpec | None = None) -> Report:
    """Table of records: experiment, every PARAM_KEYS column (empty when absent), extra params, measured keys."""
    from ..experiments import PARAM_KEYS

    extra_params = sorted({k for r in result.records for k in r.params} - set(PARAM_KEYS))
    measured = sorted({k for r in result.records for k in r.measured})
    columns = ["experiment", *PARAM_KEYS, *extra_params, *measured]

    rows = []
    for record in result.records:
        values = {**record.params, **record.measured}
        rows.append([record.experiment] + [values.get(k) for k in columns[1:]])

    return Report(
        command=command,
        columns=columns,
        rows=rows,
        summary=result.summary(),
        plot=plot,
        failed_checks=result.failed_checks,
    )


# ---------------------------------------------------------------------------
# Writer protocol
# ---------------------------------------------------------------------------
class Writer(Protocol):
    """Interface that all writers implement."""

    def write(self, report: Report) -> list[Path]:
        """Write the report's artifacts; returns the paths written."""
        ...


# ---------------------------------------------------------------------------
# Registry: build writers from config
# ---------------------------------------------------------------------------
def build_writers(config: RunConfig) -> list[Writer]:
    """Instantiate all configured writers."""
    from .plot import PlotWriter
    from .summary import SummaryWriter
    from .table import CsvWriter

    outdir = config.outdir_path
    writers: list[Writer] = [CsvWriter(outdir), SummaryWriter(outdir, config)]

    # Plot sidecar (optional)
    if config.plot:
        writers.append(PlotWriter(outdir))

    return writers


def write_all(writers: list[Writer], report: Report) -> list[str]:
    """Run every writer, catching errors. Returns the failures."""
    failures = []
    for writer in writers:
        try:
            for path in writer.write(report):
                log.info("Wrote %s", path)
        except Exception as e:
            log.error("Writer %s failed: %s", type(writer).__name__, e)
            failures.append(f"{type(writer).__name__}: {e}")
    return failures
