"""CSV tables: '.' decimal, no separators, 17 significant digits for reals."""

from __future__ import annotations

import csv
import logging
import math
from pathlib import Path

import numpy as np

from . import Report

log = logging.getLogger("lp-lab")


def format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return f"{value:.17g}"
    return str(value)


def write_table(path: Path, columns: list[str], rows: list[list]):
    with open(path, "w", newline="", encoding="utf-8") as f:
        out = csv.writer(f, lineterminator="\n")
        out.writerow(columns)
        for row in rows:
            out.writerow([format_cell(v) for v in row])


class CsvWriter:
    def __init__(self, outdir: Path):
        self.outdir = Path(outdir)

    def write(self, report: Report) -> list[Path]:
        if not report.has_table:
            return []
        self.outdir.mkdir(parents=True, exist_ok=True)

        path = self.outdir / f"{report.command}.csv"
        write_table(path, report.columns, report.rows)
        written = [path]

        for name, (columns, rows) in sorted(report.extra_tables.items()):
            sidecar = self.outdir / f"{report.command}.{name}.csv"
            write_table(sidecar, columns, rows)
            written.append(sidecar)
        return written
