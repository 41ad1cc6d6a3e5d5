"""gnuplot script sidecar referencing the command's CSV; never executed here."""

from __future__ import annotations

from pathlib import Path

from . import Report


def render(report: Report) -> str:
    spec = report.plot
    x = report.columns.index(spec.x) + 1
    y = report.columns.index(spec.y) + 1
    lines = [
        f"# {report.command}: {spec.y} against {spec.x}",
        'set datafile separator ","',
        f'set xlabel "{spec.x}"',
        f'set ylabel "{spec.y}"',
    ]
    if spec.title:
        lines.append(f'set title "{spec.title}"')
    if spec.logscale:
        lines.append("set logscale xy")
    lines.append(
        f'plot "{report.command}.csv" every ::1 using {x}:{y} with linespoints title "{spec.y}"'
    )
    return "\n".join(lines) + "\n"


class PlotWriter:
    def __init__(self, outdir: Path):
        self.outdir = Path(outdir)

    def write(self, report: Report) -> list[Path]:
        if report.plot is None or not report.has_table:
            return []
        self.outdir.mkdir(parents=True, exist_ok=True)
        path = self.outdir / f"{report.command}.plot"
        path.write_text(render(report), encoding="utf-8")
        return [path]
