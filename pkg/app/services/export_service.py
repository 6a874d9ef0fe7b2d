# services/export_service.py
"""
Export service writing analysis results as CSV, plain-text summaries and SVG charts.

Floats are written with repr() so files are byte-stable and every number
round-trips to the double it came from.
"""
import csv
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Union
import logging

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
from matplotlib.figure import Figure

from ..schemas.analysis_schemas import AnalysisResponse, SimulationRow, SweepResult
from ..schemas.bound_schemas import BoundReport
from ..schemas.pvalue_schemas import PValueSet

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(value)
    return str(value)


class ExportService:
    """Writers for every report file of the CLI verbs"""

    @staticmethod
    def _write_csv(output_path: PathLike, fieldnames: Sequence[str], rows: Iterable[Dict]) -> str:
        output_file = Path(output_path)
        output_file.parent.mkdir(parents=True, exist_ok=True)
        try:
            with open(output_file, "w", newline="", encoding="utf-8") as f:
                writer = csv.DictWriter(f, fieldnames=list(fieldnames), lineterminator="\n")
                writer.writeheader()
                for row in rows:
                    writer.writerow({key: _fmt(row.get(key)) for key in fieldnames})
            logger.info(f"Wrote {output_file}")
            return str(output_file)
        except OSError as e:
            logger.error(f"Failed to write {output_file}: {e}")
            raise

    @staticmethod
    def export_rejections(p: PValueSet, analysis: AnalysisResponse, output_dir: PathLike) -> str:
        """rejections.csv: original index, p-value, rejected flag, threshold"""
        rejected = set(analysis.rejected)
        rows = (
            {
                "index": i,
                "pvalue": float(value),
                "rejected": i in rejected,
                "threshold": analysis.threshold,
            }
            for i, value in enumerate(p.values, start=1)
        )
        return ExportService._write_csv(
            Path(output_dir) / "rejections.csv", ["index", "pvalue", "rejected", "threshold"], rows
        )

    @staticmethod
    def export_summary(analysis: AnalysisResponse, parameters: Dict, output_dir: PathLike) -> str:
        """summary.txt: R, procedure, parameters and the bounds that apply"""
        output_file = Path(output_dir) / "summary.txt"
        output_file.parent.mkdir(parents=True, exist_ok=True)
        lines = [
            f"procedure: {analysis.procedure}",
            f"mode: {analysis.mode}",
            f"m: {analysis.m}",
            f"R: {analysis.R}",
            f"threshold: {_fmt(analysis.threshold)}",
            "parameters:",
        ]
        lines += [f"  {key}: {_fmt(value)}" for key, value in sorted(parameters.items()) if value is not None]
        lines.append("schedule:")
        lines += [f"  {key}: {_fmt(value)}" for key, value in analysis.schedule_meta.items() if value not in (None, [])]
        lines.append("bounds:")
        for report in analysis.bounds:
            status = "applicable" if report.applicable else "NOT applicable"
            lines.append(f"  {report.source}: {_fmt(report.value)} ({status}; {report.condition_detail})")
        output_file.write_text("\n".join(lines) + "\n", encoding="utf-8")
        logger.info(f"Wrote {output_file}")
        return str(output_file)

    @staticmethod
    def export_sweep_csv(sweep: SweepResult, output_dir: PathLike) -> str:
        """sweep.csv: one row per k, then the constant R_BY and R_Bonferroni reference rows"""
        rows: List[Dict] = [row.model_dump() for row in sweep.rows]
        rows.append({"k": "R_BY", "R_BHk": sweep.R_BY})
        rows.append({"k": "R_Bonferroni", "R_BHk": sweep.R_Bonferroni})
        return ExportService._write_csv(Path(output_dir) / "sweep.csv", ["k", "R_BHk", "R_ESk"], rows)

    @staticmethod
    def export_sweep_svg(sweep: SweepResult, output_dir: PathLike) -> str:
        """Line chart of R against k: BH(k), ES(k), BY, Bonferroni and the identity R = k"""
        output_file = Path(output_dir) / "sweep.svg"
        output_file.parent.mkdir(parents=True, exist_ok=True)
        fig = render_sweep_figure(sweep)
        try:
            # keep labels as <text> elements
            with plt.rc_context({"svg.fonttype": "none"}):
                fig.savefig(output_file, format="svg", bbox_inches="tight")
        finally:
            plt.close(fig)
        logger.info(f"Wrote {output_file}")
        return str(output_file)

    @staticmethod
    def export_bounds(reports: List[BoundReport], output_dir: PathLike) -> str:
        """bounds.csv: one row per bound"""
        fieldnames = ["source", "value", "applicable", "margin", "sharper_value", "exact", "condition_detail"]
        rows = (report.model_dump() for report in reports)
        return ExportService._write_csv(Path(output_dir) / "bounds.csv", fieldnames, rows)

    @staticmethod
    def export_simulation(rows: List[SimulationRow], output_dir: PathLike) -> str:
        """simulation.csv: one row per (scenario, procedure)"""
        fieldnames = list(SimulationRow.model_fields)
        return ExportService._write_csv(
            Path(output_dir) / "simulation.csv", fieldnames, (row.model_dump() for row in rows)
        )


SERIES_STYLE = {
    "BH(k)": {"color": "#1f4e9c", "linestyle": "-"},
    "ES(k)": {"color": "#c0392b", "linestyle": ":"},
    "BY": {"color": "#555555", "linestyle": "--"},
    "Bonferroni": {"color": "#27ae60", "linestyle": "-."},
    "R = k": {"color": "#999999", "linestyle": (0, (2, 2))},
}


def render_sweep_figure(sweep: SweepResult, width: float = 6.4, height: float = 4.2) -> Figure:
    """R against k for BH(k) and ES(k), with the BY and Bonferroni levels and the identity R = k"""
    ks = [row.k for row in sweep.rows]
    k_lo, k_hi = ks[0], ks[-1]
    es = [(row.k, row.R_ESk) for row in sweep.rows if row.R_ESk is not None]
    r_hi = max([row.R_BHk for row in sweep.rows] + [r for _, r in es] + [sweep.R_BY, sweep.R_Bonferroni, 1])

    fig, ax = plt.subplots(figsize=(width, height))
    ax.plot(ks, [row.R_BHk for row in sweep.rows], label="BH(k)", **SERIES_STYLE["BH(k)"])
    if es:
        ax.plot([k for k, _ in es], [r for _, r in es], label="ES(k)", **SERIES_STYLE["ES(k)"])
    ax.axhline(sweep.R_BY, label="BY", **SERIES_STYLE["BY"])
    ax.axhline(sweep.R_Bonferroni, label="Bonferroni", **SERIES_STYLE["Bonferroni"])
    identity_hi = min(k_hi, r_hi)
    if identity_hi >= k_lo:
        ax.plot([k_lo, identity_hi], [k_lo, identity_hi], label="R = k", **SERIES_STYLE["R = k"])

    ax.set_xlabel("k")
    ax.set_ylabel("R")
    ax.set_xlim(k_lo, max(k_hi, k_lo + 1))
    ax.set_ylim(0, r_hi * 1.05)
    ax.legend(loc="center left", bbox_to_anchor=(1.02, 0.5), frameon=False)
    return fig


# Singleton instance
_export_service: Optional[ExportService] = None


def get_export_service() -> ExportService:
    """Get or create the export service singleton"""
    global _export_service
    if _export_service is None:
        _export_service = ExportService()
    return _export_service
