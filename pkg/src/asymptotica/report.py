"""Report container and deterministic, atomic CSV / summary writers."""

import csv
import io
import json
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__

CSV_COLUMNS = ("experiment", "case", "item", "mode", "quantity", "index", "value", "verdict", "horizon", "tolerance")


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""
    horizon: int | str = ""
    tolerance: float | str = ""


@dataclass
class Report:
    experiment: str
    config: dict
    case: str = ""
    rows: list = field(default_factory=list)
    checks: list = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)
    version: str = __version__
    wall_time: float = 0.0

    def row(self, item="", quantity="", value="", index="", verdict="", horizon="", tolerance="", mode=""):
        self.rows.append(
            dict(
                experiment=self.experiment,
                case=self.case,
                item=item,
                mode=mode,
                quantity=quantity,
                index=index,
                value=value,
                verdict=verdict,
                horizon=horizon,
                tolerance=tolerance,
            )
        )

    def check(self, name, passed, detail="", horizon="", tolerance=""):
        passed = bool(passed)
        self.checks.append(Check(name, passed, detail, horizon, tolerance))
        self.row(item=name, quantity="check", value=int(passed), verdict="pass" if passed else "fail", horizon=horizon, tolerance=tolerance)
        return passed

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def first_failure(self):
        return next((c for c in self.checks if not c.passed), None)


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def to_csv(report: Report) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in report.rows:
        w.writerow([_fmt(r[c]) for c in CSV_COLUMNS])
    return buf.getvalue()


def to_summary(report: Report) -> str:
    lines = [
        f"tool: asymptotica {report.version}",
        f"experiment: {report.experiment}",
    ]
    if report.case:
        lines.append(f"case: {report.case}")
    lines.append("config: " + json.dumps(report.config, sort_keys=True, default=str))
    for k, v in report.diagnostics.items():
        lines.append(f"diagnostic.{k}: {_fmt(v)}")
    for c in report.checks:
        tag = "PASS" if c.passed else "FAIL"
        extra = f" [horizon={c.horizon} tol={_fmt(c.tolerance)}]" if c.horizon != "" or c.tolerance != "" else ""
        lines.append(f"{tag} {c.name}{extra}: {c.detail}")
    if report.checks:
        lines.append(f"result: {'pass' if report.passed else 'fail'}")
    lines.append(f"wall_time_s: {report.wall_time:.3f}")
    return "\n".join(lines) + "\n"


def _atomic_write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_report(report: Report, out_dir) -> tuple[Path, Path]:
    out = Path(out_dir)
    csv_path, summary_path = out / "report.csv", out / "summary.txt"
    _atomic_write(csv_path, to_csv(report))
    _atomic_write(summary_path, to_summary(report))
    return csv_path, summary_path
