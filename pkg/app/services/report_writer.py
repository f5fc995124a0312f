"""
Report Writer

JSON reports and one-line-per-check text summaries. Field order is fixed,
scalars are exact strings and every file is written atomically.
"""

import json
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional

from app.config.config import REPORT_VERSION
from app.services.exact_linalg import Scalar
from app.utils.check_report import CheckReport
from app.utils.file_handlers import atomic_write_text
from app.utils.logging.component_loggers import get_cli_logger

logger = get_cli_logger(__name__)


def _exact(value: Any) -> Any:
    if isinstance(value, (Scalar, Fraction)):
        return str(value)
    raise TypeError(f"{type(value).__name__} is not JSON serializable")


def build_report(job: Any, results: Dict[str, Any], checks: List[CheckReport],
                 summary: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    """
    Assemble the report body. The timestamp is left out for deterministic
    jobs so reruns give byte-identical files.
    """
    report: Dict[str, Any] = {
        "version": REPORT_VERSION,
        "command": job.command,
        "input": Path(job.input_path).name,
        "order": job.order,
    }
    if not job.deterministic:
        report["generated_at"] = datetime.now(timezone.utc).isoformat()
    report["passed"] = all(c.passed for c in checks)
    report["checks"] = [c.to_dict() for c in checks]
    report["summary"] = dict(summary or {})
    report["results"] = results
    return report


def render_json(report: Dict[str, Any]) -> str:
    return json.dumps(report, indent=2, ensure_ascii=False, default=_exact) + "\n"


def render_text(report: Dict[str, Any]) -> str:
    """Plain summary mirroring the JSON report."""
    lines = [
        f"deformation report {report.get('version', REPORT_VERSION)}",
        f"command: {report.get('command', '')}",
        f"input: {report.get('input', '')}",
        f"order: {report.get('order', '')}",
    ]
    if "generated_at" in report:
        lines.append(f"generated: {report['generated_at']}")
    lines.append(f"status: {'PASS' if report.get('passed', True) else 'FAIL'}")
    for check in report.get("checks", []):
        verdict = "PASS" if check["passed"] else "FAIL"
        first = check["violations"][0]["identity"] if check["violations"] else ""
        extra = f" ({len(check['violations'])} violations, first: {first})" if first else ""
        lines.append(f"[{verdict}] {check['name']}{extra}")
    for key, value in report.get("summary", {}).items():
        lines.append(f"{key}: {json.dumps(value, ensure_ascii=False, default=_exact)}")
    return "\n".join(lines) + "\n"


def report_paths(out_dir: str, stem: str, command: str) -> Dict[str, Path]:
    base = Path(out_dir)
    return {"json": base / f"{stem}.{command}.json", "text": base / f"{stem}.{command}.txt"}


def emit_report(report: Dict[str, Any], out_dir: str, output_format: str = "json",
                stem: str = "report") -> Dict[str, Path]:
    """
    Write the JSON report and the text summary.

    Args:
        report: body from build_report
        out_dir: destination directory, created if missing
        output_format: "json" or "text", the file named in the log line
        stem: file name stem, usually the input file's

    Returns:
        Paths of the written files
    """
    paths = report_paths(out_dir, stem, report.get("command", "report"))
    rendered = {"json": render_json(report), "text": render_text(report)}
    for kind, path in paths.items():
        atomic_write_text(str(path), rendered[kind])
    logger.info(f"Report written to {paths[output_format]}",
                extra={'action': 'emit_report', 'command': report.get("command")})
    return paths
