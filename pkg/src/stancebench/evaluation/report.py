"""Report rendering: canonical JSON plus an aligned plain-text table.

Output is deterministic byte-for-byte for identical inputs; timestamps never
appear here (they live only in run manifests).
"""

from __future__ import annotations

import json

from stancebench.evaluation.depth import DepthBucketReport
from stancebench.evaluation.metrics import EvalReport


def render_report_json(
    eval_report: EvalReport,
    depth_report: DepthBucketReport | None = None,
    manifest: dict | None = None,
) -> str:
    payload: dict = {"metrics": eval_report.to_dict()}
    if depth_report is not None:
        payload["depth_buckets"] = depth_report.to_dict()
    if manifest is not None:
        payload["manifest"] = manifest
    return json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _row(cells: list[str], widths: list[int]) -> str:
    return "  ".join(cell.ljust(width) for cell, width in zip(cells, widths)).rstrip()


def render_report_text(
    eval_report: EvalReport,
    depth_report: DepthBucketReport | None = None,
    manifest: dict | None = None,
) -> str:
    d = eval_report.to_dict()
    lines = []
    header = ["target", "n", "F1-against", "F1-favor", "F1-none", "F1-avg"]
    rows = [header]
    for target, tr in d["per_target"].items():
        rows.append([target, str(tr["n"]), f"{tr['f1_against']:.2f}",
                     f"{tr['f1_favor']:.2f}", f"{tr['f1_none']:.2f}", f"{tr['f1_avg']:.2f}"])
    rows.append(["all", str(d["n"]), f"{d['f1_against']:.2f}",
                 f"{d['f1_favor']:.2f}", f"{d['f1_none']:.2f}", f"{d['f1_avg']:.2f}"])
    widths = [max(len(row[i]) for row in rows) for i in range(len(header))]
    lines.append(_row(rows[0], widths))
    lines.append("-" * (sum(widths) + 2 * (len(widths) - 1)))
    for row in rows[1:]:
        lines.append(_row(row, widths))

    if depth_report is not None:
        dd = depth_report.to_dict()
        lines.append("")
        lines.append(f"depth buckets ({dd['target_kind']} target)")
        bucket_rows = [["depth", "n", "F1-avg"]]
        for name, b in dd["buckets"].items():
            bucket_rows.append([name, str(b["n"]), f"{b['f1_avg']:.2f}"])
        bwidths = [max(len(row[i]) for row in bucket_rows) for i in range(3)]
        lines.append(_row(bucket_rows[0], bwidths))
        lines.append("-" * (sum(bwidths) + 4))
        for row in bucket_rows[1:]:
            lines.append(_row(row, bwidths))

    if manifest is not None:
        lines.append("")
        lines.append("manifest")
        for key in sorted(manifest):
            lines.append(f"  {key}: {manifest[key]}")
    return "\n".join(lines) + "\n"
