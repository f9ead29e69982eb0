"""JSON / CSV / text emission for reports, and the matching JSON reader."""

from __future__ import annotations

import json
import math

from .bounds import BoundReport
from .localize import LocalizationReport


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if hasattr(obj, "item") and not isinstance(obj, (str, bytes)):
        return obj.item()
    return obj


def dumps_json(doc) -> str:
    return json.dumps(_clean(doc), indent=2, sort_keys=True) + "\n"


def loads_json(text: str):
    return json.loads(text)


def bound_document(reports: list[BoundReport], config: dict) -> dict:
    if len(reports) == 1:
        return dict(reports[0].to_dict(), config=config)
    return {"config": config, "reports": [r.to_dict() for r in reports]}


def parse_bound_document(text: str) -> list[BoundReport]:
    """Inverse of :func:`bound_document` after JSON encoding."""
    doc = loads_json(text)
    if "reports" in doc:
        return [BoundReport.from_dict(d) for d in doc["reports"]]
    return [BoundReport.from_dict(doc)]


def parse_localization_document(text: str) -> LocalizationReport:
    return LocalizationReport.from_dict(loads_json(text))


def _flatten(prefix: str, value, out: list):
    if isinstance(value, dict):
        for k in sorted(value):
            _flatten(f"{prefix}.{k}" if prefix else k, value[k], out)
    elif isinstance(value, (list, tuple)):
        for i, v in enumerate(value):
            _flatten(f"{prefix}[{i}]", v, out)
    else:
        out.append((prefix, value))


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return repr(v)
    s = str(v)
    return f'"{s}"' if "," in s or '"' in s else s


def bound_reports_csv(reports: list[BoundReport]) -> str:
    """Long format: one row per (report, quantity)."""
    lines = ["metric,provenance,quantity,value"]
    for r in reports:
        flat = [("value", r.value), ("effective", r.effective)]
        _flatten("constants", r.constants, flat)
        for key, v in flat:
            lines.append(",".join([r.metric, r.provenance, _cell(key), _cell(v)]))
    return "\n".join(lines) + "\n"


def flat_csv(doc: dict) -> str:
    lines = ["key,value"]
    flat: list = []
    _flatten("", doc, flat)
    lines.extend(f"{_cell(k)},{_cell(v)}" for k, v in flat)
    return "\n".join(lines) + "\n"


def bound_reports_text(reports: list[BoundReport]) -> str:
    out = []
    for r in reports:
        out.append(f"{r.metric} [{r.provenance}]: {r.value:.6g} (effective {r.effective:.6g})")
        for k, v in r.constants.items():
            if isinstance(v, float):
                out.append(f"  {k} = {v:.6g}")
            elif isinstance(v, list):
                out.append(f"  {k} = [" + ", ".join(f"{e:.6g}" for e in v) + "]")
            else:
                out.append(f"  {k} = {v}")
    return "\n".join(out) + "\n"


def flat_text(doc: dict) -> str:
    flat: list = []
    _flatten("", doc, flat)
    return "\n".join(f"{k}: {v}" for k, v in flat) + "\n"
