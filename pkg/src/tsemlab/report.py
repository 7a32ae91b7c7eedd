"""Report JSON: schema validation, stable serialization and a delimited summary."""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources
from pathlib import Path

import jsonschema

from .errors import DataError

SCHEMA_VERSION = 1


@lru_cache(maxsize=1)
def load_schema() -> dict:
    text = resources.files("tsemlab").joinpath("schemas/report.schema.json").read_text(encoding="utf-8")
    return json.loads(text)


def validate_report(doc: dict) -> None:
    """Raise :class:`DataError` naming the first violation when ``doc`` does not match the schema."""
    try:
        jsonschema.validate(doc, load_schema())
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise DataError(f"report does not match schema at {where}: {exc.message}") from None


def dumps(doc: dict) -> str:
    """Canonical text: sorted keys and a trailing newline, so equal reports are equal bytes."""
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_report(doc: dict, path) -> Path:
    validate_report(doc)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(doc), encoding="utf-8")
    return path


def read_report(path) -> dict:
    path = Path(path)
    if not path.is_file():
        raise DataError(f"report {path} does not exist")
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None
    validate_report(doc)
    return doc


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "pass" if value else "fail"
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def summary_rows(doc: dict) -> list[list[str]]:
    """One row per (section, method, metric) value, headed by a column row."""
    rows = [["section", "method", "metric", "value"]]
    if "accuracy" in doc:
        rows.append(["classification", "-", "accuracy", _fmt(doc["accuracy"])])
    for method, vals in sorted(doc.get("faithfulness", {}).items()):
        for key in ("average_drop", "average_increase", "deletion_auc", "insertion_auc"):
            rows.append(["faithfulness", method, key, _fmt(vals[key])])
    for method, vals in sorted(doc.get("causality", {}).items()):
        for key in ("feature_proportion", "time_proportion", "pass"):
            rows.append(["causality", method, key, _fmt(vals[key])])
        for axis, test in sorted(vals["chi_square"].items()):
            rows.append(["causality", method, f"chi_square_{axis}", _fmt(test["statistic"])])
            rows.append(["causality", method, f"p_value_{axis}", _fmt(test["p_value"])])
    for method, vals in sorted(doc.get("spatiotemporality", {}).items()):
        for key in ("spatiality_rate", "temporality_rate", "pass_rate"):
            rows.append(["spatiotemporality", method, key, _fmt(vals[key])])
    ranking = doc.get("ranking")
    if ranking:
        for model, r, w in zip(ranking["models"], ranking["average_ranks"], ranking["wins_ties"]):
            rows.append(["ranking", model, "average_rank", _fmt(float(r))])
            rows.append(["ranking", model, "wins_ties", _fmt(int(w))])
        rows.append(["ranking", "-", "critical_difference", _fmt(ranking["cd"])])
    return rows
