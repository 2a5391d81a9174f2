"""Dataset emission: byte-stable CSV and JSON plus a run manifest.

Floats are formatted with 17 significant digits so identical inputs
always serialize to identical bytes; the manifest is the only artifact
carrying a timestamp.
"""

from __future__ import annotations

import datetime as _dt
import hashlib
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Sequence

from .errors import SchemaMismatch

TOOL_VERSION = "0.1.0"


def fmt_value(x: Any) -> str:
    """Stable text form: 17 significant digits for floats, repr-free otherwise."""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return f"{x:.17g}"
    return str(x)


def config_hash(obj: Any) -> str:
    """sha256 of a canonical JSON rendering of ``obj``."""
    text = json.dumps(obj, sort_keys=True, separators=(",", ":"), default=fmt_value)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class RunManifest:
    """Provenance sidecar emitted next to every dataset."""

    config_hash: str
    tool_version: str
    seed: int | None
    created_utc: str
    outputs: tuple[str, ...]

    def to_json(self) -> str:
        return json.dumps({
            "config_hash": self.config_hash,
            "tool_version": self.tool_version,
            "seed": self.seed,
            "created_utc": self.created_utc,
            "outputs": list(self.outputs),
        }, indent=2) + "\n"


def _rows_as_lists(rows: Iterable[Any], schema: Sequence[str]) -> list[list[Any]]:
    out = []
    for i, row in enumerate(rows):
        if isinstance(row, dict):
            missing = set(schema) - set(row)
            extra = set(row) - set(schema)
            if missing or extra:
                raise SchemaMismatch(
                    f"row {i}: missing {sorted(missing)}, unexpected {sorted(extra)}")
            out.append([row[c] for c in schema])
        else:
            vals = list(row)
            if len(vals) != len(schema):
                raise SchemaMismatch(
                    f"row {i}: got {len(vals)} values for {len(schema)} columns")
            out.append(vals)
    return out


def emit_dataset(rows: Iterable[Any], schema: Sequence[str], base_path: str | Path,
                 force: bool = False, cfg_hash: str | None = None,
                 seed: int | None = None, meta: dict | None = None) -> list[Path]:
    """Write ``<base>.csv``, ``<base>.json`` and ``<base>.manifest.json``.

    Existing files are only overwritten with ``force``. The CSV and JSON
    bodies are byte-stable functions of (rows, schema, meta); re-emission
    with identical inputs reproduces them exactly.
    """
    base = Path(base_path)
    csv_path = base.with_suffix(".csv")
    json_path = base.with_suffix(".json")
    manifest_path = base.with_suffix(".manifest.json")

    data = _rows_as_lists(rows, schema)
    for path in (csv_path, json_path, manifest_path):
        if path.exists() and not force:
            raise FileExistsError(f"{path} exists; pass force=True (--force) to overwrite")
    base.parent.mkdir(parents=True, exist_ok=True)

    lines = [",".join(schema)]
    lines += [",".join(fmt_value(v) for v in row) for row in data]
    csv_path.write_text("\n".join(lines) + "\n", encoding="utf-8")

    payload = {
        "schema": list(schema),
        "rows": [[_json_scalar(v) for v in row] for row in data],
    }
    if meta:
        payload["meta"] = {k: _json_scalar(v) for k, v in meta.items()}
    json_path.write_text(
        json.dumps(payload, indent=2, allow_nan=True) + "\n", encoding="utf-8")

    manifest = RunManifest(
        config_hash=cfg_hash if cfg_hash is not None else config_hash(payload),
        tool_version=TOOL_VERSION,
        seed=seed,
        created_utc=_dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        outputs=(csv_path.name, json_path.name),
    )
    manifest_path.write_text(manifest.to_json(), encoding="utf-8")
    return [csv_path, json_path, manifest_path]


def _json_scalar(v: Any):
    if isinstance(v, float):
        # keep byte stability: JSON numbers render via fmt_value round-trip
        if math.isnan(v) or math.isinf(v):
            return fmt_value(v)
        return float(fmt_value(v))
    if hasattr(v, "item"):
        return _json_scalar(v.item())
    return v


def read_csv(path: str | Path) -> tuple[list[str], list[list[str]]]:
    """Minimal reader for the datasets this package writes (no quoting)."""
    text = Path(path).read_text(encoding="utf-8").strip("\n")
    if not text:
        return [], []
    lines = text.split("\n")
    header = lines[0].split(",")
    rows = [line.split(",") for line in lines[1:]]
    return header, rows
