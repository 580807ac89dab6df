"""Persistent output: JSONL records, flat CSV and a YAML metadata sidecar."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Iterable, Sequence

import yaml

from .. import __version__
from ..trials import TrialRecord
from .stats import SummaryStats

FIXED_COLUMNS = ("trial_index", "seed", "wall_time_ms")


def record_line(record: TrialRecord, *, timing: bool = True) -> str:
    """One JSONL line (without newline); keys in a fixed order."""
    d = record.to_dict()
    if not timing:
        d.pop("wall_time_ms")
    return json.dumps(d, separators=(",", ":"), allow_nan=False)


def write_jsonl(records: Iterable[TrialRecord], path) -> Path:
    path = Path(path)
    try:
        with path.open("w", encoding="utf-8", newline="\n") as fh:
            for r in records:
                fh.write(record_line(r) + "\n")
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write {path}: {exc.strerror}") from exc
    return path


def read_jsonl(path) -> list[TrialRecord]:
    with Path(path).open(encoding="utf-8") as fh:
        return [TrialRecord.from_dict(json.loads(line)) for line in fh if line.strip()]


class JsonlWriter:
    """Append records one at a time, flushing after each (used as ``on_record``)."""

    def __init__(self, path):
        self.path = Path(path)
        self._fh = self.path.open("w", encoding="utf-8", newline="\n")

    def __call__(self, record: TrialRecord) -> None:
        self._fh.write(record_line(record) + "\n")
        self._fh.flush()

    def close(self) -> None:
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def csv_columns(records: Sequence[TrialRecord]) -> list[str]:
    metrics = sorted({k for r in records for k in r.metrics})
    flags = sorted({k for r in records for k in r.flags} - set(metrics))
    return list(FIXED_COLUMNS) + metrics + flags


def to_csv(records: Sequence[TrialRecord]) -> str:
    """RFC 4180 CSV: fixed columns, then metric names, then flag names."""
    cols = csv_columns(records)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(cols)
    for r in records:
        row = []
        for c in cols:
            if c in FIXED_COLUMNS:
                row.append(getattr(r, c))
            elif c in r.metrics:
                row.append(repr(float(r.metrics[c])))
            elif c in r.flags:
                row.append("true" if r.flags[c] else "false")
            else:
                row.append("")
        w.writerow(row)
    return buf.getvalue()


def metadata(config_hash: str, *, fitted: dict | None = None, summaries: Sequence[SummaryStats] = (),
             n_records: int = 0, n_failed: int = 0, config: dict | None = None) -> dict:
    return {
        "code_version": __version__,
        "config_hash": config_hash,
        "n_records": int(n_records),
        "n_failed": int(n_failed),
        "fitted_constants": {k: float(v) for k, v in (fitted or {}).items()},
        "summaries": [s.to_dict() for s in summaries],
        "config": config or {},
    }


def emit_report(records: Sequence[TrialRecord], summaries: Sequence[SummaryStats], fmt: str, base_path, *,
                config_hash: str = "", fitted: dict | None = None, config: dict | None = None) -> list[Path]:
    """Write ``base_path.jsonl`` or ``base_path.csv`` plus ``base_path.meta.yaml``.

    Returns the written paths.  I/O errors name the failing path.
    """
    base = Path(base_path)
    if fmt not in ("jsonl", "csv"):
        raise ValueError(f"unknown format {fmt!r}")
    base.parent.mkdir(parents=True, exist_ok=True)
    data_path = base.with_name(base.name + "." + fmt)
    meta_path = base.with_name(base.name + ".meta.yaml")
    try:
        if fmt == "jsonl":
            write_jsonl(records, data_path)
        else:
            data_path.write_bytes(to_csv(records).encode("utf-8"))
        meta = metadata(config_hash, fitted=fitted, summaries=summaries, n_records=len(records),
                        n_failed=sum(r.failed for r in records), config=config)
        meta_path.write_text(yaml.safe_dump(meta, sort_keys=False), encoding="utf-8")
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write report under {base}: {exc.strerror}") from exc
    return [data_path, meta_path]
