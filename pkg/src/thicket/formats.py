"""File formats: concept-class JSON, sequence CSV, distributions, and canonical JSON output."""
from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

from .core import ConceptClass
from .errors import ThicketError
from .pac import Distribution

SIGNIFICANT_DIGITS = 12


def canonical(obj):
    """Round floats to 12 significant digits and reject NaN/Infinity, recursively."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        if not math.isfinite(obj):
            raise ThicketError(f"refusing to serialize non-finite value {obj!r}")
        return float(f"{obj:.{SIGNIFICANT_DIGITS}g}")
    if isinstance(obj, dict):
        return {str(k): canonical(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [canonical(v) for v in obj]
    if hasattr(obj, "item"):
        return canonical(obj.item())
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj) -> str:
    return json.dumps(canonical(obj), sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def _read_json(path) -> object:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ThicketError(f"no such file: {path}") from None
    except json.JSONDecodeError as exc:
        raise ThicketError(f"{path}: invalid JSON ({exc.msg})") from None


def read_class(path) -> ConceptClass:
    return ConceptClass.from_json(_read_json(path))


def write_class(cls: ConceptClass, path) -> None:
    Path(path).write_text(dumps(cls.to_json()), encoding="utf-8")


def read_distribution(spec: str, domain_size: int) -> Distribution:
    if spec == "uniform":
        return Distribution.uniform(domain_size)
    data = _read_json(spec)
    if isinstance(data, dict):
        data = data.get("probabilities")
    if not isinstance(data, list) or len(data) != domain_size:
        raise ThicketError(f"{spec}: expected {domain_size} probabilities")
    return Distribution(tuple(data))


def _read_csv_rows(path) -> list[dict]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ThicketError(f"no such file: {path}") from None
    return list(csv.DictReader(io.StringIO(text)))


def _int_field(row: dict, name: str, path, line: int) -> int:
    try:
        return int(row[name])
    except (KeyError, TypeError, ValueError):
        raise ThicketError(f"{path}:{line}: missing or non-integer {name!r}") from None


def read_sequence(path) -> list[tuple[int, int]]:
    """CSV with header ``example,label``."""
    out = []
    for i, row in enumerate(_read_csv_rows(path), start=2):
        x, y = _int_field(row, "example", path, i), _int_field(row, "label", path, i)
        if y not in (0, 1):
            raise ThicketError(f"{path}:{i}: label must be 0 or 1")
        out.append((x, y))
    return out


def read_schedule(path) -> list[int]:
    """CSV with an ``example`` column (other columns ignored)."""
    return [_int_field(row, "example", path, i) for i, row in enumerate(_read_csv_rows(path), start=2)]


def write_csv(rows: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\r\n", extrasaction="ignore")
    writer.writeheader()
    for row in rows:
        writer.writerow(canonical(row))
    return buf.getvalue()
