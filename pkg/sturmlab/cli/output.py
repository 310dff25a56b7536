"""
Deterministic result writers
CSV with a commented config header, JSON with a "config" key; floats in shortest round-trip form
"""

import csv
import io
import json
import math
import sys
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence

# Keys that do not affect results and would break byte-identical output
VOLATILE_KEYS = ("workers", "out")


def format_value(value: Any) -> str:
    """CSV cell text; floats use repr (17 significant digits at most)"""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return ";".join(format_value(v) for v in value)
    return str(value)


def effective_config(config: Dict[str, Any]) -> Dict[str, Any]:
    return {key: value for key, value in config.items() if key not in VOLATILE_KEYS}


def _jsonable(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return repr(value)
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if hasattr(value, "item"):
        return _jsonable(value.item())
    return value


def render_csv(columns: Sequence[str], rows: Iterable[Sequence[Any]],
               config: Dict[str, Any], notes: Optional[List[str]] = None) -> str:
    """Header comments (config, then notes), column row, data rows"""
    buffer = io.StringIO()
    for key, value in effective_config(config).items():
        buffer.write(f"# {key}={format_value(value)}\n")
    for note in notes or []:
        buffer.write(f"# {note}\n")

    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(v) for v in row])
    return buffer.getvalue()


def render_json(payload: Dict[str, Any], config: Dict[str, Any]) -> str:
    document = {"config": effective_config(config)}
    document.update(payload)
    return json.dumps(_jsonable(document), indent=2) + "\n"


def emit(text: str, out: Optional[str] = None):
    """Write to the output path, or standard output when none is given"""
    if out:
        path = Path(out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    else:
        sys.stdout.write(text)
        sys.stdout.flush()
