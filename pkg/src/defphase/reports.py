"""Deterministic CSV/JSON emission and run manifests.

Runs must be byte-reproducible from config plus seed, so nothing written
here carries timestamps, and JSON keys are always sorted.  Numbers of
magnitude 1e15 and above are written as decimal strings to survive readers
that parse through 64-bit integers or lossy decimal floats.
"""
from __future__ import annotations

import hashlib
import json
from pathlib import Path

BIG = 1e15


def _encode(obj):
    if isinstance(obj, dict):
        return {str(k): _encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_encode(v) for v in obj]
    if isinstance(obj, bool):
        return obj
    if isinstance(obj, (int, float)):
        if abs(obj) >= BIG:
            return repr(float(obj)) if isinstance(obj, float) else str(obj)
        return obj
    if hasattr(obj, "tolist"):
        return _encode(obj.tolist())
    if hasattr(obj, "item"):
        return _encode(obj.item())
    return obj


def canonical_json(obj) -> str:
    return json.dumps(_encode(obj), sort_keys=True, indent=1)


def write_json(path, obj) -> Path:
    path = Path(path)
    path.write_text(canonical_json(obj) + "\n", encoding="utf-8")
    return path


def write_csv(path, header, rows) -> Path:
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            cells = []
            for val in row:
                if isinstance(val, float):
                    cells.append(f"{val:.17g}")
                else:
                    cells.append(str(val))
            fh.write(",".join(cells) + "\n")
    return path


def config_hash(config: dict) -> str:
    return hashlib.sha256(
        json.dumps(_encode(config), sort_keys=True, separators=(",", ":")).encode()
    ).hexdigest()


def build_manifest(config: dict, constants_used: dict, outputs, extra: dict | None = None) -> dict:
    manifest = {
        "config": _encode(config),
        "config_sha256": config_hash(config),
        "constants": _encode(constants_used),
        "outputs": sorted(str(Path(o).name) for o in outputs),
        "package": "defphase 0.1.0",
    }
    if extra:
        manifest["notes"] = _encode(extra)
    return manifest
