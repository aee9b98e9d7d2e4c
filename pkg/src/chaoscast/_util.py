"""Shared plumbing: deterministic seed derivation and canonical serialization."""

from __future__ import annotations

import hashlib
import json


def derive_seed(base: int, *parts) -> int:
    """Derive a 63-bit seed from a base seed and a sequence of labels.

    Stable across runs, platforms, and Python versions, so any candidate
    identified by the same (base, parts) tuple always trains identically.
    """
    key = "|".join([str(int(base))] + [str(p) for p in parts])
    digest = hashlib.sha256(key.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") >> 1


def canonical_json(obj) -> str:
    """Serialize to JSON with a stable key order and no volatile whitespace.

    Used for every report artifact so repeated runs are byte-identical.
    """
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def write_text(path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def format_float(x) -> str:
    """Shortest round-trip decimal form; '' for None."""
    if x is None:
        return ""
    return repr(float(x))


def write_csv(path, header, rows) -> None:
    """Write rows of str/num cells with LF line endings and repr floats."""
    lines = [",".join(header)]
    for row in rows:
        cells = []
        for cell in row:
            if cell is None:
                cells.append("")
            elif isinstance(cell, float):
                cells.append(format_float(cell))
            else:
                cells.append(str(cell))
        lines.append(",".join(cells))
    write_text(path, "\n".join(lines) + "\n")
