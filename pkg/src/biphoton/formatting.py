"""Deterministic number formatting for data files: 9 significant digits."""
import json
import math

import numpy as np


def sig9(obj):
    """Round floats to 9 significant digits, recursively; non-finite -> None."""
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        obj = obj.item()
    if isinstance(obj, float):
        return float(f"{obj:.8e}") if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: sig9(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [sig9(v) for v in obj]
    return obj


def fmt(x) -> str:
    return f"{x:.8e}"


def dumps(obj, **kw) -> str:
    return json.dumps(sig9(obj), sort_keys=True, **kw)


def write_json(path, obj):
    with open(path, "w", newline="\n") as fh:
        fh.write(dumps(obj, indent=2) + "\n")


def write_csv(path, header, rows, comment=None):
    with open(path, "w", newline="\n") as fh:
        if comment is not None:
            fh.write("# " + dumps(comment) + "\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt(v) for v in row) + "\n")
