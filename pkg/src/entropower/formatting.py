"""Number formatting shared by CSV/JSON writers (12 significant digits)."""

from __future__ import annotations

import math

__all__ = ["INF_TOKEN", "INDETERMINATE_TOKEN", "csv_value", "json_value"]

INF_TOKEN = "INF"
INDETERMINATE_TOKEN = "INDETERMINATE"


def csv_value(v, indeterminate: bool = False) -> str:
    if indeterminate:
        return INDETERMINATE_TOKEN
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if math.isinf(v):
        return INF_TOKEN if v > 0 else "-" + INF_TOKEN
    if math.isnan(v):
        return INDETERMINATE_TOKEN
    return f"{v:.12g}"


def json_value(v, indeterminate: bool = False):
    if indeterminate:
        return {"kind": "indeterminate"}
    if isinstance(v, (bool, int)) or v is None:
        return v
    v = float(v)
    if math.isinf(v):
        return {"kind": "inf"} if v > 0 else {"kind": "-inf"}
    if math.isnan(v):
        return {"kind": "indeterminate"}
    return float(f"{v:.12g}")
