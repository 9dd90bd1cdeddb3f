"""
Output records for the command line: a command echo, its inputs, a table of
outputs with a provenance column (exact | bound | monte-carlo), and the library
version. CSV carries the output table only; JSON carries everything.
"""

import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

import pandas as pd

from utils.config import get_version

PROVENANCES = ("exact", "bound", "monte-carlo")
SIGNIFICANT_DIGITS = 6


def round_significant(value: float, digits: int = SIGNIFICANT_DIGITS) -> float:
    """Round to `digits` significant digits, the same value "%.{digits}g" prints."""
    if not math.isfinite(value):
        return value
    return float(f"{value:.{digits}g}")


def _json_value(value: Any, digits: int) -> Any:
    if hasattr(value, "item"):
        value = value.item()
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, float):
        if math.isnan(value):
            return None
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return round_significant(value, digits)
    return str(value)


@dataclass
class OutputRecord:
    command: str
    inputs: Dict[str, Any]
    outputs: pd.DataFrame
    version: str = field(default_factory=get_version)

    def __post_init__(self):
        if "provenance" not in self.outputs.columns:
            raise ValueError("output table needs a provenance column")
        bad = set(self.outputs["provenance"]) - set(PROVENANCES)
        if bad:
            raise ValueError(f"unknown provenance label(s): {sorted(bad)}")

    @property
    def provenance(self) -> List[str]:
        return sorted(set(self.outputs["provenance"]))

    def to_csv(self, digits: int = SIGNIFICANT_DIGITS) -> str:
        buffer = io.StringIO()
        self.outputs.to_csv(buffer, index=False, float_format=f"%.{digits}g", lineterminator="\n")
        return buffer.getvalue()

    def to_dict(self, digits: int = SIGNIFICANT_DIGITS) -> Dict[str, Any]:
        rows = [
            {str(col): _json_value(val, digits) for col, val in row.items()}
            for row in self.outputs.to_dict(orient="records")
        ]
        return {
            "command": self.command,
            "inputs": {k: _json_value(v, digits) for k, v in self.inputs.items()},
            "outputs": rows,
            "provenance": self.provenance,
            "version": self.version,
        }

    def to_json(self, digits: int = SIGNIFICANT_DIGITS) -> str:
        return json.dumps(self.to_dict(digits), indent=2) + "\n"

    def render(self, fmt: str = "csv", digits: int = SIGNIFICANT_DIGITS) -> str:
        if fmt == "csv":
            return self.to_csv(digits)
        if fmt == "json":
            return self.to_json(digits)
        raise ValueError(f"unknown output format {fmt!r}; expected csv or json")

    def write(self, path: Optional[Path], fmt: str = "csv", digits: int = SIGNIFICANT_DIGITS) -> str:
        """Write to path (parents created) and return the text; path None returns the text only."""
        text = self.render(fmt, digits)
        if path is not None:
            path = Path(path)
            path.parent.mkdir(parents=True, exist_ok=True)
            with open(path, "w", encoding="utf-8", newline="\n") as f:
                f.write(text)
        return text
