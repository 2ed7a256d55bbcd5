"""Output layouts for the command line tools."""

from __future__ import annotations

import sys
from pathlib import Path
from typing import Literal, Optional

import pandas as pd

SEARCH_COLUMNS = ["N", "z", "wce2_total", "wce2_korobov", "mixture", "wce2_total_table", "wce2_korobov_table"]

PLOT_COLUMNS = ["N", "sqrt_sq_total", "sqrt_sq_total_table", "sqrt_mixture", "ref_loghalf", "ref_log2", "ratio_loghalf"]

BREAKDOWN_COLUMNS = ["sq_total", "sq_korobov", "sq_multilinear", "mixture", "wce"]

CLOSED_FORM_COLUMNS = [
    "closed_form_mixture",
    "mixture_lower",
    "mixture_upper",
    "closed_form_agrees",
    "sq_korobov_table",
    "sq_total_table",
]

FIBONACCI_COLUMNS = ["k", "N", "z"] + BREAKDOWN_COLUMNS + ["halves_equal"]

CONJECTURE_COLUMNS = ["N", "generators", "max_deviation", "tolerance", "passed"]

# six significant digits
FLOAT_FORMAT = "%.5e"

JSON_DOUBLE_PRECISION = 15

OutputFormat = Literal["csv", "json"]


def render_frame(frame: pd.DataFrame, fmt: OutputFormat = "csv") -> str:
    if fmt == "json":
        return frame.to_json(orient="records", double_precision=JSON_DOUBLE_PRECISION) + "\n"
    return frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")


def write_text(text: str, output: Optional[Path] = None) -> None:
    """Write to ``output`` or, without one, to stdout."""
    if output is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    output.parent.mkdir(parents=True, exist_ok=True)
    output.write_text(text, encoding="utf-8")


def write_frame(frame: pd.DataFrame, output: Optional[Path] = None, fmt: OutputFormat = "csv") -> None:
    write_text(render_frame(frame, fmt), output)
