"""Convergence-table rows and CSV formatting shared by the studies and the CLI."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

__all__ = ["ConvergenceRow", "observed_orders", "fmt", "write_csv"]


@dataclass(frozen=True)
class ConvergenceRow:
    N: int
    tau_bar: float
    error: float
    order: float | None = None


def observed_orders(steps: Sequence[float], errors: Sequence[float]) -> list[float | None]:
    """log(e_i / e_{i+1}) / log(h_i / h_{i+1}) for consecutive rows; None for the first."""
    out: list[float | None] = [None]
    for i in range(1, len(errors)):
        e0, e1 = errors[i - 1], errors[i]
        if e0 > 0 and e1 > 0:
            out.append(math.log(e0 / e1) / math.log(steps[i - 1] / steps[i]))
        else:
            out.append(float("nan"))
    return out


def fmt(value) -> str:
    """Fixed 17-significant-digit rendering used for every CSV number."""
    if value is None:
        return ""
    if isinstance(value, (int,)) and not isinstance(value, bool):
        return str(value)
    return "%.17g" % value


def write_csv(header: Sequence[str], rows: Iterable[Sequence], stream=None) -> str:
    """Write header and rows with LF line endings; returns the text as well."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([v if isinstance(v, str) else fmt(v) for v in row])
    text = buf.getvalue()
    if stream is not None:
        stream.write(text)
    return text
