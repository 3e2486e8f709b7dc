"""CSV and JSON writers for moment series and run summaries."""
from __future__ import annotations

import csv
import io
import json
from typing import IO, Iterable

import numpy as np

from .evolve import MomentSeries

SERIES_HEADER = ("t", "mean", "second_moment", "variance")


def fmt(x: float) -> str:
    """17 significant digits: round-trips any float64 exactly."""
    return format(float(x), ".17g")


def write_series_csv(series: MomentSeries, fh: IO[str]) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(SERIES_HEADER)
    for t, m1, m2, var in series.records():
        w.writerow((t, fmt(m1), fmt(m2), fmt(var)))


def write_table_csv(header: Iterable[str], rows: Iterable[Iterable], fh: IO[str]) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(list(header))
    for row in rows:
        w.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])


def series_csv(series: MomentSeries) -> str:
    buf = io.StringIO()
    write_series_csv(series, buf)
    return buf.getvalue()


def series_to_dict(series: MomentSeries) -> dict:
    return {
        "method": series.method,
        "residual": series.residual,
        "meta": series.meta,
        "records": [
            {"t": t, "mean": m1, "second_moment": m2, "variance": var}
            for t, m1, m2, var in series.records()
        ],
    }


def _default(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(payload) -> str:
    return json.dumps(payload, indent=2, default=_default) + "\n"


def read_series_csv(fh: IO[str], method: str = "csv") -> MomentSeries:
    rows = list(csv.DictReader(fh))
    return MomentSeries(
        [int(r["t"]) for r in rows],
        [float(r["mean"]) for r in rows],
        [float(r["second_moment"]) for r in rows],
        method,
    )
