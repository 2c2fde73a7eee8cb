"""Delimited output, JSON records and gnuplot scripts for the CLI."""

from __future__ import annotations

import json
import math
from typing import Iterable, Sequence, TextIO


def fmt(x: float) -> str:
    """17 significant digits, enough to round-trip any double."""
    return format(float(x), ".17g")


def write_csv(stream: TextIO, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    """Comma-delimited, LF-terminated rows; floats at full precision."""
    stream.write(",".join(header) + "\n")
    for row in rows:
        cells = []
        for v in row:
            if isinstance(v, bool):
                cells.append("true" if v else "false")
            elif isinstance(v, (int, str)):
                cells.append(str(v))
            else:
                cells.append(fmt(v))
        stream.write(",".join(cells) + "\n")


def _clean(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def write_json(stream: TextIO, record: dict, indent: int | None = None) -> None:
    stream.write(json.dumps(_clean(record), indent=indent, sort_keys=False) + "\n")


RATIO_GNUPLOT = """\
# ratio P_WM / P_EW over time and initial-state amplitude
set datafile separator ','
set key autotitle columnhead
set xlabel 't'
set ylabel 'alpha'
set zlabel 'P_WM / P_EW'
set dgrid3d {t_steps},{alpha_steps}
set pm3d
splot '{data}' using 1:2:3 with pm3d notitle
pause -1
"""

SWEEP_GNUPLOT = """\
# success probability over rotated Kraus decompositions
set datafile separator ','
set key autotitle columnhead
set xlabel 'delta (rad)'
set ylabel 'P_EW'
set xtics ('0' 0, 'pi/2' pi/2, 'pi' pi, '3pi/2' 3*pi/2, '2pi' 2*pi)
plot '{data}' using 1:2 with lines lw 2 notitle
pause -1
"""


def gnuplot_ratio_grid(data_path: str, t_steps: int, alpha_steps: int) -> str:
    return RATIO_GNUPLOT.format(data=data_path, t_steps=t_steps, alpha_steps=alpha_steps)


def gnuplot_sweep(data_path: str) -> str:
    return SWEEP_GNUPLOT.format(data=data_path)
