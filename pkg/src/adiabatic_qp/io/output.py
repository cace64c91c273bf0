"""Output tables with a provenance block, JSON summaries and gnuplot scripts.

A CSV file starts with '# key: value' lines (the provenance block), then a
header row and the data rows. Only the '# timestamp' line varies between
runs with the same configuration and seed.
"""
from __future__ import annotations

import csv
import io
import json
import math
import platform
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
import scipy

# schema id -> columns
SCHEMAS = {
    "bands.v1": ("edge_index", "E", "D", "gap_open"),
    "decomposition.v1": ("j", "phi_minus", "phi_plus", "interval_index", "S", "t"),
    "actions.v1": ("j", "gap_left", "gap_right", "S", "S_error", "S_contour", "t"),
    "stokes.v1": ("origin", "line", "direction", "re", "im"),
    "lyapunov.v1": ("E", "epsilon", "n", "theta_num", "stderr", "cells", "converged"),
    "verify.v1": ("E", "epsilon", "theta_num", "theta_asym", "ratio", "stderr", "h4_ok"),
}


def _version():
    from .. import __version__
    return __version__


def provenance(schema, config=None, seed=None):
    return {
        "schema": schema,
        "config_sha256": config.digest() if config is not None else "",
        "seed": seed if seed is not None else (config.seed if config is not None else ""),
        "versions": f"adiabatic_qp {_version()}; numpy {np.__version__}; scipy {scipy.__version__}; "
                    f"python {platform.python_version()}",
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }


def _cell(v):
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return repr(v) if math.isfinite(v) else ("nan" if math.isnan(v) else ("inf" if v > 0 else "-inf"))
    return str(v)


@dataclass
class OutputTable:
    schema: str
    columns: tuple
    rows: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.schema not in SCHEMAS:
            raise ValueError(f"unknown schema {self.schema!r}")
        if tuple(self.columns) != SCHEMAS[self.schema]:
            raise ValueError(f"columns {self.columns} do not match schema {self.schema}")

    def body(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for r in self.rows:
            w.writerow([_cell(v) for v in r])
        return buf.getvalue()

    def render(self):
        head = "".join(f"# {k}: {v}\n" for k, v in self.meta.items())
        return head + self.body()

    def column(self, name):
        i = self.columns.index(name)
        return [r[i] for r in self.rows]


def _parse(v):
    try:
        return int(v)
    except ValueError:
        pass
    try:
        return float(v)
    except ValueError:
        return v


def parse_table(text):
    meta, lines = {}, []
    for line in text.splitlines():
        if line.startswith("# "):
            k, _, v = line[2:].partition(": ")
            meta[k] = v
        elif line:
            lines.append(line)
    reader = csv.reader(lines)
    columns = tuple(next(reader))
    rows = [tuple(_parse(v) for v in r) for r in reader]
    return OutputTable(meta.get("schema", ""), columns, rows, meta)


def read_table(path):
    return parse_table(Path(path).read_text(encoding="utf-8"))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def render_json(payload, meta):
    return json.dumps({"provenance": meta, **_jsonable(payload)}, indent=2, sort_keys=True) + "\n"


def read_json(path):
    return json.loads(Path(path).read_text(encoding="utf-8"))


class Writer:
    """Single writer for one output directory; records every file it writes."""

    def __init__(self, directory, config=None, seed=None):
        self.dir = Path(directory)
        self.dir.mkdir(parents=True, exist_ok=True)
        self.config = config
        self.seed = seed
        self.written = []

    def _put(self, name, text):
        path = self.dir / name
        path.write_text(text, encoding="utf-8")
        self.written.append(path)
        return path

    def table(self, name, schema, rows):
        t = OutputTable(schema, SCHEMAS[schema], list(rows), provenance(schema, self.config, self.seed))
        return self._put(name, t.render())

    def json(self, name, schema, payload):
        return self._put(name, render_json(payload, provenance(schema, self.config, self.seed)))

    def script(self, name, text):
        meta = provenance("gnuplot.v1", self.config, self.seed)
        head = "".join(f"# {k}: {v}\n" for k, v in meta.items())
        return self._put(name, head + text)


# ── gnuplot ────────────────────────────────────────────────────────────────

def geometry_script(decomposition_csv, stokes_csv, title):
    return f"""set datafile separator ','
set datafile commentschars '#'
set key autotitle columnhead
set title "{title}"
set xlabel 'Re zeta'
set ylabel 'Im zeta'
set xrange [0:2*pi]
# band intervals on the real axis (thick), gaps (thin), Stokes lines
plot '{decomposition_csv}' using 2:(0):($3-$2):(0) with vectors nohead lw 4 title 'band intervals', \\
     '{stokes_csv}' using 4:5 with lines lw 1 title 'Stokes lines'
"""


def verify_script(verify_csv):
    return f"""set datafile separator ','
set datafile commentschars '#'
set logscale x
set xlabel 'epsilon'
set ylabel 'theta_num / theta_asym'
set yrange [0:1.5]
plot '{verify_csv}' using 2:($7 == 1 ? $5 : 1/0) with points pt 7 title 'ratio', 1 with lines dt 2 title ''
"""


def bands_script(bands_csv):
    return f"""set datafile separator ','
set datafile commentschars '#'
set xlabel 'E'
set ylabel 'D(E)'
plot '{bands_csv}' using 2:3 with points pt 7 title 'band edges', 2 dt 2 notitle, -2 dt 2 notitle
"""
