"""Figure rendering from the simulator's CSV outputs.

Three figure kinds, one curve per scheme each:

* ``pattern``  - probe-ring gain versus elevation angle
  (input header ``scheme,phi_deg,gain_db``)
* ``power``    - SINR versus maximum transmit power
* ``antennas`` - SINR versus rotatable-element count
  (sweep header ``scheme,variable,value,sinr_db,...``)

Rendering is read-only and deterministic: identical input produces identical
figure content.  Scheme colors are fixed across figures.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

KINDS = ("pattern", "power", "antennas")

SWEEP_HEADER = [
    "scheme",
    "variable",
    "value",
    "sinr_db",
    "sinr_linear",
    "interference_dbm",
    "txpower_dbm",
    "iterations",
    "wall_ms",
    "seed",
]
PATTERN_HEADER = ["scheme", "phi_deg", "gain_db"]

# one fixed color per scheme, shared by every figure kind
PALETTE = {
    "ra": "#d62728",
    "fixed": "#1f77b4",
    "random": "#2ca02c",
    "isotropic": "#9467bd",
}
_FALLBACK_COLOR = "#7f7f7f"

_LABELS = {
    "ra": "rotatable (optimized)",
    "fixed": "fixed orientation",
    "random": "random orientation",
    "isotropic": "isotropic elements",
}

_AXES = {
    "pattern": ("elevation angle phi (deg)", "probe gain (dB re 1 W)"),
    "power": ("maximum transmit power (dBm)", "received SINR (dB)"),
    "antennas": ("number of rotatable antennas (count)", "received SINR (dB)"),
}


class RenderError(ValueError):
    """Input CSV is empty, malformed, or missing required columns."""


@dataclass(frozen=True)
class FigureSpec:
    input_csv: Path
    kind: str
    output_image: Path

    def __post_init__(self):
        if self.kind not in KINDS:
            raise RenderError(f"unknown figure kind {self.kind!r}; expected one of {KINDS}")


def _read_csv(path, expected_header):
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise RenderError(f"{path}: file is empty") from None
            rows = list(reader)
    except OSError as exc:
        raise RenderError(f"cannot read {path}: {exc}") from exc
    if header != expected_header:
        missing = [c for c in expected_header if c not in header]
        raise RenderError(f"{path}: header mismatch, missing columns {missing or header}")
    if not rows:
        raise RenderError(f"{path}: no data rows")
    return rows


def _series(rows, x_idx, y_idx, scheme_idx=0):
    series = {}
    for row in rows:
        series.setdefault(row[scheme_idx], []).append((float(row[x_idx]), float(row[y_idx])))
    return {scheme: sorted(points) for scheme, points in series.items()}


def render(spec: FigureSpec):
    """Render one figure; returns the matplotlib Figure (also saved to disk)."""
    if spec.kind == "pattern":
        rows = _read_csv(spec.input_csv, PATTERN_HEADER)
        series = _series(rows, x_idx=1, y_idx=2)
    else:
        rows = _read_csv(spec.input_csv, SWEEP_HEADER)
        wanted = "p_max_dbm" if spec.kind == "power" else "n"
        rows = [r for r in rows if r[1] == wanted]
        if not rows:
            raise RenderError(f"{spec.input_csv}: no rows with sweep variable {wanted!r}")
        series = _series(rows, x_idx=2, y_idx=3)

    fig, ax = plt.subplots(figsize=(6.4, 4.4), dpi=150)
    for scheme in sorted(series):
        xs, ys = zip(*series[scheme])
        ax.plot(
            xs,
            ys,
            marker="o" if spec.kind != "pattern" else None,
            color=PALETTE.get(scheme, _FALLBACK_COLOR),
            label=_LABELS.get(scheme, scheme),
        )
    xlabel, ylabel = _AXES[spec.kind]
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if spec.kind == "pattern":
        ax.set_xlim(0.0, 180.0)
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    out = Path(spec.output_image)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, metadata={"Software": "rashare-plots"})
    return fig
