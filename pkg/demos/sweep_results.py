#!/usr/bin/env python3
"""Produce the power-sweep data behind the scheme-comparison figure.

Runs a reduced sweep in-process, prints the SINR table, and writes the same
CSV the command-line tool would emit (see README for the CLI equivalent and
the companion plotting tool).
"""

from pathlib import Path

from rashare.harness import RunConfig, sweep_power, write_manifest, write_rows_csv

cfg = RunConfig(power_grid_dbm=(15.0, 19.0, 23.0, 27.0), seed=7)
rows, timing = sweep_power(cfg)

values = sorted({r.value for r in rows})
print(f"{'P_max dBm':>10} " + " ".join(f"{s:>11}" for s in cfg.schemes))
for v in values:
    cells = []
    for s in cfg.schemes:
        row = next(r for r in rows if r.scheme == s and r.value == v)
        cells.append(f"{10 * __import__('math').log10(row.sinr_linear):9.2f} dB")
    print(f"{v:10.0f} " + " ".join(f"{c:>11}" for c in cells))

out = Path("out_demo")
out.mkdir(exist_ok=True)
csv_path = out / "sweep_power.csv"
write_rows_csv(rows, csv_path)
write_manifest(cfg, out, "demo-sweep-power", [csv_path], timing, 0.0)
print(f"\nwrote {csv_path} (render it with: plot --kind power --in {csv_path} --out sinr.png)")
