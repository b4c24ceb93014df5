"""Scenario ingestion, scheme sweeps, and result persistence.

Config files are JSON with snake_case keys; powers are given in dBm, angles in
degrees, and distances in meters.  Every run writes one CSV per sweep with a
fixed header plus a manifest.json recording the config hash, code version,
seeds, and measured wall times.  CSV contents are a pure function of the
config and seed: the wall_ms column is emitted as 0 so repeated runs are
byte-identical, and the measured timings live in the manifest instead.
"""

from __future__ import annotations

import hashlib
import json
import math
import time
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from . import __version__ as _VERSION
from .channel import Scenario, default_scenario, dbm_to_watts, watts_to_dbm
from .config import AlgoConfig
from .driver import SCHEMES, evaluate_scheme
from .channel import st_channel_vector

CSV_HEADER = "scheme,variable,value,sinr_db,sinr_linear,interference_dbm,txpower_dbm,iterations,wall_ms,seed"
PATTERN_HEADER = "scheme,phi_deg,gain_db"
PATTERN_FLOOR_DB = -400.0  # stands in for zero received power


class ConfigError(ValueError):
    """Invalid or unparseable run configuration."""


@dataclass(frozen=True)
class RunConfig:
    """Scenario, algorithm, and sweep settings in user-facing units."""

    n: int = 4
    m: int = 4
    wavelength_m: float = 0.125
    spacing_m: float | None = None  # default: half wavelength
    element_area_m2: float | None = None  # default: (wavelength/2)^2
    directivity: float = 4.0
    sr_range_m: float = 50.0
    sr_angle_deg: float = 60.0
    pr_position_m: tuple = (-30.0, 0.0, 30.0)
    pt_position_m: tuple = (-55.0, 0.0, 0.0)
    p_max_dbm: float = 23.0
    p0_dbm: float = 23.0
    noise_dbm: float = -80.0
    gamma_dbm: float = -80.0
    theta_max_deg: float = 60.0
    epsilon: float = 1e-3
    t_max: int = 50
    kappa: float = 1e-6
    delta: float = 0.1
    it_margin: float = 0.05
    deep_factor: float = 0.25
    sca_max_iter: int = 30
    sca_rel_tol: float = 1e-4
    seed: int = 1234
    schemes: tuple = SCHEMES
    power_grid_dbm: tuple = (15.0, 18.0, 21.0, 24.0, 27.0, 30.0)
    n_grid: tuple = (2, 4, 8, 16)
    random_draws: int = 100
    pattern_step_deg: float = 0.5

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise ConfigError("antenna counts must be positive")
        for name in ("power_grid_dbm", "n_grid"):
            grid = getattr(self, name)
            if len(grid) == 0 or any(b <= a for a, b in zip(grid, grid[1:])):
                raise ConfigError(f"{name} must be non-empty and strictly increasing")
        bad = [s for s in self.schemes if s not in SCHEMES]
        if bad or not self.schemes:
            raise ConfigError(f"unknown schemes {bad}; valid: {list(SCHEMES)}")
        if self.pattern_step_deg <= 0:
            raise ConfigError("pattern_step_deg must be positive")
        # Fail early on anything the Scenario invariants would reject.
        build_scenario(self)


def load_config(path) -> RunConfig:
    """Read a JSON config; unknown keys are rejected, missing keys take defaults."""
    try:
        raw = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    known = RunConfig.__dataclass_fields__
    unknown = sorted(set(raw) - set(known))
    if unknown:
        raise ConfigError(f"unknown config keys: {unknown}")
    for key in ("pr_position_m", "pt_position_m", "schemes", "power_grid_dbm", "n_grid"):
        if key in raw and isinstance(raw[key], list):
            raw[key] = tuple(raw[key])
    try:
        return RunConfig(**raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def build_scenario(cfg: RunConfig, n: int | None = None, p_max_dbm: float | None = None) -> Scenario:
    """Scenario in SI units for the given config, with optional sweep overrides."""
    try:
        return default_scenario(
            n=n if n is not None else cfg.n,
            m=cfg.m,
            wavelength=cfg.wavelength_m,
            spacing=cfg.spacing_m,
            area=cfg.element_area_m2,
            directivity=cfg.directivity,
            sr_range=cfg.sr_range_m,
            sr_angle=math.radians(cfg.sr_angle_deg),
            pr_position=cfg.pr_position_m,
            pt_position=cfg.pt_position_m,
            max_power_dbm=p_max_dbm if p_max_dbm is not None else cfg.p_max_dbm,
            pt_power_dbm=cfg.p0_dbm,
            noise_dbm=cfg.noise_dbm,
            cap_dbm=cfg.gamma_dbm,
            max_zenith=math.radians(cfg.theta_max_deg),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def build_algo(cfg: RunConfig) -> AlgoConfig:
    try:
        return AlgoConfig(
            epsilon=cfg.epsilon,
            max_outer=cfg.t_max,
            kappa=cfg.kappa,
            trust_delta=cfg.delta,
            it_margin=cfg.it_margin,
            deep_factor=cfg.deep_factor,
            sca_max_iter=cfg.sca_max_iter,
            sca_rel_tol=cfg.sca_rel_tol,
            random_draws=cfg.random_draws,
            seed=cfg.seed,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


@dataclass
class ResultRow:
    scheme: str
    variable: str
    value: float
    sinr_linear: float
    interference_w: float
    tx_power_w: float
    iterations: int
    wall_ms: float
    seed: int

    def csv_line(self) -> str:
        fields = [
            self.scheme,
            self.variable,
            _fmt(self.value),
            _fmt(10.0 * math.log10(self.sinr_linear) if self.sinr_linear > 0 else float("-inf")),
            _fmt(self.sinr_linear),
            _fmt(watts_to_dbm(self.interference_w)),
            _fmt(watts_to_dbm(self.tx_power_w)),
            str(self.iterations),
            "0",  # deterministic placeholder; measured timing is in the manifest
            str(self.seed),
        ]
        return ",".join(fields)


def _fmt(x: float) -> str:
    return format(float(x), ".12g")


def _evaluate_point(cfg: RunConfig, variable: str, value: float, sc: Scenario):
    algo = build_algo(cfg)
    rows, timings = [], {}
    for scheme in cfg.schemes:
        t0 = time.perf_counter()
        res = evaluate_scheme(sc, scheme, algo)
        timings[scheme] = (time.perf_counter() - t0) * 1e3
        rows.append(
            ResultRow(
                scheme,
                variable,
                value,
                res.sinr,
                res.interference,
                res.tx_power,
                res.iterations,
                timings[scheme],
                cfg.seed,
            )
        )
    return rows, timings


def run_single(cfg: RunConfig):
    """Evaluate the configured schemes on the config's own scenario."""
    sc = build_scenario(cfg)
    rows, timings = _evaluate_point(cfg, "p_max_dbm", cfg.p_max_dbm, sc)
    return _sorted_rows(rows), {"points": [timings]}


def sweep_power(cfg: RunConfig):
    """Evaluate every scheme at each transmit-power grid point."""
    rows, timing = [], []
    for p_dbm in cfg.power_grid_dbm:
        sc = build_scenario(cfg, p_max_dbm=p_dbm)
        point_rows, timings = _evaluate_point(cfg, "p_max_dbm", p_dbm, sc)
        rows.extend(point_rows)
        timing.append(timings)
    return _sorted_rows(rows), {"points": timing}


def sweep_antennas(cfg: RunConfig):
    """Evaluate every scheme at each array-size grid point."""
    rows, timing = [], []
    for n in cfg.n_grid:
        sc = build_scenario(cfg, n=int(n))
        point_rows, timings = _evaluate_point(cfg, "n", float(n), sc)
        rows.extend(point_rows)
        timing.append(timings)
    return _sorted_rows(rows), {"points": timing}


def _sorted_rows(rows):
    return sorted(rows, key=lambda r: (r.scheme, r.value))


def gain_pattern(cfg: RunConfig):
    """Received power on a 50 m probe ring versus elevation angle, per scheme.

    Each scheme's optimized beam/pointing pair is frozen at the config scenario
    and then probed at [R cos(phi), 0, R sin(phi)] for phi in [0, 180] deg.
    The reported value is 10*log10(received power / 1 W); zero power maps to
    the floor constant so the CSV stays finite.
    """
    sc = build_scenario(cfg)
    algo = build_algo(cfg)
    radius = cfg.sr_range_m
    phis = np.arange(0.0, 180.0 + 1e-9, cfg.pattern_step_deg)
    out = []
    for scheme in cfg.schemes:
        res = evaluate_scheme(sc, scheme, algo)
        probe_sc = sc
        if scheme == "isotropic":
            from .channel import GainPattern

            probe_sc = sc.with_pattern(GainPattern.isotropic(sc.pattern.wavelength, sc.pattern.area))
        for phi in phis:
            rad = math.radians(phi)
            target = np.array([radius * math.cos(rad), 0.0, radius * math.sin(rad)])
            h = st_channel_vector(res.pointing, target, probe_sc)
            power = abs(np.vdot(res.w, h)) ** 2
            gain_db = 10.0 * math.log10(power) if power > 0.0 else PATTERN_FLOOR_DB
            out.append((scheme, float(phi), gain_db))
    out.sort(key=lambda t: (t[0], t[1]))
    return out


def write_rows_csv(rows, path):
    lines = [CSV_HEADER] + [r.csv_line() for r in rows]
    Path(path).write_text("\n".join(lines) + "\n")


def write_pattern_csv(entries, path):
    lines = [PATTERN_HEADER] + [f"{s},{_fmt(phi)},{_fmt(g)}" for s, phi, g in entries]
    Path(path).write_text("\n".join(lines) + "\n")


def config_hash(cfg: RunConfig) -> str:
    canon = json.dumps(asdict(cfg), sort_keys=True, default=list)
    return hashlib.sha256(canon.encode()).hexdigest()


def write_manifest(cfg: RunConfig, out_dir, command: str, outputs, timing, wall_ms: float):
    manifest = {
        "command": command,
        "version": _VERSION,
        "config": asdict(cfg),
        "config_hash": config_hash(cfg),
        "seed": cfg.seed,
        "outputs": [str(p) for p in outputs],
        "wall_ms_total": wall_ms,
        "timing": timing,
    }
    path = Path(out_dir) / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, default=list) + "\n")
    return path


def with_overrides(cfg: RunConfig, seed: int | None = None, schemes=None) -> RunConfig:
    updates = {}
    if seed is not None:
        updates["seed"] = int(seed)
    if schemes is not None:
        updates["schemes"] = tuple(schemes)
    return replace(cfg, **updates) if updates else cfg
