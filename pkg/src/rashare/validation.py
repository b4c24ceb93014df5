"""The oracle suite: every acceptance check, runnable from tests or the CLI.

Each check returns (passed, details).  `run_all` executes the whole suite and
assembles a machine-readable report.  The `fault` argument deliberately
corrupts one ingredient ("gradient" or "lipschitz") so tests can verify the
suite actually catches broken inputs.
"""

from __future__ import annotations

import filecmp
import math
import tempfile
import time
from pathlib import Path

import numpy as np
from scipy.integrate import quad

from .beamforming import interference_power, optimal_beamformer
from .channel import Scenario, default_scenario, fixed_pointing, st_channel_vector
from .config import AlgoConfig
from .driver import alternating_optimize, evaluate_scheme, sample_cap_pointing
from .geometry import factor_antennas
from .harness import RunConfig, build_algo, build_scenario, gain_pattern, sweep_antennas, sweep_power, write_rows_csv
from .oracles import (
    empirical_lipschitz,
    finite_diff_grad,
    finite_diff_hessian,
    grid_search_pointing,
    numeric_beamformer_p2,
)
from .pointing import (
    build_cosine_cache,
    leakage_grad,
    leakage_hessian,
    leakage_power,
    lipschitz_bound,
    quadratic_leakage_bound,
    sca_pointing_opt,
    signal_grad,
    signal_power,
)
from .subproblem import SubproblemSpec, ball_from_u_tilde, feasibility_report, solve_subproblem

DEFAULT_SEED = 20260809


# ---------------------------------------------------------------------------
# Shared generators


def interior_pointing(rng, sc: Scenario, margin: float = 0.05) -> np.ndarray:
    """Feasible pointing whose projections stay clear of the clamp boundaries."""
    for _ in range(1000):
        pointing = sample_cap_pointing(rng, sc.n_elements, sc.max_zenith)
        cache = build_cosine_cache(pointing, np.ones(sc.n_elements), sc)
        if np.all(np.abs(cache.cos_sr) > margin) and np.all(np.abs(cache.cos_pr) > margin):
            return pointing
    raise RuntimeError("could not sample an interior pointing")


def scenario_beam(sc: Scenario, cap_scale: float = 1.0) -> np.ndarray:
    F = fixed_pointing(sc)
    h_ss = st_channel_vector(F, sc.sr_position, sc)
    h_sp = st_channel_vector(F, sc.pr_position, sc)
    return optimal_beamformer(h_ss, h_sp, sc.max_power, sc.interference_cap * cap_scale)


def random_scenario(rng) -> Scenario:
    """Physically sane randomized scenario for stress tests."""
    n = int(rng.choice([2, 4]))
    p = float(rng.choice([1.0, 2.0, 4.0]))
    sr_angle = math.radians(rng.uniform(25.0, 155.0))
    pr_angle = math.radians(rng.uniform(95.0, 170.0))
    pr_range = rng.uniform(25.0, 60.0)
    return default_scenario(
        n=n,
        m=int(rng.choice([2, 4])),
        directivity=p,
        sr_range=rng.uniform(30.0, 80.0),
        sr_angle=sr_angle,
        pr_position=(pr_range * math.cos(pr_angle), 0.0, pr_range * math.sin(pr_angle)),
        max_power_dbm=rng.uniform(15.0, 30.0),
        pt_power_dbm=rng.uniform(15.0, 30.0),
        noise_dbm=-80.0,
        cap_dbm=rng.uniform(-90.0, -60.0),
        max_zenith=math.radians(rng.uniform(35.0, 75.0)),
    )


def random_subproblem(rng, n: int = 2, max_zenith: float = math.pi / 3.0, delta: float = 0.1):
    """Well-scaled random instance of the per-iteration program with feasible anchor."""
    anchor = sample_cap_pointing(rng, n, max_zenith * 0.98)
    g = rng.normal(size=3 * n) * 10.0 ** rng.uniform(-1.0, 1.0)
    grad_u = rng.normal(size=3 * n) * 10.0 ** rng.uniform(-1.0, 0.5)
    lip = 10.0 ** rng.uniform(-0.5, 1.0)
    cap = 1.0
    u_val = rng.uniform(0.2, 0.95)
    center, radius = ball_from_u_tilde(anchor.ravel(), grad_u, u_val, lip, cap)
    return SubproblemSpec(g, center, radius, anchor, math.cos(max_zenith), 1.0 - delta)


def subproblem_grid_oracle(spec: SubproblemSpec, step_deg: float = 0.5) -> float:
    """Exhaustive objective over gridded unit boresights inside the constraints.

    Supports one or two blocks.  The grid covers the zenith/azimuth rectangle
    at `step_deg`, keeps points satisfying the per-antenna constraints, adds
    the anchor, and maximizes the linear objective subject to the shared ball
    by a sorted prefix-maximum over the second block.
    """
    n = spec.n_blocks
    if n > 2:
        raise ValueError("grid oracle supports at most two blocks")
    z_max = math.acos(min(1.0, max(-1.0, spec.cos_zenith_cap)))
    step = math.radians(step_deg)
    zeniths = np.arange(0.0, z_max + 1e-12, step)
    azimuths = np.arange(0.0, 2.0 * math.pi - 1e-12, step)
    sz = np.sin(zeniths)[:, None]
    cz = np.cos(zeniths)[:, None]
    pts = np.stack(
        [
            (sz * np.cos(azimuths)[None, :]).ravel(),
            (sz * np.sin(azimuths)[None, :]).ravel(),
            np.broadcast_to(cz, (len(zeniths), len(azimuths))).ravel(),
        ],
        axis=1,
    )

    g = spec.objective.reshape(n, 3)
    center = spec.center.reshape(n, 3)
    vals, dist2 = [], []
    for i in range(n):
        cand = np.vstack([pts, spec.anchor[i][None, :]])
        keep = cand @ spec.anchor[i] >= spec.trust_floor
        cand = cand[keep]
        vals.append(cand @ g[i])
        diff = cand - center[i]
        dist2.append(np.einsum("ij,ij->i", diff, diff))

    r2 = spec.radius**2
    if n == 1:
        ok = dist2[0] <= r2
        if not ok.any():
            raise ValueError("no feasible grid point inside the ball")
        return float(np.max(np.where(ok, vals[0], -np.inf)))

    order = np.argsort(dist2[1])
    d2_sorted = dist2[1][order]
    prefix_best = np.maximum.accumulate(vals[1][order])
    budget = r2 - dist2[0]
    idx = np.searchsorted(d2_sorted, budget, side="right") - 1
    usable = idx >= 0
    if not usable.any():
        raise ValueError("no feasible grid pair inside the ball")
    totals = np.where(usable, vals[0] + prefix_best[np.clip(idx, 0, None)], -np.inf)
    return float(np.max(totals))


# ---------------------------------------------------------------------------
# Acceptance checks


def check_gradients(seed: int = DEFAULT_SEED, fault: str | None = None):
    """Analytic gradients vs central differences at interior feasible points."""
    rng = np.random.default_rng([seed, 1])
    worst = 0.0
    for p in (1.0, 2.0, 4.0):
        sc = default_scenario(directivity=p)
        w = scenario_beam(sc)
        for _ in range(20):
            pointing = interior_pointing(rng, sc)
            cache = build_cosine_cache(pointing, w, sc)
            for grad_fn, val_fn in ((signal_grad, signal_power), (leakage_grad, leakage_power)):
                analytic = grad_fn(cache)
                if fault == "gradient":
                    analytic = analytic * 1.001
                fd = finite_diff_grad(
                    lambda v: val_fn(build_cosine_cache(v.reshape(-1, 3), w, sc)),
                    pointing.ravel(),
                    h=1e-6,
                )
                err = float(np.linalg.norm(analytic - fd)) / max(float(np.linalg.norm(fd)), 1e-300)
                worst = max(worst, err)
    return worst < 1e-5, {"worst_rel_error": worst, "tolerance": 1e-5}


def check_lipschitz(seed: int = DEFAULT_SEED, fault: str | None = None):
    """Empirical gradient-difference ratios and Hessian norms against the bound."""
    rng = np.random.default_rng([seed, 2])
    details = {}
    ok = True
    for p in (1.0, 4.0):
        sc = default_scenario(directivity=p)
        w = scenario_beam(sc)
        cache = build_cosine_cache(fixed_pointing(sc), w, sc)
        bound = lipschitz_bound(cache)
        if fault == "lipschitz":
            bound = bound * 1e-3
        ratio = empirical_lipschitz(w, sc, samples=1000, seed=int(rng.integers(2**31)))
        hess_worst = 0.0
        for _ in range(20):
            pointing = interior_pointing(rng, sc)
            hess = finite_diff_hessian(
                lambda v: leakage_power(build_cosine_cache(v.reshape(-1, 3), w, sc)),
                pointing.ravel(),
                h=1e-4,
            )
            hess_worst = max(hess_worst, float(np.linalg.norm(hess, 2)))
        details[f"p={p:g}"] = {"ratio": ratio, "hessian_norm": hess_worst, "bound": bound}
        ok = ok and ratio <= bound and hess_worst <= bound * (1.0 + 1e-6)
    return ok, details


def check_beamformer(seed: int = DEFAULT_SEED):
    """Closed form vs the subspace search on random instances, plus feasibility."""
    rng = np.random.default_rng([seed, 3])
    worst_gap = -np.inf
    branch2_err = 0.0
    feas_ok = True
    for k in range(200):
        n = (2, 4, 8)[k % 3]
        h_ss = rng.normal(size=n) + 1j * rng.normal(size=n)
        h_sp = rng.normal(size=n) + 1j * rng.normal(size=n)
        p_max = 10.0 ** rng.uniform(-1.0, 0.5)
        mrt_leak = interference_power(math.sqrt(p_max) * h_ss / np.linalg.norm(h_ss), h_sp)
        if k % 2 == 0:
            cap = mrt_leak * 10.0 ** rng.uniform(-3.0, -0.1)  # binding
        else:
            cap = mrt_leak * 10.0 ** rng.uniform(0.1, 1.0)  # slack
        w = optimal_beamformer(h_ss, h_sp, p_max, cap)
        obj = abs(np.vdot(w, h_ss)) ** 2
        _, obj_ref = numeric_beamformer_p2(h_ss, h_sp, p_max, cap)
        gap = (obj_ref - obj) / obj_ref
        worst_gap = max(worst_gap, gap)
        leak = interference_power(w, h_sp)
        if abs(np.vdot(h_sp, h_ss)) ** 2 / np.linalg.norm(h_ss) ** 2 > cap / p_max:
            branch2_err = max(branch2_err, abs(leak - cap) / cap)
        feas_ok = feas_ok and np.linalg.norm(w) ** 2 <= p_max * (1 + 1e-12) and leak <= cap * (1 + 1e-10)
    ok = worst_gap <= 1e-6 and branch2_err <= 1e-10 and feas_ok
    return ok, {"worst_rel_gap": worst_gap, "branch2_cap_err": branch2_err, "feasible": feas_ok}


def check_majorization(seed: int = DEFAULT_SEED, fault: str | None = None):
    """Tightness at the anchor and domination at sampled feasible points."""
    rng = np.random.default_rng([seed, 4])
    tight_ok = True
    dominate_ok = True
    worst = 0.0
    for _ in range(20):
        sc = random_scenario(rng)
        w = scenario_beam(sc)
        anchor = sample_cap_pointing(rng, sc.n_elements, sc.max_zenith)
        cache = build_cosine_cache(anchor, w, sc)
        base = leakage_power(cache)
        grad = leakage_grad(cache)
        lip = lipschitz_bound(cache)
        if fault == "lipschitz":
            lip = lip * 1e-2

        def bound_at(pvec):
            # The guarded operation rejects lip < bound, so the faulted run
            # evaluates the same quadratic formula directly.
            if fault == "lipschitz":
                diff = pvec - anchor.ravel()
                return base + float(grad @ diff) + 0.5 * lip * float(diff @ diff)
            return quadratic_leakage_bound(pvec, anchor.ravel(), cache)

        tight_ok = tight_ok and bound_at(anchor.ravel()) == base
        for _ in range(100):
            point = sample_cap_pointing(rng, sc.n_elements, sc.max_zenith)
            bound = bound_at(point.ravel())
            actual = leakage_power(build_cosine_cache(point, w, sc))
            margin = bound - actual
            worst = min(worst, margin / max(actual, 1e-300)) if actual > 0 else worst
            dominate_ok = dominate_ok and margin >= -1e-12 * max(actual, bound)
    return tight_ok and dominate_ok, {"tight": tight_ok, "dominates": dominate_ok, "worst_rel_margin": worst}


def check_subproblem(seed: int = DEFAULT_SEED, instances: int = 50, step_deg: float = 0.5):
    """Solver objective against the dense grid oracle, and feasibility."""
    rng = np.random.default_rng([seed, 5])
    worst_gap = -np.inf
    worst_violation = 0.0
    for _ in range(instances):
        spec = random_subproblem(rng)
        x, info = solve_subproblem(spec)
        obj = float(spec.objective @ x)
        ref = subproblem_grid_oracle(spec, step_deg)
        gap = (ref - obj) / max(abs(ref), 1e-300)
        worst_gap = max(worst_gap, gap)
        worst_violation = max(worst_violation, info.max_violation)
    ok = worst_gap <= 1e-4 and worst_violation <= 1e-8
    return ok, {"worst_rel_gap": worst_gap, "worst_violation": worst_violation}


def check_sca_vs_grid(seed: int = DEFAULT_SEED, placements: int = 10):
    """Single-element pointing loop against the 1-degree exhaustive search."""
    rng = np.random.default_rng([seed, 6])
    worst_ratio = np.inf
    for _ in range(placements):
        sc = default_scenario(n=1, sr_angle=math.radians(rng.uniform(15.0, 165.0)), cap_dbm=-30.0)
        w = scenario_beam(sc)
        cfg = AlgoConfig()
        pointing, _ = sca_pointing_opt(w, fixed_pointing(sc), sc, cfg)
        achieved = abs(np.vdot(w, st_channel_vector(pointing, sc.sr_position, sc))) ** 2
        _, best = grid_search_pointing(w, sc)
        worst_ratio = min(worst_ratio, achieved / best)
    return worst_ratio >= 0.99, {"worst_ratio": worst_ratio}


def check_ao(seed: int = DEFAULT_SEED, scenarios: int = 20):
    """Monotone SINR, termination, and feasibility on default plus random scenarios."""
    rng = np.random.default_rng([seed, 7])
    cases = [default_scenario()] + [random_scenario(rng) for _ in range(scenarios)]
    ok = True
    details = {"runs": len(cases)}
    worst_mono = 0.0
    for sc in cases:
        cfg = AlgoConfig()
        w, pointing, trace = alternating_optimize(sc, cfg)
        gammas = trace.sinr
        mono = min((b - a for a, b in zip(gammas, gammas[1:])), default=0.0)
        worst_mono = min(worst_mono, mono)
        ok = ok and mono >= -1e-9
        ok = ok and trace.iterations <= cfg.max_outer
        ok = ok and all(l <= sc.interference_cap * (1 + 1e-6) for l in trace.leakage)
        ok = ok and all(p <= sc.max_power * (1 + 1e-12) for p in trace.tx_power)
        norms = np.linalg.norm(pointing, axis=1)
        ok = ok and np.all(np.abs(norms - 1) < 1e-9) and np.all(pointing[:, 2] >= math.cos(sc.max_zenith) - 1e-9)
    details["worst_monotonicity_slack"] = worst_mono
    return ok, details


def check_scheme_ordering(seed: int = DEFAULT_SEED):
    """Cross-scheme SINR ordering and monotone trends over both sweep grids."""
    cfg = RunConfig(seed=seed)
    rows_p, _ = sweep_power(cfg)
    rows_n, _ = sweep_antennas(cfg)
    details = {}
    ok = True
    for label, rows in (("power", rows_p), ("antennas", rows_n)):
        by_scheme = {s: [r for r in rows if r.scheme == s] for s in cfg.schemes}
        values = sorted({r.value for r in rows})
        for v in values:
            at = {s: next(r.sinr_linear for r in by_scheme[s] if r.value == v) for s in cfg.schemes}
            ok = ok and at["ra"] >= at["fixed"] >= at["random"]
            ok = ok and at["ra"] >= at["isotropic"]
        for s in cfg.schemes:
            seq = [r.sinr_linear for r in sorted(by_scheme[s], key=lambda r: r.value)]
            ok = ok and all(b >= a for a, b in zip(seq, seq[1:]))
        details[label] = {
            s: [r.sinr_linear for r in sorted(by_scheme[s], key=lambda r: r.value)] for s in cfg.schemes
        }
    return ok, details


def check_pattern_trend(seed: int = DEFAULT_SEED):
    """RA beats fixed toward the SR and is at or below it toward the PR."""
    cfg = RunConfig(seed=seed, schemes=("ra", "fixed"))
    entries = gain_pattern(cfg)
    sr_phi = cfg.sr_angle_deg
    pr_phi = math.degrees(math.atan2(cfg.pr_position_m[2], cfg.pr_position_m[0]))

    def value(scheme, phi):
        return next(g for s, p, g in entries if s == scheme and abs(p - phi) < 1e-9)

    ra_sr, fixed_sr = value("ra", sr_phi), value("fixed", sr_phi)
    ra_pr, fixed_pr = value("ra", pr_phi), value("fixed", pr_phi)
    ok = ra_sr > fixed_sr + 0.1 and ra_pr < fixed_pr - 0.01
    return ok, {
        "sr_gain_db": {"ra": ra_sr, "fixed": fixed_sr},
        "pr_gain_db": {"ra": ra_pr, "fixed": fixed_pr},
    }


def check_power_conservation():
    """Spherical integral of the element pattern equals the full sphere."""
    details = {}
    ok = True
    for p in (1.0, 2.0, 4.0):
        g0 = 2.0 * (2.0 * p + 1.0)
        integral, _ = quad(lambda eps: g0 * math.cos(eps) ** (2.0 * p) * math.sin(eps), 0.0, math.pi / 2.0)
        total = 2.0 * math.pi * integral
        rel = abs(total - 4.0 * math.pi) / (4.0 * math.pi)
        details[f"p={p:g}"] = rel
        ok = ok and rel < 1e-3
    return ok, details


def check_determinism(seed: int = DEFAULT_SEED):
    """Two identical power sweeps must produce byte-identical CSV files."""
    cfg = RunConfig(seed=seed)
    with tempfile.TemporaryDirectory() as tmp:
        paths = []
        for tag in ("a", "b"):
            rows, _ = sweep_power(cfg)
            path = Path(tmp) / f"sweep_{tag}.csv"
            write_rows_csv(rows, path)
            paths.append(path)
        identical = filecmp.cmp(paths[0], paths[1], shallow=False)
        size = paths[0].stat().st_size
    return identical, {"identical": identical, "bytes": size}


CHECKS = {
    "gradient_correctness": check_gradients,
    "lipschitz_bound": check_lipschitz,
    "beamformer_optimality": check_beamformer,
    "majorization_tightness": check_majorization,
    "subproblem_solver": check_subproblem,
    "sca_vs_grid": check_sca_vs_grid,
    "ao_monotonicity": check_ao,
    "scheme_ordering": check_scheme_ordering,
    "gain_pattern_trend": check_pattern_trend,
    "pattern_power_conservation": check_power_conservation,
    "csv_determinism": check_determinism,
}

_FAULT_AWARE = {"gradient_correctness", "lipschitz_bound", "majorization_tightness"}


def run_all(seed: int = DEFAULT_SEED, fault: str | None = None, names=None):
    """Run the oracle suite; returns (all_passed, report dict)."""
    report = {}
    all_ok = True
    for name, fn in CHECKS.items():
        if names is not None and name not in names:
            continue
        t0 = time.perf_counter()
        kwargs = {}
        if name != "pattern_power_conservation":
            kwargs["seed"] = seed
        if fault is not None and name in _FAULT_AWARE:
            kwargs["fault"] = fault
        passed, details = fn(**kwargs)
        report[name] = {
            "passed": bool(passed),
            "details": details,
            "wall_s": time.perf_counter() - t0,
        }
        all_ok = all_ok and passed
    return all_ok, report
