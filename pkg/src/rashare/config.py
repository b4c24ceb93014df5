"""Tunable knobs of the alternating optimizer and its inner pointing loop."""

from __future__ import annotations

from dataclasses import dataclass

from .pointing import DEFAULT_KAPPA


@dataclass(frozen=True)
class AlgoConfig:
    """Convergence thresholds and safeguards for the alternating optimization.

    `it_margin` tightens the interference cap used internally (the optimizer
    works against cap*(1 - it_margin)), which keeps every iterate strictly
    inside the true cap and buys headroom for the exit renormalization of the
    boresights; the SINR cost is far below the convergence threshold.
    `lipschitz_scale` multiplies the analytic curvature bound (>= 1).
    """

    epsilon: float = 1e-3  # relative SINR improvement threshold
    max_outer: int = 50
    kappa: float = DEFAULT_KAPPA  # cosine regularization constant
    trust_delta: float = 0.1  # per-iteration boresight trust margin
    it_margin: float = 0.05
    lipschitz_scale: float = 1.0
    adaptive_curvature: bool = True  # start from the local Hessian norm, backtrack toward the bound
    deep_factor: float = 0.25  # cap fraction of the exploratory beam step feeding the pointing step
    sca_max_iter: int = 30
    sca_rel_tol: float = 1e-4
    reg_cap_slack: float = 1e-4  # slack of the regularized cap over the physical one
    subproblem_tol: float = 1e-12
    subproblem_budget: int = 5000
    random_draws: int = 100  # boresight realizations of the random benchmark
    seed: int = 0

    def __post_init__(self):
        if self.epsilon <= 0.0:
            raise ValueError("convergence threshold must be positive")
        if self.max_outer < 1:
            raise ValueError("iteration cap must be at least 1")
        if not (0.0 < self.trust_delta < 1.0):
            raise ValueError("trust margin must lie in (0, 1)")
        if not (0.0 <= self.it_margin < 1.0):
            raise ValueError("interference margin must lie in [0, 1)")
        if self.lipschitz_scale < 1.0:
            raise ValueError("curvature scale below 1 invalidates the upper bound")
        if not (0.0 < self.deep_factor <= 1.0):
            raise ValueError("exploratory cap fraction must lie in (0, 1]")
