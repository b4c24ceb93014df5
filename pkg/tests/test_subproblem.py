import math

import numpy as np
import pytest

from rashare.driver import sample_cap_pointing
from rashare.subproblem import (
    InfeasibleAnchorError,
    SubproblemSpec,
    ball_from_u_tilde,
    block_support_points,
    feasibility_report,
    project_ball,
    project_block_ball,
    project_block_sets,
    project_halfspace,
    solve_subproblem,
)
from rashare.validation import random_subproblem, subproblem_grid_oracle

Z0 = math.cos(math.pi / 3)
FLOOR = 0.9


def _sample_feasible_block(rng, anchor):
    """Rejection-sample a point of one per-antenna set."""
    while True:
        f = sample_cap_pointing(rng, 1, math.pi / 3)[0] * rng.uniform(0.88, 1.0)
        if f[2] >= Z0 and f @ anchor >= FLOOR:
            return f


def test_ball_from_u_tilde_degenerate_radii():
    anchor = np.array([0.0, 0.0, 1.0])
    center, radius = ball_from_u_tilde(anchor, np.zeros(3), 1.0, 2.0, 1.0)
    np.testing.assert_allclose(center, anchor)
    assert radius == 0.0
    _, radius = ball_from_u_tilde(anchor, np.zeros(3), 0.25, 2.0, 1.0)
    assert radius == pytest.approx(math.sqrt(2 * 0.75 / 2.0), rel=1e-12)
    with pytest.raises(InfeasibleAnchorError):
        ball_from_u_tilde(anchor, np.zeros(3), 1.5, 2.0, 1.0)


def test_ball_matches_quadratic_bound_set():
    rng = np.random.default_rng(12)
    anchor = rng.normal(size=6)
    grad = rng.normal(size=6)
    value, lip, cap = 0.4, 3.0, 1.0
    center, radius = ball_from_u_tilde(anchor, grad, value, lip, cap)
    for _ in range(1000):
        x = anchor + rng.normal(scale=0.8, size=6)
        bound = value + grad @ (x - anchor) + 0.5 * lip * np.sum((x - anchor) ** 2)
        dist = np.linalg.norm(x - center)
        if abs(dist - radius) < 1e-9 * max(radius, 1.0):
            continue  # skip razor-edge points
        assert (bound <= cap) == (dist <= radius)


def test_elementary_projections_idempotent_nonexpansive():
    rng = np.random.default_rng(13)
    center = rng.normal(size=6)
    for _ in range(50):
        x, y = rng.normal(size=6, scale=2), rng.normal(size=6, scale=2)
        for proj in (
            lambda v: project_ball(v, center, 1.3),
            lambda v: project_halfspace(v, np.array([1.0, 0, 0, 0, 0, 0]), -0.5),
            lambda v: project_block_ball(v, 1),
        ):
            px, py = proj(x), proj(y)
            np.testing.assert_allclose(proj(px), px, atol=1e-12)
            assert np.linalg.norm(px - py) <= np.linalg.norm(x - y) + 1e-12


def test_projection_interior_point_unchanged():
    x = np.array([0.1, 0.0, 0.8, 0.0, 0.1, 0.7])
    np.testing.assert_allclose(project_ball(x, x, 1.0), x)
    out = project_halfspace(x, np.ones(6) / math.sqrt(6), -10.0)
    np.testing.assert_allclose(out, x)
    # violation moved by exactly the margin along the unit normal
    normal = np.zeros(6)
    normal[0] = 1.0
    moved = project_halfspace(x, normal, 0.5)
    assert moved[0] == pytest.approx(0.5)
    np.testing.assert_allclose(moved[1:], x[1:])


def test_block_projection_variational_inequality():
    rng = np.random.default_rng(14)
    anchors = sample_cap_pointing(rng, 3, math.pi / 3 * 0.95)
    for _ in range(25):
        y = rng.normal(scale=1.5, size=(3, 3))
        proj = project_block_sets(y, anchors, Z0, 1 - 0.1)
        report_ok = (
            np.all(np.linalg.norm(proj, axis=1) <= 1 + 1e-9)
            and np.all(proj[:, 2] >= Z0 - 1e-9)
            and np.all(np.einsum("ij,ij->i", anchors, proj) >= FLOOR - 1e-9)
        )
        assert report_ok
        for n in range(3):
            for _ in range(80):
                z = _sample_feasible_block(rng, anchors[n])
                # projection characterization: (y - p) . (z - p) <= 0
                assert (y[n] - proj[n]) @ (z - proj[n]) <= 1e-9


def test_block_support_points_maximize():
    rng = np.random.default_rng(15)
    anchors = sample_cap_pointing(rng, 3, math.pi / 3 * 0.95)
    for _ in range(25):
        g = rng.normal(size=(3, 3))
        best = block_support_points(g, anchors, Z0, FLOOR)
        for n in range(3):
            assert np.linalg.norm(best[n]) <= 1 + 1e-9
            assert best[n][2] >= Z0 - 1e-9
            assert best[n] @ anchors[n] >= FLOOR - 1e-9
            for _ in range(80):
                z = _sample_feasible_block(rng, anchors[n])
                assert g[n] @ best[n] >= g[n] @ z - 1e-9


def test_solver_zero_objective_returns_anchor():
    rng = np.random.default_rng(16)
    spec = random_subproblem(rng)
    spec = SubproblemSpec(np.zeros_like(spec.objective), spec.center, spec.radius, spec.anchor, spec.cos_zenith_cap, spec.trust_floor)
    x, info = solve_subproblem(spec)
    np.testing.assert_allclose(x, spec.anchor.ravel())
    assert info.converged


def test_solver_pure_ball_analytic_optimum():
    # Blocks stay slack: the optimum is center + radius * direction.
    anchor = np.array([[math.sin(0.35), 0.0, math.cos(0.35)]])
    tangent = np.array([math.cos(0.35), 0.0, -math.sin(0.35)])
    direction = tangent - 0.5 * anchor[0]
    direction /= np.linalg.norm(direction)
    radius = 0.01
    spec = SubproblemSpec(direction, anchor.ravel(), radius, anchor, Z0, FLOOR)
    x, info = solve_subproblem(spec)
    np.testing.assert_allclose(x, anchor.ravel() + radius * direction, atol=1e-8)
    assert info.ball_active


def test_solver_never_below_anchor_and_feasible():
    rng = np.random.default_rng(17)
    for _ in range(30):
        spec = random_subproblem(rng, n=int(rng.choice([1, 2, 4])))
        x, info = solve_subproblem(spec)
        assert spec.objective @ x >= spec.objective @ spec.anchor.ravel() - 1e-12
        assert info.max_violation <= 1e-8


def test_solver_matches_grid_oracle():
    rng = np.random.default_rng(18)
    for _ in range(10):
        spec = random_subproblem(rng)
        x, _ = solve_subproblem(spec)
        obj = float(spec.objective @ x)
        ref = subproblem_grid_oracle(spec, step_deg=1.0)
        assert obj >= ref - 1e-4 * abs(ref)


def test_solver_deterministic():
    rng = np.random.default_rng(19)
    spec = random_subproblem(rng)
    x1, _ = solve_subproblem(spec)
    x2, _ = solve_subproblem(spec)
    np.testing.assert_array_equal(x1, x2)


def test_infeasible_anchor_detected():
    anchor = np.array([[0.0, 0.0, 1.0]])
    center = anchor.ravel() + np.array([5.0, 0.0, 0.0])
    spec = SubproblemSpec(np.ones(3), center, 0.1, anchor, Z0, FLOOR)
    with pytest.raises(InfeasibleAnchorError):
        solve_subproblem(spec)


def test_feasibility_report_semantics():
    rng = np.random.default_rng(20)
    spec = random_subproblem(rng)
    report = feasibility_report(spec, spec.anchor.ravel())
    assert report["max_violation"] <= 1e-12
    outside = spec.center + np.ones_like(spec.center)
    report = feasibility_report(spec, outside)
    dist = np.linalg.norm(outside - spec.center)
    assert report["ball"] == pytest.approx((dist - spec.radius) / spec.radius, rel=1e-12)