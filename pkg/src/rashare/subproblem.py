"""Per-iteration convex program: maximize a linear objective over one shared
ball and per-antenna unit-norm balls, zenith slabs, and trust halfspaces.

The feasible set is Ball(center, radius) intersected with a product of small
per-antenna sets C_n = {||f|| <= 1, f_z >= z0, a_n.f >= b} where a_n is the
(unit) anchor boresight.  Projection onto each C_n has a closed form by
enumerating the candidate active sets, so the whole program reduces to a
monotone scalar search: x(t) = P_C(center + t*g) traces the optimal-solution
path as the ball multiplier relaxes, and the optimum is the point on that path
hitting the ball boundary (or the unconstrained maximizer if the ball is slack).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


class InfeasibleAnchorError(ValueError):
    """The expansion point violates the constraints it is supposed to satisfy."""


@dataclass(frozen=True, eq=False)
class SubproblemSpec:
    """One instance of the per-iteration program.

    objective/center are stacked vectors of length 3N; anchor is the (N, 3)
    pointing the surrogates were built at (unit rows, feasible by construction).
    """

    objective: np.ndarray  # gradient of the linearized objective, length 3N
    center: np.ndarray  # ball center, length 3N
    radius: float
    anchor: np.ndarray  # (N, 3)
    cos_zenith_cap: float  # z0 = cos(max zenith)
    trust_floor: float  # b = 1 - delta

    @property
    def n_blocks(self) -> int:
        return self.anchor.shape[0]


@dataclass
class SolveInfo:
    converged: bool
    evaluations: int
    max_violation: float
    objective: float
    ball_active: bool


def ball_from_u_tilde(anchor_vec, grad, value, lipschitz, cap):
    """Ball form of the quadratic upper-bound constraint.

    The set {x : value + grad.(x - anchor) + L/2 ||x - anchor||^2 <= cap} is
    exactly the ball centered at anchor - grad/L with squared radius
    ||grad||^2/L^2 + 2 (cap - value)/L.  Requires value <= cap.
    """
    if lipschitz <= 0.0:
        raise ValueError("curvature constant must be positive")
    anchor_vec = np.asarray(anchor_vec, dtype=float).ravel()
    grad = np.asarray(grad, dtype=float).ravel()
    radicand = float(grad @ grad) / lipschitz**2 + 2.0 * (cap - value) / lipschitz
    if value > cap or radicand < 0.0:
        raise InfeasibleAnchorError("expansion point already exceeds the cap")
    return anchor_vec - grad / lipschitz, math.sqrt(radicand)


# ---------------------------------------------------------------------------
# Elementary projections (used for feasibility checks and by tests)


def project_ball(x, center, radius):
    """Euclidean projection onto {x : ||x - center|| <= radius}."""
    x = np.asarray(x, dtype=float)
    center = np.asarray(center, dtype=float)
    diff = x - center
    dist = float(np.linalg.norm(diff))
    if dist <= radius:
        return x.copy()
    return center + diff * (radius / dist)


def project_halfspace(x, normal, offset):
    """Euclidean projection onto {x : normal.x >= offset}."""
    x = np.asarray(x, dtype=float)
    normal = np.asarray(normal, dtype=float)
    slack = offset - float(normal @ x)
    if slack <= 0.0:
        return x.copy()
    return x + normal * (slack / float(normal @ normal))


def project_block_ball(x, n):
    """Project block n of a stacked vector onto the unit ball, other blocks untouched."""
    x = np.asarray(x, dtype=float).copy()
    block = x[3 * n : 3 * n + 3]
    norm = float(np.linalg.norm(block))
    if norm > 1.0:
        x[3 * n : 3 * n + 3] = block / norm
    return x


# ---------------------------------------------------------------------------
# Closed-form treatment of the per-antenna sets

_FEAS_TOL = 1e-10


def _unit_rows(v, fallback):
    """Row-normalize v, substituting `fallback` rows where v is (near) zero."""
    norms = np.linalg.norm(v, axis=1)
    safe = np.where(norms > 1e-14, norms, 1.0)[:, None]
    out = v / safe
    bad = norms <= 1e-14
    if np.any(bad):
        out[bad] = fallback[bad]
    return out


class _BlockGeometry:
    """Precomputed per-antenna constraint geometry shared by all projections of one solve."""

    def __init__(self, anchors, z0, b):
        n = anchors.shape[0]
        self.n = n
        self.a = anchors
        self.az = anchors[:, 2]
        self.z0 = z0
        self.b = b
        self.rho_z = math.sqrt(max(0.0, 1.0 - z0 * z0))
        self.rho_a = math.sqrt(max(0.0, 1.0 - b * b))
        self.z0_col = np.full(n, z0)
        horiz = np.column_stack([anchors[:, 0], anchors[:, 1], np.zeros(n)])
        xhat = np.tile([1.0, 0.0, 0.0], (n, 1))
        self.h_fallback = _unit_rows(horiz, xhat)
        trial = np.tile([0.0, 0.0, 1.0], (n, 1)) - self.az[:, None] * anchors
        self.p_fallback = _unit_rows(trial, xhat)
        self.triples = (self._triple_points(1.0), self._triple_points(-1.0))
        det = 1.0 - self.az**2
        self.line_ok = det > 1e-12
        self.inv_det = 1.0 / np.where(self.line_ok, det, 1.0)

    def _triple_points(self, sign):
        """Points with ||f|| = 1, f_z = z0, a.f = b (NaN rows where none exist)."""
        axy = self.a[:, :2]
        m2 = np.einsum("ij,ij->i", axy, axy)
        beta = self.b - self.az * self.z0
        out = np.full((self.n, 3), np.nan)
        ok = m2 > 1e-18
        m2s = np.where(ok, m2, 1.0)
        center = (beta / m2s)[:, None] * axy
        rad2 = self.rho_z**2 - beta**2 / m2s
        ok &= rad2 >= 0.0
        rad = np.sqrt(np.where(ok, rad2, 0.0))
        perp = np.column_stack([-axy[:, 1], axy[:, 0]]) / np.sqrt(m2s)[:, None]
        pts = center + sign * rad[:, None] * perp
        out[:, :2] = np.where(ok[:, None], pts, np.nan)
        out[:, 2] = np.where(ok, self.z0, np.nan)
        return out

    def _feasible(self, cands):
        norms2 = np.einsum("nkj,nkj->nk", cands, cands)
        trust = np.einsum("nj,nkj->nk", self.a, cands)
        finite = ~np.isnan(norms2)
        return (
            finite
            & (norms2 <= (1.0 + _FEAS_TOL) ** 2)
            & (cands[:, :, 2] >= self.z0 - _FEAS_TOL)
            & (trust >= self.b - _FEAS_TOL)
        )

    def project(self, y):
        """Exact projection of each row of y onto its set C_n, shape (N, 3).

        Enumerates every active-set combination of the three constraints; the
        true projection is always among the candidates, so keeping the closest
        feasible candidate is exact.
        """
        n, a = self.n, self.a
        ady = np.einsum("ij,ij->i", a, y)
        cands = np.empty((n, 9, 3))
        cands[:, 0] = y  # interior
        cands[:, 1] = _unit_rows(y, a)  # sphere
        cands[:, 2, :2] = y[:, :2]  # zenith plane
        cands[:, 2, 2] = self.z0
        cands[:, 3] = y + (self.b - ady)[:, None] * a  # trust plane

        # sphere & zenith plane: horizontal circle of radius rho_z at height z0
        dir_xy = _unit_rows(np.column_stack([y[:, :2], np.zeros(n)]), self.h_fallback)
        cands[:, 4, :2] = self.rho_z * dir_xy[:, :2]
        cands[:, 4, 2] = self.z0

        # sphere & trust plane: circle centered at b*a, radius rho_a, normal a
        tangent = y - ady[:, None] * a
        cands[:, 5] = self.b * a + self.rho_a * _unit_rows(tangent, self.p_fallback)

        # zenith plane & trust plane: nearest point of the intersection line
        rz = self.z0 - y[:, 2]
        ra = self.b - ady
        s = (rz - self.az * ra) * self.inv_det
        t = (ra - self.az * rz) * self.inv_det
        line = y + t[:, None] * a
        line[:, 2] += s
        cands[:, 6] = np.where(self.line_ok[:, None], line, np.nan)

        cands[:, 7] = self.triples[0]
        cands[:, 8] = self.triples[1]

        diff = cands - y[:, None, :]
        d2 = np.einsum("nkj,nkj->nk", diff, diff)
        d2 = np.where(self._feasible(cands), d2, np.inf)
        pick = np.argmin(d2, axis=1)
        rows = np.arange(n)
        out = cands[rows, pick]
        stuck = ~np.isfinite(d2[rows, pick])
        if np.any(stuck):  # cannot happen for well-formed specs; keep a safe fallback
            out[stuck] = a[stuck]
        return out

    def support(self, g):
        """Per-block maximizers of g_n . f over C_n (the ball-ignored optimum)."""
        n, a = self.n, self.a
        cands = np.empty((n, 5, 3))
        cands[:, 0] = _unit_rows(g, a)
        gdir = _unit_rows(np.column_stack([g[:, :2], np.zeros(n)]), self.h_fallback)
        cands[:, 1, :2] = self.rho_z * gdir[:, :2]
        cands[:, 1, 2] = self.z0
        tangent = g - np.einsum("ij,ij->i", a, g)[:, None] * a
        cands[:, 2] = self.b * a + self.rho_a * _unit_rows(tangent, self.p_fallback)
        cands[:, 3] = self.triples[0]
        cands[:, 4] = self.triples[1]

        vals = np.einsum("nj,nkj->nk", g, cands)
        vals = np.where(self._feasible(cands), vals, -np.inf)
        pick = np.argmax(vals, axis=1)
        rows = np.arange(n)
        out = cands[rows, pick]
        bad = (~np.isfinite(vals[rows, pick])) | (np.einsum("ij,ij->i", g, g) <= 1e-300)
        if np.any(bad):
            out[bad] = a[bad]
        return out


def project_block_sets(y, anchors, z0, b):
    """Exact projection of each row of y onto its per-antenna set C_n, shape (N, 3)."""
    return _BlockGeometry(np.asarray(anchors, dtype=float), z0, b).project(np.asarray(y, dtype=float))


def block_support_points(g, anchors, z0, b):
    """Per-block maximizers of g_n . f over C_n (the ball-ignored optimum)."""
    return _BlockGeometry(np.asarray(anchors, dtype=float), z0, b).support(np.asarray(g, dtype=float))


# ---------------------------------------------------------------------------
# Solver


def feasibility_report(spec: SubproblemSpec, pvec) -> dict:
    """Normalized violation magnitudes per constraint family (<= 0 means satisfied)."""
    x = np.asarray(pvec, dtype=float).ravel()
    blocks = x.reshape(-1, 3)
    ball = (float(np.linalg.norm(x - spec.center)) - spec.radius) / max(spec.radius, 1e-300)
    block_norm = np.linalg.norm(blocks, axis=1) - 1.0
    zenith_low = spec.cos_zenith_cap - blocks[:, 2]
    zenith_high = blocks[:, 2] - 1.0
    trust = spec.trust_floor - np.einsum("ij,ij->i", spec.anchor, blocks)
    report = {
        "ball": ball,
        "block_norm": block_norm,
        "zenith_low": zenith_low,
        "zenith_high": zenith_high,
        "trust": trust,
    }
    report["max_violation"] = max(
        ball,
        float(block_norm.max()),
        float(zenith_low.max()),
        float(zenith_high.max()),
        float(trust.max()),
    )
    return report


def solve_subproblem(spec: SubproblemSpec, tol: float = 1e-12, max_iter: int = 5000):
    """Maximize objective.x over the spec's feasible set.

    Returns (x, SolveInfo).  The output is feasible (violations well inside
    1e-8) and its objective is never below the anchor's.  Non-convergence of
    the scalar search within the evaluation budget is flagged on SolveInfo
    rather than raised.
    """
    g = np.asarray(spec.objective, dtype=float).ravel()
    center = np.asarray(spec.center, dtype=float).ravel()
    anchors = spec.anchor
    z0, b = spec.cos_zenith_cap, spec.trust_floor
    anchor_vec = anchors.ravel()

    anchor_report = feasibility_report(spec, anchor_vec)
    if anchor_report["max_violation"] > 1e-9:
        raise InfeasibleAnchorError(
            f"anchor violates the constraint set by {anchor_report['max_violation']:.3e}"
        )

    gnorm = float(np.linalg.norm(g))
    if gnorm == 0.0 or spec.radius < 1e-300:
        info = SolveInfo(True, 0, anchor_report["max_violation"], float(g @ anchor_vec), False)
        return anchor_vec.copy(), info

    geom = _BlockGeometry(anchors, z0, b)
    evaluations = 0

    def path_point(t):
        nonlocal evaluations
        evaluations += 1
        y = (center + t * g).reshape(-1, 3)
        return geom.project(y).ravel()

    def ball_excess(x):
        d = x - center
        return math.sqrt(float(d @ d)) - spec.radius

    # Ball ignored: if the separable optimum already fits, it is globally optimal.
    x_free = geom.support(g.reshape(-1, 3)).ravel()
    if ball_excess(x_free) <= spec.radius * 1e-12:
        x = x_free
        ball_active = False
        converged = True
    else:
        # Bracket the boundary crossing of the solution path in the step length t.
        t_lo, x_lo = 0.0, path_point(0.0)
        if ball_excess(x_lo) > spec.radius * 1e-9:
            raise InfeasibleAnchorError("ball does not meet the per-antenna sets")
        t_hi = spec.radius / gnorm
        converged = False
        for _ in range(200):
            if evaluations >= max_iter:
                break
            x_hi = path_point(t_hi)
            if ball_excess(x_hi) > 0.0:
                converged = True
                break
            t_lo, x_lo = t_hi, x_hi
            t_hi *= 2.0
        if converged:
            converged = False
            while evaluations < max_iter:
                if (t_hi - t_lo) <= tol * max(t_hi, 1e-300):
                    converged = True
                    break
                t_mid = 0.5 * (t_lo + t_hi)
                x_mid = path_point(t_mid)
                if ball_excess(x_mid) > 0.0:
                    t_hi = t_mid
                else:
                    t_lo, x_lo = t_mid, x_mid
        x = x_lo  # last iterate on the feasible side of the ball
        ball_active = True

    if float(g @ x) < float(g @ anchor_vec):
        x = anchor_vec.copy()
    report = feasibility_report(spec, x)
    info = SolveInfo(converged, evaluations, report["max_violation"], float(g @ x), ball_active)
    return x, info
