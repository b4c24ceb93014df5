import cmath
import math

import numpy as np
import pytest

from rashare.beamforming import interference_power, optimal_beamformer, sinr
from rashare.channel import DegenerateChannelError, default_scenario, fixed_pointing, st_channel_vector
from rashare.driver import pt_interference
from rashare.oracles import numeric_beamformer_p2


def _random_channels(rng, n):
    return (rng.normal(size=n) + 1j * rng.normal(size=n), rng.normal(size=n) + 1j * rng.normal(size=n))


def test_orthogonal_channels_give_mrt():
    h_ss = np.array([1.0 + 0j, 0.0])
    h_sp = np.array([0.0, 1.0 + 0j])
    w = optimal_beamformer(h_ss, h_sp, 2.0, 1e-6)
    np.testing.assert_allclose(w, math.sqrt(2.0) * h_ss, atol=1e-12)
    assert interference_power(w, h_sp) == 0.0


def test_slack_cap_gives_mrt():
    rng = np.random.default_rng(1)
    h_ss, h_sp = _random_channels(rng, 4)
    p_max = 0.5
    cap = p_max * np.linalg.norm(h_sp) ** 2 * 1.01  # never reachable: rho would exceed 1
    w = optimal_beamformer(h_ss, h_sp, p_max, cap)
    np.testing.assert_allclose(w, math.sqrt(p_max) * h_ss / np.linalg.norm(h_ss), atol=1e-12)


def test_binding_cap_meets_it_with_equality():
    rng = np.random.default_rng(2)
    for _ in range(40):
        n = int(rng.choice([2, 4, 8]))
        h_ss, h_sp = _random_channels(rng, n)
        p_max = 10.0 ** rng.uniform(-1, 0.5)
        mrt_leak = interference_power(math.sqrt(p_max) * h_ss / np.linalg.norm(h_ss), h_sp)
        cap = mrt_leak * 10.0 ** rng.uniform(-3, -0.5)
        w = optimal_beamformer(h_ss, h_sp, p_max, cap)
        assert interference_power(w, h_sp) == pytest.approx(cap, rel=1e-10)
        assert np.linalg.norm(w) ** 2 == pytest.approx(p_max, rel=1e-12)
        _, obj_ref = numeric_beamformer_p2(h_ss, h_sp, p_max, cap)
        assert abs(np.vdot(w, h_ss)) ** 2 == pytest.approx(obj_ref, rel=1e-6)


def test_feasibility_on_random_instances():
    rng = np.random.default_rng(3)
    for _ in range(60):
        n = int(rng.choice([2, 4, 8]))
        h_ss, h_sp = _random_channels(rng, n)
        p_max = 10.0 ** rng.uniform(-1, 1)
        cap = 10.0 ** rng.uniform(-6, 1)
        w = optimal_beamformer(h_ss, h_sp, p_max, cap)
        assert np.linalg.norm(w) ** 2 <= p_max * (1 + 1e-12)
        assert interference_power(w, h_sp) <= cap * (1 + 1e-10)


def test_global_phase_invariance():
    rng = np.random.default_rng(4)
    h_ss, h_sp = _random_channels(rng, 4)
    p_max, cap = 0.3, 1e-3
    w1 = optimal_beamformer(h_ss, h_sp, p_max, cap)
    w2 = optimal_beamformer(h_ss * cmath.exp(0.7j), h_sp, p_max, cap)
    assert abs(np.vdot(w2, h_ss * cmath.exp(0.7j))) ** 2 == pytest.approx(abs(np.vdot(w1, h_ss)) ** 2, rel=1e-12)
    assert interference_power(w2, h_sp) == pytest.approx(interference_power(w1, h_sp), rel=1e-9, abs=1e-30)


def test_objective_continuous_at_branch_threshold():
    rng = np.random.default_rng(5)
    h_ss, h_sp = _random_channels(rng, 4)
    p_max = 0.7
    threshold = p_max * abs(np.vdot(h_sp, h_ss)) ** 2 / np.linalg.norm(h_ss) ** 2
    objs = []
    for cap in (threshold * (1 - 1e-9), threshold * (1 + 1e-9)):
        w = optimal_beamformer(h_ss, h_sp, p_max, cap)
        objs.append(abs(np.vdot(w, h_ss)) ** 2)
    assert objs[0] == pytest.approx(objs[1], rel=1e-6)


def test_parallel_channels_degenerate_branch():
    h_ss = np.array([1.0 + 1j, 2.0 - 0.5j])
    h_sp = 2.0 * cmath.exp(0.3j) * h_ss
    p_max, cap = 1.0, 1e-2
    w = optimal_beamformer(h_ss, h_sp, p_max, cap)
    rho = math.sqrt(cap / (p_max * np.linalg.norm(h_sp) ** 2))
    assert np.linalg.norm(w) ** 2 == pytest.approx(p_max * min(1.0, rho) ** 2, rel=1e-12)
    assert interference_power(w, h_sp) <= cap * (1 + 1e-10)
    with pytest.raises(DegenerateChannelError):
        optimal_beamformer(np.zeros(2, dtype=complex), h_sp, p_max, cap)


def test_sinr_basic_values():
    w = np.array([1.0 + 0j, 0.0])
    h_perp = np.array([0.0, 1.0 + 0j])
    v = np.zeros(2, dtype=complex)
    assert sinr(w, h_perp, v, h_perp, 1e-11) == 0.0
    noise = 2.5e-11
    h_ss = np.array([math.sqrt(noise) + 0j, 0.0])
    assert sinr(w, h_ss, v, h_perp, noise) == pytest.approx(1.0, rel=1e-12)
    with pytest.raises(ValueError):
        sinr(w, h_ss, v, h_perp, 0.0)


def test_sinr_default_scenario_against_straight_line_eval():
    """Independent end-to-end recomputation of the default-scenario SINR."""
    sc = default_scenario()
    F = fixed_pointing(sc)
    h_ss = st_channel_vector(F, sc.sr_position, sc)
    h_sp = st_channel_vector(F, sc.pr_position, sc)
    w = optimal_beamformer(h_ss, h_sp, sc.max_power, sc.interference_cap)

    lam, area, g0, p = 0.125, 0.125**2 / 4, 18.0, 4.0
    signal = 0j
    for n, pos in enumerate(sc.st_array.positions):
        diff = sc.sr_position - pos
        d = math.sqrt(float(diff @ diff))
        cos_eps = diff[2] / d  # boresight is +z
        h = math.sqrt(area * g0 * cos_eps ** (2 * p) / (4 * math.pi * d * d)) * cmath.exp(-2j * math.pi * d / lam)
        signal += complex(np.conj(w[n])) * h
    cross = 0.0
    h_pp = []
    h_ps = []
    for pos in sc.pt_array.positions:
        for store, tgt in ((h_pp, sc.pr_position), (h_ps, sc.sr_position)):
            d = math.sqrt(float((tgt - pos) @ (tgt - pos)))
            store.append(lam / (4 * math.pi * d) * cmath.exp(-2j * math.pi * d / lam))
    h_pp, h_ps = np.array(h_pp), np.array(h_ps)
    v = math.sqrt(sc.pt_power) * h_pp / np.linalg.norm(h_pp)
    cross = abs(np.vdot(v, h_ps)) ** 2
    expected = abs(signal) ** 2 / (cross + sc.noise_power)

    got = abs(np.vdot(w, h_ss)) ** 2 / (pt_interference(sc) + sc.noise_power)
    assert got == pytest.approx(expected, rel=1e-9)


def test_interference_power_examples():
    h_sp = np.array([1.0 + 0j, 1j])
    assert interference_power(np.zeros(2, dtype=complex), h_sp) == 0.0
    w = h_sp / np.linalg.norm(h_sp)  # unit power, aligned
    assert interference_power(w, h_sp) == pytest.approx(np.linalg.norm(h_sp) ** 2, rel=1e-12)
    perp = np.array([1.0 + 0j, -1j])
    assert abs(np.vdot(perp, h_sp)) < 1e-12
    assert interference_power(perp, h_sp) == pytest.approx(0.0, abs=1e-24)