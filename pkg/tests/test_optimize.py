import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from darkviz import optimize
from darkviz.colormath import delta_e_2000, lch_in_gamut, lch_to_lab_array, rgb8_to_lab_array
from darkviz.errors import InvalidConfig
from darkviz.optimize import (
    Objective,
    SaConfig,
    Weights,
    acceptance_probability,
    anneal_colors,
    _lc_term as lc_terms,
    loss_ac,
    loss_cc,
    loss_lc,
    perturb_color,
    total_energy,
)
from darkviz.palette import BackgroundSpec
from sharma2005 import PAIRS

W2B = BackgroundSpec()  # white -> black


def gray_with_lightness(L):
    return (L, 0.0, 0.0)


def test_lc_zero_when_contrasts_match():
    assert loss_lc([gray_with_lightness(40)], [gray_with_lightness(60)], W2B) == pytest.approx(0.0, abs=1e-9)


def test_lc_with_lifted_dark_background():
    assert lc_terms(40.0, 60.0, 100.0, 10.0) == pytest.approx(10.0)
    bg = BackgroundSpec(dark_bg=(30, 30, 30))
    dark_bg_L = float(rgb8_to_lab_array((30, 30, 30))[0])
    light_L, dark_L = 40.0, 60.0
    expected = abs((100 - light_L) - (dark_L - dark_bg_L))
    assert loss_lc([gray_with_lightness(light_L)], [gray_with_lightness(dark_L)], bg) == pytest.approx(expected, abs=1e-9)


@pytest.mark.parametrize("L", [0.0, 12.5, 30.0, 50.0, 77.0, 100.0])
def test_lc_identity_palette_on_black(L):
    assert loss_lc([gray_with_lightness(L)], [gray_with_lightness(L)], W2B) == pytest.approx(abs(100 - 2 * L), abs=1e-9)


def test_lc_is_mean_over_colors():
    light = [gray_with_lightness(40), gray_with_lightness(70)]
    dark = [gray_with_lightness(60), gray_with_lightness(70)]
    # terms 0 and |30 - 70| = 40
    assert loss_lc(light, dark, W2B) == pytest.approx(20.0, abs=1e-9)


def test_cc_examples():
    pal = [(50, 10, 10), (70, -20, 5)]
    assert loss_cc(pal, pal) == 0.0
    p = PAIRS[0]
    assert loss_cc([p[:3]], [p[3:6]]) == pytest.approx(p[6], abs=1e-4)


def test_cc_permutation_invariant(rng):
    light = rng.uniform([0, -60, -60], [100, 60, 60], (6, 3))
    dark = rng.uniform([0, -60, -60], [100, 60, 60], (6, 3))
    perm = rng.permutation(6)
    assert loss_cc(light[perm], dark[perm]) == pytest.approx(loss_cc(light, dark), rel=1e-12)


def test_ac_examples():
    light = [(50, 40, 0), (60, -30, 20), (30, 0, -40)]
    adj = {(0, 1), (1, 2)}
    assert loss_ac(light, light, adj) == 0.0
    assert loss_ac(light, [(0, 0, 0)] * 3, set()) == 0.0
    dark = [(40, 30, 5), (20, 10, 10)]
    d1 = delta_e_2000(light[0], light[1])
    d2 = delta_e_2000(dark[0], dark[1])
    assert loss_ac(light[:2], dark, {(1, 0)}) == pytest.approx(abs(d1 - d2), abs=1e-12)


def test_ac_pairs_are_unordered_and_deduplicated():
    light = [(50, 40, 0), (60, -30, 20)]
    dark = [(40, 30, 5), (20, 10, 10)]
    assert loss_ac(light, dark, {(0, 1), (1, 0)}) == loss_ac(light, dark, {(0, 1)})


def test_total_energy_is_weighted_sum():
    obj = Objective([(50, 0, 0)], set(), W2B, Weights(1, 1, 1))
    assert obj.combine(([10.0], [5.0], [2.0])) == 17.0
    light = [(50, 40, 0), (60, -30, 20), (30, 0, -40)]
    dark = [(40, 30, 5), (20, 10, 10), (70, 5, 5)]
    adj = {(0, 1), (0, 2)}
    lc, cc, ac = loss_lc(light, dark, W2B), loss_cc(light, dark), loss_ac(light, dark, adj)
    assert total_energy(light, dark, adj, W2B, Weights(1, 0, 0)) == pytest.approx(lc, rel=1e-12)
    assert total_energy(light, dark, adj, W2B, Weights(0.5, 2, 3)) == pytest.approx(0.5 * lc + 2 * cc + 3 * ac, rel=1e-12)


def test_scaling_weights_scales_energy_and_keeps_argmin(rng):
    light = rng.uniform([20, -40, -40], [80, 40, 40], (4, 3))
    adj = {(0, 1), (1, 2), (2, 3)}
    candidates = [rng.uniform([0, -40, -40], [100, 40, 40], (4, 3)) for _ in range(20)]
    w = Weights(1.0, 0.7, 1.3)
    e1 = [total_energy(light, c, adj, W2B, w) for c in candidates]
    e2 = [total_energy(light, c, adj, W2B, w.scaled(2.0)) for c in candidates]
    np.testing.assert_allclose(e2, 2 * np.array(e1), rtol=1e-12)
    assert int(np.argmin(e1)) == int(np.argmin(e2))


def test_incremental_terms_match_fresh_evaluation(rng):
    light = rng.uniform([20, -40, -40], [80, 40, 40], (5, 3))
    adj = {(0, 1), (1, 2), (2, 3), (3, 4), (0, 4), (1, 3)}
    obj = Objective(light, adj, W2B, Weights(1, 0.5, 1.5))
    dark = [tuple(x) for x in rng.uniform([0, -40, -40], [100, 40, 40], (5, 3))]
    terms = obj.terms(dark)
    for c in range(5):
        new = tuple(rng.uniform([0, -40, -40], [100, 40, 40]))
        moved = obj.moved(terms, dark, c, new)
        fresh = obj.terms(dark[:c] + [new] + dark[c + 1 :])
        assert moved == fresh


def test_weights_and_config_validation():
    with pytest.raises(InvalidConfig):
        Weights(0, 0, 0)
    with pytest.raises(InvalidConfig):
        Weights(-1, 1, 1)
    for bad in [dict(t0=0), dict(alpha=1.0), dict(alpha=0.0), dict(iterations=0), dict(max_perturb_attempts=0)]:
        with pytest.raises(InvalidConfig):
            SaConfig(**bad)


def test_perturb_stays_in_gamut_and_within_bounds(rng):
    cfg = SaConfig()
    start = (55.0, 30.0, 200.0)
    for _ in range(500):
        out, ok = perturb_color(start, rng, cfg)
        assert ok and lch_in_gamut(out)
        dl, dc = out[0] - start[0], out[1] - start[1]
        dh = (out[2] - start[2] + 180) % 360 - 180
        changed = [abs(dl) > 0, abs(dc) > 0, abs(dh) > 1e-12]
        assert sum(changed) == 1
        assert abs(dl) <= 20 and abs(dc) <= 20 and abs(dh) <= 50
        assert 0 <= out[0] <= 100 and 0 <= out[1] <= 100 and 0 <= out[2] < 360


def test_perturb_clamps_and_wraps():
    rng = np.random.default_rng(0)
    cfg = SaConfig()
    seen_wrap = False
    for _ in range(300):
        out, _ = perturb_color((99.0, 0.0, 350.0), rng, cfg)
        assert out[0] <= 100.0
        seen_wrap |= out[2] < 50
    assert seen_wrap


def test_perturb_seeded_sequence_is_reproducible():
    def run(seed):
        r = np.random.default_rng(seed)
        return [perturb_color((40.0, 20.0, 120.0), r)[0] for _ in range(50)]

    assert run(3) == run(3)
    assert run(3) != run(4)


def test_perturb_falls_back_after_attempt_limit(monkeypatch):
    monkeypatch.setattr(optimize, "lab_in_gamut_scalar", lambda *a, **k: False)
    out, ok = perturb_color((40.0, 20.0, 120.0), np.random.default_rng(0), SaConfig(max_perturb_attempts=5))
    assert out == (40.0, 20.0, 120.0) and not ok


def brute_force_lightness(light_L: float, bg: BackgroundSpec) -> int:
    """Exhaustive oracle over integer dark lightness for the luminance-contrast loss alone."""
    bg_lab = rgb8_to_lab_array(np.array([bg.light_bg, bg.dark_bg]))
    costs = [abs(abs(bg_lab[0, 0] - light_L) - abs(L - bg_lab[1, 0])) for L in range(101)]
    return int(np.argmin(costs))


def test_single_gray_anneals_to_flipped_lightness():
    gray = np.array([[70, 70, 70]])
    light_L = float(rgb8_to_lab_array(gray)[0, 0])
    assert light_L == pytest.approx(30.0, abs=0.5)
    target = brute_force_lightness(light_L, W2B)
    assert target == 70
    res = anneal_colors(gray, set(), W2B, Weights(1, 0, 0), SaConfig(seed=42))
    assert abs(res.best.colors[0, 0] - target) <= 2
    assert res.best.energy <= res.initial.energy


def test_trace_is_monotone_and_ends_at_best(quick_cfg):
    light = np.array([[200, 40, 40], [40, 160, 40], [60, 60, 220], [230, 200, 60]])
    adj = {(0, 1), (1, 2), (2, 3)}
    res = anneal_colors(light, adj, W2B, Weights(), quick_cfg)
    assert len(res.trace) == quick_cfg.iterations
    assert np.all(np.diff(res.trace) <= 0)
    assert res.trace[-1] == res.best.energy
    assert res.best.energy <= res.initial.energy
    assert total_energy(rgb8_to_lab_array(light), res.best.lab, adj, W2B, Weights()) == pytest.approx(res.best.energy, abs=1e-9)
    assert all(lch_in_gamut(c) for c in res.best.colors)


def test_color_consistency_only_keeps_identity(quick_cfg):
    light = np.random.default_rng(2).integers(0, 256, (6, 3))
    res = anneal_colors(light, {(0, 1), (2, 3)}, W2B, Weights(0, 1, 0), quick_cfg)
    assert res.initial.energy < 1e-9
    assert res.best.energy < 1e-9
    np.testing.assert_array_equal(res.best.rgb8(), light)


def test_anneal_is_deterministic(quick_cfg):
    light = np.array([[200, 40, 40], [40, 160, 40], [60, 60, 220]])
    a = anneal_colors(light, {(0, 1)}, W2B, Weights(), quick_cfg)
    b = anneal_colors(light, {(0, 1)}, W2B, Weights(), quick_cfg)
    assert np.array_equal(a.best.colors, b.best.colors)
    assert np.array_equal(a.trace, b.trace)


def test_anneal_rejects_bad_config():
    with pytest.raises(InvalidConfig):
        anneal_colors(np.array([[1, 2, 3]]), set(), W2B, Weights(), cfg={"t0": 1})


def test_progress_callback(quick_cfg):
    calls = []
    anneal_colors(np.array([[90, 90, 90]]), set(), W2B, Weights(), quick_cfg, progress=lambda *a: calls.append(a), progress_every=500)
    assert [c[0] for c in calls] == [500, 1000, 1500]


def test_acceptance_probability_values():
    assert acceptance_probability(-3.0, 10.0) == 1.0
    assert acceptance_probability(0.0, 10.0) == 1.0
    assert acceptance_probability(500.0, 1000.0) == pytest.approx(math.exp(-0.5))
    assert acceptance_probability(1e6, 1e-80) == 0.0


@settings(max_examples=50)
@given(st.floats(1e-6, 1e4), st.floats(1e-3, 1e5))
def test_acceptance_probability_in_unit_interval(delta, t):
    p = acceptance_probability(delta, t)
    assert 0.0 <= p <= 1.0


def test_empirical_acceptance_frequency():
    r = np.random.default_rng(2024)
    n = 10_000
    p = math.exp(-0.5)
    hits = sum(optimize.accept_worse(500.0, 1000.0, r) for _ in range(n))
    se = math.sqrt(p * (1 - p) / n)
    assert abs(hits / n - p) <= 3 * se


def test_lch_palette_state_roundtrip():
    light = np.array([[12, 200, 99], [250, 250, 0]])
    res = anneal_colors(light, set(), W2B, Weights(0, 1, 0), SaConfig(iterations=10))
    np.testing.assert_allclose(res.initial.lab, rgb8_to_lab_array(light), atol=1e-9)
    np.testing.assert_allclose(lch_to_lab_array(res.initial.colors), res.initial.lab)
