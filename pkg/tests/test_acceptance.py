"""End-to-end acceptance checks, one test per criterion.

Each test records a ``PASS``/``FAIL`` line that is echoed in the pytest
terminal summary (and printed directly when this file is run as a script).
"""

import itertools
import json
import math
import time

import numpy as np
import pytest
from PIL import Image

import conftest
from charts import TABLEAU10, contrast_suite, line_chart, stacked_bars, stock_chart
from darkviz.cli import main as cli_main
from darkviz.colormath import (
    delta_e_2000,
    lab_to_lch_array,
    lab_to_rgb8_array,
    lch_to_lab_array,
    rgb8_to_lab_array,
    wcag_contrast_ratio,
)
from darkviz.evaluate import condition_metrics, condition_palettes
from darkviz.optimize import SaConfig, Weights, accept_worse, anneal_colors, total_energy
from darkviz.palette import BackgroundSpec
from darkviz.pipeline import transform
from sharma2005 import PAIRS

W2B = BackgroundSpec()


def record(n: int, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'}  criterion {n:>2}: {detail}"
    conftest.ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def test_criterion_01_ciede2000_dataset():
    t = time.perf_counter()
    errs = [abs(delta_e_2000(p[:3], p[3:6]) - p[6]) for p in PAIRS]
    dt = time.perf_counter() - t
    ok = len(PAIRS) == 34 and max(errs) <= 1e-4 and dt < 1.0
    record(1, ok, f"34 pairs, max |err| = {max(errs):.2e} (tol 1e-4), {dt * 1e3:.1f} ms")


def test_criterion_02_lattice_round_trip():
    levels = np.linspace(0, 255, 16).round().astype(np.uint8)
    rgb = np.array(list(itertools.product(levels, repeat=3)), dtype=np.uint8)
    t = time.perf_counter()
    back = lab_to_rgb8_array(lch_to_lab_array(lab_to_lch_array(rgb8_to_lab_array(rgb))))
    dt = time.perf_counter() - t
    mismatches = int(np.any(back != rgb, axis=1).sum())
    ok = len(rgb) == 4096 and mismatches == 0 and dt < 1.0
    record(2, ok, f"{len(rgb)} colors, {mismatches} mismatches, {dt * 1e3:.1f} ms")


def test_criterion_03_wcag_anchors():
    rng = np.random.default_rng(3)
    wb = wcag_contrast_ratio((255, 255, 255), (0, 0, 0))
    cols = rng.integers(0, 256, (1000, 2, 3))
    self_ok = all(wcag_contrast_ratio(a, a) == 1.0 for a, _ in cols)
    sym_ok = all(wcag_contrast_ratio(a, b) == wcag_contrast_ratio(b, a) for a, b in cols)
    ok = wb == 21.0 and self_ok and sym_ok
    record(3, ok, f"white/black = {wb!r}, self = 1.0: {self_ok}, symmetric on 1000 pairs: {sym_ok}")


def _gray_nearest_lightness(target: float) -> np.ndarray:
    grays = np.repeat(np.arange(256)[:, None], 3, axis=1)
    L = rgb8_to_lab_array(grays)[:, 0]
    return grays[[int(np.argmin(np.abs(L - target)))]]


def test_criterion_04_lightness_oracle():
    gray = _gray_nearest_lightness(30.0)
    light_L = float(rgb8_to_lab_array(gray)[0, 0])
    # exhaustive oracle over integer L for the luminance-contrast loss
    bg_L = rgb8_to_lab_array(np.array([W2B.light_bg, W2B.dark_bg]))[:, 0]
    oracle = int(np.argmin([abs(abs(bg_L[0] - light_L) - abs(L - bg_L[1])) for L in range(101)]))
    t = time.perf_counter()
    res = anneal_colors(gray, set(), W2B, Weights(1, 0, 0), SaConfig(seed=42))
    dt = time.perf_counter() - t
    final_L = float(res.best.colors[0, 0])
    monotone = bool(np.all(np.diff(res.trace) <= 0))
    ok = oracle == 70 and abs(final_L - oracle) <= 2 and res.best.energy <= res.initial.energy and monotone and dt < 10
    record(
        4, ok,
        f"gray {tuple(int(v) for v in gray[0])} L={light_L:.2f}: final L={final_L:.2f} vs oracle {oracle} (+-2), "
        f"E {res.initial.energy:.3f} -> {res.best.energy:.3f}, trace monotone {monotone}, {dt:.2f} s",
    )


def test_criterion_05_identity_optimum():
    rng = np.random.default_rng(5)
    worst_e, worst_t = 0.0, 0.0
    for k in range(1, 16):
        light = rng.integers(0, 256, (k, 3))
        pairs = {(i, j) for i in range(k) for j in range(i + 1, k) if rng.random() < 0.4}
        t = time.perf_counter()
        res = anneal_colors(light, pairs, W2B, Weights(0, 1, 0), SaConfig(seed=42))
        worst_t = max(worst_t, time.perf_counter() - t)
        worst_e = max(worst_e, res.best.energy)
    ok = worst_e < 1e-9 and worst_t < 10
    record(5, ok, f"k = 1..15: max final energy {worst_e:.2e} (< 1e-9), slowest run {worst_t:.2f} s (< 10 s)")


def test_criterion_06_contrast_preservation():
    rows, ok = [], True
    for name, img, k in contrast_suite():
        m = transform(img, W2B, k=k).metrics()
        light, dark = m["light"]["contrast_score"], m["dark"]["contrast_score"]
        good = abs(dark - light) <= 0.5
        ok &= good
        rows.append(f"{name} {light:.2f}->{dark:.2f}{'' if good else '*'}")
    n_bad = sum(r.endswith("*") for r in rows)
    record(6, ok, f"{10 - n_bad}/10 charts within +-0.5 CR: " + ", ".join(rows))


def _hue_gap(h1: float, h2: float) -> float:
    return abs((h1 - h2 + 180.0) % 360.0 - 180.0)


def test_criterion_07_semantics_vs_inversion():
    result = transform(stock_chart(), W2B, k=3)
    m = result.metrics()
    pals = condition_palettes(result.palette, result.dark_rgb, W2B)
    light_lch = lab_to_lch_array(rgb8_to_lab_array(pals["light"][0]))
    dark_lch = lab_to_lch_array(rgb8_to_lab_array(pals["dark"][0]))
    inv_lch = lab_to_lch_array(rgb8_to_lab_array(pals["inverse"][0]))
    chromatic = light_lch[:, 1] > 5.0  # hue is undefined for the gray axis
    dark_gaps = [_hue_gap(a, b) for a, b, c in zip(light_lch[:, 2], dark_lch[:, 2], chromatic) if c]
    red = int(np.argmin([_hue_gap(h, 40.0) + (0 if c else 1e9) for h, c in zip(light_lch[:, 2], chromatic)]))
    red_shift = _hue_gap(light_lch[red, 2], inv_lch[red, 2])
    d_dark, d_inv = m["dark"]["color_difference"], m["inverse"]["color_difference"]
    ok = d_dark < d_inv and len(dark_gaps) >= 2 and max(dark_gaps) <= 60 and red_shift > 120
    record(
        7, ok,
        f"color difference dark {d_dark:.2f} < inverse {d_inv:.2f}; max dark hue shift {max(dark_gaps):.1f} deg "
        f"(<= 60); inverse red hue shift {red_shift:.1f} deg (> 120)",
    )


def test_criterion_08_acceptance_frequency():
    rng = np.random.default_rng(8)
    n, p = 10_000, math.exp(-0.5)
    freq = sum(accept_worse(500.0, 1000.0, rng) for _ in range(n)) / n
    se = math.sqrt(p * (1 - p) / n)
    ok = abs(freq - p) <= 3 * se
    record(8, ok, f"frequency {freq:.4f} vs exp(-0.5) = {p:.4f}, |diff| = {abs(freq - p) / se:.2f} SE (<= 3)")


def test_criterion_09_cli_determinism(tmp_path):
    src = tmp_path / "chart.png"
    Image.fromarray(line_chart(TABLEAU10[:5], seed=7)).save(src)
    blobs = []
    for i in range(2):
        out, rep = tmp_path / f"dark{i}.png", tmp_path / f"report{i}.json"
        code = cli_main(["transform", "--input", str(src), "--output", str(out), "--report", str(rep), "-k", "6"])
        assert code == 0
        blobs.append((out.read_bytes(), rep.read_bytes()))
    ok = blobs[0] == blobs[1]
    record(9, ok, f"two default-config runs: image identical {blobs[0][0] == blobs[1][0]}, "
                  f"report identical {blobs[0][1] == blobs[1][1]}")


@pytest.mark.slow
def test_criterion_10_performance(tmp_path):
    src = tmp_path / "big.png"
    Image.fromarray(stacked_bars(TABLEAU10, w=1000, h=800, bars=24)).save(src)
    t = time.perf_counter()
    rep = tmp_path / "big.json"
    code = cli_main(["transform", "--input", str(src), "--output", str(tmp_path / "big_dark.png"),
                     "--report", str(rep), "-k", "10"])
    dt = time.perf_counter() - t
    report = json.loads(rep.read_text())
    ok = code == 0 and report["k"] == 10 and dt < 60
    record(10, ok, f"1000x800, k={report['k']}, {len(report['adjacency'])} adjacent pairs, "
                   f"20000 iterations: {dt:.2f} s (< 60 s)")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
