"""End-to-end light -> dark transform of one decoded image."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .colormath import Rgb8
from .evaluate import condition_metrics
from .optimize import AnnealResult, Objective, SaConfig, Weights, anneal
from .palette import BackgroundSpec, ExtractedPalette, extract_palette, mask_background
from .recolor import RenderMode, apply_palette

log = logging.getLogger(__name__)

REPORT_VERSION = 1
TRACE_STRIDE = 1000


@dataclass
class TransformResult:
    image: np.ndarray
    mask: np.ndarray
    palette: ExtractedPalette
    anneal: AnnealResult
    bg: BackgroundSpec
    weights: Weights
    cfg: SaConfig
    mode: RenderMode

    @property
    def dark_rgb(self) -> np.ndarray:
        return self.anneal.best.rgb8()

    def metrics(self) -> dict:
        return condition_metrics(self.palette, self.dark_rgb, self.bg)

    def report(self) -> dict:
        pal = self.palette
        dark = self.dark_rgb
        obj = Objective(self.anneal.initial.lab, pal.adjacency, self.bg, self.weights)
        trace = self.anneal.trace
        stride = [i for i in range(TRACE_STRIDE - 1, len(trace), TRACE_STRIDE)]
        if not stride or stride[-1] != len(trace) - 1:
            stride.append(len(trace) - 1)

        def r(x: float) -> float:
            return round(float(x), 6)

        return {
            "version": REPORT_VERSION,
            "light_bg": self.bg.light_bg.hex(),
            "dark_bg": self.bg.dark_bg.hex(),
            "background_tolerance": self.bg.tolerance,
            "k_requested": pal.k_requested,
            "k": pal.k,
            "mode": self.mode.value,
            "weights": {"w_lc": self.weights.w_lc, "w_cc": self.weights.w_cc, "w_ac": self.weights.w_ac},
            "annealing": {
                "t0": self.cfg.t0,
                "alpha": self.cfg.alpha,
                "iterations": self.cfg.iterations,
                "max_perturb_attempts": self.cfg.max_perturb_attempts,
                "seed": self.cfg.seed,
            },
            "palette": [
                {
                    "index": i,
                    "light": Rgb8(*map(int, pal.centroids[i])).hex(),
                    "dark": Rgb8(*map(int, dark[i])).hex(),
                    "pixels": int(pal.counts[i]),
                    "light_lch": [r(v) for v in self.anneal.initial.colors[i]],
                    "dark_lch": [r(v) for v in self.anneal.best.colors[i]],
                }
                for i in range(pal.k)
            ],
            "adjacency": sorted([list(p) for p in pal.adjacency]),
            "energy": {
                "initial": r(self.anneal.initial.energy),
                "final": r(self.anneal.best.energy),
                "components_initial": {k: r(v) for k, v in obj.components(self.anneal.initial.lab).items()},
                "components_final": {k: r(v) for k, v in obj.components(self.anneal.best.lab).items()},
                "best_trace": [{"iteration": i + 1, "best": r(trace[i])} for i in stride],
                "accepted_moves": self.anneal.accepted,
                "improvements": self.anneal.improved,
                "gamut_fallbacks": self.anneal.gamut_fallbacks,
            },
            "metrics": self.metrics(),
        }


def transform(
    image,
    bg: BackgroundSpec = BackgroundSpec(),
    k: int = 8,
    weights: Weights = Weights(),
    cfg: SaConfig = SaConfig(),
    mode: RenderMode | str = RenderMode.QUANTIZE,
    progress=None,
) -> TransformResult:
    """Mask background, extract ``k`` colors, anneal the dark palette, render."""
    img = np.asarray(image, dtype=np.uint8)
    mask = mask_background(img, bg)
    palette = extract_palette(img, mask, k, seed=cfg.seed)
    log.info("extracted %d colors from %d foreground pixels", palette.k, int(mask.sum()))
    result = anneal(palette, bg, weights, cfg, progress=progress)
    log.info("energy %.4f -> %.4f", result.initial.energy, result.best.energy)
    out = apply_palette(img, mask, palette, result.best, bg, mode)
    return TransformResult(out, mask, palette, result, bg, weights, cfg, RenderMode(mode))
