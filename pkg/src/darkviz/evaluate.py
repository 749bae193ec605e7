"""Legibility and color-consistency metrics for light / inverse / dark renderings.

Both metrics are pixel-weighted averages over palette clusters:

* contrast score: sum_i P_i * CR(C_i, C_bg) / P_total, passing at >= 3.0
* color difference: sum_i P_i * dE2000(C_i_light, C_i_candidate) / P_total
"""

from __future__ import annotations

import logging
from pathlib import Path

import numpy as np

from .colormath import contrast_ratio_array, delta_e_2000_array, rgb8_to_lab_array
from .errors import AllBackground
from .imageio import SUPPORTED_SUFFIXES, ImageReadError, load_image
from .optimize import SaConfig, Weights
from .palette import BackgroundSpec, ExtractedPalette

log = logging.getLogger(__name__)

REPORT_VERSION = 1
WCAG_GRAPHICS_MIN = 3.0
CONDITIONS = ("light", "inverse", "dark")
HISTOGRAM_BIN_WIDTH = 5
HISTOGRAM_CAP = 60  # last bin is [60, inf)


def contrast_compliance(colors, counts, bg) -> tuple[float, bool]:
    colors = np.asarray(colors).reshape(-1, 3)
    counts = np.asarray(counts, dtype=float)
    cr = contrast_ratio_array(colors, np.asarray(bg))
    score = float((counts * cr).sum() / counts.sum())
    return score, score >= WCAG_GRAPHICS_MIN


def color_difference_score(light_colors, candidate_colors, counts) -> float:
    counts = np.asarray(counts, dtype=float)
    de = delta_e_2000_array(
        rgb8_to_lab_array(np.asarray(light_colors).reshape(-1, 3)),
        rgb8_to_lab_array(np.asarray(candidate_colors).reshape(-1, 3)),
    )
    return float((counts * de).sum() / counts.sum())


def condition_palettes(palette: ExtractedPalette, dark_rgb, bg: BackgroundSpec) -> dict:
    """Index-aligned (colors, background) per evaluation condition."""
    light = np.asarray(palette.centroids, dtype=np.uint8)
    return {
        "light": (light, np.asarray(bg.light_bg, dtype=np.uint8)),
        # clustering the inverted image yields the inverted centroids, so invert directly
        "inverse": (255 - light, 255 - np.asarray(bg.light_bg, dtype=np.uint8)),
        "dark": (np.asarray(dark_rgb, dtype=np.uint8).reshape(-1, 3), np.asarray(bg.dark_bg, dtype=np.uint8)),
    }


def condition_metrics(palette: ExtractedPalette, dark_rgb, bg: BackgroundSpec) -> dict:
    out = {}
    for name, (colors, bg_rgb) in condition_palettes(palette, dark_rgb, bg).items():
        score, passed = contrast_compliance(colors, palette.counts, bg_rgb)
        out[name] = {
            "contrast_score": round(score, 6),
            "wcag_pass": bool(passed),
            "color_difference": round(color_difference_score(palette.centroids, colors, palette.counts), 6),
        }
    return out


def histogram_bin(value: float) -> int:
    n_bins = HISTOGRAM_CAP // HISTOGRAM_BIN_WIDTH + 1
    return min(int(value // HISTOGRAM_BIN_WIDTH), n_bins - 1)


def histogram_labels() -> list[str]:
    edges = range(0, HISTOGRAM_CAP, HISTOGRAM_BIN_WIDTH)
    return [f"[{lo},{lo + HISTOGRAM_BIN_WIDTH})" for lo in edges] + [f"[{HISTOGRAM_CAP},inf)"]


def color_difference_histogram(values) -> list[int]:
    counts = [0] * len(histogram_labels())
    for v in values:
        counts[histogram_bin(v)] += 1
    return counts


def summarize(per_image: list[dict]) -> dict:
    n = len(per_image)
    pass_rate = {}
    hist = {}
    for cond in CONDITIONS:
        passed = sum(1 for rec in per_image if rec["conditions"][cond]["wcag_pass"])
        pass_rate[cond] = round(100.0 * passed / n, 6) if n else 0.0
        hist[cond] = color_difference_histogram(rec["conditions"][cond]["color_difference"] for rec in per_image)
    return {
        "images": n,
        "pass_rate_by_condition": pass_rate,
        "histogram": {"bin_width": HISTOGRAM_BIN_WIDTH, "bins": histogram_labels(), "counts": hist},
    }


def evaluate_image(
    image,
    bg: BackgroundSpec,
    k: int = 8,
    weights: Weights = Weights(),
    cfg: SaConfig = SaConfig(),
) -> dict:
    """Run the dark transform on one image and score all three conditions."""
    from .pipeline import transform  # pipeline imports this module for its report

    result = transform(image, bg, k=k, weights=weights, cfg=cfg)
    return {"k": result.palette.k, "conditions": result.metrics()}


def collect_images(target) -> list[Path]:
    target = Path(target)
    if target.is_dir():
        return sorted(p for p in target.iterdir() if p.is_file() and p.suffix.lower() in SUPPORTED_SUFFIXES)
    return [target]


def batch_report(
    target,
    bg: BackgroundSpec = BackgroundSpec(),
    k: int = 8,
    weights: Weights = Weights(),
    cfg: SaConfig = SaConfig(),
) -> dict:
    """Evaluate a directory of charts (or one file) into a JSON-ready report.

    Undecodable files and charts with no foreground are skipped with a log
    message; a ``ValueError`` is raised when nothing could be evaluated.
    """
    per_image = []
    skipped = []
    for path in collect_images(target):
        try:
            image = load_image(path, bg.light_bg)
            rec = evaluate_image(image, bg, k=k, weights=weights, cfg=cfg)
        except (ImageReadError, AllBackground) as exc:
            log.warning("skipping %s: %s", path.name, exc)
            skipped.append({"file": path.name, "reason": str(exc)})
            continue
        per_image.append({"file": path.name, **rec})
    if not per_image:
        raise ValueError(f"no evaluable images under {target}")
    return {
        "version": REPORT_VERSION,
        "config": {
            "k": k,
            "light_bg": bg.light_bg.hex(),
            "dark_bg": bg.dark_bg.hex(),
            "weights": {"w_lc": weights.w_lc, "w_cc": weights.w_cc, "w_ac": weights.w_ac},
            "iterations": cfg.iterations,
            "t0": cfg.t0,
            "alpha": cfg.alpha,
            "seed": cfg.seed,
        },
        "per_image": per_image,
        "skipped": skipped,
        "summary": summarize(per_image),
    }


_CONDITION_SCHEMA = {
    "type": "object",
    "required": ["contrast_score", "wcag_pass", "color_difference"],
    "properties": {
        "contrast_score": {"type": "number", "minimum": 1.0, "maximum": 21.0},
        "wcag_pass": {"type": "boolean"},
        "color_difference": {"type": "number", "minimum": 0.0},
    },
}

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "darkviz evaluation report",
    "type": "object",
    "required": ["version", "per_image", "summary"],
    "properties": {
        "version": {"const": REPORT_VERSION},
        "config": {"type": "object"},
        "per_image": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["file", "k", "conditions"],
                "properties": {
                    "file": {"type": "string"},
                    "k": {"type": "integer", "minimum": 1},
                    "conditions": {
                        "type": "object",
                        "required": list(CONDITIONS),
                        "properties": {c: _CONDITION_SCHEMA for c in CONDITIONS},
                    },
                },
            },
        },
        "skipped": {"type": "array"},
        "summary": {
            "type": "object",
            "required": ["images", "pass_rate_by_condition", "histogram"],
            "properties": {
                "images": {"type": "integer", "minimum": 1},
                "pass_rate_by_condition": {
                    "type": "object",
                    "required": list(CONDITIONS),
                    "additionalProperties": {"type": "number", "minimum": 0, "maximum": 100},
                },
                "histogram": {
                    "type": "object",
                    "required": ["bin_width", "bins", "counts"],
                    "properties": {
                        "bin_width": {"const": HISTOGRAM_BIN_WIDTH},
                        "bins": {"type": "array", "items": {"type": "string"}},
                        "counts": {
                            "type": "object",
                            "required": list(CONDITIONS),
                            "additionalProperties": {"type": "array", "items": {"type": "integer", "minimum": 0}},
                        },
                    },
                },
            },
        },
    },
}


def validate_report(report: dict) -> None:
    """Raise ``jsonschema.ValidationError`` if ``report`` does not follow REPORT_SCHEMA."""
    import jsonschema

    jsonschema.validate(report, REPORT_SCHEMA)
