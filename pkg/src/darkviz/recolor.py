"""Write an optimized palette back into pixels; inversion baseline; previews."""

from __future__ import annotations

from enum import Enum

import numpy as np

from .colormath import lab_to_rgb8_array, rgb8_to_lab_array
from .errors import DimensionMismatch
from .optimize import PaletteState
from .palette import BackgroundSpec, ExtractedPalette

SEPARATOR_RGB = (128, 128, 128)
SEPARATOR_WIDTH = 2


class RenderMode(str, Enum):
    QUANTIZE = "quantize"
    RESIDUAL = "residual"


def _dark_arrays(dark_palette) -> tuple[np.ndarray, np.ndarray]:
    """(rgb8, lab) of a dark palette given as PaletteState or (k, 3) uint8 RGB."""
    if isinstance(dark_palette, PaletteState):
        return dark_palette.rgb8(), dark_palette.lab
    rgb = np.asarray(dark_palette, dtype=np.uint8).reshape(-1, 3)
    return rgb, rgb8_to_lab_array(rgb)


def apply_palette(
    image,
    mask,
    palette: ExtractedPalette,
    dark_palette,
    bg: BackgroundSpec,
    mode: RenderMode | str = RenderMode.QUANTIZE,
) -> np.ndarray:
    """Render the dark-mode image.

    Background pixels become ``bg.dark_bg``.  In quantize mode each
    foreground pixel takes its cluster's dark color; in residual mode it
    keeps its CIELAB offset from the light centroid, re-applied around the
    dark color and clipped into sRGB.
    """
    img = np.asarray(image)
    mask = np.asarray(mask, dtype=bool)
    mode = RenderMode(mode)
    if img.ndim != 3 or img.shape[2] != 3:
        raise DimensionMismatch(f"expected an (H, W, 3) image, got {img.shape}")
    if mask.shape != img.shape[:2] or palette.labels.shape != img.shape[:2]:
        raise DimensionMismatch(
            f"image {img.shape[:2]}, mask {mask.shape} and labels {palette.labels.shape} differ"
        )
    dark_rgb, dark_lab = _dark_arrays(dark_palette)
    if len(dark_rgb) != palette.k:
        raise DimensionMismatch(f"dark palette has {len(dark_rgb)} colors, light palette {palette.k}")

    out = np.empty_like(img, dtype=np.uint8)
    out[...] = np.asarray(bg.dark_bg, dtype=np.uint8)
    fg = mask & (palette.labels >= 0)
    labels = palette.labels[fg]
    if mode is RenderMode.QUANTIZE:
        out[fg] = dark_rgb[labels]
    else:
        # work per distinct (color, label) combination; charts repeat colors heavily
        px = img[fg].astype(np.int64)
        key = (labels << 24) | (px[:, 0] << 16) | (px[:, 1] << 8) | px[:, 2]
        uniq, inverse = np.unique(key, return_inverse=True)
        u_lab = uniq >> 24
        u_rgb = np.stack([(uniq >> 16) & 255, (uniq >> 8) & 255, uniq & 255], axis=1)
        light_lab = rgb8_to_lab_array(palette.centroids)
        offset = rgb8_to_lab_array(u_rgb) - light_lab[u_lab]
        out[fg] = lab_to_rgb8_array(dark_lab[u_lab] + offset)[inverse.ravel()]
    return out


def invert_image(image) -> np.ndarray:
    img = np.asarray(image, dtype=np.uint8)
    return 255 - img


def _pad_to_height(img: np.ndarray, height: int) -> np.ndarray:
    if img.shape[0] == height:
        return img
    pad = np.empty((height - img.shape[0],) + img.shape[1:], dtype=np.uint8)
    pad[...] = SEPARATOR_RGB
    return np.concatenate([img, pad], axis=0)


def compose_preview(light, dark) -> np.ndarray:
    """Light and dark images side by side with a 2-pixel gray separator."""
    light = np.asarray(light, dtype=np.uint8)
    dark = np.asarray(dark, dtype=np.uint8)
    h = max(light.shape[0], dark.shape[0])
    sep = np.empty((h, SEPARATOR_WIDTH, 3), dtype=np.uint8)
    sep[...] = SEPARATOR_RGB
    return np.concatenate([_pad_to_height(light, h), sep, _pad_to_height(dark, h)], axis=1)
