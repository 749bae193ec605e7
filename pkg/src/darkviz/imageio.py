"""Decode/encode raster files. Alpha is flattened onto the declared light background."""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

SUPPORTED_SUFFIXES = (".png", ".jpg", ".jpeg")


class ImageReadError(OSError):
    pass


def composite_over(rgba: np.ndarray, bg) -> np.ndarray:
    """Flatten an (H, W, 4) uint8 array onto a solid background color."""
    rgb = rgba[..., :3].astype(float)
    alpha = rgba[..., 3:4].astype(float) / 255.0
    out = rgb * alpha + np.asarray(bg, dtype=float) * (1.0 - alpha)
    return np.clip(np.rint(out), 0, 255).astype(np.uint8)


def load_image(path, light_bg=(255, 255, 255)) -> np.ndarray:
    """Read PNG/JPEG into an (H, W, 3) uint8 array."""
    try:
        with Image.open(path) as im:
            im.load()
            has_alpha = im.mode in ("RGBA", "LA", "PA") or "transparency" in im.info
            arr = np.asarray(im.convert("RGBA" if has_alpha else "RGB"))
    except (UnidentifiedImageError, OSError, ValueError) as exc:
        raise ImageReadError(f"cannot read image {path}: {exc}") from exc
    if arr.shape[2] == 4:
        arr = composite_over(arr, light_bg)
    return np.ascontiguousarray(arr, dtype=np.uint8)


def save_png(path, image) -> None:
    path = Path(path)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(np.asarray(image, dtype=np.uint8), mode="RGB").save(path, format="PNG")
