"""Background masking, k-means palette extraction and cluster adjacency."""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field

import numpy as np

from .colormath import Rgb8, delta_e_2000_array, rgb8_to_lab_array
from .errors import AllBackground, DimensionMismatch, KTooLarge

log = logging.getLogger(__name__)

DEFAULT_BG_TOLERANCE = 2.0
MAX_LLOYD_ITERATIONS = 100
REL_IMPROVEMENT_STOP = 1e-6


@dataclass(frozen=True)
class BackgroundSpec:
    light_bg: Rgb8 = Rgb8(255, 255, 255)
    dark_bg: Rgb8 = Rgb8(0, 0, 0)
    tolerance: float = DEFAULT_BG_TOLERANCE

    def __post_init__(self):
        if self.tolerance < 0:
            raise ValueError("background tolerance must be >= 0")
        object.__setattr__(self, "light_bg", Rgb8(*self.light_bg))
        object.__setattr__(self, "dark_bg", Rgb8(*self.dark_bg))


@dataclass
class ExtractedPalette:
    """Light-mode palette of an image.

    ``labels`` is a full ``(H, W)`` map holding the cluster index of every
    foreground pixel and ``-1`` on background pixels.
    """

    centroids: np.ndarray  # (k, 3) uint8
    labels: np.ndarray  # (H, W) int
    counts: np.ndarray  # (k,) int
    adjacency: frozenset[tuple[int, int]]
    k_requested: int
    inertia_history: list[float] = field(default_factory=list)

    @property
    def k(self) -> int:
        return len(self.centroids)

    @property
    def clamped(self) -> bool:
        return self.k < self.k_requested

    @property
    def foreground(self) -> np.ndarray:
        return self.labels >= 0

    def colors(self) -> list[Rgb8]:
        return [Rgb8(*map(int, c)) for c in self.centroids]


def _as_rgb(image) -> np.ndarray:
    img = np.asarray(image)
    if img.ndim != 3 or img.shape[2] != 3:
        raise DimensionMismatch(f"expected an (H, W, 3) RGB image, got shape {img.shape}")
    if img.size == 0:
        raise ValueError("image is empty")
    return img.astype(np.uint8, copy=False)


def _pack(rgb: np.ndarray) -> np.ndarray:
    rgb = rgb.astype(np.int32)
    return (rgb[..., 0] << 16) | (rgb[..., 1] << 8) | rgb[..., 2]


def _unpack(codes: np.ndarray) -> np.ndarray:
    return np.stack([(codes >> 16) & 255, (codes >> 8) & 255, codes & 255], axis=-1).astype(np.uint8)


def mask_background(image, spec: BackgroundSpec) -> np.ndarray:
    """Return a boolean ``(H, W)`` mask that is True on foreground pixels.

    A pixel is background when its CIEDE2000 distance to ``spec.light_bg`` is
    at most ``spec.tolerance``.
    """
    img = _as_rgb(image)
    codes, inverse = np.unique(_pack(img).ravel(), return_inverse=True)
    bg_lab = rgb8_to_lab_array(np.array(spec.light_bg))
    de = delta_e_2000_array(rgb8_to_lab_array(_unpack(codes)), bg_lab)
    mask = (de > spec.tolerance)[inverse].reshape(img.shape[:2])
    if not mask.any():
        raise AllBackground(
            f"no foreground pixels: every pixel is within dE2000 {spec.tolerance} of {spec.light_bg.hex()}"
        )
    return mask


def _kmeans_pp(points, weights, k, rng):
    """Weighted k-means++ seeding over distinct colors."""
    centers = np.empty((k, 3))
    first = rng.choice(len(points), p=weights / weights.sum())
    centers[0] = points[first]
    d2 = ((points - centers[0]) ** 2).sum(axis=1)
    for j in range(1, k):
        mass = weights * d2
        total = mass.sum()
        if total <= 0:
            # every point already coincides with a center; cannot happen when k <= distinct count
            idx = int(np.argmax(d2))
        else:
            idx = rng.choice(len(points), p=mass / total)
        centers[j] = points[idx]
        d2 = np.minimum(d2, ((points - centers[j]) ** 2).sum(axis=1))
    return centers


def _assign(points, centers):
    d2 = ((points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
    # argmin returns the first minimum, so ties go to the lowest cluster index
    labels = np.argmin(d2, axis=1)
    return labels, d2[np.arange(len(points)), labels]


def kmeans(points, weights, k: int, seed, max_iter: int = MAX_LLOYD_ITERATIONS, tol: float = REL_IMPROVEMENT_STOP):
    """Weighted Lloyd iterations with k-means++ seeding.

    ``points`` are distinct colors and ``weights`` their pixel counts, which
    makes this equivalent to clustering every pixel individually.
    Returns ``(centers, labels, inertia_history)``; the centers are the
    weighted means of the final assignment.
    """
    points = np.asarray(points, dtype=float)
    weights = np.asarray(weights, dtype=float)
    rng = np.random.default_rng(seed)
    centers = _kmeans_pp(points, weights, k, rng)
    history: list[float] = []
    labels = None
    for _ in range(max_iter):
        new_labels, d2 = _assign(points, centers)
        # empty cluster: move it onto the point farthest from its own center
        members = np.bincount(new_labels, minlength=k)
        while (members == 0).any():
            j = int(np.flatnonzero(members == 0)[0])
            # only steal from clusters that keep at least one point
            movable = np.where(members[new_labels] > 1, d2, -1.0)
            far = int(np.argmax(movable))
            members[new_labels[far]] -= 1
            new_labels[far] = j
            members[j] += 1
            d2[far] = 0.0
        inertia = float((weights * ((points - centers[new_labels]) ** 2).sum(axis=1)).sum())
        for j in range(k):
            sel = new_labels == j
            centers[j] = np.average(points[sel], axis=0, weights=weights[sel])
        after = float((weights * ((points - centers[new_labels]) ** 2).sum(axis=1)).sum())
        history.append(after)
        converged = labels is not None and np.array_equal(labels, new_labels)
        labels = new_labels
        if converged or inertia == 0:
            break
        if len(history) > 1 and history[-2] - after <= tol * max(history[-2], 1e-12):
            break
    return centers, labels, history


def extract_palette(image, mask, k: int, seed=0, *, min_boundary: int | None = None) -> ExtractedPalette:
    """Cluster foreground pixels into ``k`` colors in RGB space.

    When the image has fewer distinct foreground colors than ``k``, ``k`` is
    clamped and a :class:`KTooLarge` warning is issued.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    img = _as_rgb(image)
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != img.shape[:2]:
        raise DimensionMismatch(f"mask shape {mask.shape} does not match image {img.shape[:2]}")
    if not mask.any():
        raise AllBackground("mask has no foreground pixels")

    fg_codes = _pack(img[mask])
    codes, inverse, counts = np.unique(fg_codes, return_inverse=True, return_counts=True)
    k_used = k
    if len(codes) < k:
        k_used = len(codes)
        msg = f"k={k} exceeds the {len(codes)} distinct foreground colors; using k={k_used}"
        warnings.warn(msg, KTooLarge, stacklevel=2)
        log.warning(msg)

    centers, point_labels, history = kmeans(_unpack(codes), counts, k_used, seed)
    pixel_labels = point_labels[inverse.ravel()]
    labels = np.full(img.shape[:2], -1, dtype=np.int64)
    labels[mask] = pixel_labels
    cluster_counts = np.bincount(pixel_labels, minlength=k_used)
    centroids = np.clip(np.rint(centers), 0, 255).astype(np.uint8)
    return ExtractedPalette(
        centroids=centroids,
        labels=labels,
        counts=cluster_counts,
        adjacency=build_adjacency(labels, min_boundary=min_boundary),
        k_requested=k,
        inertia_history=history,
    )


def boundary_counts(labels) -> dict[tuple[int, int], int]:
    """Count 8-connected foreground pixel pairs per unordered cluster pair."""
    lab = np.asarray(labels)
    if lab.ndim != 2:
        raise DimensionMismatch("labels must be a 2-D label map")
    pairs = []
    # right, down, down-right, down-left: every unordered neighbor pair once
    for a, b in (
        (lab[:, :-1], lab[:, 1:]),
        (lab[:-1, :], lab[1:, :]),
        (lab[:-1, :-1], lab[1:, 1:]),
        (lab[:-1, 1:], lab[1:, :-1]),
    ):
        keep = (a >= 0) & (b >= 0) & (a != b)
        lo = np.minimum(a[keep], b[keep])
        hi = np.maximum(a[keep], b[keep])
        pairs.append(np.stack([lo, hi], axis=1))
    all_pairs = np.concatenate(pairs) if pairs else np.empty((0, 2), dtype=int)
    if len(all_pairs) == 0:
        return {}
    uniq, n = np.unique(all_pairs, axis=0, return_counts=True)
    return {(int(i), int(j)): int(c) for (i, j), c in zip(uniq, n)}


def default_min_boundary(n_foreground: int) -> int:
    return max(8, int(np.ceil(0.001 * n_foreground)))


def build_adjacency(labels, min_boundary: int | None = None) -> frozenset[tuple[int, int]]:
    """Cluster pairs ``(i, j)`` with ``i < j`` sharing at least ``min_boundary`` neighbor pairs."""
    lab = np.asarray(labels)
    if min_boundary is None:
        min_boundary = default_min_boundary(int((lab >= 0).sum()))
    return frozenset(p for p, n in boundary_counts(lab).items() if n >= min_boundary)
