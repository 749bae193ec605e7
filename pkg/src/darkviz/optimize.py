"""Dark-palette objective and the simulated-annealing search over it.

The objective is a weighted sum of three losses over index-aligned light and
dark palettes given as CIELAB triples:

* luminance contrast: keep each color's lightness distance to the background
* color consistency: CIEDE2000 between each light color and its dark twin
* adjacent difference: keep the CIEDE2000 between spatially adjacent clusters

Per-color terms are averaged, so the energy scale does not grow with k.
Palettes are small (k <= a few dozen), so the search runs on plain floats.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .colormath import (
    GAMUT_TOLERANCE,
    delta_e_2000_scalar,
    lab_in_gamut_scalar,
    lab_to_lch_array,
    lab_to_linear_rgb_array,
    lch_to_lab_array,
    lch_to_lab_scalar,
    linear_rgb_to_rgb8_array,
    rgb8_to_lab_array,
)
from .errors import InvalidConfig
from .palette import BackgroundSpec

log = logging.getLogger(__name__)

Lab = tuple[float, float, float]


@dataclass(frozen=True)
class Weights:
    w_lc: float = 1.0
    w_cc: float = 1.0
    w_ac: float = 1.0

    def __post_init__(self):
        ws = (self.w_lc, self.w_cc, self.w_ac)
        if any(not math.isfinite(w) or w < 0 for w in ws):
            raise InvalidConfig(f"weights must be finite and non-negative, got {ws}")
        if not any(ws):
            raise InvalidConfig("at least one weight must be positive")

    def scaled(self, factor: float) -> "Weights":
        return Weights(self.w_lc * factor, self.w_cc * factor, self.w_ac * factor)


@dataclass(frozen=True)
class SaConfig:
    t0: float = 10_000.0
    alpha: float = 0.99
    iterations: int = 20_000
    max_perturb_attempts: int = 100
    seed: int = 42
    delta_l: float = 20.0
    delta_c: float = 20.0
    delta_h: float = 50.0

    def __post_init__(self):
        if not (self.t0 > 0 and math.isfinite(self.t0)):
            raise InvalidConfig(f"t0 must be > 0, got {self.t0}")
        if not 0 < self.alpha < 1:
            raise InvalidConfig(f"alpha must lie in (0, 1), got {self.alpha}")
        if int(self.iterations) != self.iterations or self.iterations < 1:
            raise InvalidConfig(f"iterations must be a positive integer, got {self.iterations}")
        if self.max_perturb_attempts < 1:
            raise InvalidConfig("max_perturb_attempts must be >= 1")
        if min(self.delta_l, self.delta_c, self.delta_h) < 0:
            raise InvalidConfig("perturbation bounds must be non-negative")


@dataclass
class PaletteState:
    """Candidate dark palette in LCh, index-aligned with the light centroids."""

    colors: np.ndarray  # (m, 3) LCh
    energy: float

    @property
    def lab(self) -> np.ndarray:
        return lch_to_lab_array(self.colors)

    def rgb8(self) -> np.ndarray:
        return linear_rgb_to_rgb8_array(lab_to_linear_rgb_array(self.lab))


@dataclass
class AnnealResult:
    best: PaletteState
    initial: PaletteState
    trace: np.ndarray  # best energy after each iteration
    current_trace: np.ndarray
    accepted: int = 0
    improved: int = 0
    gamut_fallbacks: int = 0


# -- losses -----------------------------------------------------------------


def _bg_lightness(bg: BackgroundSpec) -> tuple[float, float]:
    lab = rgb8_to_lab_array(np.array([bg.light_bg, bg.dark_bg]))
    return float(lab[0, 0]), float(lab[1, 0])


def _as_labs(palette) -> list[Lab]:
    arr = np.asarray(palette, dtype=float).reshape(-1, 3)
    return [tuple(map(float, row)) for row in arr]


def _pairs(adjacency: Iterable[tuple[int, int]]) -> list[tuple[int, int]]:
    return sorted({(min(i, j), max(i, j)) for i, j in adjacency if i != j})


def _mean(values: Sequence[float]) -> float:
    return sum(values) / len(values) if values else 0.0


def _lc_term(light_L: float, dark_L: float, bg_light_L: float, bg_dark_L: float) -> float:
    return abs(abs(bg_light_L - light_L) - abs(dark_L - bg_dark_L))


def _de(c1: Lab, c2: Lab) -> float:
    return delta_e_2000_scalar(c1[0], c1[1], c1[2], c2[0], c2[1], c2[2])


def loss_lc(light_lab, dark_lab, bg: BackgroundSpec) -> float:
    """Mean over colors of | |L_bg_light - L_i_light| - |L_i_dark - L_bg_dark| |."""
    lbg, dbg = _bg_lightness(bg)
    return _mean([_lc_term(l[0], d[0], lbg, dbg) for l, d in zip(_as_labs(light_lab), _as_labs(dark_lab))])


def loss_cc(light_lab, dark_lab) -> float:
    return _mean([_de(l, d) for l, d in zip(_as_labs(light_lab), _as_labs(dark_lab))])


def loss_ac(light_lab, dark_lab, adjacency) -> float:
    """Mean over adjacent pairs of the change in their CIEDE2000 separation."""
    light, dark = _as_labs(light_lab), _as_labs(dark_lab)
    return _mean([abs(_de(light[i], light[j]) - _de(dark[i], dark[j])) for i, j in _pairs(adjacency)])


def total_energy(light_lab, dark_lab, adjacency, bg: BackgroundSpec, w: Weights) -> float:
    return Objective(light_lab, adjacency, bg, w).energy(dark_lab)


class Objective:
    """Objective bound to one light palette, with cached per-term evaluation.

    Terms are kept as three lists (per color, per color, per adjacent pair)
    so a single-color move only recomputes the entries it touches.  Fresh
    and incremental evaluation share the same arithmetic and summation
    order, so they agree bit for bit.
    """

    def __init__(self, light_lab, adjacency, bg: BackgroundSpec, w: Weights):
        self.light = _as_labs(light_lab)
        self.m = len(self.light)
        self.w = w
        self.bg_light_L, self.bg_dark_L = _bg_lightness(bg)
        self.pairs = _pairs(adjacency)
        if any(j >= self.m or i < 0 for i, j in self.pairs):
            raise ValueError("adjacency references a color outside the palette")
        self.light_pair_de = [_de(self.light[i], self.light[j]) for i, j in self.pairs]
        self.incident = [[p for p, (i, j) in enumerate(self.pairs) if j == c or i == c] for c in range(self.m)]

    def terms(self, dark_lab) -> tuple[list[float], list[float], list[float]]:
        dark = _as_labs(dark_lab)
        if len(dark) != self.m:
            raise ValueError(f"dark palette has {len(dark)} colors, expected {self.m}")
        lc = [_lc_term(l[0], d[0], self.bg_light_L, self.bg_dark_L) for l, d in zip(self.light, dark)]
        cc = [_de(l, d) for l, d in zip(self.light, dark)]
        ac = [abs(dl - _de(dark[i], dark[j])) for (i, j), dl in zip(self.pairs, self.light_pair_de)]
        return lc, cc, ac

    def combine(self, terms) -> float:
        lc, cc, ac = terms
        return self.w.w_lc * _mean(lc) + self.w.w_cc * _mean(cc) + self.w.w_ac * _mean(ac)

    def energy(self, dark_lab) -> float:
        return self.combine(self.terms(dark_lab))

    def components(self, dark_lab) -> dict[str, float]:
        lc, cc, ac = self.terms(dark_lab)
        return {"lc": _mean(lc), "cc": _mean(cc), "ac": _mean(ac)}

    def moved(self, terms, dark: list[Lab], c: int, new: Lab):
        """Terms after replacing color ``c`` of ``dark`` by ``new``; inputs are not modified."""
        lc, cc, ac = list(terms[0]), list(terms[1]), list(terms[2])
        lc[c] = _lc_term(self.light[c][0], new[0], self.bg_light_L, self.bg_dark_L)
        cc[c] = _de(self.light[c], new)
        for p in self.incident[c]:
            i, j = self.pairs[p]
            a = new if i == c else dark[i]
            b = new if j == c else dark[j]
            ac[p] = abs(self.light_pair_de[p] - _de(a, b))
        return lc, cc, ac


# -- search -----------------------------------------------------------------


def acceptance_probability(delta: float, temperature: float) -> float:
    """Metropolis probability of taking a move that raises the energy by ``delta``."""
    if delta <= 0:
        return 1.0
    return math.exp(-delta / temperature)


def accept_worse(delta: float, temperature: float, rng: np.random.Generator) -> bool:
    return rng.random() < acceptance_probability(delta, temperature)


def perturb_color(c, rng: np.random.Generator, cfg: SaConfig = SaConfig()) -> tuple[tuple[float, float, float], bool]:
    """Nudge one of L, C or H of an LCh color until the result is displayable.

    Returns ``(color, ok)``.  After ``cfg.max_perturb_attempts`` rejected
    candidates the input color comes back unchanged with ``ok`` False.
    """
    base = tuple(float(v) for v in c)
    bounds = (cfg.delta_l, cfg.delta_c, cfg.delta_h)
    for _ in range(cfg.max_perturb_attempts):
        channel = int(rng.integers(3))
        delta = float(rng.uniform(-bounds[channel], bounds[channel]))
        L, C, H = base
        if channel == 0:
            L = min(100.0, max(0.0, L + delta))
        elif channel == 1:
            C = min(100.0, max(0.0, C + delta))
        else:
            H = (H + delta) % 360.0
        if lab_in_gamut_scalar(*lch_to_lab_scalar(L, C, H), GAMUT_TOLERANCE):
            return (L, C, H), True
    return base, False


ProgressFn = Callable[[int, float, float, float], None]


def anneal(
    palette,
    bg: BackgroundSpec,
    w: Weights = Weights(),
    cfg: SaConfig = SaConfig(),
    progress: ProgressFn | None = None,
    progress_every: int = 1000,
) -> AnnealResult:
    """Optimize the dark counterpart of an :class:`~darkviz.palette.ExtractedPalette`."""
    return anneal_colors(palette.centroids, palette.adjacency, bg, w, cfg, progress, progress_every)


def anneal_colors(
    light_rgb,
    adjacency,
    bg: BackgroundSpec,
    w: Weights = Weights(),
    cfg: SaConfig = SaConfig(),
    progress: ProgressFn | None = None,
    progress_every: int = 1000,
) -> AnnealResult:
    """Search for the dark palette minimizing the objective.

    Starts from the light centroids (``(m, 3)`` 8-bit RGB) converted to LCh.
    Each iteration perturbs one uniformly chosen color, accepts improvements
    outright and worse moves with probability ``exp(-dE / T)``, then cools
    ``T <- alpha * T``.  ``progress(iteration, T, current, best)`` is called
    every ``progress_every`` iterations.
    """
    if not isinstance(cfg, SaConfig) or not isinstance(w, Weights):
        raise InvalidConfig("cfg must be a SaConfig and w a Weights")
    light_lab = rgb8_to_lab_array(np.asarray(light_rgb).reshape(-1, 3))
    obj = Objective(light_lab, adjacency, bg, w)
    rng = np.random.default_rng(cfg.seed)
    m = obj.m

    cur = [tuple(map(float, row)) for row in lab_to_lch_array(light_lab)]
    cur_lab = [lch_to_lab_scalar(*c) for c in cur]
    terms = obj.terms(cur_lab)
    e_cur = obj.combine(terms)
    initial = PaletteState(np.array(cur), e_cur)
    best, e_best = list(cur), e_cur

    n = int(cfg.iterations)
    trace = np.empty(n)
    current_trace = np.empty(n)
    accepted = improved = fallbacks = 0
    t = cfg.t0
    for it in range(n):
        c = int(rng.integers(m))
        cand, ok = perturb_color(cur[c], rng, cfg)
        fallbacks += not ok
        cand_lab = lch_to_lab_scalar(*cand)
        new_terms = obj.moved(terms, cur_lab, c, cand_lab)
        e_new = obj.combine(new_terms)
        if e_new < e_cur:
            take = True
        else:
            take = accept_worse(e_new - e_cur, t, rng)
        if take:
            cur[c] = cand
            cur_lab[c] = cand_lab
            terms, e_cur = new_terms, e_new
            accepted += 1
            # e_cur >= e_best holds throughout, so only an improving move can beat the best
            if e_new < e_best:
                best, e_best = list(cur), e_new
                improved += 1
        t *= cfg.alpha
        trace[it] = e_best
        current_trace[it] = e_cur
        if progress is not None and (it + 1) % progress_every == 0:
            progress(it + 1, t, e_cur, e_best)

    return AnnealResult(
        best=PaletteState(np.array(best), e_best),
        initial=initial,
        trace=trace,
        current_trace=current_trace,
        accepted=accepted,
        improved=improved,
        gamut_fallbacks=fallbacks,
    )
