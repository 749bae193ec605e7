"""Colorimetry kernel: sRGB <-> CIELAB <-> LCh, CIEDE2000 and WCAG contrast.

Array functions take ``(..., 3)`` arrays and broadcast; the scalar helpers
(``srgb_to_lab``, ``delta_e_2000`` ...) wrap them for single colors.
Reference white is D65 with the 2 degree observer.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .errors import OutOfGamut


class Rgb8(NamedTuple):
    r: int
    g: int
    b: int

    @classmethod
    def from_hex(cls, text: str) -> "Rgb8":
        h = text.strip().lstrip("#")
        if len(h) == 3:
            h = "".join(ch * 2 for ch in h)
        if len(h) != 6:
            raise ValueError(f"not a hex color: {text!r}")
        try:
            return cls(int(h[0:2], 16), int(h[2:4], 16), int(h[4:6], 16))
        except ValueError:
            raise ValueError(f"not a hex color: {text!r}") from None

    def hex(self) -> str:
        return f"#{self.r:02X}{self.g:02X}{self.b:02X}"


class LabColor(NamedTuple):
    L: float
    a: float
    b: float


class LchColor(NamedTuple):
    L: float
    C: float
    H: float


# linear sRGB -> XYZ (IEC 61966-2-1 primaries, D65)
SRGB_TO_XYZ = np.array(
    [
        [0.4124564, 0.3575761, 0.1804375],
        [0.2126729, 0.7151522, 0.0721750],
        [0.0193339, 0.1191920, 0.9503041],
    ]
)
XYZ_TO_SRGB = np.linalg.inv(SRGB_TO_XYZ)
# white taken from the matrix itself so that #FFFFFF lands exactly on L=100, a=b=0
WHITE_XYZ = SRGB_TO_XYZ.sum(axis=1)

_EPSILON = 216.0 / 24389.0
_KAPPA = 24389.0 / 27.0

# slack on linear RGB components when deciding gamut membership; absorbs
# float round-off at the cube faces (pure primaries, black, white)
GAMUT_TOLERANCE = 1e-6


def srgb_to_linear(values):
    """Decode sRGB components in [0, 1] to linear light."""
    v = np.asarray(values, dtype=float)
    return np.where(v <= 0.04045, v / 12.92, ((v + 0.055) / 1.055) ** 2.4)


def linear_to_srgb(values):
    v = np.asarray(values, dtype=float)
    # clamp below zero only to keep the power well defined; gamut is checked elsewhere
    vp = np.maximum(v, 0.0)
    return np.where(v <= 0.0031308, 12.92 * v, 1.055 * vp ** (1 / 2.4) - 0.055)


def _f(t):
    return np.where(t > _EPSILON, np.cbrt(t), (_KAPPA * t + 16.0) / 116.0)


def _f_inv(ft):
    t3 = ft**3
    return np.where(t3 > _EPSILON, t3, (116.0 * ft - 16.0) / _KAPPA)


def rgb8_to_lab_array(rgb):
    """``(..., 3)`` 8-bit sRGB -> ``(..., 3)`` CIELAB floats."""
    lin = srgb_to_linear(np.asarray(rgb, dtype=float) / 255.0)
    xyz = lin @ SRGB_TO_XYZ.T
    fx, fy, fz = (_f(xyz[..., i] / WHITE_XYZ[i]) for i in range(3))
    return np.stack([116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)], axis=-1)


def lab_to_linear_rgb_array(lab):
    """CIELAB -> unclipped linear sRGB; components outside [0, 1] are out of gamut."""
    lab = np.asarray(lab, dtype=float)
    fy = (lab[..., 0] + 16.0) / 116.0
    fx = fy + lab[..., 1] / 500.0
    fz = fy - lab[..., 2] / 200.0
    xyz = np.stack([_f_inv(fx), _f_inv(fy), _f_inv(fz)], axis=-1) * WHITE_XYZ
    return xyz @ XYZ_TO_SRGB.T


def linear_rgb_to_rgb8_array(lin):
    """Clip linear RGB into the cube, encode and quantize to uint8."""
    enc = linear_to_srgb(np.clip(lin, 0.0, 1.0))
    return np.clip(np.rint(enc * 255.0), 0, 255).astype(np.uint8)


def lab_to_rgb8_array(lab):
    """CIELAB -> 8-bit sRGB with per-channel clipping (lossy outside the gamut)."""
    return linear_rgb_to_rgb8_array(lab_to_linear_rgb_array(lab))


def in_gamut_array(lin, tol: float = GAMUT_TOLERANCE):
    lin = np.asarray(lin)
    return np.all((lin >= -tol) & (lin <= 1.0 + tol), axis=-1)


def lab_to_lch_array(lab):
    lab = np.asarray(lab, dtype=float)
    c = np.hypot(lab[..., 1], lab[..., 2])
    h = np.degrees(np.arctan2(lab[..., 2], lab[..., 1])) % 360.0
    # achromatic hue is pinned to 0; also folds the 360.0 produced by -0.0 % 360
    h = np.where((c == 0.0) | (h >= 360.0), 0.0, h)
    return np.stack([lab[..., 0], c, h], axis=-1)


def lch_to_lab_array(lch):
    lch = np.asarray(lch, dtype=float)
    h = np.radians(lch[..., 2])
    return np.stack(
        [lch[..., 0], lch[..., 1] * np.cos(h), lch[..., 1] * np.sin(h)], axis=-1
    )


def delta_e_2000_array(lab1, lab2, kL: float = 1.0, kC: float = 1.0, kH: float = 1.0):
    """CIEDE2000 difference between broadcastable CIELAB arrays.

    Follows Sharma, Wu & Dalal (2005), including their conventions for the
    hue mean and hue difference when one of the chromas is zero.
    """
    lab1 = np.asarray(lab1, dtype=float)
    lab2 = np.asarray(lab2, dtype=float)
    L1, a1, b1 = lab1[..., 0], lab1[..., 1], lab1[..., 2]
    L2, a2, b2 = lab2[..., 0], lab2[..., 1], lab2[..., 2]

    c_bar = (np.hypot(a1, b1) + np.hypot(a2, b2)) / 2.0
    c_bar7 = c_bar**7
    g = 0.5 * (1.0 - np.sqrt(c_bar7 / (c_bar7 + 25.0**7)))
    a1p = (1.0 + g) * a1
    a2p = (1.0 + g) * a2
    c1p = np.hypot(a1p, b1)
    c2p = np.hypot(a2p, b2)
    h1p = np.degrees(np.arctan2(b1, a1p)) % 360.0
    h2p = np.degrees(np.arctan2(b2, a2p)) % 360.0
    h1p = np.where(c1p == 0.0, 0.0, h1p)
    h2p = np.where(c2p == 0.0, 0.0, h2p)

    dLp = L2 - L1
    dCp = c2p - c1p
    chroma_zero = (c1p * c2p) == 0.0
    dh = h2p - h1p
    # hue differences of exactly 180 come out a few ulps off; compare with slack
    # so the branch matches the exact-arithmetic one
    tol = 1e-9
    dhp = np.where(dh > 180.0 + tol, dh - 360.0, np.where(dh < -180.0 - tol, dh + 360.0, dh))
    dhp = np.where(chroma_zero, 0.0, dhp)
    dHp = 2.0 * np.sqrt(c1p * c2p) * np.sin(np.radians(dhp) / 2.0)

    Lbp = (L1 + L2) / 2.0
    Cbp = (c1p + c2p) / 2.0
    hsum = h1p + h2p
    far = np.abs(h1p - h2p) > 180.0 + tol
    hbp = np.where(
        far,
        np.where(hsum < 360.0, (hsum + 360.0) / 2.0, (hsum - 360.0) / 2.0),
        hsum / 2.0,
    )
    hbp = np.where(chroma_zero, hsum, hbp)

    t = (
        1.0
        - 0.17 * np.cos(np.radians(hbp - 30.0))
        + 0.24 * np.cos(np.radians(2.0 * hbp))
        + 0.32 * np.cos(np.radians(3.0 * hbp + 6.0))
        - 0.20 * np.cos(np.radians(4.0 * hbp - 63.0))
    )
    d_theta = 30.0 * np.exp(-(((hbp - 275.0) / 25.0) ** 2))
    cbp7 = Cbp**7
    rc = 2.0 * np.sqrt(cbp7 / (cbp7 + 25.0**7))
    lb50 = (Lbp - 50.0) ** 2
    sl = 1.0 + 0.015 * lb50 / np.sqrt(20.0 + lb50)
    sc = 1.0 + 0.045 * Cbp
    sh = 1.0 + 0.015 * Cbp * t
    rt = -np.sin(np.radians(2.0 * d_theta)) * rc

    tl = dLp / (kL * sl)
    tc = dCp / (kC * sc)
    th = dHp / (kH * sh)
    return np.sqrt(tl * tl + tc * tc + th * th + rt * tc * th)


def relative_luminance_array(rgb):
    """WCAG 2.1 relative luminance of ``(..., 3)`` 8-bit colors."""
    lin = srgb_to_linear(np.asarray(rgb, dtype=float) / 255.0)
    return lin @ np.array([0.2126, 0.7152, 0.0722])


def contrast_ratio_array(rgb1, rgb2):
    y1 = relative_luminance_array(rgb1)
    y2 = relative_luminance_array(rgb2)
    return (np.maximum(y1, y2) + 0.05) / (np.minimum(y1, y2) + 0.05)


# -- scalar kernels ---------------------------------------------------------
# Plain-float versions of the hot paths used per annealing move, where numpy's
# per-call overhead dominates.  Cross-checked against the array versions in tests.

_M_INV = [[float(v) for v in row] for row in XYZ_TO_SRGB]
_WX, _WY, _WZ = (float(v) for v in WHITE_XYZ)
_POW25_7 = 25.0**7


def _finv(ft: float) -> float:
    t3 = ft * ft * ft
    return t3 if t3 > _EPSILON else (116.0 * ft - 16.0) / _KAPPA


def lch_to_lab_scalar(L: float, C: float, H: float) -> tuple[float, float, float]:
    h = math.radians(H)
    return L, C * math.cos(h), C * math.sin(h)


def lab_to_linear_rgb_scalar(L: float, a: float, b: float) -> tuple[float, float, float]:
    fy = (L + 16.0) / 116.0
    x = _finv(fy + a / 500.0) * _WX
    y = _finv(fy) * _WY
    z = _finv(fy - b / 200.0) * _WZ
    m = _M_INV
    return (
        m[0][0] * x + m[0][1] * y + m[0][2] * z,
        m[1][0] * x + m[1][1] * y + m[1][2] * z,
        m[2][0] * x + m[2][1] * y + m[2][2] * z,
    )


def lab_in_gamut_scalar(L: float, a: float, b: float, tol: float = GAMUT_TOLERANCE) -> bool:
    lo, hi = -tol, 1.0 + tol
    return all(lo <= v <= hi for v in lab_to_linear_rgb_scalar(L, a, b))


def delta_e_2000_scalar(L1, a1, b1, L2, a2, b2) -> float:
    """Single-pair CIEDE2000 (kL = kC = kH = 1); same conventions as the array version."""
    c_bar = (math.hypot(a1, b1) + math.hypot(a2, b2)) / 2.0
    c_bar7 = c_bar**7
    g = 0.5 * (1.0 - math.sqrt(c_bar7 / (c_bar7 + _POW25_7)))
    a1p = (1.0 + g) * a1
    a2p = (1.0 + g) * a2
    c1p = math.hypot(a1p, b1)
    c2p = math.hypot(a2p, b2)
    h1p = math.degrees(math.atan2(b1, a1p)) % 360.0 if c1p != 0.0 else 0.0
    h2p = math.degrees(math.atan2(b2, a2p)) % 360.0 if c2p != 0.0 else 0.0

    dLp = L2 - L1
    dCp = c2p - c1p
    tol = 1e-9
    if c1p * c2p == 0.0:
        dhp = 0.0
        hbp = h1p + h2p
    else:
        dh = h2p - h1p
        if dh > 180.0 + tol:
            dhp = dh - 360.0
        elif dh < -180.0 - tol:
            dhp = dh + 360.0
        else:
            dhp = dh
        hsum = h1p + h2p
        if abs(h1p - h2p) > 180.0 + tol:
            hbp = (hsum + 360.0) / 2.0 if hsum < 360.0 else (hsum - 360.0) / 2.0
        else:
            hbp = hsum / 2.0
    dHp = 2.0 * math.sqrt(c1p * c2p) * math.sin(math.radians(dhp) / 2.0)

    Lbp = (L1 + L2) / 2.0
    Cbp = (c1p + c2p) / 2.0
    t = (
        1.0
        - 0.17 * math.cos(math.radians(hbp - 30.0))
        + 0.24 * math.cos(math.radians(2.0 * hbp))
        + 0.32 * math.cos(math.radians(3.0 * hbp + 6.0))
        - 0.20 * math.cos(math.radians(4.0 * hbp - 63.0))
    )
    d_theta = 30.0 * math.exp(-(((hbp - 275.0) / 25.0) ** 2))
    cbp7 = Cbp**7
    rc = 2.0 * math.sqrt(cbp7 / (cbp7 + _POW25_7))
    lb50 = (Lbp - 50.0) ** 2
    sl = 1.0 + 0.015 * lb50 / math.sqrt(20.0 + lb50)
    sc = 1.0 + 0.045 * Cbp
    sh = 1.0 + 0.015 * Cbp * t
    rt = -math.sin(math.radians(2.0 * d_theta)) * rc
    tl = dLp / sl
    tc = dCp / sc
    th = dHp / sh
    return math.sqrt(tl * tl + tc * tc + th * th + rt * tc * th)


# -- single-color API -------------------------------------------------------


def srgb_to_lab(c) -> LabColor:
    return LabColor(*(float(v) for v in rgb8_to_lab_array(c)))


def lab_to_lch(c) -> LchColor:
    return LchColor(*(float(v) for v in lab_to_lch_array(c)))


def lch_to_lab(c) -> LabColor:
    return LabColor(*(float(v) for v in lch_to_lab_array(c)))


def lch_in_gamut(c) -> bool:
    return bool(in_gamut_array(lab_to_linear_rgb_array(lch_to_lab_array(c))))


def lch_to_srgb_checked(c) -> Rgb8:
    """Convert LCh to 8-bit sRGB, raising :class:`OutOfGamut` if not displayable."""
    lin = lab_to_linear_rgb_array(lch_to_lab_array(c))
    if not in_gamut_array(lin):
        raise OutOfGamut(f"LCh {tuple(c)} is outside the sRGB gamut")
    return Rgb8(*(int(v) for v in linear_rgb_to_rgb8_array(lin)))


def delta_e_2000(c1, c2) -> float:
    return delta_e_2000_scalar(*map(float, c1), *map(float, c2))


def wcag_relative_luminance(c) -> float:
    return float(relative_luminance_array(c))


def wcag_contrast_ratio(c1, c2) -> float:
    return float(contrast_ratio_array(c1, c2))
