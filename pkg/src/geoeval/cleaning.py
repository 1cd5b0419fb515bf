"""Five-stage depth map cleaning: range clip, flying-point removal, joint
bilateral filtering, small-component removal, sky masking.

Every stage can only shrink the valid set (never fills holes) and leaves
depth values of invalid pixels untouched. The pipeline records how many
pixels each stage invalidated.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .depthmap import DepthFrame
from .errors import DataError

STAGES = ("range", "flying", "bilateral", "components", "sky")


@dataclass
class CleanConfig:
    d_min: float = 0.05            # meters
    d_max: float = 5.0             # meters
    theta_rel: float = 0.1         # flying point: |grad D| > theta_rel * D
    erosion_radius: int = 2        # Chebyshev radius around flagged pixels
    window: int = 5                # bilateral window edge, odd
    sigma_spatial: float = 2.0     # pixels
    sigma_color: float = 0.1       # normalized intensity units
    min_area: int = 100            # pixels
    connectivity: int = 4          # 4 or 8

    def __post_init__(self):
        if not 0 <= self.d_min < self.d_max:
            raise DataError("need 0 <= d_min < d_max")
        if self.theta_rel <= 0:
            raise DataError("theta_rel must be positive")
        if self.window < 3 or self.window % 2 == 0:
            raise DataError("bilateral window must be odd and >= 3")
        if self.connectivity not in (4, 8):
            raise DataError("connectivity must be 4 or 8")
        if self.min_area < 1:
            raise DataError("min_area must be >= 1")


@dataclass
class CleanResult:
    depth: np.ndarray
    mask: np.ndarray
    stage_counts: dict = field(default_factory=dict)

    def frame(self):
        return DepthFrame(self.depth, self.mask)


def _result(frame, new_mask, stage, depth=None):
    new_mask = frame.mask & new_mask  # stages only ever shrink the valid set
    removed = int(frame.mask.sum() - new_mask.sum())
    return CleanResult(frame.depth.copy() if depth is None else depth,
                       new_mask, {stage: removed})


def clip_range(frame, d_min, d_max):
    """Stage 1: invalidate depths outside [d_min, d_max]; values unchanged."""
    if not d_min < d_max:
        raise DataError("need d_min < d_max")
    keep = (frame.depth >= d_min) & (frame.depth <= d_max)
    return _result(frame, keep, "range")


def remove_flying_points(frame, theta_rel, erosion_radius):
    """Stage 2: drop pixels whose depth gradient is large relative to depth.

    The gradient uses forward differences restricted to mutually valid
    neighbor pairs, so mask boundaries never fabricate edges. Flagged pixels
    and every valid pixel within the Chebyshev erosion radius are removed.
    """
    d = frame.depth.astype(np.float64)
    m = frame.mask
    gx = np.zeros_like(d)
    gy = np.zeros_like(d)
    both_x = m[:, :-1] & m[:, 1:]
    both_y = m[:-1, :] & m[1:, :]
    gx[:, :-1] = np.where(both_x, d[:, 1:] - d[:, :-1], 0.0)
    gy[:-1, :] = np.where(both_y, d[1:, :] - d[:-1, :], 0.0)
    grad = np.sqrt(gx * gx + gy * gy)
    flagged = m & (grad > theta_rel * d)
    if erosion_radius > 0 and flagged.any():
        size = 2 * erosion_radius + 1
        flagged = ndimage.maximum_filter(
            flagged.astype(np.uint8), size=size, mode="constant") > 0
    return _result(frame, ~flagged, "flying")


def bilateral_filter(frame, rgb, window, sigma_spatial, sigma_color):
    """Stage 3: joint bilateral smoothing of valid pixels, guided by RGB.

    Each valid pixel becomes the spatial-times-color Gaussian weighted mean
    of the valid neighbors in its window (self included); weights are
    renormalized over the contributing neighbors. Invalid pixels are never
    touched and never filled. RGB is expected in [0, 1].
    """
    rgb = np.asarray(rgb, dtype=np.float64)
    if rgb.ndim == 2:
        rgb = rgb[:, :, None]
    if rgb.shape[:2] != frame.depth.shape:
        raise DataError(
            f"rgb dimensions {rgb.shape[:2]} do not match depth {frame.depth.shape}"
        )
    if window < 3 or window % 2 == 0:
        raise DataError("bilateral window must be odd and >= 3")
    r = window // 2
    h, w = frame.depth.shape
    d = np.where(frame.mask, frame.depth.astype(np.float64), 0.0)
    m = frame.mask.astype(np.float64)

    pad_d = np.pad(d, r)
    pad_m = np.pad(m, r)
    pad_rgb = np.pad(rgb, ((r, r), (r, r), (0, 0)))

    num = np.zeros((h, w))
    den = np.zeros((h, w))
    inv_2ss = 1.0 / (2.0 * sigma_spatial * sigma_spatial)
    inv_2sc = 1.0 / (2.0 * sigma_color * sigma_color)
    for dy in range(-r, r + 1):
        for dx in range(-r, r + 1):
            w_s = np.exp(-(dy * dy + dx * dx) * inv_2ss)
            nd = pad_d[r + dy:r + dy + h, r + dx:r + dx + w]
            nm = pad_m[r + dy:r + dy + h, r + dx:r + dx + w]
            nrgb = pad_rgb[r + dy:r + dy + h, r + dx:r + dx + w]
            color_sq = np.sum((nrgb - rgb) ** 2, axis=2)
            weight = w_s * np.exp(-color_sq * inv_2sc) * nm
            num += weight * nd
            den += weight
    out = frame.depth.copy().astype(np.float64)
    valid = frame.mask & (den > 0)
    out[valid] = num[valid] / den[valid]
    return _result(frame, frame.mask, "bilateral", depth=out)


def remove_small_components(frame, min_area, connectivity=4):
    """Stage 4: drop connected components of the valid mask below `min_area`."""
    if min_area < 1:
        raise DataError("min_area must be >= 1")
    if connectivity == 4:
        structure = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]])
    elif connectivity == 8:
        structure = np.ones((3, 3), dtype=int)
    else:
        raise DataError("connectivity must be 4 or 8")
    labels, n = ndimage.label(frame.mask, structure=structure)
    if n == 0:
        return _result(frame, frame.mask, "components")
    areas = np.bincount(labels.reshape(-1))
    keep_label = areas >= min_area
    keep_label[0] = False  # background
    return _result(frame, keep_label[labels], "components")


def apply_sky_mask(frame, sky):
    """Stage 5: invalidate sky-flagged pixels regardless of their depth."""
    sky = np.asarray(sky)
    if sky.shape != frame.depth.shape:
        raise DataError(
            f"sky mask dimensions {sky.shape} do not match depth {frame.depth.shape}"
        )
    return _result(frame, ~(sky != 0), "sky")


def clean_pipeline(frame, rgb, cfg, sky=None):
    """Run stages 1..5 in order; the sky stage is skipped without a mask.

    Returns a CleanResult whose stage_counts maps every stage name to the
    number of pixels it invalidated (0 for bilateral, which only smooths).
    """
    counts = {}
    current = frame
    for stage, run in (
        ("range", lambda fr: clip_range(fr, cfg.d_min, cfg.d_max)),
        ("flying", lambda fr: remove_flying_points(fr, cfg.theta_rel, cfg.erosion_radius)),
        ("bilateral", lambda fr: bilateral_filter(
            fr, rgb, cfg.window, cfg.sigma_spatial, cfg.sigma_color)),
        ("components", lambda fr: remove_small_components(
            fr, cfg.min_area, cfg.connectivity)),
        ("sky", lambda fr: apply_sky_mask(fr, sky)),
    ):
        if stage == "sky" and sky is None:
            counts[stage] = 0
            continue
        result = run(current)
        counts.update(result.stage_counts)
        current = DepthFrame(result.depth, result.mask)
    return CleanResult(current.depth, current.mask, counts)
