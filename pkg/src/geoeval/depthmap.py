"""Per-pixel metric depth with a validity mask, and pixel unprojection."""

from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .geometry import C2W

@dataclass
class DepthFrame:
    """Depth in meters plus a boolean validity mask of identical shape.

    Ground-truth frames carry positive finite depth at every valid pixel.
    Prediction frames may hold nonpositive values at valid pixels (a model
    that emits zeros is penalized by the metrics, not excluded); only
    non-finite values are rejected.
    """

    depth: np.ndarray
    mask: np.ndarray

    def __post_init__(self):
        self.depth = np.asarray(self.depth)
        if self.depth.ndim != 2:
            raise DataError(f"depth must be 2D, got shape {self.depth.shape}")
        if self.mask is None:
            self.mask = np.isfinite(self.depth) & (self.depth > 0)
        self.mask = np.asarray(self.mask, dtype=bool)
        if self.mask.shape != self.depth.shape:
            raise DataError("mask and depth dimensions differ")
        d = self.depth[self.mask]
        if d.size and not np.all(np.isfinite(d)):
            raise DataError("valid pixels must have finite depth")

    @property
    def height(self):
        return self.depth.shape[0]

    @property
    def width(self):
        return self.depth.shape[1]

    def copy(self):
        return DepthFrame(self.depth.copy(), self.mask.copy())


def unproject(frame, pose, intrinsics, stride=1, extra_mask=None):
    """World-space 3D points for the valid pixels of a depth frame.

    Pixel (u, v) with depth D maps to camera coordinates
    (x, y, z) = ((u - cx) D / fx, (v - cy) D / fy, D), then through the
    camera-to-world pose. Points are emitted in row-major pixel order so the
    output is deterministic. `stride` keeps every stride-th row and column.

    Returns an (M, 3) float64 array (possibly empty).
    """
    if frame.depth.shape != (intrinsics.height, intrinsics.width):
        raise DataError(
            f"depth shape {frame.depth.shape} does not match intrinsics "
            f"{(intrinsics.height, intrinsics.width)}"
        )
    if stride < 1:
        raise DataError("stride must be >= 1")
    # geometry needs positive depth; clamp-and-penalize only applies to
    # image-space metrics, not to 3D unprojection
    mask = frame.mask & (frame.depth > 0)
    if extra_mask is not None:
        mask = mask & np.asarray(extra_mask, dtype=bool)
    if stride > 1:
        keep = np.zeros_like(mask)
        keep[::stride, ::stride] = True
        mask = mask & keep
    v, u = np.nonzero(mask)
    if v.size == 0:
        return np.empty((0, 3), dtype=np.float64)
    d = frame.depth[v, u].astype(np.float64)
    x = (u.astype(np.float64) - intrinsics.cx) * d / intrinsics.fx
    y = (v.astype(np.float64) - intrinsics.cy) * d / intrinsics.fy
    cam = np.stack([x, y, d], axis=1)
    c2w = pose.as_convention(C2W)
    return cam @ c2w.rotation.T + c2w.translation
