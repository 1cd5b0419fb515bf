"""Single and multi-view depth metrics with optional per-frame median alignment.

All statistics run over the joint-valid pixel set of the two frames.
Nonpositive predicted depths at valid pixels are clamped to 1e-6 m before
ratios and logs: they are penalized, never excluded. Scene-level numbers
pool all valid pixels across frames after per-frame alignment.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DataError

MODE_MEDIAN = "median"
MODE_METRIC = "metric"

DEPTH_CLAMP = 1e-6
DEFAULT_DELTAS = (1.03, 1.05, 1.10)


@dataclass
class DepthMetrics:
    abs_rel: float
    sq_rel: float
    rmse: float       # meters
    log_rmse: float
    deltas: dict      # threshold -> inlier fraction
    n_pixels: int = 0

    @property
    def delta_1_03(self):
        return self.deltas.get(1.03)

    @property
    def delta_1_05(self):
        return self.deltas.get(1.05)

    @property
    def delta_1_10(self):
        return self.deltas.get(1.10)

    def to_dict(self):
        out = {
            "abs_rel": self.abs_rel,
            "sq_rel": self.sq_rel,
            "rmse": self.rmse,
            "log_rmse": self.log_rmse,
            "n_pixels": self.n_pixels,
        }
        for tau in sorted(self.deltas):
            out[f"delta_{tau:g}"] = self.deltas[tau]
        return out


@dataclass
class DepthSums:
    """Raw per-frame accumulators; pooling across frames is plain addition."""

    abs_rel: float = 0.0
    sq_rel: float = 0.0
    sq_err: float = 0.0
    sq_log_err: float = 0.0
    delta_counts: dict = field(default_factory=dict)
    n_pixels: int = 0

    def add(self, other):
        self.abs_rel += other.abs_rel
        self.sq_rel += other.sq_rel
        self.sq_err += other.sq_err
        self.sq_log_err += other.sq_log_err
        for tau, c in other.delta_counts.items():
            self.delta_counts[tau] = self.delta_counts.get(tau, 0) + c
        self.n_pixels += other.n_pixels
        return self

    def finalize(self):
        if self.n_pixels == 0:
            raise DataError("no overlap")
        n = self.n_pixels
        return DepthMetrics(
            abs_rel=self.abs_rel / n,
            sq_rel=self.sq_rel / n,
            rmse=float(np.sqrt(self.sq_err / n)),
            log_rmse=float(np.sqrt(self.sq_log_err / n)),
            deltas={tau: c / n for tau, c in self.delta_counts.items()},
            n_pixels=n,
        )


def _joint_valid(pred, gt):
    if pred.depth.shape != gt.depth.shape:
        raise DataError("prediction and ground-truth depth dimensions differ")
    m = pred.mask & gt.mask
    if not m.any():
        raise DataError("no overlap")
    g = gt.depth[m].astype(np.float64)
    p = pred.depth[m].astype(np.float64)
    p = np.where(p > 0, p, DEPTH_CLAMP)
    return p, g


def median_scale(pred, gt):
    """Median of gt/pred depth ratios over the joint-valid pixels.

    For even sample counts the median is the mean of the two central order
    statistics.
    """
    p, g = _joint_valid(pred, gt)
    return float(np.median(g / p))


def depth_sums(pred, gt, mode=MODE_MEDIAN, deltas=DEFAULT_DELTAS):
    """Accumulators for one frame, after the requested alignment."""
    if mode not in (MODE_MEDIAN, MODE_METRIC):
        raise DataError(f"unknown depth mode {mode!r}")
    p, g = _joint_valid(pred, gt)
    if mode == MODE_MEDIAN:
        p = p * np.median(g / p)
        p = np.where(p > 0, p, DEPTH_CLAMP)
    diff = g - p
    ratio = np.maximum(g / p, p / g)
    s = DepthSums(
        abs_rel=float(np.sum(np.abs(diff) / g)),
        sq_rel=float(np.sum(diff * diff / g)),
        sq_err=float(np.sum(diff * diff)),
        sq_log_err=float(np.sum((np.log(g) - np.log(p)) ** 2)),
        delta_counts={tau: int(np.sum(ratio < tau)) for tau in deltas},
        n_pixels=int(g.size),
    )
    return s


def depth_metrics(pred, gt, mode=MODE_MEDIAN, deltas=DEFAULT_DELTAS):
    """All depth metrics for a single frame pair."""
    return depth_sums(pred, gt, mode, deltas).finalize()


def pooled_depth_metrics(pairs, mode=MODE_MEDIAN, deltas=DEFAULT_DELTAS):
    """Scene-level metrics pooling all valid pixels of (pred, gt) frame pairs.

    Median alignment stays per-frame; only the error sums are pooled.
    """
    pairs = list(pairs)
    if not pairs:
        raise DataError("no frames to pool")
    total = DepthSums()
    for pred, gt in pairs:
        total.add(depth_sums(pred, gt, mode, deltas))
    return total.finalize()
