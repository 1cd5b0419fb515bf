"""Deterministic multi-density frame selection.

Sparse and medium regimes greedily maximize voxel coverage over the scene's
3D voxel support (a set-cover objective); the dense regime strides the
sequence to a frame budget; the single regime picks one fixed frame. All
selectors are pure functions with explicit tie-breaks so repeated runs give
bit-identical selections.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .depthmap import unproject
from .errors import DataError


@dataclass
class SamplerConfig:
    """Knobs for the four regime selectors.

    The medium budget bounds are piecewise rules of the frame count N:
        F_min(N) = max(medium_min_floor, ceil(N / medium_min_divisor))
        F_max(N) = min(medium_max_cap,  ceil(N / medium_max_divisor))
    F_max is clamped to [F_min(N), N] at selection time.
    """

    voxel_size: float = 0.05            # sparse support voxel edge, meters
    coarsen_factor: float = 2.0         # medium support uses voxel_size * factor
    sparse_budget: int = 12             # K
    medium_min_floor: int = 8
    medium_min_divisor: int = 20
    medium_max_cap: int = 64
    medium_max_divisor: int = 5
    dense_budget: int = 500             # T

    def __post_init__(self):
        if self.sparse_budget < 1:
            raise DataError("sparse budget K must be >= 1")
        if self.dense_budget < 1:
            raise DataError("dense budget T must be >= 1")
        if self.voxel_size <= 0 or self.coarsen_factor <= 0:
            raise DataError("voxel sizes must be positive")

    def medium_voxel_size(self):
        return self.voxel_size * self.coarsen_factor

    def f_min(self, n_frames):
        return max(self.medium_min_floor, math.ceil(n_frames / self.medium_min_divisor))

    def f_max(self, n_frames):
        return min(self.medium_max_cap, math.ceil(n_frames / self.medium_max_divisor))


@dataclass
class VoxelSupport:
    """Universe of occupied voxels and the per-frame coverage sets.

    Keys are floor(point / voxel_size) integer triples, so identical inputs
    produce identical keys on any platform.
    """

    voxel_size: float
    frame_voxels: list          # list of frozenset of (i, j, k) tuples
    universe: frozenset = field(default=None)

    def __post_init__(self):
        if self.universe is None:
            u = set()
            for v in self.frame_voxels:
                u |= v
            self.universe = frozenset(u)

    @property
    def n_frames(self):
        return len(self.frame_voxels)


@dataclass
class RegimeSelection:
    regime: str
    frame_indices: list

    def __post_init__(self):
        idx = list(self.frame_indices)
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise DataError("selection indices must be strictly increasing")
        if self.regime == "single" and len(idx) != 1:
            raise DataError("single regime must select exactly one frame")
        self.frame_indices = idx


def voxel_keys(points, voxel_size):
    """floor(p / voxel_size) integer keys for an (N, 3) point array."""
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    return np.floor(pts / voxel_size).astype(np.int64)


def build_voxel_support(frames, voxel_size):
    """Voxel coverage sets from (DepthFrame, Pose, Intrinsics) triples.

    Every valid pixel is unprojected to world coordinates and quantized to
    its voxel key; a frame's coverage is its distinct key set. Frames with
    no valid pixels contribute empty sets.
    """
    if not frames:
        raise DataError("cannot build voxel support from an empty frame list")
    if voxel_size <= 0:
        raise DataError("voxel size must be positive")
    per_frame = []
    for depth, pose, intr in frames:
        pts = unproject(depth, pose, intr)
        if pts.shape[0] == 0:
            per_frame.append(frozenset())
            continue
        keys = voxel_keys(pts, voxel_size)
        per_frame.append(frozenset(map(tuple, keys)))
    return VoxelSupport(voxel_size, per_frame)


def _greedy_best(frame_voxels, covered, selected):
    """Frame with the largest marginal coverage gain; lowest index wins ties."""
    best_gain = -1
    best_frame = None
    for f, voxels in enumerate(frame_voxels):
        if f in selected:
            continue
        gain = len(voxels - covered)
        if gain > best_gain:
            best_gain = gain
            best_frame = f
    return best_frame, best_gain


def select_sparse(support, budget):
    """Greedy max-coverage selection of at most `budget` frames.

    Stops early once every remaining frame has zero marginal gain. Ties are
    broken toward the lowest frame index; output is sorted.
    """
    if budget < 1:
        raise DataError("sparse budget must be >= 1")
    if support.n_frames == 0:
        raise DataError("empty voxel support")
    covered = set()
    selected = set()
    order = []
    while len(order) < budget:
        frame, gain = _greedy_best(support.frame_voxels, covered, selected)
        if frame is None or gain <= 0:
            break
        selected.add(frame)
        order.append(frame)
        covered |= support.frame_voxels[frame]
    return RegimeSelection("sparse", sorted(order))


def select_medium(support, n_frames, cfg, f_min=None, f_max=None):
    """Greedy coverage with a length-adaptive budget F_min(N) <= |S| <= F_max(N).

    Selection continues past coverage saturation (zero marginal gain) by
    taking the lowest unused frame index until F_min is met; with positive
    gains it runs to F_max or full coverage.
    """
    if support.n_frames != n_frames:
        raise DataError("support frame count does not match n_frames")
    if support.n_frames == 0:
        raise DataError("empty voxel support")
    lo = cfg.f_min(n_frames) if f_min is None else f_min
    hi = cfg.f_max(n_frames) if f_max is None else f_max
    if lo > n_frames:
        raise DataError(f"F_min({n_frames}) = {lo} exceeds the frame count")
    hi = min(n_frames, max(lo, hi))
    covered = set()
    selected = set()
    order = []
    while len(order) < hi:
        frame, gain = _greedy_best(support.frame_voxels, covered, selected)
        if gain > 0:
            selected.add(frame)
            order.append(frame)
            covered |= support.frame_voxels[frame]
            continue
        if len(order) >= lo:
            break
        # zero-gain fill: lowest unused index keeps the protocol reproducible
        filler = min(f for f in range(n_frames) if f not in selected)
        selected.add(filler)
        order.append(filler)
        covered |= support.frame_voxels[filler]
    return RegimeSelection("medium", sorted(order))


def select_dense(n_frames, budget):
    """All frames when N <= T, else stride ceil(N / T) starting at frame 0."""
    if n_frames < 1:
        raise DataError("frame count must be >= 1")
    if budget < 1:
        raise DataError("dense budget must be >= 1")
    if n_frames <= budget:
        return RegimeSelection("dense", list(range(n_frames)))
    stride = math.ceil(n_frames / budget)
    return RegimeSelection("dense", list(range(0, n_frames, stride)))


def select_single(n_frames):
    """The fixed deterministic frame floor((N - 1) / 2)."""
    if n_frames < 1:
        raise DataError("frame count must be >= 1")
    return RegimeSelection("single", [(n_frames - 1) // 2])
