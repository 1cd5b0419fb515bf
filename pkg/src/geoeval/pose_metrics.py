"""Pairwise camera pose metrics: rotation/translation accuracies and AUC.

Errors are computed over all N(N-1)/2 ordered pairs i < j of a trajectory.
Rotation error is the geodesic angle between relative rotations; translation
error is the angle between relative translation directions with the 180
degree ambiguity folded out (arccos of the absolute dot product).
"""

from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .geometry import W2C

DEGENERATE_BASELINE = 1e-8  # meters


@dataclass
class PairErrorSet:
    """Per-pair errors in degrees, sorted by (i, j).

    e_rot is in [0, 180]. e_trans is in [0, 90] with the degenerate-baseline
    policy already applied: pairs whose ground-truth baseline is degenerate
    score 0 (unmeasurable, never penalized), pairs where only the prediction
    is degenerate score 90 (worst defined value).
    """

    i: np.ndarray
    j: np.ndarray
    e_rot: np.ndarray
    e_trans: np.ndarray
    gt_degenerate: np.ndarray
    pred_degenerate: np.ndarray

    def __len__(self):
        return len(self.e_rot)


def _rotation_angles_deg(matrices):
    """Rotation angles of a stack of rotation matrices, stable near 0 and 180."""
    cos = (np.einsum("kii->k", matrices) - 1.0) / 2.0
    w = np.stack([
        matrices[:, 2, 1] - matrices[:, 1, 2],
        matrices[:, 0, 2] - matrices[:, 2, 0],
        matrices[:, 1, 0] - matrices[:, 0, 1],
    ], axis=1)
    sin = np.linalg.norm(w, axis=1) / 2.0
    return np.degrees(np.arctan2(sin, cos))


def _pair_directions(traj, iu, jv):
    """Unit relative translation directions t_ij = R_j (c_i - c_j), or flagged.

    The translation component of the relative pose G_j G_i^-1; exactly
    invariant to common rigid/similarity transforms of the world frame.
    """
    centers = traj.centers()
    t_ij = np.einsum("kab,kb->ka", traj.rotations[jv], centers[iu] - centers[jv])
    norms = np.linalg.norm(t_ij, axis=1)
    degenerate = norms < DEGENERATE_BASELINE
    safe = np.where(degenerate, 1.0, norms)
    return t_ij / safe[:, None], degenerate


def pairwise_errors(pred, gt):
    """PairErrorSet for two trajectories with matching frame indices."""
    if len(pred) != len(gt):
        raise DataError("trajectory lengths differ")
    if not np.array_equal(pred.indices, gt.indices):
        raise DataError("trajectory frame indices differ")
    n = len(gt)
    if n < 2:
        raise DataError("need at least two poses for pairwise errors")
    p = pred.to_convention(W2C)
    g = gt.to_convention(W2C)

    iu, jv = np.triu_indices(n, k=1)
    rel_g = np.einsum("kab,kcb->kac", g.rotations[jv], g.rotations[iu])
    rel_p = np.einsum("kab,kcb->kac", p.rotations[jv], p.rotations[iu])
    err = np.einsum("kba,kbc->kac", rel_g, rel_p)  # rel_g^T rel_p
    e_rot = _rotation_angles_deg(err)

    dir_g, deg_g = _pair_directions(g, iu, jv)
    dir_p, deg_p = _pair_directions(p, iu, jv)
    # angle with the 180 degree ambiguity folded out: atan2(|u x v|, |u . v|)
    # equals arccos(|u . v|) but stays exact for parallel directions
    dot = np.einsum("ki,ki->k", dir_g, dir_p)
    cross = np.linalg.norm(np.cross(dir_g, dir_p), axis=1)
    e_trans = np.degrees(np.arctan2(cross, np.abs(dot)))
    # degenerate-baseline policy: GT degenerate -> 0, prediction-only -> 90
    e_trans = np.where(deg_p & ~deg_g, 90.0, e_trans)
    e_trans = np.where(deg_g, 0.0, e_trans)

    return PairErrorSet(iu, jv, e_rot, e_trans, deg_g, deg_p & ~deg_g)


def _joint(errs):
    return np.maximum(errs.e_rot, errs.e_trans)


def accuracy_at(errs, threshold_deg, kind="joint"):
    """Fraction of pairs with error strictly below the threshold.

    kind selects which error: "rotation", "translation", or "joint"
    (max of the two, so both must beat the threshold).
    """
    if len(errs) == 0:
        raise DataError("empty error set")
    if threshold_deg <= 0:
        raise DataError("threshold must be positive")
    if kind == "rotation":
        e = errs.e_rot
    elif kind == "translation":
        e = errs.e_trans
    elif kind == "joint":
        e = _joint(errs)
    else:
        raise DataError(f"unknown accuracy kind {kind!r}")
    return float(np.mean(e < threshold_deg))


def auc(errs, max_threshold_deg, grid_step_deg=0.1):
    """Normalized area under the joint accuracy curve up to `max_threshold_deg`.

    The joint accuracy (strict inequality) is sampled on the uniform grid
    x_k = k * step for k = 1..K with K = max_threshold_deg / step, and the
    integral (1/x_max) * int Acc dx is taken as the mean of those samples
    (the right-endpoint rule for the left-continuous step function). The
    x = 0 sample is always 0 under the strict inequality and is excluded
    from the rule, so a perfect prediction scores exactly 1 and the score
    is insensitive to float-level error wobble. Discretization error is at
    most one grid step, step / max_threshold_deg.
    """
    if len(errs) == 0:
        raise DataError("empty error set")
    if max_threshold_deg <= 0:
        raise DataError("threshold must be positive")
    e = _joint(errs)
    steps = max(1, round(max_threshold_deg / grid_step_deg))
    dx = max_threshold_deg / steps
    grid = np.arange(1, steps + 1) * dx
    acc = np.mean(e[None, :] < grid[:, None], axis=1)
    return float(np.sum(acc) / steps)


def pose_metric_table(errs, acc_thresholds=(3.0, 5.0), auc_thresholds=(5.0, 15.0, 30.0)):
    """Flat {name: value} map of the standard pairwise metrics."""
    out = {}
    for x in acc_thresholds:
        out[f"racc_{_fmt(x)}"] = accuracy_at(errs, x, "rotation")
        out[f"tacc_{_fmt(x)}"] = accuracy_at(errs, x, "translation")
    for x in auc_thresholds:
        out[f"auc_{_fmt(x)}"] = auc(errs, x)
    return out


def _fmt(x):
    return f"{x:g}".replace(".", "p")
