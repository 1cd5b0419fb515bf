"""Sim(3)-aligned global trajectory metrics: ATE, RPE_t, RPE_r."""

from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .geometry import W2C, Sim3, apply_sim3, solve_sim3
from .pose_metrics import _rotation_angles_deg


@dataclass
class TrajectoryReport:
    ate: float        # meters
    rpe_t: float      # meters
    rpe_r: float      # degrees
    alignment: Sim3

    def to_dict(self):
        return {
            "ate": self.ate,
            "rpe_t": self.rpe_t,
            "rpe_r": self.rpe_r,
            "alignment": {
                "scale": self.alignment.scale,
                "rotation": self.alignment.rotation.reshape(-1).tolist(),
                "translation": self.alignment.translation.tolist(),
            },
        }


def align_trajectory(pred, gt):
    """Globally align a predicted trajectory to ground truth with one Sim(3).

    The transform is solved on camera centres only and then applied to the
    whole trajectory (centres mapped, orientations composed with the
    alignment rotation).

    Returns:
        (Sim3, aligned Trajectory)
    """
    if len(pred) != len(gt):
        raise DataError("trajectory lengths differ")
    if not np.array_equal(pred.indices, gt.indices):
        raise DataError("trajectory frame indices differ")
    if len(pred) < 3:
        raise DataError("need at least three poses for Sim(3) alignment")
    transform = solve_sim3(pred.centers(), gt.centers())
    return transform, apply_sim3(transform, pred)


def ate(aligned, gt):
    """Root-mean-square distance between matched camera centres, meters."""
    if len(aligned) != len(gt):
        raise DataError("trajectory lengths differ")
    diff = aligned.centers() - gt.centers()
    return float(np.sqrt(np.mean(np.sum(diff * diff, axis=1))))


def _rigid_inverse(rotations, translations):
    rot = np.transpose(rotations, (0, 2, 1))
    trans = -np.einsum("nij,nj->ni", rot, translations)
    return rot, trans


def _step_motions(traj):
    """Per-step relative transforms G_i^{-1} G_{i+1} in the w2c sense."""
    g = traj.to_convention(W2C)
    inv_r, inv_t = _rigid_inverse(g.rotations[:-1], g.translations[:-1])
    rot = np.einsum("nij,njk->nik", inv_r, g.rotations[1:])
    trans = np.einsum("nij,nj->ni", inv_r, g.translations[1:]) + inv_t
    return rot, trans


def rpe(aligned, gt):
    """Mean per-step pose error over consecutive windows (displacement 1).

    For each window the error transform is E_i = (dT_gt_i)^-1 dT_pred_i;
    RPE_t is the mean norm of its translation (meters) and RPE_r the mean
    geodesic angle of its rotation (degrees). Non-contiguous frame lists
    pair adjacent selected frames.
    """
    if len(aligned) != len(gt):
        raise DataError("trajectory lengths differ")
    if not np.array_equal(aligned.indices, gt.indices):
        raise DataError("trajectory frame indices differ")
    if len(gt) < 2:
        raise DataError("need at least two poses for RPE")
    rot_g, trans_g = _step_motions(gt)
    rot_p, trans_p = _step_motions(aligned)
    inv_rg, inv_tg = _rigid_inverse(rot_g, trans_g)
    err_rot = np.einsum("nij,njk->nik", inv_rg, rot_p)
    err_trans = np.einsum("nij,nj->ni", inv_rg, trans_p) + inv_tg
    rpe_t = float(np.mean(np.linalg.norm(err_trans, axis=1)))
    rpe_r = float(np.mean(_rotation_angles_deg(err_rot)))
    return rpe_t, rpe_r


def trajectory_report(pred, gt):
    """Align then score: the standard ATE / RPE_t / RPE_r summary."""
    transform, aligned = align_trajectory(pred, gt)
    rpe_t, rpe_r = rpe(aligned, gt)
    return TrajectoryReport(ate(aligned, gt), rpe_t, rpe_r, transform)
