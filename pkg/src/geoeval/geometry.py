"""Rotations, rigid camera poses, similarity transforms, and pinhole intrinsics.

Conventions used throughout:
    world-to-camera pose [R | t]:  x_cam = R x_world + t, camera centre c = -R^T t
    camera-to-world pose [R | t]:  x_world = R x_cam + t, camera centre c = t
All angles are in degrees, all distances in meters.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DataError

W2C = "w2c"
C2W = "c2w"

_ROTATION_TOL = 1e-9


def check_rotation(matrix, tol=_ROTATION_TOL):
    """Raise DataError unless `matrix` is a proper rotation to tolerance `tol`."""
    m = np.asarray(matrix, dtype=np.float64)
    if m.shape != (3, 3):
        raise DataError(f"rotation must be 3x3, got {m.shape}")
    drift = np.linalg.norm(m.T @ m - np.eye(3))
    if drift > tol:
        raise DataError(f"rotation not orthonormal (drift {drift:.3e} > {tol:.0e})")
    det = np.linalg.det(m)
    if abs(det - 1.0) > max(tol, 1e-9):
        raise DataError(f"rotation determinant {det:.12f} != 1")
    return m


def project_rotation(matrix):
    """Nearest proper rotation in the Frobenius sense (SVD projection)."""
    u, _, vt = np.linalg.svd(np.asarray(matrix, dtype=np.float64))
    r = u @ vt
    if np.linalg.det(r) < 0:
        u = u.copy()
        u[:, -1] *= -1.0
        r = u @ vt
    return r


def rotation_about(axis, angle_deg):
    """Rotation matrix for `angle_deg` degrees about a (not necessarily unit) axis."""
    axis = np.asarray(axis, dtype=np.float64)
    n = np.linalg.norm(axis)
    if n == 0:
        raise DataError("zero rotation axis")
    x, y, z = axis / n
    a = np.deg2rad(angle_deg)
    c, s = np.cos(a), np.sin(a)
    k = np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])
    return np.eye(3) + s * k + (1.0 - c) * (k @ k)


def rotation_angle_deg(matrix):
    """Rotation angle of a single rotation matrix, degrees in [0, 180].

    Equal to arccos((tr(R) - 1) / 2) in exact arithmetic, but evaluated as
    atan2(sin, cos) with the sine taken from the skew part of R. Unlike the
    raw clamped arccos this stays accurate to machine precision near 0 and
    180 degrees (arccos amplifies 1e-16 drift to ~1e-8 rad there), which the
    gauge-invariance guarantees of the pose metrics rely on.
    """
    m = np.asarray(matrix, dtype=np.float64)
    cos = (m[0, 0] + m[1, 1] + m[2, 2] - 1.0) / 2.0
    w = np.array([m[2, 1] - m[1, 2], m[0, 2] - m[2, 0], m[1, 0] - m[0, 1]])
    sin = np.linalg.norm(w) / 2.0
    return float(np.degrees(np.arctan2(sin, cos)))


def geodesic_angle_deg(rot_a, rot_b):
    """Geodesic distance between two rotations, in degrees within [0, 180].

    Symmetric in its arguments and zero iff the rotations coincide.
    """
    ra = np.asarray(rot_a, dtype=np.float64)
    rb = np.asarray(rot_b, dtype=np.float64)
    return rotation_angle_deg(ra.T @ rb)


@dataclass(frozen=True)
class Pose:
    """A rigid transform with an explicit direction convention (`w2c` or `c2w`)."""

    rotation: np.ndarray
    translation: np.ndarray
    convention: str = W2C

    def __post_init__(self):
        if self.convention not in (W2C, C2W):
            raise DataError(f"unknown pose convention {self.convention!r}")
        object.__setattr__(self, "rotation", check_rotation(self.rotation))
        t = np.asarray(self.translation, dtype=np.float64).reshape(3)
        object.__setattr__(self, "translation", t)

    def inverse(self):
        """Flip the convention: [R|t] -> [R^T | -R^T t]. An involution."""
        other = C2W if self.convention == W2C else W2C
        return Pose(self.rotation.T, -self.rotation.T @ self.translation, other)

    def as_convention(self, convention):
        if convention == self.convention:
            return self
        return self.inverse()

    def matrix(self):
        m = np.eye(4)
        m[:3, :3] = self.rotation
        m[:3, 3] = self.translation
        return m


def camera_center(pose):
    """Camera centre in world coordinates: -R^T t for w2c poses, t for c2w."""
    if pose.convention == W2C:
        return -pose.rotation.T @ pose.translation
    return pose.translation.copy()


def relative_rotation(pose_i, pose_j):
    """Relative rotation R_j R_i^T of the pair (i, j), in the w2c sense."""
    if pose_i.convention != pose_j.convention:
        raise DataError("pose convention mismatch between pair members")
    gi = pose_i.as_convention(W2C)
    gj = pose_j.as_convention(W2C)
    return gj.rotation @ gi.rotation.T


def relative_translation_direction(pose_i, pose_j, degenerate_norm=1e-8):
    """Unit direction of the pair's relative translation, camera-local.

    The translation component of the relative transform G_j G_i^-1 between
    the world-to-camera poses: t_ij = t_j - R_j R_i^T t_i = R_j (c_i - c_j),
    the inter-camera baseline expressed in camera j's frame. This quantity
    is exactly invariant to any common rigid (or similarity) transform of
    the world frame, unlike the raw difference of w2c translations.

    Returns None when the baseline is degenerate (norm below
    `degenerate_norm` meters); callers define the error semantics.
    """
    if pose_i.convention != pose_j.convention:
        raise DataError("pose convention mismatch between pair members")
    gi = pose_i.as_convention(W2C)
    gj = pose_j.as_convention(W2C)
    t_ij = gj.rotation @ (camera_center(gi) - camera_center(gj))
    n = np.linalg.norm(t_ij)
    if n < degenerate_norm:
        return None
    return t_ij / n


@dataclass(frozen=True)
class Sim3:
    """Similarity transform x -> scale * R x + t with scale > 0."""

    scale: float
    rotation: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        if not self.scale > 0:
            raise DataError(f"Sim3 scale must be positive, got {self.scale}")
        object.__setattr__(self, "rotation", check_rotation(self.rotation))
        t = np.asarray(self.translation, dtype=np.float64).reshape(3)
        object.__setattr__(self, "translation", t)


def sim3_identity():
    return Sim3(1.0, np.eye(3), np.zeros(3))


def sim3_inverse(t):
    return Sim3(1.0 / t.scale, t.rotation.T, -(t.rotation.T @ t.translation) / t.scale)


def sim3_compose(a, b):
    """Composition a after b: (a o b)(x) = a(b(x))."""
    return Sim3(
        a.scale * b.scale,
        a.rotation @ b.rotation,
        a.scale * (a.rotation @ b.translation) + a.translation,
    )


def solve_sim3(source, target):
    """Closed-form least-squares Sim(3) aligning `source` points onto `target`.

    Minimizes sum ||s R x_i + t - y_i||^2 via centroid subtraction, SVD of the
    cross-covariance with determinant sign correction, and the variance-ratio
    scale. Deterministic, exact for noiseless correspondences.

    Args:
        source: (N, 3) points, N >= 3, not all coincident.
        target: (N, 3) points.

    Returns:
        Sim3 with scale > 0.
    """
    x = np.asarray(source, dtype=np.float64).reshape(-1, 3)
    y = np.asarray(target, dtype=np.float64).reshape(-1, 3)
    if x.shape != y.shape:
        raise DataError("source/target point counts differ")
    n = x.shape[0]
    if n < 3:
        raise DataError("insufficient correspondences")

    mx = x.mean(axis=0)
    my = y.mean(axis=0)
    xc = x - mx
    yc = y - my
    var_x = float(np.sum(xc * xc)) / n
    if var_x < 1e-24:
        raise DataError("degenerate point set")

    cov = yc.T @ xc / n
    u, d, vt = np.linalg.svd(cov)
    sign = np.ones(3)
    if np.linalg.det(u) * np.linalg.det(vt) < 0:
        sign[2] = -1.0
    rot = u @ np.diag(sign) @ vt
    scale = float(np.sum(d * sign)) / var_x
    if not scale > 0:
        raise DataError("degenerate point set")
    trans = my - scale * (rot @ mx)
    return Sim3(scale, rot, trans)


def apply_sim3_points(transform, points):
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    return pts @ (transform.scale * transform.rotation).T + transform.translation


@dataclass(frozen=True)
class Intrinsics:
    """Pinhole intrinsics in pixels; skew is fixed to zero."""

    fx: float
    fy: float
    cx: float
    cy: float
    width: int
    height: int

    def __post_init__(self):
        if not (self.fx > 0 and self.fy > 0):
            raise DataError("focal lengths must be positive")
        if not (0 <= self.cx < self.width and 0 <= self.cy < self.height):
            raise DataError("principal point outside image bounds")


@dataclass
class Trajectory:
    """Ordered camera poses with strictly increasing frame indices."""

    indices: np.ndarray      # (N,) int64
    rotations: np.ndarray    # (N, 3, 3)
    translations: np.ndarray  # (N, 3)
    convention: str = W2C

    def __post_init__(self):
        self.indices = np.asarray(self.indices, dtype=np.int64).reshape(-1)
        self.rotations = np.asarray(self.rotations, dtype=np.float64).reshape(-1, 3, 3)
        self.translations = np.asarray(self.translations, dtype=np.float64).reshape(-1, 3)
        n = len(self.indices)
        if n < 1:
            raise DataError("empty trajectory")
        if self.rotations.shape[0] != n or self.translations.shape[0] != n:
            raise DataError("trajectory field lengths differ")
        if np.any(np.diff(self.indices) <= 0):
            raise DataError("frame indices must be strictly increasing")
        if self.convention not in (W2C, C2W):
            raise DataError(f"unknown pose convention {self.convention!r}")
        for k in range(n):
            check_rotation(self.rotations[k])

    def __len__(self):
        return len(self.indices)

    def pose(self, k):
        """Pose at positional index k (not frame index)."""
        return Pose(self.rotations[k], self.translations[k], self.convention)

    def to_convention(self, convention):
        if convention == self.convention:
            return self
        rot = np.transpose(self.rotations, (0, 2, 1))
        trans = -np.einsum("nij,nj->ni", rot, self.translations)
        return Trajectory(self.indices.copy(), rot, trans, convention)

    def centers(self):
        """Camera centres in world coordinates, (N, 3)."""
        if self.convention == C2W:
            return self.translations.copy()
        return -np.einsum("nji,nj->ni", self.rotations, self.translations)

    def matrices(self):
        m = np.tile(np.eye(4), (len(self), 1, 1))
        m[:, :3, :3] = self.rotations
        m[:, :3, 3] = self.translations
        return m

    def subset(self, frame_indices):
        """Restrict to the given frame indices (all must be present)."""
        wanted = np.asarray(frame_indices, dtype=np.int64)
        pos = {int(f): k for k, f in enumerate(self.indices)}
        missing = [int(f) for f in wanted if int(f) not in pos]
        if missing:
            raise DataError(f"trajectory missing frame indices {missing}")
        sel = np.array([pos[int(f)] for f in wanted], dtype=np.int64)
        return Trajectory(
            self.indices[sel], self.rotations[sel], self.translations[sel], self.convention
        )


def apply_sim3(transform, target):
    """Apply a Sim(3) to an (N, 3) point array or to a Trajectory.

    Points map as s R x + t. For trajectories, camera centres map the same
    way and body orientations are left-composed with the alignment rotation
    (in the cam-to-world sense); the input convention is preserved.
    """
    if isinstance(target, Trajectory):
        c2w = target.to_convention(C2W)
        rot = np.einsum("ij,njk->nik", transform.rotation, c2w.rotations)
        centers = apply_sim3_points(transform, c2w.translations)
        out = Trajectory(c2w.indices.copy(), rot, centers, C2W)
        return out.to_convention(target.convention)
    return apply_sim3_points(transform, target)
