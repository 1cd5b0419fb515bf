"""Portable file codecs: PFM depth maps, binary PLY point clouds, pose files.

All codecs are lossless round trips at their stated precision:
    PFM   - grayscale "Pf", little-endian float32, bottom row first, NaN marks
            invalid pixels; bit-exact.
    PLY   - binary little-endian, element vertex with float x/y/z, extra
            scalar properties ignored on read; bit-exact, order preserving.
    poses - text lines "frame_index m00 ... m23" holding the top 3x4 of a
            camera-to-world matrix, 17 significant digits, '#' comments.
"""

import numpy as np

from .depthmap import DepthFrame
from .errors import DataError
from .geometry import C2W, Trajectory, project_rotation

# ---------------------------------------------------------------------------
# PFM
# ---------------------------------------------------------------------------


def write_pfm(path, frame):
    """Write a DepthFrame as grayscale PFM; invalid pixels are stored as NaN."""
    data = np.asarray(frame.depth, dtype=np.float32).copy()
    data[~frame.mask] = np.nan
    h, w = data.shape
    with open(path, "wb") as f:
        f.write(b"Pf\n")
        f.write(f"{w} {h}\n".encode("ascii"))
        f.write(b"-1.0\n")
        f.write(np.ascontiguousarray(data[::-1]).tobytes())


def read_pfm(path):
    """Read a grayscale PFM into a DepthFrame (mask = finite pixels)."""
    with open(path, "rb") as f:
        magic = _pfm_token(f)
        if magic == b"PF":
            raise DataError("color 'PF' variant is unsupported (grayscale 'Pf' only)")
        if magic != b"Pf":
            raise DataError(f"not a PFM file (magic {magic!r})")
        try:
            w = int(_pfm_token(f))
            h = int(_pfm_token(f))
            scale = float(_pfm_token(f))
        except ValueError as exc:
            raise DataError(f"malformed PFM header: {exc}") from exc
        if w <= 0 or h <= 0:
            raise DataError(f"bad PFM dimensions {w}x{h}")
        if scale > 0:
            raise DataError("unsupported endianness (positive scale means big-endian)")
        payload = f.read(w * h * 4)
    if len(payload) != w * h * 4:
        raise DataError(f"truncated PFM payload ({len(payload)} of {w * h * 4} bytes)")
    data = np.frombuffer(payload, dtype="<f4").reshape(h, w)[::-1].copy()
    # NaN (and inf) encode invalid pixels; finite nonpositive values stay
    # valid so that zero-predictions are penalized rather than excluded
    return DepthFrame(data, np.isfinite(data))


def _pfm_token(f):
    # whitespace-delimited header token
    tok = b""
    while True:
        c = f.read(1)
        if not c:
            raise DataError("truncated PFM header")
        if c.isspace():
            if tok:
                return tok
            continue
        tok += c


# ---------------------------------------------------------------------------
# PLY
# ---------------------------------------------------------------------------

_PLY_TYPES = {
    "float": "<f4", "float32": "<f4",
    "double": "<f8", "float64": "<f8",
    "char": "<i1", "int8": "<i1",
    "uchar": "<u1", "uint8": "<u1",
    "short": "<i2", "int16": "<i2",
    "ushort": "<u2", "uint16": "<u2",
    "int": "<i4", "int32": "<i4",
    "uint": "<u4", "uint32": "<u4",
}


def write_ply(path, points):
    """Write an (N, 3) point array as binary little-endian PLY (float32 xyz)."""
    pts = np.ascontiguousarray(np.asarray(points, dtype=np.float32).reshape(-1, 3))
    with open(path, "wb") as f:
        f.write(b"ply\n")
        f.write(b"format binary_little_endian 1.0\n")
        f.write(f"element vertex {pts.shape[0]}\n".encode("ascii"))
        f.write(b"property float x\nproperty float y\nproperty float z\n")
        f.write(b"end_header\n")
        f.write(pts.tobytes())


def read_ply(path):
    """Read xyz from a binary little-endian PLY; extra vertex properties skipped."""
    with open(path, "rb") as f:
        if f.readline().strip() != b"ply":
            raise DataError("not a PLY file")
        count = None
        props = []
        in_vertex = False
        while True:
            line = f.readline()
            if not line:
                raise DataError("truncated PLY header")
            parts = line.decode("ascii", "replace").split()
            if not parts:
                continue
            if parts[0] == "format":
                if parts[1] == "ascii":
                    raise DataError("ascii PLY is unsupported (binary little-endian only)")
                if parts[1] != "binary_little_endian":
                    raise DataError(f"unsupported PLY format {parts[1]!r}")
            elif parts[0] == "element":
                in_vertex = parts[1] == "vertex"
                if in_vertex:
                    count = int(parts[2])
            elif parts[0] == "property" and in_vertex:
                if parts[1] == "list":
                    raise DataError("list properties on vertices are unsupported")
                if parts[1] not in _PLY_TYPES:
                    raise DataError(f"unknown PLY property type {parts[1]!r}")
                props.append((parts[2], _PLY_TYPES[parts[1]]))
            elif parts[0] == "end_header":
                break
        if count is None:
            raise DataError("PLY has no vertex element")
        if count == 0:
            raise DataError("empty point set")
        names = [n for n, _ in props]
        for axis in ("x", "y", "z"):
            if axis not in names:
                raise DataError(f"PLY vertex element lacks property {axis!r}")
        dtype = np.dtype(props)
        payload = f.read(count * dtype.itemsize)
    if len(payload) != count * dtype.itemsize:
        raise DataError("truncated PLY payload")
    rec = np.frombuffer(payload, dtype=dtype)
    return np.stack([rec["x"], rec["y"], rec["z"]], axis=1)


# ---------------------------------------------------------------------------
# Pose files (camera-to-world, top 3x4 row-major)
# ---------------------------------------------------------------------------


def write_pose_file(path, trajectory):
    """Write a trajectory as one "index + 12 floats" line per frame (cam-to-world)."""
    c2w = trajectory.to_convention(C2W)
    with open(path, "w", encoding="ascii") as f:
        f.write("# frame_index r00 r01 r02 tx r10 r11 r12 ty r20 r21 r22 tz\n")
        for k in range(len(c2w)):
            block = np.concatenate(
                [c2w.rotations[k], c2w.translations[k][:, None]], axis=1
            )
            vals = " ".join(f"{v:.17g}" for v in block.reshape(-1))
            f.write(f"{int(c2w.indices[k])} {vals}\n")


def read_pose_file(path):
    """Parse a pose file into a camera-to-world Trajectory.

    Rotation blocks with orthonormality drift up to 1e-6 are accepted as
    written; drift in (1e-6, 1e-3] is re-orthonormalized via SVD and flagged
    in the returned warning list; anything beyond 1e-3 is a hard error.

    Returns:
        (Trajectory, warnings) where warnings is a list of strings.
    """
    indices, rotations, translations, warnings = [], [], [], []
    seen = set()
    with open(path, "r", encoding="ascii") as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 13:
                raise DataError(
                    f"{path}: line {lineno}: expected frame index + 12 floats, "
                    f"got {len(parts)} fields"
                )
            try:
                idx = int(parts[0])
                vals = np.array([float(p) for p in parts[1:]], dtype=np.float64)
            except ValueError as exc:
                raise DataError(f"{path}: line {lineno}: {exc}") from exc
            if idx in seen:
                raise DataError(f"{path}: line {lineno}: duplicate frame index {idx}")
            seen.add(idx)
            block = vals.reshape(3, 4)
            rot, trans = block[:, :3], block[:, 3]
            drift = np.linalg.norm(rot.T @ rot - np.eye(3))
            if drift > 1e-3:
                raise DataError(
                    f"{path}: line {lineno}: rotation not orthonormal "
                    f"(drift {drift:.3e} > 1e-03)"
                )
            if np.linalg.det(rot) < 0:
                raise DataError(f"{path}: line {lineno}: rotation block is a reflection")
            if drift > 1e-6:
                warnings.append(
                    f"line {lineno}: rotation drift {drift:.3e} re-orthonormalized"
                )
            if drift > 1e-12:
                rot = project_rotation(rot)
            indices.append(idx)
            rotations.append(rot)
            translations.append(trans)
    if not indices:
        raise DataError(f"{path}: no pose lines")
    order = np.argsort(indices)
    traj = Trajectory(
        np.asarray(indices)[order],
        np.asarray(rotations)[order],
        np.asarray(translations)[order],
        C2W,
    )
    return traj, warnings
