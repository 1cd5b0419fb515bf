#!/usr/bin/env python3
"""Generate a synthetic scene directory (and optionally a noisy prediction).

The ground truth is a smooth wavy surface seen from a gentle camera arc;
depth, poses, intrinsics, and a fused point cloud are written in the scene
layout the CLI consumes. With --noise-* flags a prediction directory is
produced alongside, so the full sample/eval/aggregate loop can be exercised
without any real data.

Example:
    python scripts/make_synthetic_scene.py --out /tmp/demo --frames 12 \
        --pred-out /tmp/demo_pred --noise-depth 0.01 --noise-center 0.005
"""

import argparse
import json
from pathlib import Path

import numpy as np

from geoeval.depthmap import DepthFrame
from geoeval.formats import write_pfm, write_ply, write_pose_file
from geoeval.geometry import C2W, Intrinsics, Trajectory, rotation_about
from geoeval.harness import write_intrinsics
from geoeval.recon_metrics import fuse_depth_maps


def build_scene(n_frames, width, height):
    intr = Intrinsics(fx=1.25 * width, fy=1.25 * width,
                      cx=width / 2.0, cy=height / 2.0,
                      width=width, height=height)
    v, u = np.mgrid[0:height, 0:width].astype(np.float64)
    frames = {}
    rots, centers = [], []
    for k in range(n_frames):
        depth = 2.0 + 0.3 * np.sin(u / 5.0 + k) * np.cos(v / 3.0 - 0.5 * k)
        frames[k] = DepthFrame(depth, np.ones_like(depth, dtype=bool))
        rot = rotation_about([0, 1, 0], 3.0 * np.sin(0.4 * k)) \
            @ rotation_about([1, 0, 0], 2.0 * np.cos(0.3 * k))
        rots.append(rot)
        centers.append([0.15 * k, 0.05 * np.sin(k), 0.02 * k])
    traj = Trajectory(np.arange(n_frames), np.stack(rots),
                      np.asarray(centers), C2W)
    return intr, frames, traj


def write_scene(root, intr, frames, traj, cloud_stride, meta):
    root = Path(root)
    (root / "depth").mkdir(parents=True, exist_ok=True)
    write_intrinsics(intr, root / "intrinsics.json")
    write_pose_file(root / "poses.txt", traj)
    for k, frame in frames.items():
        write_pfm(root / "depth" / f"{k:06d}.pfm", frame)
    triples = [(frames[k], traj.subset([k]).pose(0), intr) for k in sorted(frames)]
    write_ply(root / "pointcloud.ply", fuse_depth_maps(triples, stride=cloud_stride))
    if meta:
        with open(root / "meta.json", "w", encoding="ascii") as f:
            json.dump(meta, f, indent=2, sort_keys=True)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", required=True, help="ground-truth scene directory")
    ap.add_argument("--frames", type=int, default=10)
    ap.add_argument("--width", type=int, default=48)
    ap.add_argument("--height", type=int, default=36)
    ap.add_argument("--cloud-stride", type=int, default=4)
    ap.add_argument("--pred-out", default=None,
                    help="also write a (noisy) prediction directory")
    ap.add_argument("--noise-depth", type=float, default=0.0,
                    help="relative multiplicative depth noise sigma")
    ap.add_argument("--noise-center", type=float, default=0.0,
                    help="camera center noise sigma, meters")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    intr, frames, traj = build_scene(args.frames, args.width, args.height)
    meta = {"scene_id": Path(args.out).name, "dataset": "synthetic",
            "tags": {"environment": "indoor", "dynamics": "static",
                     "view_type": "normal", "source": "simulation"}}
    write_scene(args.out, intr, frames, traj, args.cloud_stride, meta)
    print(f"wrote GT scene with {args.frames} frames to {args.out}")

    if args.pred_out:
        rng = np.random.default_rng(args.seed)
        noisy_frames = {
            k: DepthFrame(
                f.depth * (1.0 + args.noise_depth * rng.standard_normal(f.depth.shape)),
                f.mask.copy())
            for k, f in frames.items()
        }
        noisy_traj = Trajectory(
            traj.indices.copy(), traj.rotations.copy(),
            traj.translations + args.noise_center * rng.standard_normal((len(traj), 3)),
            C2W)
        write_scene(args.pred_out, intr, noisy_frames, noisy_traj,
                    args.cloud_stride, None)
        print(f"wrote prediction to {args.pred_out} "
              f"(depth noise {args.noise_depth}, center noise {args.noise_center})")


if __name__ == "__main__":
    main()
