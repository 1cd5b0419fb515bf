#!/usr/bin/env python3
"""Generate parity fixtures for the foreign-language bindings.

Each fixture couples an `op` request payload with the result computed by a
direct in-process library call (or the exact error message), so a binding
test can assert bitwise agreement with the primary implementation through
the CLI `op` transport. 20 random fixtures per operation, fixed seed.

    python scripts/make_binding_fixtures.py --out frontend/fixtures
"""

import argparse
import json
from pathlib import Path

import numpy as np

from geoeval.cleaning import CleanConfig, clean_pipeline
from geoeval.config import EvalConfig
from geoeval.depth_metrics import depth_metrics
from geoeval.depthmap import DepthFrame
from geoeval.errors import DataError
from geoeval.geometry import C2W, Trajectory, rotation_about
from geoeval.harness import SceneData, evaluate_scene
from geoeval.recon_metrics import fuse_depth_maps
from geoeval.sampling import (SamplerConfig, VoxelSupport, select_dense,
                              select_medium, select_single, select_sparse)
from geoeval.scene_index import scene_index_from_dict

N_PER_OP = 20


def dump(out_dir, name, payload):
    path = out_dir / f"{name}.json"
    with open(path, "w", encoding="ascii") as f:
        json.dump(payload, f, sort_keys=True)
        f.write("\n")


def depth_pair(rng, h, w):
    gt = rng.uniform(0.2, 6.0, (h, w))
    pred = gt * rng.uniform(0.8, 1.2, (h, w))
    gt_mask = rng.random((h, w)) > 0.2
    pred_mask = rng.random((h, w)) > 0.1
    return pred, pred_mask, gt, gt_mask


def gen_depth_metrics(rng, out_dir):
    for i in range(N_PER_OP):
        h, w = int(rng.integers(4, 12)), int(rng.integers(4, 12))
        pred, pred_mask, gt, gt_mask = depth_pair(rng, h, w)
        mode = "median" if i % 2 == 0 else "metric"
        request = {
            "pred": pred.tolist(), "pred_mask": pred_mask.astype(int).tolist(),
            "gt": gt.tolist(), "gt_mask": gt_mask.astype(int).tolist(),
            "mode": mode,
        }
        expected = depth_metrics(
            DepthFrame(pred, pred_mask), DepthFrame(gt, gt_mask), mode
        ).to_dict()
        dump(out_dir, f"depth_metrics_{i:02d}",
             {"op": "depth_metrics", "request": request, "expected": expected})
    # error parity: mask shape mismatch
    pred, pred_mask, gt, gt_mask = depth_pair(rng, 6, 6)
    request = {"pred": pred.tolist(), "pred_mask": np.ones((5, 6), int).tolist(),
               "gt": gt.tolist(), "gt_mask": gt_mask.astype(int).tolist()}
    try:
        DepthFrame(pred, np.ones((5, 6), bool))
    except DataError as exc:
        message = str(exc)
    dump(out_dir, "depth_metrics_err_shape",
         {"op": "depth_metrics", "request": request, "expected_error": message})


def random_voxel_sets(rng, n_frames, n_voxels):
    sets = []
    for _ in range(n_frames):
        m = int(rng.integers(0, n_voxels + 1))
        pick = rng.choice(n_voxels, size=m, replace=False)
        sets.append(sorted([int(v), 0, 0] for v in pick))
    return sets


def gen_select(rng, out_dir):
    for kind in ("sparse", "medium", "dense", "single"):
        for i in range(N_PER_OP):
            if kind == "dense":
                n = int(rng.integers(1, 3000))
                budget = int(rng.integers(1, 700))
                request = {"regime": "dense", "n_frames": n, "budget": budget}
                expected = select_dense(n, budget).frame_indices
            elif kind == "single":
                n = int(rng.integers(1, 500))
                request = {"regime": "single", "n_frames": n}
                expected = select_single(n).frame_indices
            else:
                n = int(rng.integers(1, 13))
                sets = random_voxel_sets(rng, n, int(rng.integers(1, 65)))
                support = VoxelSupport(
                    1.0, [frozenset(map(tuple, s)) for s in sets])
                if kind == "sparse":
                    budget = int(rng.integers(1, n + 1))
                    request = {"regime": "sparse", "frame_voxels": sets,
                               "budget": budget}
                    expected = select_sparse(support, budget).frame_indices
                else:
                    f_min = int(rng.integers(1, n + 1))
                    f_max = int(rng.integers(f_min, n + 1))
                    request = {"regime": "medium", "frame_voxels": sets,
                               "f_min": f_min, "f_max": f_max}
                    expected = select_medium(support, n, SamplerConfig(),
                                             f_min=f_min, f_max=f_max).frame_indices
            dump(out_dir, f"select_{kind}_{i:02d}",
                 {"op": "select", "request": request, "expected": expected})
    # canonical constant: N=1300, T=500 -> 434 indices
    dump(out_dir, "select_dense_constant",
         {"op": "select",
          "request": {"regime": "dense", "n_frames": 1300, "budget": 500},
          "expected": select_dense(1300, 500).frame_indices})


def gen_clean_pipeline(rng, out_dir):
    for i in range(N_PER_OP):
        h, w = int(rng.integers(6, 14)), int(rng.integers(6, 14))
        depth = rng.uniform(0.2, 7.0, (h, w))
        mask = rng.random((h, w)) > 0.15
        rgb = rng.random((h, w, 3))
        sky = None
        if i % 3 == 0:
            sky = (rng.random((h, w)) > 0.8).astype(int)
        config = {"d_min": 0.3, "d_max": 6.0, "theta_rel": 0.15,
                  "erosion_radius": 1, "window": 3, "sigma_spatial": 1.5,
                  "sigma_color": 0.2, "min_area": int(rng.integers(1, 6)),
                  "connectivity": 4 if i % 2 == 0 else 8}
        request = {"depth": depth.tolist(), "mask": mask.astype(int).tolist(),
                   "rgb": rgb.tolist(),
                   "sky": None if sky is None else sky.tolist(),
                   "config": config}
        result = clean_pipeline(DepthFrame(depth, mask), rgb,
                                CleanConfig(**config),
                                sky=None if sky is None else np.asarray(sky))
        expected = {"depth": result.depth.tolist(),
                    "mask": result.mask.astype(int).tolist(),
                    "stage_counts": result.stage_counts}
        dump(out_dir, f"clean_pipeline_{i:02d}",
             {"op": "clean_pipeline", "request": request, "expected": expected})


def build_scene_payload(rng, n_frames=3, h=10, w=12):
    fx = fy = 1.2 * w
    intr = {"fx": fx, "fy": fy, "cx": w / 2.0, "cy": h / 2.0,
            "width": w, "height": h}
    v, u = np.mgrid[0:h, 0:w].astype(np.float64)
    frames = {}
    rots, centers = [], []
    for k in range(n_frames):
        depth = 2.0 + 0.2 * np.sin(u / 3.0 + k) * np.cos(v / 2.0 - k)
        frames[str(k)] = {"depth": depth.tolist(),
                          "mask": np.ones((h, w), int).tolist()}
        rots.append(rotation_about([0, 1, 0], 2.0 * k))
        centers.append([0.1 * k, 0.02 * k, 0.0])
    traj = {"indices": list(range(n_frames)),
            "rotations": [r.tolist() for r in rots],
            "translations": centers, "convention": "c2w"}
    return intr, frames, traj


def payload_to_bundle(intr, frames, traj, cloud):
    from geoeval.geometry import Intrinsics

    return SceneData(
        Intrinsics(**intr),
        {int(k): DepthFrame(np.asarray(v["depth"]), np.asarray(v["mask"], bool))
         for k, v in frames.items()},
        Trajectory(np.asarray(traj["indices"]),
                   np.asarray(traj["rotations"]),
                   np.asarray(traj["translations"]), C2W),
        None if cloud is None else np.asarray(cloud),
    )


def gen_evaluate_scene(rng, out_dir):
    for i in range(N_PER_OP):
        n = 3 + (i % 3)
        intr, frames, traj = build_scene_payload(rng, n)
        gt_bundle = payload_to_bundle(intr, frames, traj, None)
        triples = [(gt_bundle.frames[k], gt_bundle.trajectory.subset([k]).pose(0),
                    gt_bundle.intrinsics) for k in range(n)]
        cloud = fuse_depth_maps(triples, stride=4)
        regime = ("sparse", "medium", "dense")[i % 3]
        index = {"scene_id": f"fx{i}", "dataset": "toy",
                 "regimes": {"sparse": list(range(0, n, 2)),
                             "medium": list(range(n)),
                             "dense": list(range(n))}}
        # prediction: mild multiplicative depth scale, same poses
        scale = 1.0 + 0.1 * float(rng.random())
        pred_frames = {
            k: {"depth": (np.asarray(v["depth"]) * scale).tolist(),
                "mask": v["mask"]}
            for k, v in frames.items()
        }
        metric_scale = i % 2 == 0
        request = {
            "index": index, "regime": regime,
            "gt": {"intrinsics": intr, "frames": frames, "trajectory": traj,
                   "cloud": cloud.tolist()},
            "pred": {"intrinsics": intr, "frames": pred_frames,
                     "trajectory": traj, "metric_scale": metric_scale},
            "method": "binding",
        }
        pred_bundle = payload_to_bundle(intr, pred_frames, traj, None)
        pred_bundle.metric_scale = metric_scale
        expected = evaluate_scene(
            scene_index_from_dict(index), regime,
            payload_to_bundle(intr, frames, traj, cloud.tolist()),
            pred_bundle, EvalConfig(), method="binding").to_dict()
        dump(out_dir, f"evaluate_scene_{i:02d}",
             {"op": "evaluate_scene", "request": request, "expected": expected})


def gen_scene_index(rng, out_dir):
    envs = ("indoor", "outdoor", "both")
    views = ("normal", "egocentric", "wrist", "mixed")
    for i in range(N_PER_OP):
        frames = sorted(map(int, rng.choice(300, size=int(rng.integers(1, 20)),
                                            replace=False)))
        raw = {"scene_id": f"s{i}", "dataset": "toy",
               "tags": {"environment": envs[i % 3], "dynamics": "dynamic",
                        "view_type": views[i % 4], "source": "mixed"},
               "regimes": {"single": [frames[0]], "sparse": frames}}
        expected = scene_index_from_dict(raw).to_dict()
        dump(out_dir, f"scene_index_{i:02d}",
             {"op": "scene_index_roundtrip", "request": {"index": raw},
              "expected": expected})
    # error parity: closed tag vocabulary
    bad = {"scene_id": "s", "dataset": "d",
           "tags": {"environment": "underwater"}, "regimes": {}}
    try:
        scene_index_from_dict(bad)
    except DataError as exc:
        message = str(exc)
    dump(out_dir, "scene_index_err_tag",
         {"op": "scene_index_roundtrip", "request": {"index": bad},
          "expected_error": message})


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="frontend/fixtures")
    ap.add_argument("--seed", type=int, default=97)
    args = ap.parse_args()
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for old in out_dir.glob("*.json"):
        old.unlink()
    rng = np.random.default_rng(args.seed)
    gen_depth_metrics(rng, out_dir)
    gen_select(rng, out_dir)
    gen_clean_pipeline(rng, out_dir)
    gen_evaluate_scene(rng, out_dir)
    gen_scene_index(rng, out_dir)
    n = len(list(out_dir.glob("*.json")))
    print(f"wrote {n} fixtures to {out_dir}")


if __name__ == "__main__":
    main()
