"""Command-line interface.

Subcommands:
    sample     build the per-regime frame index for a scene directory
    eval       score a prediction directory against ground truth
    aggregate  merge per-scene reports into a tag-filtered leaderboard
    clean      run the five-stage depth cleaning pipeline over a directory
    op         machine interface: one JSON request in, one JSON result out
               (used by foreign-language bindings; see README)

Exit codes: 0 ok, 1 usage error, 2 data error, 3 internal error.
"""

import argparse
import json
import sys
import traceback
from pathlib import Path

import numpy as np

from .cleaning import clean_pipeline
from .config import load_config
from .depthmap import DepthFrame
from .errors import DataError
from .formats import read_pfm, write_pfm
from .harness import (STATUS_OK, aggregate, evaluate_scene, load_report,
                      load_scene_data, load_scene_meta, write_report)
from .sampling import (build_voxel_support, select_dense, select_medium,
                       select_single, select_sparse)
from .scene_index import SceneIndex, load_scene_index, write_scene_index

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_INTERNAL = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _load_image(path):
    from PIL import Image

    with Image.open(path) as img:
        arr = np.asarray(img)
    return arr


def _load_rgb01(path):
    arr = _load_image(path).astype(np.float64)
    if arr.ndim == 3 and arr.shape[2] == 4:
        arr = arr[:, :, :3]
    return arr / 255.0


# ---------------------------------------------------------------------------
# sample
# ---------------------------------------------------------------------------


def cmd_sample(args):
    cfg = load_config(args.config)
    scene = load_scene_data(args.scene_dir)
    if scene.trajectory is None:
        raise DataError(f"{args.scene_dir}: missing poses.txt")
    frame_ids = sorted(scene.frames)
    if not frame_ids:
        raise DataError(f"{args.scene_dir}: no depth frames")
    if frame_ids != list(range(len(frame_ids))):
        raise DataError("scene depth frames must be contiguous from 0")
    n = len(frame_ids)
    triples = [(scene.frames[f], scene.trajectory.subset([f]).pose(0),
                scene.intrinsics) for f in frame_ids]

    wanted = ["single", "sparse", "medium", "dense"] if args.regime == "all" \
        else [args.regime]
    regimes = {}
    if "single" in wanted:
        regimes["single"] = select_single(n).frame_indices
    if "dense" in wanted:
        regimes["dense"] = select_dense(n, cfg.sampler.dense_budget).frame_indices
    if "sparse" in wanted:
        support = build_voxel_support(triples, cfg.sampler.voxel_size)
        regimes["sparse"] = select_sparse(
            support, cfg.sampler.sparse_budget).frame_indices
    if "medium" in wanted:
        coarse = build_voxel_support(triples, cfg.sampler.medium_voxel_size())
        regimes["medium"] = select_medium(coarse, n, cfg.sampler).frame_indices

    scene_id, dataset, tags = load_scene_meta(args.scene_dir)
    index = SceneIndex(scene_id, dataset, tags, regimes)
    write_scene_index(index, args.out)
    print(f"wrote {args.out}: " + ", ".join(
        f"{k}={len(v)}" for k, v in sorted(regimes.items())))
    return EXIT_OK


# ---------------------------------------------------------------------------
# eval
# ---------------------------------------------------------------------------


def cmd_eval(args):
    cfg = load_config(args.config)
    index = load_scene_index(args.index)
    if args.regime not in index.regimes:
        raise DataError(f"{args.index}: no regime {args.regime!r} in index")
    frames = index.regimes[args.regime]
    gt = load_scene_data(args.gt_dir, frames=frames)
    pred = load_scene_data(args.pred_dir, frames=frames,
                           intrinsics=gt.intrinsics)
    if args.metric_depth:
        pred.metric_scale = True
    method = args.method or Path(args.pred_dir).name
    report = evaluate_scene(index, args.regime, gt, pred, cfg, method=method)
    write_report(report, args.out)
    print(f"wrote {args.out}: status={report.status}")
    return EXIT_OK if report.status == STATUS_OK else EXIT_DATA


# ---------------------------------------------------------------------------
# aggregate
# ---------------------------------------------------------------------------


def cmd_aggregate(args):
    reports_dir = Path(args.reports)
    if not reports_dir.is_dir():
        raise DataError(f"{reports_dir}: not a directory")
    reports = [load_report(p) for p in sorted(reports_dir.glob("*.json"))]
    tag_filter = {}
    for item in args.filter or []:
        if "=" not in item:
            raise DataError(f"--filter {item!r}: expected key=value")
        key, value = item.split("=", 1)
        tag_filter[key] = value
    board = aggregate(reports, tag_filter)
    text = {"json": board.to_json, "csv": board.to_csv,
            "markdown": board.to_markdown}[args.format]()
    if args.out == "-":
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text, encoding="utf-8")
        print(f"wrote {args.out}: {len(board.cells)} cells")
    return EXIT_OK


# ---------------------------------------------------------------------------
# clean
# ---------------------------------------------------------------------------


def cmd_clean(args):
    cfg = load_config(args.config).clean
    if args.d_min is not None:
        cfg.d_min = args.d_min
    if args.d_max is not None:
        cfg.d_max = args.d_max
    if args.theta_rel is not None:
        cfg.theta_rel = args.theta_rel
    if args.erosion_radius is not None:
        cfg.erosion_radius = args.erosion_radius
    if args.window is not None:
        cfg.window = args.window
    if args.sigma_spatial is not None:
        cfg.sigma_spatial = args.sigma_spatial
    if args.sigma_color is not None:
        cfg.sigma_color = args.sigma_color
    if args.min_area is not None:
        cfg.min_area = args.min_area
    if args.connectivity is not None:
        cfg.connectivity = args.connectivity

    depth_dir = Path(args.depth_dir)
    rgb_dir = Path(args.rgb_dir)
    sky_dir = Path(args.sky_dir) if args.sky_dir else None
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    depth_files = sorted(depth_dir.glob("*.pfm"))
    if not depth_files:
        raise DataError(f"{depth_dir}: no .pfm depth maps")
    summary = {}
    for depth_path in depth_files:
        stem = depth_path.stem
        rgb_path = rgb_dir / f"{stem}.png"
        if not rgb_path.exists():
            raise DataError(f"{rgb_path}: missing RGB for {depth_path.name}")
        frame = read_pfm(depth_path)
        rgb = _load_rgb01(rgb_path)
        sky = None
        if sky_dir is not None:
            sky_path = sky_dir / f"{stem}.png"
            if sky_path.exists():
                sky = _load_image(sky_path)
                if sky.ndim == 3:
                    sky = sky[:, :, 0]
        result = clean_pipeline(frame, rgb, cfg, sky=sky)
        write_pfm(out_dir / depth_path.name, DepthFrame(result.depth, result.mask))
        summary[stem] = result.stage_counts
    with open(out_dir / "clean_summary.json", "w", encoding="ascii") as f:
        json.dump(summary, f, indent=2, sort_keys=True)
        f.write("\n")
    print(f"cleaned {len(depth_files)} frames into {out_dir}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# op: JSON request -> JSON response, the transport for language bindings
# ---------------------------------------------------------------------------


def _op_depth_metrics(params):
    from .depth_metrics import depth_metrics

    pred = DepthFrame(np.asarray(params["pred"], dtype=np.float64),
                      np.asarray(params["pred_mask"], dtype=bool))
    gt = DepthFrame(np.asarray(params["gt"], dtype=np.float64),
                    np.asarray(params["gt_mask"], dtype=bool))
    deltas = tuple(params.get("deltas", (1.03, 1.05, 1.10)))
    return depth_metrics(pred, gt, params.get("mode", "median"), deltas).to_dict()


def _op_select(params):
    name = params.get("regime")
    if name not in ("single", "sparse", "medium", "dense"):
        raise DataError(f"unknown regime {name!r}")
    if name == "dense":
        return select_dense(params["n_frames"], params["budget"]).frame_indices
    if name == "single":
        return select_single(params["n_frames"]).frame_indices
    from .sampling import SamplerConfig, VoxelSupport

    support = VoxelSupport(
        params.get("voxel_size", 1.0),
        [frozenset(map(tuple, fv)) for fv in params["frame_voxels"]],
    )
    if name == "sparse":
        return select_sparse(support, params["budget"]).frame_indices
    return select_medium(support, support.n_frames, SamplerConfig(),
                         f_min=params["f_min"], f_max=params["f_max"]).frame_indices


def _op_clean_pipeline(params):
    from .cleaning import CleanConfig

    frame = DepthFrame(np.asarray(params["depth"], dtype=np.float64),
                       np.asarray(params["mask"], dtype=bool))
    rgb = np.asarray(params["rgb"], dtype=np.float64)
    sky = None
    if params.get("sky") is not None:
        sky = np.asarray(params["sky"])
    cfg = CleanConfig(**params.get("config", {}))
    result = clean_pipeline(frame, rgb, cfg, sky=sky)
    return {
        "depth": result.depth.tolist(),
        "mask": result.mask.astype(int).tolist(),
        "stage_counts": result.stage_counts,
    }


def _op_scene_index_roundtrip(params):
    from .scene_index import scene_index_from_dict

    return scene_index_from_dict(params["index"]).to_dict()


def _op_evaluate_scene(params):
    from .geometry import C2W, Trajectory
    from .scene_index import scene_index_from_dict

    def bundle(raw):
        from .harness import SceneData
        from .geometry import Intrinsics

        intr = Intrinsics(**raw["intrinsics"])
        frames = {
            int(k): DepthFrame(np.asarray(v["depth"], dtype=np.float64),
                               np.asarray(v["mask"], dtype=bool))
            for k, v in raw["frames"].items()
        }
        traj = None
        if raw.get("trajectory") is not None:
            t = raw["trajectory"]
            traj = Trajectory(np.asarray(t["indices"]),
                              np.asarray(t["rotations"], dtype=np.float64),
                              np.asarray(t["translations"], dtype=np.float64),
                              t.get("convention", C2W))
        cloud = None
        if raw.get("cloud") is not None:
            cloud = np.asarray(raw["cloud"], dtype=np.float64)
        return SceneData(intr, frames, traj, cloud,
                         metric_scale=bool(raw.get("metric_scale", False)))

    from .config import config_from_dict

    index = scene_index_from_dict(params["index"])
    cfg = config_from_dict(params.get("config", {}))
    report = evaluate_scene(index, params["regime"], bundle(params["gt"]),
                            bundle(params["pred"]), cfg,
                            method=params.get("method", "pred"))
    return report.to_dict()


_OPS = {
    "depth_metrics": _op_depth_metrics,
    "select": _op_select,
    "clean_pipeline": _op_clean_pipeline,
    "scene_index_roundtrip": _op_scene_index_roundtrip,
    "evaluate_scene": _op_evaluate_scene,
}


def cmd_op(args):
    if args.request == "-":
        raw = json.load(sys.stdin)
    else:
        with open(args.request, "r", encoding="utf-8") as f:
            raw = json.load(f)
    if args.op not in _OPS:
        raise DataError(f"unknown op {args.op!r}")
    try:
        result = _OPS[args.op](raw)
    except KeyError as exc:
        raise DataError(f"request missing field {exc}") from exc
    text = json.dumps({"ok": True, "result": result}, sort_keys=True)
    if args.out == "-":
        sys.stdout.write(text + "\n")
    else:
        Path(args.out).write_text(text + "\n", encoding="ascii")
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser():
    parser = _Parser(prog="geoeval",
                     description="Deterministic 3D-geometry evaluation toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="build per-regime frame indices")
    p.add_argument("--scene-dir", required=True)
    p.add_argument("--regime", default="all",
                   choices=["single", "sparse", "medium", "dense", "all"])
    p.add_argument("--config", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("eval", help="evaluate one prediction bundle")
    p.add_argument("--index", required=True)
    p.add_argument("--gt-dir", required=True)
    p.add_argument("--pred-dir", required=True)
    p.add_argument("--regime", required=True,
                   choices=["single", "sparse", "medium", "dense"])
    p.add_argument("--config", default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--metric-depth", action="store_true",
                   help="also report depth metrics without median alignment")
    p.add_argument("--method", default=None)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("aggregate", help="merge reports into a leaderboard")
    p.add_argument("--reports", required=True)
    p.add_argument("--filter", action="append", metavar="KEY=VALUE")
    p.add_argument("--format", default="json", choices=["json", "csv", "markdown"])
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_aggregate)

    p = sub.add_parser("clean", help="five-stage depth cleaning")
    p.add_argument("--depth-dir", required=True)
    p.add_argument("--rgb-dir", required=True)
    p.add_argument("--sky-dir", default=None)
    p.add_argument("--config", default=None)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--d-min", type=float, default=None)
    p.add_argument("--d-max", type=float, default=None)
    p.add_argument("--theta-rel", type=float, default=None)
    p.add_argument("--erosion-radius", type=int, default=None)
    p.add_argument("--window", type=int, default=None)
    p.add_argument("--sigma-spatial", type=float, default=None)
    p.add_argument("--sigma-color", type=float, default=None)
    p.add_argument("--min-area", type=int, default=None)
    p.add_argument("--connectivity", type=int, default=None, choices=[4, 8])
    p.set_defaults(func=cmd_clean)

    p = sub.add_parser("op", help="machine interface for bindings")
    p.add_argument("op", choices=sorted(_OPS))
    p.add_argument("--request", default="-")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_op)

    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else EXIT_USAGE
    try:
        return args.func(args)
    except DataError as exc:
        print(f"geoeval: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"geoeval: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception:
        traceback.print_exc()
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
