"""Scene evaluation orchestration and tag-filtered leaderboard aggregation.

A scene lives on disk as

    scene_dir/
      meta.json          optional: {"scene_id", "dataset", "tags", "metric_scale"}
      intrinsics.json    {"fx", "fy", "cx", "cy", "width", "height"}
      poses.txt          camera-to-world pose file (one line per frame)
      depth/<frame>.pfm  frame id parsed from the file stem
      confidence/<frame>.pfm   optional
      pointcloud.ply     optional (required on the GT side for recon metrics)

Prediction directories follow the same layout. Evaluation never mutates
inputs; each scene is independent, so scenes can be processed by any number
of workers in parallel.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .config import EvalConfig
from .depth_metrics import (MODE_MEDIAN, MODE_METRIC, depth_metrics,
                            pooled_depth_metrics)
from .errors import DataError
from .formats import read_pfm, read_ply, read_pose_file
from .geometry import Intrinsics, Trajectory
from .pose_metrics import pairwise_errors, pose_metric_table
from .recon_metrics import fuse_depth_maps, recon_metrics
from .scene_index import DEFAULT_TAGS, _validate_tags
from .traj_metrics import trajectory_report

STATUS_OK = "ok"
STATUS_ERROR = "error"
STATUS_OOM = "oom"
STATUS_TIMEOUT = "timeout"
STATUSES = (STATUS_OK, STATUS_ERROR, STATUS_OOM, STATUS_TIMEOUT)

TRAJECTORY_REGIMES = ("medium", "dense")  # continuous sequences only


@dataclass
class SceneData:
    """In-memory bundle of everything a scene evaluation consumes."""

    intrinsics: Intrinsics
    frames: dict                     # frame index -> DepthFrame
    trajectory: Trajectory = None    # any convention
    cloud: np.ndarray = None         # (M, 3) world points
    confidences: dict = None         # frame index -> float map
    metric_scale: bool = False


@dataclass
class SceneReport:
    scene_id: str
    regime: str
    status: str = STATUS_OK
    method: str = "pred"
    dataset: str = ""
    tags: dict = field(default_factory=dict)
    depth: dict = None          # pooled median-aligned metrics
    depth_metric: dict = None   # pooled metric-scale metrics (no alignment)
    depth_per_frame: dict = None
    camera: dict = None
    trajectory: dict = None
    recon: dict = None
    missing_frames: list = None
    message: str = None

    def to_dict(self):
        out = {
            "scene_id": self.scene_id,
            "regime": self.regime,
            "status": self.status,
            "method": self.method,
            "dataset": self.dataset,
            "tags": dict(self.tags),
        }
        for key in ("depth", "depth_metric", "depth_per_frame", "camera",
                    "trajectory", "recon", "missing_frames", "message"):
            val = getattr(self, key)
            if val is not None:
                out[key] = val
        return out


def report_from_dict(raw, where="report"):
    if not isinstance(raw, dict):
        raise DataError(f"{where}: expected an object")
    for key in ("scene_id", "regime", "status"):
        if key not in raw:
            raise DataError(f"{where}: missing field {key!r}")
    if raw["status"] not in STATUSES:
        raise DataError(f"{where}: unknown status {raw['status']!r}")
    rep = SceneReport(
        scene_id=raw["scene_id"],
        regime=raw["regime"],
        status=raw["status"],
        method=raw.get("method", "pred"),
        dataset=raw.get("dataset", ""),
        tags=raw.get("tags", {}),
    )
    if rep.status != STATUS_OK:
        return rep  # metric fields of failed scenes are ignored
    for key in ("depth", "depth_metric", "depth_per_frame", "camera",
                "trajectory", "recon"):
        if key in raw:
            setattr(rep, key, raw[key])
    return rep


def write_report(report, path):
    with open(path, "w", encoding="ascii") as f:
        json.dump(report.to_dict(), f, indent=2, sort_keys=True)
        f.write("\n")


def load_report(path):
    with open(path, "r", encoding="utf-8") as f:
        try:
            raw = json.load(f)
        except json.JSONDecodeError as exc:
            raise DataError(f"{path}: malformed JSON at line {exc.lineno}: {exc.msg}") from exc
    return report_from_dict(raw, where=str(path))


# ---------------------------------------------------------------------------
# Scene evaluation
# ---------------------------------------------------------------------------


def evaluate_scene(index, regime, gt, pred, cfg=None, method="pred"):
    """Score one prediction bundle against ground truth for one regime.

    Depth metrics (per frame and pooled) always run; pairwise camera metrics
    need at least two frames; trajectory and reconstruction metrics run for
    the continuous regimes (medium, dense) only. Reconstruction requires a
    GT point cloud; the predicted cloud is fused from predicted depths when
    the bundle does not carry one.

    Missing predicted frames yield a report with status "error" and the
    missing index list; OOM/timeout statuses are recorded by the caller.
    """
    cfg = cfg or EvalConfig()
    if regime not in index.regimes:
        raise DataError(f"scene index has no regime {regime!r}")
    frames = index.regimes[regime]

    report = SceneReport(index.scene_id, regime, method=method,
                         dataset=index.dataset, tags=dict(index.tags))

    for f in frames:
        if f not in gt.frames:
            raise DataError(f"ground truth missing frame {f}")
    if gt.trajectory is None:
        raise DataError("ground truth bundle lacks a trajectory")
    missing = [f for f in frames if f not in pred.frames]
    if pred.trajectory is None:
        missing = list(frames)
    else:
        have = set(int(i) for i in pred.trajectory.indices)
        missing = sorted(set(missing) | {f for f in frames if f not in have})
    if missing:
        report.status = STATUS_ERROR
        report.missing_frames = missing
        report.message = f"prediction missing frames {missing}"
        return report

    deltas = tuple(cfg.delta_thresholds)
    pairs = [(pred.frames[f], gt.frames[f]) for f in frames]
    report.depth = pooled_depth_metrics(pairs, MODE_MEDIAN, deltas).to_dict()
    report.depth_per_frame = {
        str(f): depth_metrics(pred.frames[f], gt.frames[f], MODE_MEDIAN, deltas).to_dict()
        for f in frames
    }
    if pred.metric_scale:
        report.depth_metric = pooled_depth_metrics(pairs, MODE_METRIC, deltas).to_dict()

    if len(frames) >= 2:
        gt_traj = gt.trajectory.subset(frames)
        pred_traj = pred.trajectory.subset(frames)
        errs = pairwise_errors(pred_traj, gt_traj)
        report.camera = pose_metric_table(
            errs, cfg.pose_thresholds, cfg.auc_thresholds)

        if regime in TRAJECTORY_REGIMES and len(frames) >= 3:
            report.trajectory = trajectory_report(pred_traj, gt_traj).to_dict()

    if regime in TRAJECTORY_REGIMES and gt.cloud is not None:
        pred_cloud = pred.cloud
        if pred_cloud is None:
            triples = [(pred.frames[f], pred.trajectory.subset([f]).pose(0),
                        pred.intrinsics) for f in frames]
            confs = None
            if pred.confidences is not None:
                confs = [pred.confidences.get(f) for f in frames]
            pred_cloud = fuse_depth_maps(
                triples, stride=cfg.recon.fuse_stride, confidences=confs,
                min_confidence=cfg.recon.min_confidence)
        report.recon = recon_metrics(pred_cloud, gt.cloud, cfg.recon).to_dict()

    return report


# ---------------------------------------------------------------------------
# Disk loading
# ---------------------------------------------------------------------------


def read_intrinsics(path):
    with open(path, "r", encoding="utf-8") as f:
        raw = json.load(f)
    needed = ("fx", "fy", "cx", "cy", "width", "height")
    for key in needed:
        if key not in raw:
            raise DataError(f"{path}: missing intrinsics field {key!r}")
    return Intrinsics(float(raw["fx"]), float(raw["fy"]), float(raw["cx"]),
                      float(raw["cy"]), int(raw["width"]), int(raw["height"]))


def write_intrinsics(intr, path):
    with open(path, "w", encoding="ascii") as f:
        json.dump({"fx": intr.fx, "fy": intr.fy, "cx": intr.cx, "cy": intr.cy,
                   "width": intr.width, "height": intr.height}, f, indent=2,
                  sort_keys=True)
        f.write("\n")


def _frame_id(path):
    try:
        return int(path.stem)
    except ValueError as exc:
        raise DataError(f"{path}: file stem is not a frame index") from exc


def load_scene_data(scene_dir, frames=None, intrinsics=None):
    """Load a scene directory into a SceneData bundle.

    `frames` restricts the depth maps that are read (frame index list);
    `intrinsics` overrides the on-disk intrinsics (predictions usually share
    the GT camera model).
    """
    root = Path(scene_dir)
    if not root.is_dir():
        raise DataError(f"{root}: not a directory")
    if intrinsics is None:
        intr_path = root / "intrinsics.json"
        if not intr_path.exists():
            raise DataError(f"{root}: missing intrinsics.json")
        intrinsics = read_intrinsics(intr_path)

    wanted = None if frames is None else {int(f) for f in frames}
    depth_dir = root / "depth"
    frame_map = {}
    if depth_dir.is_dir():
        for p in sorted(depth_dir.glob("*.pfm")):
            fid = _frame_id(p)
            if wanted is None or fid in wanted:
                frame_map[fid] = read_pfm(p)

    trajectory = None
    pose_path = root / "poses.txt"
    if pose_path.exists():
        trajectory, _ = read_pose_file(pose_path)

    cloud = None
    cloud_path = root / "pointcloud.ply"
    if cloud_path.exists():
        cloud = read_ply(cloud_path)

    confidences = None
    conf_dir = root / "confidence"
    if conf_dir.is_dir():
        confidences = {}
        for p in sorted(conf_dir.glob("*.pfm")):
            fid = _frame_id(p)
            if wanted is None or fid in wanted:
                frame = read_pfm(p)
                confidences[fid] = frame.depth

    metric_scale = False
    meta_path = root / "meta.json"
    if meta_path.exists():
        with open(meta_path, "r", encoding="utf-8") as f:
            meta = json.load(f)
        metric_scale = bool(meta.get("metric_scale", False))

    return SceneData(intrinsics, frame_map, trajectory, cloud, confidences,
                     metric_scale)


def load_scene_meta(scene_dir):
    """(scene_id, dataset, tags) for a scene directory, with defaults."""
    root = Path(scene_dir)
    scene_id, dataset, tags = root.name, "unknown", dict(DEFAULT_TAGS)
    meta_path = root / "meta.json"
    if meta_path.exists():
        with open(meta_path, "r", encoding="utf-8") as f:
            meta = json.load(f)
        scene_id = meta.get("scene_id", scene_id)
        dataset = meta.get("dataset", dataset)
        tags.update(meta.get("tags", {}))
        _validate_tags(tags)
    return scene_id, dataset, tags


# ---------------------------------------------------------------------------
# Aggregation
# ---------------------------------------------------------------------------

_METRIC_FAMILIES = (
    ("depth", "depth"),
    ("depth_metric", "depth_metric"),
    ("camera", "camera"),
    ("trajectory", "traj"),
    ("recon", "recon"),
)
_SKIP_CELL_KEYS = {"n_pixels", "alignment"}


def _flatten(report):
    cells = {}
    for attr, prefix in _METRIC_FAMILIES:
        values = getattr(report, attr)
        if not values:
            continue
        for key, val in values.items():
            if key in _SKIP_CELL_KEYS or not isinstance(val, (int, float)):
                continue
            cells[f"{prefix}/{key}"] = float(val)
    return cells


@dataclass
class LeaderboardCell:
    method: str
    regime: str
    metric: str
    mean: float
    count: int       # scenes contributing to the mean
    excluded: int    # scenes dropped for status != ok

    @property
    def partial(self):
        return self.excluded > 0


@dataclass
class Leaderboard:
    cells: list
    tag_filter: dict = field(default_factory=dict)

    def to_json(self):
        return json.dumps(
            {
                "filter": {k: self.tag_filter[k] for k in sorted(self.tag_filter)},
                "cells": [
                    {
                        "method": c.method, "regime": c.regime, "metric": c.metric,
                        "mean": c.mean, "count": c.count, "excluded": c.excluded,
                        "partial": c.partial,
                    }
                    for c in self.cells
                ],
            },
            indent=2, sort_keys=True,
        ) + "\n"

    def to_csv(self):
        lines = ["method,regime,metric,mean,count,excluded,partial"]
        for c in self.cells:
            lines.append(
                f"{c.method},{c.regime},{c.metric},{c.mean:.17g},"
                f"{c.count},{c.excluded},{str(c.partial).lower()}"
            )
        return "\n".join(lines) + "\n"

    def to_markdown(self):
        # partial averages are parenthesized, mirroring the OOM convention
        lines = [
            "| method | regime | metric | mean | scenes | excluded |",
            "| --- | --- | --- | --- | --- | --- |",
        ]
        for c in self.cells:
            mean = f"({c.mean:.4f})" if c.partial else f"{c.mean:.4f}"
            lines.append(
                f"| {c.method} | {c.regime} | {c.metric} | {mean} "
                f"| {c.count} | {c.excluded} |"
            )
        return "\n".join(lines) + "\n"


def aggregate(reports, tag_filter=None):
    """Unweighted per-metric means over ok scenes matching the tag filter.

    Scenes with status oom/timeout/error never contribute a number; cells in
    groups containing such scenes carry their count and are flagged partial.
    Row order is deterministic: (method, regime, metric) lexicographic.
    """
    tag_filter = dict(tag_filter or {})
    for key, value in tag_filter.items():
        if key not in ("dataset", "scene_id") :
            _validate_tags({key: value})

    def matches(rep):
        for key, value in tag_filter.items():
            if key == "dataset":
                if rep.dataset != value:
                    return False
            elif key == "scene_id":
                if rep.scene_id != value:
                    return False
            elif rep.tags.get(key) != value:
                return False
        return True

    groups = {}
    for rep in reports:
        if not matches(rep):
            continue
        groups.setdefault((rep.method, rep.regime), []).append(rep)

    cells = []
    for (method, regime) in sorted(groups):
        members = groups[(method, regime)]
        excluded = sum(1 for r in members if r.status != STATUS_OK)
        sums = {}
        counts = {}
        for rep in members:
            if rep.status != STATUS_OK:
                continue
            for metric, value in _flatten(rep).items():
                sums[metric] = sums.get(metric, 0.0) + value
                counts[metric] = counts.get(metric, 0) + 1
        for metric in sorted(sums):
            cells.append(LeaderboardCell(
                method, regime, metric, sums[metric] / counts[metric],
                counts[metric], excluded))
    return Leaderboard(cells, tag_filter)
