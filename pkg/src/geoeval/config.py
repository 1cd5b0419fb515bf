"""Top-level evaluation configuration, loadable from a JSON file.

The JSON mirrors the dataclasses, e.g.

    {
      "sampler": {"voxel_size": 0.05, "sparse_budget": 12},
      "recon":   {"distance_threshold": 0.05, "voxel_size": 0.02},
      "clean":   {"d_min": 0.05, "d_max": 5.0},
      "pose_thresholds": [3, 5],
      "auc_thresholds": [5, 15, 30],
      "delta_thresholds": [1.03, 1.05, 1.10]
    }

Missing sections keep their defaults; unknown keys are rejected.
"""

import dataclasses
import json
from dataclasses import dataclass, field

from .cleaning import CleanConfig
from .errors import DataError
from .recon_metrics import ReconConfig
from .sampling import SamplerConfig


@dataclass
class EvalConfig:
    sampler: SamplerConfig = field(default_factory=SamplerConfig)
    recon: ReconConfig = field(default_factory=ReconConfig)
    clean: CleanConfig = field(default_factory=CleanConfig)
    pose_thresholds: list = field(default_factory=lambda: [3.0, 5.0])
    auc_thresholds: list = field(default_factory=lambda: [5.0, 15.0, 30.0])
    delta_thresholds: list = field(default_factory=lambda: [1.03, 1.05, 1.10])


def _build(cls, raw, where):
    if not isinstance(raw, dict):
        raise DataError(f"{where}: expected an object")
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = set(raw) - names
    if unknown:
        raise DataError(f"{where}: unknown key {sorted(unknown)[0]!r}")
    return cls(**raw)


def config_from_dict(raw, where="config"):
    if not isinstance(raw, dict):
        raise DataError(f"{where}: expected an object")
    known = {"sampler", "recon", "clean", "pose_thresholds", "auc_thresholds",
             "delta_thresholds"}
    unknown = set(raw) - known
    if unknown:
        raise DataError(f"{where}: unknown key {sorted(unknown)[0]!r}")
    cfg = EvalConfig(
        sampler=_build(SamplerConfig, raw.get("sampler", {}), f"{where}.sampler"),
        recon=_build(ReconConfig, raw.get("recon", {}), f"{where}.recon"),
        clean=_build(CleanConfig, raw.get("clean", {}), f"{where}.clean"),
    )
    for key in ("pose_thresholds", "auc_thresholds", "delta_thresholds"):
        if key in raw:
            vals = raw[key]
            if not isinstance(vals, list) or not vals or not all(
                isinstance(v, (int, float)) and v > 0 for v in vals
            ):
                raise DataError(f"{where}.{key}: expected a non-empty list of positives")
            setattr(cfg, key, [float(v) for v in vals])
    return cfg


def load_config(path=None):
    """Read a config file; None gives all defaults."""
    if path is None:
        return EvalConfig()
    with open(path, "r", encoding="utf-8") as f:
        try:
            raw = json.load(f)
        except json.JSONDecodeError as exc:
            raise DataError(f"{path}: malformed JSON at line {exc.lineno}: {exc.msg}") from exc
    try:
        return config_from_dict(raw, where=str(path))
    except TypeError as exc:
        raise DataError(f"{path}: {exc}") from exc
