"""Per-scene JSON records: frame indices for each density regime plus tags."""

import json
from dataclasses import dataclass, field

from .errors import DataError

REGIMES = ("single", "sparse", "medium", "dense")

TAG_VOCABULARY = {
    "environment": ("indoor", "outdoor", "both"),
    "dynamics": ("static", "dynamic"),
    "view_type": ("normal", "egocentric", "wrist", "mixed"),
    "source": ("real", "simulation", "mixed"),
}

DEFAULT_TAGS = {
    "environment": "indoor",
    "dynamics": "static",
    "view_type": "normal",
    "source": "real",
}


@dataclass
class SceneIndex:
    scene_id: str
    dataset: str
    tags: dict = field(default_factory=lambda: dict(DEFAULT_TAGS))
    regimes: dict = field(default_factory=dict)

    def __post_init__(self):
        _validate_tags(self.tags)
        for name, frames in self.regimes.items():
            _validate_regime(name, frames)

    def to_dict(self):
        return {
            "scene_id": self.scene_id,
            "dataset": self.dataset,
            "tags": {k: self.tags[k] for k in sorted(self.tags)},
            "regimes": {k: list(self.regimes[k]) for k in sorted(self.regimes)},
        }


def _validate_tags(tags):
    for key, value in tags.items():
        if key not in TAG_VOCABULARY:
            raise DataError(f"tags.{key}: unknown tag axis")
        if value not in TAG_VOCABULARY[key]:
            allowed = "/".join(TAG_VOCABULARY[key])
            raise DataError(f"tags.{key}: unknown value {value!r} (expected {allowed})")


def _validate_regime(name, frames):
    if name not in REGIMES:
        raise DataError(f"regimes.{name}: unknown regime")
    if not isinstance(frames, (list, tuple)):
        raise DataError(f"regimes.{name}: expected an array of frame indices")
    prev = -1
    for v in frames:
        if isinstance(v, bool) or not isinstance(v, int):
            raise DataError(f"regimes.{name}: frame indices must be integers")
        if v < 0:
            raise DataError(f"regimes.{name}: negative frame index {v}")
        if v <= prev:
            raise DataError(f"regimes.{name}: indices must be strictly increasing")
        prev = v
    if name == "single" and len(frames) != 1:
        raise DataError(f"regimes.single: expected exactly one index, got {len(frames)}")


def write_scene_index(index, path):
    with open(path, "w", encoding="ascii") as f:
        json.dump(index.to_dict(), f, indent=2, sort_keys=True)
        f.write("\n")


def load_scene_index(path):
    with open(path, "r", encoding="utf-8") as f:
        try:
            raw = json.load(f)
        except json.JSONDecodeError as exc:
            raise DataError(f"{path}: malformed JSON at line {exc.lineno}: {exc.msg}") from exc
    return scene_index_from_dict(raw, where=str(path))


def scene_index_from_dict(raw, where="scene index"):
    if not isinstance(raw, dict):
        raise DataError(f"{where}: top level must be a JSON object")
    allowed = {"scene_id", "dataset", "tags", "regimes"}
    unknown = set(raw) - allowed
    if unknown:
        raise DataError(f"{where}: unknown key {sorted(unknown)[0]!r}")
    for key in ("scene_id", "dataset"):
        if key not in raw or not isinstance(raw[key], str):
            raise DataError(f"{where}: missing or non-string field {key!r}")
    tags = raw.get("tags", {})
    if not isinstance(tags, dict):
        raise DataError(f"{where}: tags must be an object")
    merged = dict(DEFAULT_TAGS)
    merged.update(tags)
    regimes = raw.get("regimes", {})
    if not isinstance(regimes, dict):
        raise DataError(f"{where}: regimes must be an object")
    try:
        return SceneIndex(raw["scene_id"], raw["dataset"], merged, dict(regimes))
    except DataError as exc:
        raise DataError(f"{where}: {exc}") from exc
