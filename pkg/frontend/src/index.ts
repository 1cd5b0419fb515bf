/**
 * Typed wrappers over the geoeval evaluation toolkit.
 *
 * Each function delegates to the primary implementation through the CLI
 * `op` transport; no math is re-implemented on this side. Results are
 * bitwise identical to direct library calls (the parity suite in tests/
 * asserts this on recorded fixtures).
 */

import { runOp, TransportOptions } from "./transport.js";
import type {
  CleanConfig,
  CleanResult,
  DepthMetrics,
  DepthMode,
  IntMatrix,
  Matrix,
  Regime,
  SceneBundle,
  SceneIndexRecord,
  SceneReport,
  VoxelKey,
} from "./types.js";

export { PrimaryError } from "./transport.js";
export type * from "./types.js";

/** Depth metrics for one frame pair; mode "median" rescales prediction first. */
export function boundDepthMetrics(
  pred: Matrix,
  predMask: IntMatrix,
  gt: Matrix,
  gtMask: IntMatrix,
  mode: DepthMode = "median",
  options?: TransportOptions,
): DepthMetrics {
  return runOp<DepthMetrics>(
    "depth_metrics",
    { pred, pred_mask: predMask, gt, gt_mask: gtMask, mode },
    options,
  );
}

/** Greedy max-coverage selection over per-frame voxel sets, budget K. */
export function boundSelectSparse(
  frameVoxels: VoxelKey[][],
  budget: number,
  options?: TransportOptions,
): number[] {
  return runOp<number[]>(
    "select",
    { regime: "sparse", frame_voxels: frameVoxels, budget },
    options,
  );
}

/** Budgeted greedy coverage with explicit bounds f_min <= |S| <= f_max. */
export function boundSelectMedium(
  frameVoxels: VoxelKey[][],
  fMin: number,
  fMax: number,
  options?: TransportOptions,
): number[] {
  return runOp<number[]>(
    "select",
    { regime: "medium", frame_voxels: frameVoxels, f_min: fMin, f_max: fMax },
    options,
  );
}

/** All frames when N <= T, else stride ceil(N / T). */
export function boundSelectDense(
  nFrames: number,
  budget: number,
  options?: TransportOptions,
): number[] {
  return runOp<number[]>(
    "select",
    { regime: "dense", n_frames: nFrames, budget },
    options,
  );
}

/** The fixed deterministic single frame floor((N - 1) / 2). */
export function boundSelectSingle(
  nFrames: number,
  options?: TransportOptions,
): number[] {
  return runOp<number[]>("select", { regime: "single", n_frames: nFrames }, options);
}

/** Five-stage depth cleaning; returns filtered depth, mask, per-stage counts. */
export function boundCleanPipeline(
  depth: Matrix,
  mask: IntMatrix,
  rgb: number[][][],
  config: CleanConfig = {},
  sky: IntMatrix | null = null,
  options?: TransportOptions,
): CleanResult {
  return runOp<CleanResult>(
    "clean_pipeline",
    { depth, mask, rgb, sky, config },
    options,
  );
}

/** Full per-scene evaluation of a prediction bundle against ground truth. */
export function boundEvaluateScene(
  index: SceneIndexRecord,
  regime: Regime,
  gt: SceneBundle,
  pred: SceneBundle,
  method = "pred",
  options?: TransportOptions,
): SceneReport {
  return runOp<SceneReport>(
    "evaluate_scene",
    { index, regime, gt, pred, method },
    options,
  );
}

/** Validate and canonicalize a scene-index record through the primary loader. */
export function boundSceneIndexRoundtrip(
  index: SceneIndexRecord,
  options?: TransportOptions,
): SceneIndexRecord {
  return runOp<SceneIndexRecord>("scene_index_roundtrip", { index }, options);
}
