/** Result records marshaled from the primary toolkit (plain JSON shapes). */

export type Matrix = number[][];
export type IntMatrix = number[][];

export interface DepthMetrics {
  abs_rel: number;
  sq_rel: number;
  rmse: number;
  log_rmse: number;
  n_pixels: number;
  /** delta_<tau> inlier fractions, e.g. "delta_1.03". */
  [key: `delta_${string}`]: number;
}

export type DepthMode = "median" | "metric";

export interface CleanConfig {
  d_min?: number;
  d_max?: number;
  theta_rel?: number;
  erosion_radius?: number;
  window?: number;
  sigma_spatial?: number;
  sigma_color?: number;
  min_area?: number;
  connectivity?: 4 | 8;
}

export interface CleanResult {
  depth: Matrix;
  mask: IntMatrix;
  stage_counts: Record<string, number>;
}

export interface Intrinsics {
  fx: number;
  fy: number;
  cx: number;
  cy: number;
  width: number;
  height: number;
}

export interface DepthFramePayload {
  depth: Matrix;
  mask: IntMatrix;
}

export interface TrajectoryPayload {
  indices: number[];
  rotations: Matrix[];
  translations: number[][];
  convention?: "w2c" | "c2w";
}

export interface SceneBundle {
  intrinsics: Intrinsics;
  frames: Record<string, DepthFramePayload>;
  trajectory?: TrajectoryPayload;
  cloud?: number[][];
  metric_scale?: boolean;
}

export interface SceneTags {
  environment?: "indoor" | "outdoor" | "both";
  dynamics?: "static" | "dynamic";
  view_type?: "normal" | "egocentric" | "wrist" | "mixed";
  source?: "real" | "simulation" | "mixed";
}

export interface SceneIndexRecord {
  scene_id: string;
  dataset: string;
  tags?: SceneTags;
  regimes?: Partial<Record<"single" | "sparse" | "medium" | "dense", number[]>>;
}

export type Regime = "single" | "sparse" | "medium" | "dense";

export interface SceneReport {
  scene_id: string;
  regime: string;
  status: "ok" | "error" | "oom" | "timeout";
  method: string;
  dataset: string;
  tags: Record<string, string>;
  depth?: Record<string, number>;
  depth_metric?: Record<string, number>;
  depth_per_frame?: Record<string, Record<string, number>>;
  camera?: Record<string, number>;
  trajectory?: {
    ate: number;
    rpe_t: number;
    rpe_r: number;
    alignment: { scale: number; rotation: number[]; translation: number[] };
  };
  recon?: Record<string, number>;
  missing_frames?: number[];
  message?: string;
}

/** An integer voxel key (i, j, k) as produced by floor(point / voxel). */
export type VoxelKey = [number, number, number];
