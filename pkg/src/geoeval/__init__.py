"""geoeval: deterministic evaluation toolkit for 3D geometry predictions.

Frame sampling across four view-density regimes, pairwise camera metrics,
Sim(3)-aligned trajectory metrics, depth metrics with median alignment,
exact Chamfer reconstruction metrics, a five-stage depth cleaning pipeline,
and a scene-index harness that aggregates per-scene reports into
tag-filterable leaderboards.
"""

from .cleaning import (CleanConfig, CleanResult, apply_sky_mask,
                       bilateral_filter, clean_pipeline, clip_range,
                       remove_flying_points, remove_small_components)
from .config import EvalConfig, load_config
from .depth_metrics import (DepthMetrics, depth_metrics, median_scale,
                            pooled_depth_metrics)
from .depthmap import DepthFrame, unproject
from .errors import DataError
from .formats import (read_pfm, read_ply, read_pose_file, write_pfm,
                      write_ply, write_pose_file)
from .geometry import (C2W, W2C, Intrinsics, Pose, Sim3, Trajectory,
                       apply_sim3, camera_center, geodesic_angle_deg,
                       relative_rotation, relative_translation_direction,
                       sim3_compose, sim3_identity, sim3_inverse, solve_sim3)
from .harness import (Leaderboard, SceneData, SceneReport, aggregate,
                      evaluate_scene, load_report, load_scene_data,
                      write_report)
from .pose_metrics import PairErrorSet, accuracy_at, auc, pairwise_errors
from .recon_metrics import (ReconConfig, ReconMetrics, chamfer_stats,
                            crop_to_bbox, fuse_depth_maps, recon_metrics,
                            voxel_downsample)
from .sampling import (RegimeSelection, SamplerConfig, VoxelSupport,
                       build_voxel_support, select_dense, select_medium,
                       select_single, select_sparse)
from .scene_index import SceneIndex, load_scene_index, write_scene_index
from .traj_metrics import (TrajectoryReport, align_trajectory, ate, rpe,
                           trajectory_report)

__version__ = "0.1.0"
