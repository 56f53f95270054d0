//! Pixel tracks to world-frame kinematic states and exit summaries.

pub mod behavior;
pub mod camera_model;
pub mod exit;
pub mod io;
pub mod kinematics;

pub use behavior::{classify_behavior, classify_dir8, detect_turn, Behavior, BehaviorThresholds, Dir8, Turn};
pub use camera_model::{intrinsics_from_fov, ray_ground_intersect, CameraModel, Handedness};
pub use exit::{summarize_exit_state, ExitParams, ExitState};
pub use kinematics::{estimate_kinematics, pixel_track_to_world, visit_turn_event, KinematicState, PixelObservation, WorldSample};
