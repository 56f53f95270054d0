//! Grid-town simulator: town and camera layout, scripted vehicles with
//! anomaly events, forward projection into pixel tracks, ground-truth export.

pub mod cameras;
pub mod export;
pub mod fleet;
pub mod observe;
pub mod town;
pub mod vehicle;

pub use cameras::{place_cameras, CameraParams};
pub use export::{export, read_gt, read_visits};
pub use fleet::{generate_fleet, Fleet, FleetSpec, Scenario};
pub use observe::{derive_visit_sequence, project_observations, Visit, MIN_VISIT_STEPS};
pub use town::{generate_town, Heading4, Town, TownSpec};
pub use vehicle::{simulate, Event, EventKind, GroundTruthRecord, ScenarioSpec};
