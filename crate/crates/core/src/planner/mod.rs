//! Driver profiling, beam search over the road graph with reasoner fusion,
//! and next-camera handoff ranking.

pub mod beam;
pub mod handoff;
pub mod plan;
pub mod profile;
pub mod scoring;
pub mod search_graph;

pub use beam::{beam_search, beam_search_from, start_waypoint, BeamHypothesis, StepTrace};
pub use handoff::{dwell_time, fov_overlap_length, handoff_candidates, score_handoff, HandoffCandidate};
pub use plan::{plan, PlanResult};
pub use profile::{driver_profile, percentile_linear, DriverProfile};
pub use scoring::{
    curvature_penalty, feasible, llm_delta, predicted_distance, score_direction, score_speed, symbolic_score,
    BeamConfig,
};
pub use search_graph::SearchGraph;
