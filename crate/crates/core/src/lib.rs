//! Blind-spot path planning and next-camera handoff prediction.
//!
//! Pixel tracks from fixed cameras become world-frame kinematic states; a
//! beam search over the road graph extends the vehicle's exit state through
//! unobserved road, optionally steered by a pluggable reasoner; the planned
//! path is then matched against camera footprints to rank where the vehicle
//! reappears. A grid-town simulator and an evaluation harness close the loop.

// `!(x > 0.0)` is how validation rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod eval;
pub mod geometry;
pub mod map;
pub mod perception;
pub mod pipeline;
pub mod planner;
pub mod reasoner;
pub mod retrieval;
pub mod sim;

pub use error::{Error, Result};
