use serde::{Deserialize, Serialize};

use super::behavior::{classify_dir8, detect_turn, BehaviorThresholds, Dir8, Turn};
use super::camera_model::{ray_ground_intersect, CameraModel};
use crate::error::{Error, Result};
use crate::geometry::{wrap_pi, Point2};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PixelObservation {
    pub frame: u64,
    pub t: f64,
    pub cctv_id: String,
    pub track_id: u64,
    pub u: f64,
    pub v: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorldSample {
    pub t: f64,
    /// `None` when the pixel ray misses the ground.
    pub position: Option<Point2>,
}

impl WorldSample {
    pub fn valid(&self) -> bool {
        self.position.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KinematicState {
    pub t: f64,
    pub position: Point2,
    pub d: f64,
    pub v: f64,
    pub a: f64,
    pub theta_abs: f64,
    pub theta_rel: f64,
    pub dir8: Dir8,
    pub turn: Turn,
    pub in_fov: bool,
}

/// Below this step length a sample is treated as stationary.
const STATIONARY_EPS: f64 = 1e-6;

pub fn pixel_track_to_world(track: &[PixelObservation], model: &CameraModel, ground_z: f64) -> Vec<WorldSample> {
    track
        .iter()
        .map(|o| {
            let d = model.world_ray(o.u, o.v);
            WorldSample {
                t: o.t,
                position: ray_ground_intersect(&model.c_w, &d, ground_z).ok(),
            }
        })
        .collect()
}

pub(crate) fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.total_cmp(b));
    let n = values.len();
    if n == 0 {
        return 0.0;
    }
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Finite-difference kinematics over the valid samples.
///
/// One state is produced per valid sample. A difference chain restarts at
/// every invalid sample and at every gap longer than three median steps.
/// The first state of a chain borrows speed and heading from its successor;
/// acceleration is zero for the first two states of each chain. Stationary
/// steps keep the most recent valid heading.
pub fn estimate_kinematics(samples: &[WorldSample], theta_cam: f64, th: &BehaviorThresholds) -> Result<Vec<KinematicState>> {
    let valid_count = samples.iter().filter(|s| s.valid()).count();
    if valid_count < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            got: valid_count,
        });
    }
    for w in samples.windows(2) {
        if !(w[1].t > w[0].t) {
            return Err(Error::InvalidInput(format!("timestamps not increasing at t={}", w[1].t)));
        }
    }

    // consecutive valid pairs with no invalid sample between them
    let mut dts = Vec::new();
    for w in samples.windows(2) {
        if w[0].valid() && w[1].valid() {
            dts.push(w[1].t - w[0].t);
        }
    }
    let max_gap = if dts.is_empty() { f64::INFINITY } else { 3.0 * median(&mut dts) };

    let mut out: Vec<KinematicState> = Vec::with_capacity(valid_count);
    // index into `out` where the current chain started
    let mut chain_start = 0usize;
    let mut prev_valid: Option<(f64, Point2)> = None;
    let mut broke = true;
    let mut last_heading: Option<f64> = None;
    for s in samples {
        let Some(p) = s.position else {
            broke = true;
            continue;
        };
        let linked = match prev_valid {
            Some((t0, _)) if !broke => s.t - t0 <= max_gap,
            _ => false,
        };
        let mut st = KinematicState {
            t: s.t,
            position: p,
            d: 0.0,
            v: 0.0,
            a: 0.0,
            theta_abs: 0.0,
            theta_rel: 0.0,
            dir8: Dir8::F,
            turn: Turn::Straight,
            in_fov: true,
        };
        if linked {
            let (t0, p0) = prev_valid.unwrap();
            let dt = s.t - t0;
            let step = p - p0;
            st.d = step.norm();
            st.v = st.d / dt;
            if st.d > STATIONARY_EPS {
                last_heading = Some(step.angle());
            }
            st.theta_abs = last_heading.unwrap_or(f64::NAN);
            let k = out.len() - chain_start;
            if k == 1 {
                // backfill the chain head from its first difference
                let head = &mut out[chain_start];
                head.v = st.v;
                head.theta_abs = st.theta_abs;
            } else {
                st.a = (st.v - out[out.len() - 1].v) / dt;
            }
        } else {
            chain_start = out.len();
            st.theta_abs = last_heading.unwrap_or(f64::NAN);
        }
        out.push(st);
        prev_valid = Some((s.t, p));
        broke = false;
    }

    // headings still unknown (no movement yet) take the first known one
    let first_known = out.iter().map(|s| s.theta_abs).find(|h| !h.is_nan()).unwrap_or(theta_cam);
    let mut prev_rel: Option<f64> = None;
    for st in &mut out {
        if st.theta_abs.is_nan() {
            st.theta_abs = first_known;
        }
        st.theta_rel = wrap_pi(st.theta_abs - theta_cam);
        st.dir8 = classify_dir8(st.theta_rel);
        st.turn = match prev_rel {
            Some(r) => detect_turn(wrap_pi(st.theta_rel - r), th.delta_theta_turn),
            None => Turn::Straight,
        };
        prev_rel = Some(st.theta_rel);
    }
    Ok(out)
}

/// Visit-level turn event: mean relative heading of the last `window`
/// states minus that of the first `window` states, classified against
/// `delta_theta_turn`.
pub fn visit_turn_event(states: &[KinematicState], window: usize, delta_theta_turn: f64) -> Turn {
    if states.len() < 2 {
        return Turn::Straight;
    }
    let w = window.clamp(1, states.len() / 2).max(1);
    let circ_mean = |xs: &[KinematicState]| {
        let (s, c) = xs
            .iter()
            .fold((0.0, 0.0), |(s, c), k| (s + k.theta_rel.sin(), c + k.theta_rel.cos()));
        s.atan2(c)
    };
    let first = circ_mean(&states[..w]);
    let last = circ_mean(&states[states.len() - w..]);
    detect_turn(wrap_pi(last - first), delta_theta_turn)
}
