use serde::{Deserialize, Serialize};

use super::behavior::Dir8;
use super::kinematics::{median, KinematicState};
use crate::error::{Error, Result};
use crate::geometry::{normalize_yaw, Point2};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExitParams {
    /// Frames summarized at the end of the track.
    pub window: usize,
    pub a_max: f64,
    pub eps_v: f64,
}

impl Default for ExitParams {
    fn default() -> Self {
        ExitParams {
            window: 10,
            a_max: 4.0,
            eps_v: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExitState {
    pub cctv_id: String,
    pub exit_position: Point2,
    pub exit_time: f64,
    pub v_med: f64,
    pub a_eff: f64,
    pub heading: f64,
    pub heading_valid: bool,
    pub window_len: usize,
    pub dir8_recent: Vec<Dir8>,
}

/// Median-robust summary of the last in-view frames of a track.
///
/// Heading is the direction of the summed unit step vectors; when the
/// window barely moves it falls back to the most recent valid heading,
/// which the kinematic states already carry.
pub fn summarize_exit_state(states: &[KinematicState], cctv_id: &str, p: &ExitParams) -> Result<ExitState> {
    if p.window < 3 {
        return Err(Error::InvalidInput(format!("exit window must be >= 3, got {}", p.window)));
    }
    let in_view: Vec<&KinematicState> = states.iter().filter(|s| s.in_fov).collect();
    if in_view.len() < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            got: in_view.len(),
        });
    }
    let win = &in_view[in_view.len().saturating_sub(p.window)..];
    let mut v: Vec<f64> = win.iter().map(|s| s.v).collect();
    let mut a: Vec<f64> = win.iter().map(|s| s.a).collect();
    let v_med = median(&mut v);
    let a_eff = median(&mut a).clamp(-p.a_max, p.a_max);

    let (mut sx, mut sy, mut travelled) = (0.0, 0.0, 0.0);
    for s in win {
        if s.d > 0.0 {
            sx += s.theta_abs.cos();
            sy += s.theta_abs.sin();
            travelled += s.d;
        }
    }
    let mut dts: Vec<f64> = win.windows(2).map(|w| w[1].t - w[0].t).collect();
    let dt = median(&mut dts);
    let last = win[win.len() - 1];
    let min_travel = p.eps_v * win.len() as f64 * dt;
    let heading_valid = travelled >= min_travel && sx.hypot(sy) > 1e-12;
    let heading = if heading_valid { sy.atan2(sx) } else { last.theta_abs };
    Ok(ExitState {
        cctv_id: cctv_id.to_string(),
        exit_position: last.position,
        exit_time: last.t,
        v_med,
        a_eff,
        heading: normalize_yaw(heading),
        heading_valid,
        window_len: win.len(),
        dir8_recent: win.iter().map(|s| s.dir8).collect(),
    })
}
