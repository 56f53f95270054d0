use serde::{Deserialize, Serialize};

use super::profile::DriverProfile;
use crate::error::{Error, Result};
use crate::geometry::wrap_pi;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BeamConfig {
    pub width: usize,
    pub depth: usize,
    pub step_dt: f64,
    pub eta: f64,
    pub w_d: f64,
    pub w_s: f64,
    pub kappa_curv: f64,
    pub gamma: f64,
    pub v_ref: f64,
    pub sigma_spd: f64,
    pub delta_fusion: f64,
    pub p_floor: f64,
    pub min_dwell_s: f64,
    /// Largest allowed distance from the exit position to the start waypoint.
    pub snap_radius_m: f64,
    /// Per-step factor applied to the exit acceleration.
    pub accel_decay: f64,
    /// Lower bound on the propagated speed. Zero lets a braking exit stall
    /// the search; a turning speed keeps it moving through junctions.
    pub v_floor: f64,
    /// Simulation step, when known, for the 15-step in-view rule.
    pub sim_step_s: Option<f64>,
}

impl Default for BeamConfig {
    fn default() -> Self {
        BeamConfig {
            width: 5,
            depth: 12,
            step_dt: 1.0,
            eta: 2.0,
            w_d: 1.0,
            w_s: 1.0,
            kappa_curv: 0.8,
            gamma: 1.0,
            v_ref: 8.0,
            sigma_spd: 0.5,
            delta_fusion: 1.0,
            p_floor: 0.01,
            min_dwell_s: 0.5,
            snap_radius_m: 10.0,
            accel_decay: 0.5,
            v_floor: 0.0,
            sim_step_s: None,
        }
    }
}

/// Minimum in-view steps for a handoff candidate when the step is known.
pub const MIN_VIEW_STEPS: f64 = 15.0;

impl BeamConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            self.step_dt,
            self.eta,
            self.v_ref,
            self.sigma_spd,
            self.snap_radius_m,
        ];
        let non_negative = [
            self.w_d,
            self.w_s,
            self.kappa_curv,
            self.gamma,
            self.delta_fusion,
            self.min_dwell_s,
            self.accel_decay,
            self.v_floor,
        ];
        if self.width == 0
            || self.depth == 0
            || positive.iter().any(|v| !(*v > 0.0))
            || non_negative.iter().any(|v| !(*v >= 0.0))
            || !(self.p_floor > 0.0 && self.p_floor < 0.5)
            || self.sim_step_s.is_some_and(|s| !(s > 0.0))
        {
            return Err(Error::InvalidInput(format!("invalid beam config {self:?}")));
        }
        Ok(())
    }
}

pub fn predicted_distance(v: f64, a_eff: f64, dt: f64) -> f64 {
    (v * dt + 0.5 * a_eff * dt * dt).max(0.0)
}

pub fn feasible(dist_map: f64, d_pred: f64, eta: f64) -> bool {
    dist_map <= d_pred * eta
}

pub fn score_speed(d_map: f64, d_pred: f64, sigma: f64) -> f64 {
    if d_pred <= 0.0 {
        return 0.0;
    }
    let eps = (d_map - d_pred).abs() / d_pred;
    (-(eps / sigma).powi(2)).exp()
}

pub fn score_direction(heading: f64, edge_bearing: f64) -> f64 {
    (1.0 + wrap_pi(edge_bearing - heading).cos()) / 2.0
}

pub fn curvature_penalty(theta: f64, v: f64, profile: &DriverProfile, cfg: &BeamConfig) -> f64 {
    let kappa_eff = cfg.kappa_curv * (1.0 - 0.5 * profile.aggr);
    kappa_eff * theta * (1.0 + cfg.gamma * v / cfg.v_ref)
}

pub fn symbolic_score(s_dir: f64, s_spd: f64, s_curv: f64, cfg: &BeamConfig) -> f64 {
    cfg.w_d * s_dir + cfg.w_s * s_spd - s_curv
}

/// Log-ratio fusion term; exactly zero at p = 0.5.
pub fn llm_delta(p: f64, cfg: &BeamConfig) -> f64 {
    let p = p.clamp(cfg.p_floor, 1.0 - cfg.p_floor);
    cfg.delta_fusion * (p / 0.5).ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{E, FRAC_PI_2, PI};

    fn prof(aggr: f64) -> DriverProfile {
        DriverProfile {
            aggr,
            ..DriverProfile::neutral()
        }
    }

    #[test]
    fn kinematic_prediction() {
        assert_eq!(predicted_distance(10.0, 2.0, 1.0), 11.0);
        assert_eq!(predicted_distance(0.0, 0.0, 1.0), 0.0);
        assert_eq!(predicted_distance(1.0, -4.0, 1.0), 0.0);
    }

    #[test]
    fn feasibility_gate() {
        assert!(!feasible(23.0, 11.0, 2.0));
        assert!(feasible(11.0, 11.0, 1.0));
        assert!(feasible(0.0, 0.0, 2.0));
        assert!(!feasible(0.1, 0.0, 2.0));
    }

    #[test]
    fn speed_kernel() {
        assert_eq!(score_speed(7.0, 7.0, 0.5), 1.0);
        assert!((score_speed(15.0, 10.0, 0.5) - 1.0 / E).abs() < 1e-15);
        assert_eq!(score_speed(3.0, 0.0, 0.5), 0.0);
    }

    #[test]
    fn direction_kernel() {
        assert!((score_direction(0.3, 0.3) - 1.0).abs() < 1e-15);
        assert!(score_direction(0.0, PI).abs() < 1e-15);
        assert!((score_direction(0.0, FRAC_PI_2) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn curvature() {
        let cfg = BeamConfig {
            kappa_curv: 1.0,
            gamma: 1.0,
            ..Default::default()
        };
        assert_eq!(curvature_penalty(0.0, 5.0, &prof(0.0), &cfg), 0.0);
        assert!((curvature_penalty(0.5, cfg.v_ref, &prof(0.0), &cfg) - 1.0).abs() < 1e-15);
        assert!((curvature_penalty(0.5, cfg.v_ref, &prof(1.0), &cfg) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn symbolic_and_fusion() {
        let cfg = BeamConfig::default();
        assert_eq!(symbolic_score(1.0, 1.0, 0.0, &cfg), 2.0);
        assert_eq!(symbolic_score(0.0, 0.0, 1.0, &cfg), -1.0);
        assert_eq!(llm_delta(0.5, &cfg), 0.0);
        // clip to 0.99, then ln(0.99 / 0.5)
        assert!((llm_delta(1.0, &cfg) - (0.99f64 / 0.5).ln()).abs() < 1e-15);
        assert!((llm_delta(1.0, &cfg) - 0.6831).abs() < 1e-4);
        assert!((llm_delta(0.25, &cfg) - 0.5f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn config_validation() {
        BeamConfig::default().validate().unwrap();
        assert!(BeamConfig { p_floor: 0.5, ..Default::default() }.validate().is_err());
        assert!(BeamConfig { width: 0, ..Default::default() }.validate().is_err());
    }
}
