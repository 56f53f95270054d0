use serde::{Deserialize, Serialize};

use super::scoring::{BeamConfig, MIN_VIEW_STEPS};
use crate::error::{Error, Result};
use crate::geometry::{clip_segment, point_segment_distance, Point2};
use crate::map::FovPolygon;
use crate::reasoner::{HandoffItem, HandoffQuery, Reasoner};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HandoffCandidate {
    #[serde(rename = "id")]
    pub cctv_id: String,
    pub l_ov: f64,
    #[serde(rename = "dwell_s")]
    pub t_dwell: f64,
    pub eta_s: f64,
    #[serde(rename = "angle_deg")]
    pub entry_angle_deg: f64,
    pub speed_m_s: f64,
    pub score: f64,
}

/// One stretch of the path inside a polygon, in arc length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Run {
    pub s0: f64,
    pub s1: f64,
}

/// Maximal inside runs of `path` in `poly`, as arc-length intervals.
pub fn inside_runs(path: &[Point2], poly: &[Point2]) -> Vec<Run> {
    let mut runs: Vec<Run> = Vec::new();
    let mut s = 0.0;
    for w in path.windows(2) {
        let len = w[0].dist(w[1]);
        for (t0, t1) in clip_segment(poly, w[0], w[1]) {
            let (a, b) = (s + t0 * len, s + t1 * len);
            match runs.last_mut() {
                Some(r) if (r.s1 - a).abs() < 1e-9 => r.s1 = b,
                _ => runs.push(Run { s0: a, s1: b }),
            }
        }
        s += len;
    }
    runs
}

pub fn fov_overlap_length(path: &[Point2], fov: &FovPolygon) -> f64 {
    inside_runs(path, &fov.vertices).iter().map(|r| r.s1 - r.s0).sum()
}

/// Time spent inside the FOV with a speed per path segment.
pub fn dwell_time(path: &[Point2], fov: &FovPolygon, speeds: &[f64]) -> Result<f64> {
    if speeds.len() + 1 != path.len() && !(path.len() < 2 && speeds.is_empty()) {
        return Err(Error::InvalidInput(format!(
            "need one speed per segment: {} points, {} speeds",
            path.len(),
            speeds.len()
        )));
    }
    let mut t = 0.0;
    for (w, v) in path.windows(2).zip(speeds) {
        if !(*v > 0.0) {
            return Err(Error::ZeroSpeed);
        }
        let len = w[0].dist(w[1]);
        let inside: f64 = clip_segment(&fov.vertices, w[0], w[1]).iter().map(|(a, b)| (b - a) * len).sum();
        t += inside / v;
    }
    Ok(t)
}

/// Point and unit direction at arc length `s`.
fn at_arc(path: &[Point2], s: f64) -> (Point2, Point2) {
    let mut acc = 0.0;
    for w in path.windows(2) {
        let len = w[0].dist(w[1]);
        if len > 0.0 && acc + len >= s - 1e-12 {
            let t = ((s - acc) / len).clamp(0.0, 1.0);
            return (w[0].lerp(w[1], t), (w[1] - w[0]) * (1.0 / len));
        }
        acc += len;
    }
    let n = path.len();
    let d = if n >= 2 { path[n - 1] - path[n - 2] } else { Point2::new(1.0, 0.0) };
    let l = d.norm().max(1e-300);
    (path[n - 1], d * (1.0 / l))
}

/// Acute angle in degrees between `dir` and the normal of the polygon edge
/// nearest to `p`.
fn crossing_angle(poly: &[Point2], p: Point2, dir: Point2) -> f64 {
    let n = poly.len();
    let (mut best, mut best_d) = (0, f64::INFINITY);
    for i in 0..n {
        let d = point_segment_distance(p, poly[i], poly[(i + 1) % n]);
        if d < best_d {
            best = i;
            best_d = d;
        }
    }
    let e = poly[(best + 1) % n] - poly[best];
    let normal = e.perp() * (1.0 / e.norm().max(1e-300));
    normal.dot(dir).abs().clamp(0.0, 1.0).acos().to_degrees()
}

pub fn angle_fit(angle_deg: f64) -> f64 {
    if (30.0..=60.0).contains(&angle_deg) {
        1.0
    } else if angle_deg < 30.0 {
        (angle_deg / 30.0).max(0.0)
    } else {
        ((90.0 - angle_deg) / 30.0).max(0.0)
    }
}

pub fn score_handoff(c: &HandoffCandidate) -> f64 {
    0.5 * (c.t_dwell / 1.0).min(1.0) + 0.3 * angle_fit(c.entry_angle_deg) + 0.2 * (-c.eta_s / 10.0).exp()
}

/// Cameras the path enters, with dwell, ETA and entry geometry, filtered by
/// the dwell gates and sorted by built-in score (ties by id). The source
/// camera only counts when the path comes back into its view after leaving.
pub fn handoff_candidates(path: &[Point2], fovs: &[FovPolygon], source_cam: &str, speed: f64, cfg: &BeamConfig) -> Vec<HandoffCandidate> {
    if path.len() < 2 || !(speed > 0.0) {
        return Vec::new();
    }
    let mut out = Vec::new();
    for fov in fovs {
        let mut runs = inside_runs(path, &fov.vertices);
        if fov.cctv_id == source_cam && runs.first().is_some_and(|r| r.s0 <= 1e-9) {
            runs.remove(0);
        }
        let Some(first) = runs.first().copied() else { continue };
        let l_ov: f64 = runs.iter().map(|r| r.s1 - r.s0).sum();
        let t_dwell = l_ov / speed;
        if t_dwell < cfg.min_dwell_s || cfg.sim_step_s.is_some_and(|dt| t_dwell < MIN_VIEW_STEPS * dt) {
            continue;
        }
        let (p, dir) = at_arc(path, first.s0);
        let entry_angle_deg = if first.s0 <= 1e-9 {
            0.0
        } else {
            crossing_angle(&fov.vertices, p, dir)
        };
        let mut c = HandoffCandidate {
            cctv_id: fov.cctv_id.clone(),
            l_ov,
            t_dwell,
            eta_s: first.s0 / speed,
            entry_angle_deg,
            speed_m_s: speed,
            score: 0.0,
        };
        c.score = score_handoff(&c);
        out.push(c);
    }
    sort_candidates(&mut out);
    out
}

pub fn sort_candidates(c: &mut [HandoffCandidate]) {
    c.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.cctv_id.cmp(&b.cctv_id)));
}

/// Lets the reasoner replace the built-in scores wholesale; keeps them when
/// it has no opinion.
pub fn rescore_with(reasoner: &dyn Reasoner, cands: &mut [HandoffCandidate]) {
    if cands.is_empty() {
        return;
    }
    let q = HandoffQuery {
        candidates: cands
            .iter()
            .map(|c| HandoffItem {
                id: c.cctv_id.clone(),
                eta_s: c.eta_s,
                dwell_s: c.t_dwell,
                angle_deg: c.entry_angle_deg,
                speed_m_s: c.speed_m_s,
            })
            .collect(),
    };
    if let Some(j) = reasoner.score_cameras(&q).filter(|j| j.answers(&q)) {
        for c in cands.iter_mut() {
            if let Some(s) = j.candidates.iter().find(|s| s.id == c.cctv_id) {
                c.score = s.score;
            }
        }
        sort_candidates(cands);
    }
}
