use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::beam::{beam_search_from, start_waypoint, BeamHypothesis, StepTrace};
use super::handoff::{handoff_candidates, rescore_with, HandoffCandidate};
use super::profile::DriverProfile;
use super::scoring::{predicted_distance, BeamConfig};
use super::search_graph::SearchGraph;
use crate::error::Result;
use crate::map::{FovPolygon, RoadGraph, WpId};
use crate::perception::ExitState;
use crate::reasoner::Reasoner;

/// Bounds on the coarse step length, in metres.
pub const COARSE_STEP_RANGE: (f64, f64) = (2.0, 25.0);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathPoint {
    pub wp_id: WpId,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisSummary {
    pub path: Vec<WpId>,
    pub score: f64,
    pub frozen: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanResult {
    pub source_cam: String,
    pub reasoner: String,
    pub start_wp: WpId,
    pub exit_time: f64,
    pub speed_m_s: f64,
    /// P*: the top hypothesis at full waypoint resolution.
    pub best_path: Vec<PathPoint>,
    pub best_score: f64,
    pub hypotheses: Vec<HypothesisSummary>,
    /// Cameras entered along P*, best first.
    pub candidates: Vec<HandoffCandidate>,
    /// The first camera each lower-ranked hypothesis enters, in beam order,
    /// when it differs from the best candidate along P*.
    pub alternatives: Vec<String>,
    pub next_cam: Option<String>,
    pub score_trace: Vec<StepTrace>,
}

impl PlanResult {
    /// The best candidate along P*, then the alternatives, then the rest of
    /// P*'s candidates, without repeats.
    pub fn ranked_cams(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        let ids = self.candidates.iter().map(|c| &c.cctv_id);
        for id in ids.clone().take(1).chain(&self.alternatives).chain(ids.skip(1)) {
            if !out.contains(id) {
                out.push(id.clone());
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plan serializes")
    }

    /// Human-readable per-step score breakdown of P*.
    pub fn render_trace(&self) -> String {
        let mut out = String::new();
        for t in &self.score_trace {
            let _ = write!(
                out,
                "Step: {}\n [SCORE_COMP]\n Base: {:.4} | LLM Raw: {:.2}\n LLM_Term: {:.4} | Total: {:.4}\n\nMOM: {:.4} | DIR: {:.4} | SPD: {:.4} | RULE: {:.4}\n Reason:\n [Supervisor] {}\n\n",
                t.step, t.base, t.llm_raw, t.llm_term, t.total, t.mom, t.dir, t.spd, t.rule, t.reason
            );
        }
        out
    }
}

/// Plans from an exit event: beam search on a coarsened copy of `graph`,
/// then handoff ranking along the best path.
pub fn plan(
    exit: &ExitState,
    graph: &RoadGraph,
    fovs: &[FovPolygon],
    profile: &DriverProfile,
    cfg: &BeamConfig,
    reasoner: &dyn Reasoner,
) -> Result<PlanResult> {
    cfg.validate()?;
    let start = start_waypoint(graph, exit.exit_position, cfg.snap_radius_m)?;
    let step = predicted_distance(exit.v_med.max(0.0), 0.0, cfg.step_dt).clamp(COARSE_STEP_RANGE.0, COARSE_STEP_RANGE.1);
    let sg = SearchGraph::coarsen(graph, start, step)?;
    let beam = beam_search_from(exit, &sg, start, profile, cfg, reasoner)?;
    Ok(assemble(exit, &sg, start, &beam, fovs, cfg, reasoner))
}

/// Scores closer than this are a tie.
const TIE_EPS: f64 = 1e-6;

/// Beam indices with each hypothesis's first camera, in beam order except
/// that runs of tied scores are sorted by the first camera's ETA (none
/// last). `beam` must already be sorted by score.
fn tie_ordered(beam: &[BeamHypothesis], first_cam: impl Fn(&BeamHypothesis) -> Option<(String, f64)>) -> Vec<(usize, Option<(String, f64)>)> {
    let mut out: Vec<(usize, Option<(String, f64)>)> = beam.iter().map(&first_cam).enumerate().collect();
    let eta = |f: &Option<(String, f64)>| f.as_ref().map_or(f64::INFINITY, |c| c.1);
    let mut i = 0;
    while i < out.len() {
        let head = beam[out[i].0].score;
        let mut j = i + 1;
        while j < out.len() && beam[out[j].0].score >= head - TIE_EPS {
            j += 1;
        }
        out[i..j].sort_by(|a, b| eta(&a.1).total_cmp(&eta(&b.1)).then(a.0.cmp(&b.0)));
        i = j;
    }
    out
}

fn assemble(
    exit: &ExitState,
    sg: &SearchGraph,
    start: WpId,
    beam: &[BeamHypothesis],
    fovs: &[FovPolygon],
    cfg: &BeamConfig,
    reasoner: &dyn Reasoner,
) -> PlanResult {
    let speed = exit.v_med;
    // Tied hypotheses are ordered by how soon they reach a camera: the
    // fewer branches before the camera, the likelier it is next.
    let order = tie_ordered(beam, |h| {
        handoff_candidates(&sg.polyline(&h.path), fovs, &exit.cctv_id, speed, cfg)
            .into_iter()
            .min_by(|a, b| a.eta_s.total_cmp(&b.eta_s).then_with(|| a.cctv_id.cmp(&b.cctv_id)))
            .map(|c| (c.cctv_id, c.eta_s))
    });
    let best = &beam[order[0].0];
    let ids = sg.expand(&best.path);
    let poly = sg.polyline(&best.path);
    let mut candidates = handoff_candidates(&poly, fovs, &exit.cctv_id, speed, cfg);
    rescore_with(reasoner, &mut candidates);
    let mut alternatives: Vec<String> = Vec::new();
    for (_, first) in &order[1..] {
        if let Some((id, _)) = first {
            if candidates.first().is_none_or(|k| &k.cctv_id != id) && !alternatives.contains(id) {
                alternatives.push(id.clone());
            }
        }
    }
    PlanResult {
        source_cam: exit.cctv_id.clone(),
        reasoner: reasoner.name().to_string(),
        start_wp: start,
        exit_time: exit.exit_time,
        speed_m_s: speed,
        best_path: ids
            .iter()
            .zip(&poly)
            .map(|(id, p)| PathPoint { wp_id: *id, x: p.x, y: p.y })
            .collect(),
        best_score: best.score,
        hypotheses: order
            .iter()
            .map(|(i, _)| &beam[*i])
            .map(|h| HypothesisSummary {
                path: h.path.clone(),
                score: h.score,
                frozen: h.frozen,
            })
            .collect(),
        next_cam: candidates.first().map(|c| c.cctv_id.clone()),
        candidates,
        alternatives,
        score_trace: best.trace.clone(),
    }
}
