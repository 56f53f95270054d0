use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::profile::DriverProfile;
use super::scoring::{
    curvature_penalty, feasible, llm_delta, predicted_distance, score_direction, score_speed, symbolic_score,
    BeamConfig,
};
use super::search_graph::SearchGraph;
use crate::error::{Error, Result};
use crate::geometry::{wrap_pi, Point2};
use crate::map::{RoadGraph, WpId};
use crate::perception::{ExitState, Turn};
use crate::reasoner::heuristic::{branch_turn, intent_label};
use crate::reasoner::{BranchInfo, BranchJudgment, BranchQuery, DriverSummary, Reasoner, VehicleState};

/// How far down a branch the reasoner is told it leads, in metres.
pub const BRANCH_LOOKAHEAD_M: f64 = 10.0;

/// One expansion step's score breakdown.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepTrace {
    pub step: usize,
    pub from: WpId,
    pub to: WpId,
    pub base: f64,
    pub llm_raw: f64,
    pub llm_term: f64,
    pub total: f64,
    pub mom: f64,
    pub dir: f64,
    pub spd: f64,
    pub curv: f64,
    pub rule: f64,
    pub v_cur: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeamHypothesis {
    pub path: Vec<WpId>,
    pub score: f64,
    pub v_cur: f64,
    pub a_cur: f64,
    pub heading: f64,
    /// Turn class of the last step that actually turned.
    pub last_turn: Turn,
    pub frozen: bool,
    /// Junctions at which the reasoner has been consulted.
    pub junctions: usize,
    pub trace: Vec<StepTrace>,
}

fn rank(a: &BeamHypothesis, b: &BeamHypothesis) -> Ordering {
    b.score.total_cmp(&a.score).then_with(|| a.path.cmp(&b.path))
}

/// Momentum: 1 when the step continues the turn in progress, 0.5 for
/// straight after straight, otherwise 0.
fn momentum(prev: Turn, now: Turn) -> f64 {
    match (prev, now) {
        (Turn::Straight, Turn::Straight) => 0.5,
        (p, n) if p == n => 1.0,
        _ => 0.0,
    }
}

/// Snaps the exit position to the nearest waypoint within the snap radius.
pub fn start_waypoint(graph: &RoadGraph, p: Point2, radius: f64) -> Result<WpId> {
    match graph.nearest_waypoint(p) {
        Some((id, d)) if d <= radius => Ok(id),
        _ => Err(Error::NoStartWaypoint { x: p.x, y: p.y, radius }),
    }
}

/// Beam search directly on `graph`, starting at the waypoint nearest the
/// exit position.
pub fn beam_search(
    exit: &ExitState,
    graph: &RoadGraph,
    profile: &DriverProfile,
    cfg: &BeamConfig,
    reasoner: &dyn Reasoner,
) -> Result<Vec<BeamHypothesis>> {
    let start = start_waypoint(graph, exit.exit_position, cfg.snap_radius_m)?;
    beam_search_from(exit, &SearchGraph::identity(graph), start, profile, cfg, reasoner)
}

pub fn beam_search_from(
    exit: &ExitState,
    sg: &SearchGraph,
    start: WpId,
    profile: &DriverProfile,
    cfg: &BeamConfig,
    reasoner: &dyn Reasoner,
) -> Result<Vec<BeamHypothesis>> {
    cfg.validate()?;
    profile.validate()?;
    let g = &sg.graph;
    if !g.waypoints.contains_key(&start) {
        return Err(Error::InvalidInput(format!("start waypoint {start} not in search graph")));
    }
    let mut beam = vec![BeamHypothesis {
        path: vec![start],
        score: 0.0,
        v_cur: exit.v_med.max(cfg.v_floor),
        a_cur: exit.a_eff,
        heading: exit.heading,
        last_turn: Turn::Straight,
        frozen: false,
        junctions: 0,
        trace: Vec::new(),
    }];
    let habit = profile.intent_label();

    for step in 0..cfg.depth {
        let mut next: Vec<BeamHypothesis> = Vec::new();
        for h in beam {
            if h.frozen {
                next.push(h);
                continue;
            }
            let u = *h.path.last().unwrap();
            let d_pred = predicted_distance(h.v_cur, h.a_cur, cfg.step_dt).max(cfg.v_floor * cfg.step_dt);
            let options: Vec<_> = g
                .neighbors(u)
                .iter()
                .filter(|e| !h.path.contains(&e.to) && feasible(e.length, d_pred, cfg.eta))
                .collect();
            if options.is_empty() {
                next.push(BeamHypothesis { frozen: true, ..h });
                continue;
            }
            let judged = g.waypoints[&u].is_intersection && options.len() > 1;
            let judgment: Option<BranchJudgment> = if judged {
                let (intent, intent_p) = match profile.prep_intent {
                    Some(t) if h.junctions == 0 => (intent_label(t), 1.0),
                    _ => habit,
                };
                let q = BranchQuery {
                    driver: DriverSummary {
                        aggr: profile.aggr,
                        turn_intent: intent.to_string(),
                        intent_prob: intent_p,
                    },
                    state: VehicleState {
                        speed_m_s: h.v_cur,
                        location: {
                            let p = g.position(u);
                            [p.x, p.y]
                        },
                    },
                    branches: options
                        .iter()
                        .map(|e| {
                            let t = sg.branch_target(u, e.to, BRANCH_LOOKAHEAD_M);
                            BranchInfo {
                                id: e.to,
                                turn_angle_deg: wrap_pi(e.bearing - h.heading).to_degrees(),
                                semantic_tags: vec![if g.waypoints[&e.to].is_intersection {
                                    "Intersection".to_string()
                                } else {
                                    "Road".to_string()
                                }],
                                feasible: true,
                                target: [t.x, t.y],
                            }
                        })
                        .collect(),
                };
                let j = reasoner.judge_branches(&q)?;
                if !j.answers(&q) {
                    return Err(Error::InvalidInput(format!(
                        "reasoner {} did not answer every branch",
                        reasoner.name()
                    )));
                }
                Some(j)
            } else {
                None
            };
            for e in options {
                let turn_rad = wrap_pi(e.bearing - h.heading);
                let theta = turn_rad.abs();
                let dir = score_direction(h.heading, e.bearing);
                let spd = score_speed(e.length, d_pred, cfg.sigma_spd);
                let curv = curvature_penalty(theta, h.v_cur, profile, cfg);
                let base = symbolic_score(dir, spd, curv, cfg);
                let (llm_raw, reason) = match judgment.as_ref().and_then(|j| j.score_of(e.to)) {
                    Some(s) => (s.score, s.reason.clone()),
                    None => (0.5, String::new()),
                };
                let llm_term = llm_delta(llm_raw, cfg);
                let total = base + llm_term;
                let now = branch_turn(turn_rad.to_degrees());
                let mom = momentum(h.last_turn, now);
                let mut path = h.path.clone();
                path.push(e.to);
                let mut trace = h.trace.clone();
                trace.push(StepTrace {
                    step,
                    from: u,
                    to: e.to,
                    base,
                    llm_raw,
                    llm_term,
                    total,
                    mom,
                    dir,
                    spd,
                    curv,
                    rule: 1.0,
                    v_cur: h.v_cur,
                    // A neutral opinion must not leave a fingerprint.
                    reason: if llm_term == 0.0 { "neutral".to_string() } else { reason },
                });
                next.push(BeamHypothesis {
                    path,
                    score: h.score + total,
                    v_cur: (h.v_cur + h.a_cur * cfg.step_dt).clamp(cfg.v_floor.min(2.0 * cfg.v_ref), 2.0 * cfg.v_ref),
                    a_cur: h.a_cur * cfg.accel_decay,
                    heading: e.bearing,
                    last_turn: if now == Turn::Straight { h.last_turn } else { now },
                    frozen: false,
                    junctions: h.junctions + usize::from(judged),
                    trace,
                });
            }
        }
        next.sort_by(rank);
        next.truncate(cfg.width);
        let done = next.iter().all(|h| h.frozen);
        beam = next;
        if done {
            break;
        }
    }
    Ok(beam)
}
