use std::collections::{BTreeSet, VecDeque};
use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::{PredictionCase, TrajectoryPair};
use crate::geometry::{wrap_pi, Point2};
use crate::map::{CameraSpec, FovPolygon, RoadGraph, WpId};
use crate::perception::{
    detect_turn, estimate_kinematics, pixel_track_to_world, summarize_exit_state, visit_turn_event, BehaviorThresholds, CameraModel,
    ExitParams, ExitState, KinematicState, PixelObservation, Turn, WorldSample,
};
use crate::planner::{driver_profile, plan, start_waypoint, BeamConfig, DriverProfile, PlanResult};
use crate::reasoner::Reasoner;
use crate::sim::{GroundTruthRecord, Scenario, Visit};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CaseConfig {
    pub thresholds: BehaviorThresholds,
    pub exit: ExitParams,
    pub beam: BeamConfig,
    /// Frames averaged at each end of a visit for its turn event.
    pub turn_window: usize,
    pub top_k: usize,
    /// Floor on the speed used to time-parameterize the predicted path.
    pub min_speed: f64,
    /// Exit heading offset from the road axis, in radians, read as a
    /// vehicle preparing to turn.
    pub prep_threshold: f64,
}

impl Default for CaseConfig {
    fn default() -> Self {
        CaseConfig {
            thresholds: BehaviorThresholds::default(),
            exit: ExitParams::default(),
            beam: BeamConfig::default(),
            turn_window: 5,
            top_k: 3,
            min_speed: 0.5,
            prep_threshold: 0.03,
        }
    }
}

impl CaseConfig {
    pub fn validate(&self) -> Result<()> {
        self.thresholds.validate()?;
        self.beam.validate()?;
        if self.top_k == 0 || self.turn_window == 0 || !(self.min_speed > 0.0) || !(self.prep_threshold > 0.0) {
            return Err(Error::InvalidInput(
                "top_k, turn_window, min_speed and prep_threshold must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// The handoff a scenario is scored on: the last pair of consecutive visits.
pub fn handoff_visits(sc: &Scenario) -> Option<(usize, &Visit, &Visit)> {
    let n = sc.visits.len();
    (n >= 2).then(|| (n - 2, &sc.visits[n - 2], &sc.visits[n - 1]))
}

/// Kinematic states of one camera visit, recovered from its pixel track.
pub fn track_visit(
    obs: &[PixelObservation],
    cam: &CameraSpec,
    visit: &Visit,
    th: &BehaviorThresholds,
) -> Result<Vec<KinematicState>> {
    Ok(track_visit_samples(obs, cam, visit, th)?.1)
}

/// [`track_visit`] that also returns the ground-plane samples.
pub fn track_visit_samples(
    obs: &[PixelObservation],
    cam: &CameraSpec,
    visit: &Visit,
    th: &BehaviorThresholds,
) -> Result<(Vec<WorldSample>, Vec<KinematicState>)> {
    let track: Vec<PixelObservation> = obs
        .iter()
        .filter(|o| o.cctv_id == cam.cctv_id && (visit.first_frame..=visit.last_frame).contains(&o.frame))
        .cloned()
        .collect();
    let model = CameraModel::from_spec(cam)?;
    let samples = pixel_track_to_world(&track, &model, 0.0);
    let states = estimate_kinematics(&samples, cam.yaw.to_radians(), th)?;
    Ok((samples, states))
}

pub fn camera<'a>(cams: &'a [CameraSpec], id: &str) -> Result<&'a CameraSpec> {
    cams.iter()
        .find(|c| c.cctv_id == id)
        .ok_or_else(|| Error::InvalidInput(format!("unknown camera {id}")))
}

/// What the planner needs from one handoff: where the vehicle left the
/// source camera and how it has been driving.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Handoff {
    /// Index of the source visit.
    pub source: usize,
    pub exit: ExitState,
    pub profile: DriverProfile,
}

/// Exit state of the source visit and a profile built from every visit up
/// to and including it, with the exit's lane drift as the prep intent.
pub fn exit_and_profile(
    sc: &Scenario,
    cams: &[CameraSpec],
    graph: &RoadGraph,
    source: usize,
    cfg: &CaseConfig,
) -> Result<Handoff> {
    let states = sc.visits[..=source]
        .iter()
        .map(|v| track_visit(&sc.observations, camera(cams, &v.cctv_id)?, v, &cfg.thresholds))
        .collect::<Result<Vec<_>>>()?;
    handoff_from_states(&states, &sc.visits[source].cctv_id, graph, cfg)
}

/// [`exit_and_profile`] on already tracked visits; the last one is the
/// source.
pub fn handoff_from_states(
    visits: &[Vec<KinematicState>],
    source_cam: &str,
    graph: &RoadGraph,
    cfg: &CaseConfig,
) -> Result<Handoff> {
    let last = visits
        .last()
        .ok_or_else(|| Error::InvalidInput("handoff needs at least one tracked visit".into()))?;
    let acc: Vec<f64> = visits.iter().flatten().map(|s| s.a).collect();
    let turns: Vec<Turn> = visits
        .iter()
        .map(|st| visit_turn_event(st, cfg.turn_window, cfg.thresholds.delta_theta_turn))
        .collect();
    let exit = summarize_exit_state(last, source_cam, &cfg.exit)?;
    let mut profile = driver_profile(&acc, cfg.exit.a_max, &turns)?;
    profile.prep_intent = Some(lane_drift_intent(&exit, graph, cfg.prep_threshold));
    Ok(Handoff {
        source: visits.len() - 1,
        exit,
        profile,
    })
}

/// Turn the vehicle is drifting toward as it leaves: the exit heading
/// against the axis of the nearest ordinary road waypoint, taken in
/// whichever direction the vehicle travels.
pub fn lane_drift_intent(exit: &ExitState, graph: &RoadGraph, threshold: f64) -> Turn {
    if !exit.heading_valid {
        return Turn::Straight;
    }
    let road = graph
        .waypoints
        .values()
        .filter(|w| !w.is_intersection)
        .min_by(|a, b| {
            let (da, db) = (a.position.dist(exit.exit_position), b.position.dist(exit.exit_position));
            da.total_cmp(&db).then(a.wp_id.cmp(&b.wp_id))
        });
    let Some(w) = road else { return Turn::Straight };
    let off = wrap_pi(exit.heading - w.yaw);
    let off = if off.abs() > FRAC_PI_2 { wrap_pi(off + PI) } else { off };
    detect_turn(off, threshold)
}

/// Ground-truth positions strictly after `from_frame` up to `to_frame`.
pub fn truth_between(sc: &Scenario, from_frame: u64, to_frame: u64) -> (Vec<Point2>, Vec<f64>) {
    sc.gt
        .iter()
        .filter(|r| r.frame > from_frame && r.frame <= to_frame)
        .map(|r| (r.xy(), r.t))
        .unzip()
}

/// The planned path timed at constant exit speed from the exit, cut at
/// `t_end`.
pub fn timed_prediction(p: &PlanResult, v: f64, t_end: f64) -> (Vec<Point2>, Vec<f64>) {
    let mut pts = Vec::new();
    let mut ts = Vec::new();
    let mut arc = 0.0;
    let mut prev: Option<Point2> = None;
    for q in &p.best_path {
        let pt = Point2::new(q.x, q.y);
        if let Some(pp) = prev {
            arc += pp.dist(pt);
        }
        prev = Some(pt);
        let t = p.exit_time + arc / v;
        if t > t_end {
            break;
        }
        pts.push(pt);
        ts.push(t);
    }
    (pts, ts)
}

#[derive(Debug, Clone)]
pub struct CaseOutcome {
    pub scenario_id: String,
    pub plan: PlanResult,
    pub case: PredictionCase,
    pub pair: TrajectoryPair,
}

/// Scores a plan against the ground truth between the source visit's last
/// frame and the next visit's first frame.
pub fn score_plan(
    plan: &PlanResult,
    gt: &[GroundTruthRecord],
    source: &Visit,
    next: &Visit,
    scenario_id: &str,
    cfg: &CaseConfig,
) -> Result<(PredictionCase, TrajectoryPair)> {
    let t_next = gt
        .iter()
        .find(|r| r.frame == next.first_frame)
        .map_or(f64::INFINITY, |r| r.t);
    let (truth, truth_t): (Vec<Point2>, Vec<f64>) = gt
        .iter()
        .filter(|r| r.frame > source.last_frame && r.frame <= next.first_frame)
        .map(|r| (r.xy(), r.t))
        .unzip();
    let (mut pred, mut pred_t) = timed_prediction(plan, plan.speed_m_s.max(cfg.min_speed), t_next);
    if pred.is_empty() {
        // a stalled exit still predicts its start point
        let p = plan.best_path.first().map_or(Point2::new(0.0, 0.0), |q| Point2::new(q.x, q.y));
        pred.push(p);
        pred_t.push(plan.exit_time);
    }
    let pair = TrajectoryPair::time_aligned(pred, &pred_t, truth, &truth_t)?;
    let mut ranked = plan.ranked_cams();
    ranked.truncate(cfg.top_k);
    Ok((
        PredictionCase {
            scenario_id: scenario_id.to_string(),
            gt_next_cam: next.cctv_id.clone(),
            predicted_topk: ranked,
        },
        pair,
    ))
}

/// Perception, planning and scoring for one scenario's handoff.
pub fn run_case(
    sc: &Scenario,
    graph: &RoadGraph,
    cams: &[CameraSpec],
    fovs: &[FovPolygon],
    reasoner: &dyn Reasoner,
    cfg: &CaseConfig,
) -> Result<CaseOutcome> {
    let (src_idx, src, next) = handoff_visits(sc)
        .ok_or_else(|| Error::InvalidInput(format!("{}: fewer than two visits", sc.spec.scenario_id)))?;
    let h = exit_and_profile(sc, cams, graph, src_idx, cfg)?;
    let plan = plan(&h.exit, graph, fovs, &h.profile, &cfg.beam, reasoner)?;
    let (case, pair) = score_plan(&plan, &sc.gt, src, next, &sc.spec.scenario_id, cfg)?;
    Ok(CaseOutcome {
        scenario_id: sc.spec.scenario_id.clone(),
        plan,
        case,
        pair,
    })
}

/// Cameras reachable from `start` over the road graph without crossing
/// another camera's footprint: a breadth-first walk that passes through
/// waypoints seen only by `source_cam` (or by none) and stops at the first
/// waypoint inside any other footprint.
pub fn adjacent_cameras(graph: &RoadGraph, fovs: &[FovPolygon], source_cam: &str, start: WpId) -> BTreeSet<String> {
    let mut found = BTreeSet::new();
    let mut seen = BTreeSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(w) = queue.pop_front() {
        let p = graph.position(w);
        let hits: Vec<&str> = fovs
            .iter()
            .filter(|f| f.cctv_id != source_cam && f.contains(p))
            .map(|f| f.cctv_id.as_str())
            .collect();
        if !hits.is_empty() {
            found.extend(hits.into_iter().map(str::to_owned));
            continue;
        }
        for e in graph.neighbors(w) {
            if seen.insert(e.to) {
                queue.push_back(e.to);
            }
        }
    }
    found
}

/// Expected Top-K hit rate of picking K cameras uniformly at random from
/// the adjacent set: `min(K, n) / n` when the truth is in the set.
pub fn random_topk_expectation(adjacent: &BTreeSet<String>, truth: &str, k: usize) -> f64 {
    if !adjacent.contains(truth) {
        return 0.0;
    }
    let n = adjacent.len();
    k.min(n) as f64 / n as f64
}

/// Start waypoint used for the baseline walk, as the planner would snap it.
pub fn baseline_start(graph: &RoadGraph, exit: &ExitState, cfg: &BeamConfig) -> Result<WpId> {
    start_waypoint(graph, exit.exit_position, cfg.snap_radius_m)
}
