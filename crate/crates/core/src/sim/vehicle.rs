use serde::{Deserialize, Serialize};

use super::town::{Heading4, Town};
use crate::error::{Error, Result};
use crate::geometry::{normalize_yaw, Point2};
use crate::map::{FovPolygon, WpId};
use crate::perception::Turn;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EventKind {
    /// Speed scales by `magnitude` (> 1) over one second, then recovers.
    SuddenAccel,
    /// Speed scales by `magnitude` (< 1) over one second, then recovers.
    SuddenBrake,
    /// Overrides the next undecided junction: left for magnitude >= 0,
    /// right otherwise.
    SharpTurn,
    /// Sinusoidal lateral swerve of `magnitude` metres for four seconds.
    LaneWeave,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub t: f64,
    pub kind: EventKind,
    pub magnitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub scenario_id: String,
    /// Junction waypoint the vehicle starts on.
    pub start_wp: WpId,
    pub start_heading: Heading4,
    /// Decision at each junction reached after the start.
    pub route: Vec<Turn>,
    pub cruise_speed: f64,
    pub events: Vec<Event>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruthRecord {
    pub frame: u64,
    pub t: f64,
    pub position: [f64; 3],
    pub speed: f64,
    pub heading: f64,
    pub visible_cams: Vec<String>,
}

impl GroundTruthRecord {
    pub fn xy(&self) -> Point2 {
        Point2::new(self.position[0], self.position[1])
    }
}

/// Vehicle dynamics constants.
#[derive(Debug, Clone, Copy)]
struct Dynamics {
    accel: f64,
    brake: f64,
    turn_speed: f64,
    fillet_radius: f64,
    prep_offset: f64,
    prep_length: f64,
    lateral_rate: f64,
}

fn dynamics(block: f64) -> Dynamics {
    Dynamics {
        accel: 2.0,
        brake: 2.5,
        turn_speed: 5.0,
        fillet_radius: (0.16 * block).min(8.0),
        prep_offset: 1.5,
        prep_length: 20.0,
        lateral_rate: 1.5,
    }
}

#[derive(Debug, Clone, Copy)]
enum Prim {
    Line { a: Point2, dir: Point2, len: f64 },
    Arc { center: Point2, r: f64, a0: f64, sweep: f64 },
}

impl Prim {
    fn len(&self) -> f64 {
        match *self {
            Prim::Line { len, .. } => len,
            Prim::Arc { r, sweep, .. } => r * sweep.abs(),
        }
    }

    fn eval(&self, u: f64) -> (Point2, f64) {
        match *self {
            Prim::Line { a, dir, .. } => (a + dir * u, dir.angle()),
            Prim::Arc { center, r, a0, sweep } => {
                let sgn = sweep.signum();
                let ang = a0 + sgn * u / r;
                (center + Point2::from_angle(ang) * r, ang + sgn * std::f64::consts::FRAC_PI_2)
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Junction {
    turn: Turn,
    /// Arc length where the turn starts (the node itself when straight).
    s_start: f64,
    s_end: f64,
    /// Overridden decisions get no preparation drift.
    sudden: bool,
}

struct CenterPath {
    prims: Vec<Prim>,
    cum: Vec<f64>,
    junctions: Vec<Junction>,
}

impl CenterPath {
    fn total(&self) -> f64 {
        *self.cum.last().unwrap()
    }

    fn eval(&self, s: f64) -> (Point2, f64) {
        let s = s.clamp(0.0, self.total());
        let i = match self.cum.binary_search_by(|c| c.total_cmp(&s)) {
            Ok(i) => i.min(self.prims.len() - 1),
            Err(i) => i.saturating_sub(1).min(self.prims.len() - 1),
        };
        self.prims[i].eval(s - self.cum[i])
    }
}

fn apply(h: Heading4, t: Turn) -> Heading4 {
    match t {
        Turn::Left => h.left(),
        Turn::Right => h.right(),
        Turn::Straight => h,
    }
}

fn build_path(town: &Town, start: (u32, u32), h0: Heading4, decisions: &[(Turn, bool)], radius: f64) -> Result<CenterPath> {
    let mut prims = Vec::new();
    let mut junctions = Vec::new();
    let mut node = start;
    let mut h = h0;
    let mut cursor = town.node_position(start);
    let mut s = 0.0;
    let push = |p: Prim, s: &mut f64, prims: &mut Vec<Prim>| {
        *s += p.len();
        prims.push(p);
    };
    for &(turn, sudden) in decisions {
        let next = town.step(node, h).ok_or(Error::RouteInconsistent("no street in that direction".into()))?;
        let np = town.node_position(next);
        let h_out = apply(h, turn);
        town.step(next, h_out).ok_or(Error::RouteInconsistent("no street in that direction".into()))?;
        if turn == Turn::Straight {
            let len = cursor.dist(np);
            push(Prim::Line { a: cursor, dir: h.unit(), len }, &mut s, &mut prims);
            junctions.push(Junction {
                turn,
                s_start: s,
                s_end: s,
                sudden,
            });
            cursor = np;
        } else {
            let pre = np - h.unit() * radius;
            push(Prim::Line { a: cursor, dir: h.unit(), len: cursor.dist(pre) }, &mut s, &mut prims);
            let s_start = s;
            let sgn = if turn == Turn::Left { 1.0 } else { -1.0 };
            let center = pre + h.unit().perp() * (sgn * radius);
            let a0 = (pre - center).angle();
            push(
                Prim::Arc {
                    center,
                    r: radius,
                    a0,
                    sweep: sgn * std::f64::consts::FRAC_PI_2,
                },
                &mut s,
                &mut prims,
            );
            junctions.push(Junction {
                turn,
                s_start,
                s_end: s,
                sudden,
            });
            cursor = np + h_out.unit() * radius;
        }
        node = next;
        h = h_out;
    }
    let last = town.step(node, h).ok_or(Error::RouteInconsistent("no street in that direction".into()))?;
    let lp = town.node_position(last);
    push(Prim::Line { a: cursor, dir: h.unit(), len: cursor.dist(lp) }, &mut s, &mut prims);
    let mut cum = vec![0.0];
    for p in &prims {
        cum.push(cum.last().unwrap() + p.len());
    }
    Ok(CenterPath { prims, cum, junctions })
}

/// Nominal route check: every decision leads to an existing street.
fn validate_route(town: &Town, start: (u32, u32), h0: Heading4, route: &[Turn]) -> Result<()> {
    let mut node = start;
    let mut h = h0;
    for t in route {
        node = town.step(node, h).ok_or(Error::RouteInconsistent("no street in that direction".into()))?;
        h = apply(h, *t);
    }
    town.step(node, h).ok_or(Error::RouteInconsistent("no street in that direction".into()))?;
    Ok(())
}

/// Re-derives headings after an override; later decisions that would leave
/// the town fall back to straight, then right, then left.
fn repair(town: &Town, start: (u32, u32), h0: Heading4, decisions: &mut [(Turn, bool)], from: usize) {
    let mut node = start;
    let mut h = h0;
    for (k, d) in decisions.iter_mut().enumerate() {
        let Some(next) = town.step(node, h) else { return };
        if k >= from && town.step(next, apply(h, d.0)).is_none() {
            if let Some(t) = [Turn::Straight, Turn::Right, Turn::Left]
                .into_iter()
                .find(|t| town.step(next, apply(h, *t)).is_some())
            {
                d.0 = t;
            }
        }
        node = next;
        h = apply(h, d.0);
    }
}

fn event_factor(events: &[Event], t: f64) -> f64 {
    let mut f = 1.0;
    for e in events {
        if !matches!(e.kind, EventKind::SuddenAccel | EventKind::SuddenBrake) {
            continue;
        }
        let dt = t - e.t;
        let w = if dt < 0.0 {
            0.0
        } else if dt < 1.0 {
            dt
        } else if dt < 3.0 {
            1.0
        } else if dt < 5.0 {
            1.0 - (dt - 3.0) / 2.0
        } else {
            0.0
        };
        f *= 1.0 + (e.magnitude - 1.0) * w;
    }
    f
}

fn weave(events: &[Event], t: f64) -> f64 {
    events
        .iter()
        .filter(|e| e.kind == EventKind::LaneWeave && t >= e.t && t <= e.t + 4.0)
        .map(|e| e.magnitude * (std::f64::consts::TAU * (t - e.t) / 4.0).sin())
        .sum()
}

/// Frame-by-frame ground truth for one scenario. Cameras in `fovs` decide
/// `visible_cams`.
pub fn simulate(sc: &ScenarioSpec, town: &Town, fovs: &[FovPolygon], dt: f64) -> Result<Vec<GroundTruthRecord>> {
    if !(dt > 0.0) || !(sc.cruise_speed > 0.0) {
        return Err(Error::InvalidInput("dt and cruise speed must be positive".into()));
    }
    if sc.events.windows(2).any(|w| w[1].t < w[0].t) {
        return Err(Error::InvalidInput("events must be time-ordered".into()));
    }
    let start = town
        .junctions
        .iter()
        .find(|(_, w)| **w == sc.start_wp)
        .map(|(n, _)| *n)
        .ok_or(Error::RouteInconsistent("no street in that direction".into()))?;
    validate_route(town, start, sc.start_heading, &sc.route)?;
    let dy = dynamics(town.spec.block_size);
    let mut decisions: Vec<(Turn, bool)> = sc.route.iter().map(|t| (*t, false)).collect();
    let mut path = build_path(town, start, sc.start_heading, &decisions, dy.fillet_radius)?;
    let mut fired = vec![false; sc.events.len()];

    let mut out = Vec::new();
    let (mut s, mut v_base, mut offset) = (0.0f64, 0.5 * sc.cruise_speed, 0.0f64);
    let mut prev: Option<Point2> = None;
    let mut frame: u64 = 0;
    loop {
        let t = frame as f64 * dt;
        for (i, e) in sc.events.iter().enumerate() {
            if fired[i] || e.kind != EventKind::SharpTurn || t < e.t {
                continue;
            }
            fired[i] = true;
            if let Some(k) = path.junctions.iter().position(|j| j.s_start > s + 1.0) {
                let want = if e.magnitude >= 0.0 { Turn::Left } else { Turn::Right };
                let old = decisions[k];
                for cand in [want, if want == Turn::Left { Turn::Right } else { Turn::Left }] {
                    decisions[k] = (cand, true);
                    repair(town, start, sc.start_heading, &mut decisions, k + 1);
                    if let Ok(p) = build_path(town, start, sc.start_heading, &decisions, dy.fillet_radius) {
                        path = p;
                        break;
                    }
                    decisions[k] = old;
                }
            }
        }

        let (c, tangent) = path.eval(s);
        let p = c + Point2::from_angle(tangent).perp() * offset;
        let heading = match prev {
            Some(q) if q.dist(p) > 1e-9 => (p - q).angle(),
            _ => tangent,
        };
        let v = v_base * event_factor(&sc.events, t);
        let visible_cams = fovs.iter().filter(|f| f.contains(p)).map(|f| f.cctv_id.clone()).collect();
        out.push(GroundTruthRecord {
            frame,
            t,
            position: [p.x, p.y, 0.0],
            speed: v,
            heading: normalize_yaw(heading),
            visible_cams,
        });
        if s >= path.total() {
            break;
        }
        prev = Some(p);

        // speed for the next frame: cruise, capped ahead of and through turns
        let mut cap = sc.cruise_speed;
        for j in path.junctions.iter().filter(|j| j.turn != Turn::Straight) {
            if s < j.s_start {
                cap = cap.min((dy.turn_speed.powi(2) + 2.0 * dy.brake * (j.s_start - s)).sqrt());
            } else if s <= j.s_end {
                cap = cap.min(dy.turn_speed);
            }
        }
        v_base += (cap - v_base).clamp(-2.0 * dy.brake * dt, dy.accel * dt);
        let v_next = v_base * event_factor(&sc.events, t + dt);

        // lateral offset: drift toward the turn side before a planned turn,
        // plus any swerve; lateral speed stays below half the ground speed
        let prep = match path.junctions.iter().find(|j| j.s_end >= s) {
            Some(j) if j.turn != Turn::Straight && !j.sudden => {
                let sgn = if j.turn == Turn::Left { 1.0 } else { -1.0 };
                let ramp_start = j.s_start - dy.prep_length;
                sgn * dy.prep_offset * ((s - ramp_start) / dy.prep_length).clamp(0.0, 1.0)
            }
            _ => 0.0,
        };
        let target = prep + weave(&sc.events, t + dt);
        let rate = dy.lateral_rate.min(0.5 * v_next) * dt;
        offset += (target - offset).clamp(-rate, rate);

        // advance along the centreline so the offset point moves v·dt
        let want = v_next * dt;
        let at = |ds: f64| {
            let (c, tan) = path.eval(s + ds);
            c + Point2::from_angle(tan).perp() * offset
        };
        let mut ds = want;
        for _ in 0..30 {
            let d = at(ds).dist(p);
            if d < 1e-12 || (d - want).abs() < 1e-12 {
                break;
            }
            ds *= want / d;
        }
        s = (s + ds).min(path.total());
        frame += 1;
    }
    Ok(out)
}
