use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cameras::{place_cameras, CameraParams};
use super::observe::{derive_visit_sequence, project_observations, Visit, MIN_VISIT_STEPS};
use super::town::{generate_town, Heading4, Town, TownSpec};
use super::vehicle::{simulate, Event, EventKind, GroundTruthRecord, ScenarioSpec};
use crate::error::{Error, Result};
use crate::map::{build_fovs, CameraSpec, FovPolygon};
use crate::perception::{PixelObservation, Turn};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FleetSpec {
    pub town: TownSpec,
    pub cameras: CameraParams,
    pub scenarios: usize,
    pub dt: f64,
    pub seed: u64,
    /// Junction decisions per route.
    pub route_len: usize,
    pub cruise_speed: [f64; 2],
    /// Draws allowed per scenario before giving up on finding a route that
    /// passes two cameras.
    pub max_attempts: usize,
}

impl Default for FleetSpec {
    fn default() -> Self {
        FleetSpec {
            town: TownSpec::default(),
            cameras: CameraParams::default(),
            scenarios: 30,
            dt: 0.1,
            seed: 7,
            route_len: 10,
            cruise_speed: [6.0, 10.0],
            max_attempts: 200,
        }
    }
}

impl FleetSpec {
    pub fn validate(&self) -> Result<()> {
        self.town.validate()?;
        self.cameras.validate()?;
        if !(self.dt > 0.0) || !(self.cruise_speed[0] > 0.0 && self.cruise_speed[0] <= self.cruise_speed[1]) {
            return Err(Error::InvalidInput("fleet dt and cruise speed range must be positive".into()));
        }
        if self.max_attempts == 0 || self.route_len == 0 {
            return Err(Error::InvalidInput("fleet max_attempts and route_len must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub spec: ScenarioSpec,
    /// Turn the driver favours when choosing routes.
    pub habit: Turn,
    pub gt: Vec<GroundTruthRecord>,
    pub observations: Vec<PixelObservation>,
    pub visits: Vec<Visit>,
}

#[derive(Debug, Clone)]
pub struct Fleet {
    pub town: Town,
    pub cameras: Vec<CameraSpec>,
    pub fovs: Vec<FovPolygon>,
    pub scenarios: Vec<Scenario>,
}

/// Decision weights for a habit: straight-habit drivers go straight 70% of
/// the time; turn-habit drivers take their turn 35%, the other 15%.
fn habit_weights(habit: Turn) -> [(Turn, f64); 3] {
    match habit {
        Turn::Straight => [(Turn::Straight, 0.7), (Turn::Left, 0.15), (Turn::Right, 0.15)],
        Turn::Left => [(Turn::Straight, 0.5), (Turn::Left, 0.35), (Turn::Right, 0.15)],
        Turn::Right => [(Turn::Straight, 0.5), (Turn::Right, 0.35), (Turn::Left, 0.15)],
    }
}

fn apply(h: Heading4, t: Turn) -> Heading4 {
    match t {
        Turn::Left => h.left(),
        Turn::Right => h.right(),
        Turn::Straight => h,
    }
}

fn draw_route(town: &Town, start: (u32, u32), h0: Heading4, habit: Turn, len: usize, rng: &mut ChaCha8Rng) -> Vec<Turn> {
    let mut route = Vec::with_capacity(len);
    let (mut node, mut h) = (start, h0);
    for _ in 0..len {
        let Some(next) = town.step(node, h) else { break };
        let options: Vec<(Turn, f64)> = habit_weights(habit)
            .into_iter()
            .filter(|(t, _)| town.step(next, apply(h, *t)).is_some())
            .collect();
        let total: f64 = options.iter().map(|o| o.1).sum();
        let mut x = rng.gen::<f64>() * total;
        let mut pick = options[options.len() - 1].0;
        for (t, w) in &options {
            if x < *w {
                pick = *t;
                break;
            }
            x -= w;
        }
        route.push(pick);
        node = next;
        h = apply(h, pick);
    }
    route
}

fn draw_events(rng: &mut ChaCha8Rng, horizon: f64) -> Vec<Event> {
    let n = rng.gen_range(1..=2);
    let mut events: Vec<Event> = (0..n)
        .map(|_| {
            let kind = [EventKind::SuddenAccel, EventKind::SuddenBrake, EventKind::SharpTurn, EventKind::LaneWeave]
                [rng.gen_range(0..4)];
            let magnitude = match kind {
                EventKind::SuddenAccel => rng.gen_range(1.3..1.6),
                EventKind::SuddenBrake => rng.gen_range(0.2..0.5),
                EventKind::SharpTurn => {
                    if rng.gen::<bool>() {
                        1.0
                    } else {
                        -1.0
                    }
                }
                EventKind::LaneWeave => rng.gen_range(0.5..1.2),
            };
            Event {
                t: rng.gen_range(2.0..horizon.max(2.5)),
                kind,
                magnitude,
            }
        })
        .collect();
    events.sort_by(|a, b| a.t.total_cmp(&b.t));
    events
}

/// One scenario per index, each from its own seeded stream, retried until
/// the route visits at least two cameras.
fn draw_scenario(spec: &FleetSpec, town: &Town, fovs: &[FovPolygon], cams: &[CameraSpec], index: usize) -> Result<Scenario> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed ^ (index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let nodes: Vec<(u32, u32)> = town.junctions.keys().copied().collect();
    for _ in 0..spec.max_attempts {
        let habit = [Turn::Straight, Turn::Left, Turn::Right][rng.gen_range(0..3)];
        let start = nodes[rng.gen_range(0..nodes.len())];
        let heads: Vec<Heading4> = Heading4::ALL.into_iter().filter(|h| town.step(start, *h).is_some()).collect();
        let h0 = heads[rng.gen_range(0..heads.len())];
        let route = draw_route(town, start, h0, habit, spec.route_len, &mut rng);
        let cruise = rng.gen_range(spec.cruise_speed[0]..=spec.cruise_speed[1]);
        let horizon = (route.len() + 1) as f64 * town.spec.block_size / cruise;
        let events = draw_events(&mut rng, horizon);
        let sc = ScenarioSpec {
            scenario_id: format!("S{index:03}"),
            start_wp: town.junctions[&start],
            start_heading: h0,
            route,
            cruise_speed: cruise,
            events,
        };
        let gt = simulate(&sc, town, fovs, spec.dt)?;
        let visits = derive_visit_sequence(&gt, MIN_VISIT_STEPS);
        if visits.len() < 2 {
            continue;
        }
        let observations = project_observations(&gt, cams)?;
        return Ok(Scenario {
            spec: sc,
            habit,
            gt,
            observations,
            visits,
        });
    }
    Err(Error::InvalidInput(format!(
        "scenario {index}: no route reached two cameras in {} attempts",
        spec.max_attempts
    )))
}

/// Town, cameras and `spec.scenarios` scenarios. Scenarios are generated in
/// parallel; each depends only on the seed and its index.
pub fn generate_fleet(spec: &FleetSpec) -> Result<Fleet> {
    spec.validate()?;
    let town = generate_town(&spec.town)?;
    let cameras = place_cameras(&town, &spec.cameras)?;
    let fovs = build_fovs(&cameras, 0.0)?;
    let scenarios = (0..spec.scenarios)
        .into_par_iter()
        .map(|i| draw_scenario(spec, &town, &fovs, &cameras, i))
        .collect::<Result<Vec<_>>>()?;
    Ok(Fleet {
        town,
        cameras,
        fovs,
        scenarios,
    })
}
