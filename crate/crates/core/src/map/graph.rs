use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{normalize_yaw, Point2};

pub type WpId = u32;
pub type RoadId = u32;

/// Maximum gap for joining the end of one road to a neighbouring road.
pub const JOIN_RADIUS: f64 = 1.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Waypoint {
    pub wp_id: WpId,
    pub road_id: RoadId,
    pub lane_id: i32,
    pub position: Point2,
    pub yaw: f64,
    pub is_intersection: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoadSegment {
    pub road_id: RoadId,
    pub waypoints: Vec<WpId>,
    pub neighbors: BTreeSet<RoadId>,
}

impl RoadSegment {
    fn is_junction(&self, wps: &BTreeMap<WpId, Waypoint>) -> bool {
        self.waypoints.iter().all(|id| wps[id].is_intersection)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub to: WpId,
    pub length: f64,
    pub bearing: f64,
}

/// Waypoint-level road network with undirected adjacency.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RoadGraph {
    pub roads: BTreeMap<RoadId, RoadSegment>,
    pub waypoints: BTreeMap<WpId, Waypoint>,
    pub adjacency: BTreeMap<WpId, Vec<Edge>>,
}

impl RoadGraph {
    /// Validates roads and waypoints and derives adjacency.
    ///
    /// Consecutive waypoints of a road are linked; each road endpoint is also
    /// linked to the nearest waypoint of every neighbouring road within
    /// [`JOIN_RADIUS`].
    pub fn new(waypoints: Vec<Waypoint>, roads: Vec<RoadSegment>) -> Result<Self> {
        let mut wps = BTreeMap::new();
        for w in waypoints {
            if !w.position.x.is_finite() || !w.position.y.is_finite() {
                return Err(Error::InvalidMap(format!("waypoint {} has a non-finite position", w.wp_id)));
            }
            if !(w.yaw >= -std::f64::consts::PI && w.yaw < std::f64::consts::PI) {
                return Err(Error::InvalidMap(format!("waypoint {} yaw {} outside [-pi, pi)", w.wp_id, w.yaw)));
            }
            let id = w.wp_id;
            if wps.insert(id, w).is_some() {
                return Err(Error::InvalidMap(format!("duplicate waypoint id {id}")));
            }
        }
        let mut road_map = BTreeMap::new();
        for r in roads {
            let id = r.road_id;
            if road_map.insert(id, r).is_some() {
                return Err(Error::InvalidMap(format!("duplicate road id {id}")));
            }
        }
        let mut owner: BTreeMap<WpId, RoadId> = BTreeMap::new();
        for road in road_map.values() {
            if road.waypoints.is_empty() {
                return Err(Error::InvalidMap(format!("road {} has no waypoints", road.road_id)));
            }
            for id in &road.waypoints {
                let w = wps
                    .get(id)
                    .ok_or_else(|| Error::InvalidMap(format!("road {} references missing waypoint {id}", road.road_id)))?;
                if w.road_id != road.road_id {
                    return Err(Error::InvalidMap(format!("waypoint {id} belongs to road {} not {}", w.road_id, road.road_id)));
                }
                if owner.insert(*id, road.road_id).is_some() {
                    return Err(Error::InvalidMap(format!("waypoint {id} listed twice")));
                }
            }
            if road.waypoints.len() < 2 && !road.is_junction(&wps) {
                return Err(Error::InvalidMap(format!("road {} needs at least 2 waypoints", road.road_id)));
            }
            for pair in road.waypoints.windows(2) {
                let d = wps[&pair[0]].position.dist(wps[&pair[1]].position);
                if !(0.5..=1.5).contains(&d) {
                    return Err(Error::InvalidMap(format!(
                        "road {}: waypoints {} and {} are {d:.3} m apart",
                        road.road_id, pair[0], pair[1]
                    )));
                }
            }
            for n in &road.neighbors {
                let other = road_map
                    .get(n)
                    .ok_or_else(|| Error::InvalidMap(format!("road {} lists missing neighbour {n}", road.road_id)))?;
                if !other.neighbors.contains(&road.road_id) {
                    return Err(Error::InvalidMap(format!("neighbour relation {} -> {n} is not symmetric", road.road_id)));
                }
            }
        }
        if let Some(orphan) = wps.keys().find(|id| !owner.contains_key(id)) {
            return Err(Error::InvalidMap(format!("waypoint {orphan} is not on any road")));
        }

        let mut pairs = BTreeSet::new();
        for road in road_map.values() {
            for pair in road.waypoints.windows(2) {
                pairs.insert(ordered(pair[0], pair[1]));
            }
            let ends = [road.waypoints[0], *road.waypoints.last().unwrap()];
            for end in ends {
                let p = wps[&end].position;
                for n in &road.neighbors {
                    let nearest = road_map[n]
                        .waypoints
                        .iter()
                        .map(|id| (wps[id].position.dist(p), *id))
                        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                    if let Some((d, id)) = nearest {
                        if d <= JOIN_RADIUS && id != end {
                            pairs.insert(ordered(end, id));
                        }
                    }
                }
            }
        }
        let mut g = RoadGraph {
            roads: road_map,
            waypoints: wps,
            adjacency: BTreeMap::new(),
        };
        g.set_edges(pairs);
        Ok(g)
    }

    /// Builds a graph from explicit undirected edges without the road
    /// spacing checks. Used for coarsened search graphs and synthetic
    /// topologies.
    pub fn from_edges(waypoints: Vec<Waypoint>, edges: impl IntoIterator<Item = (WpId, WpId)>) -> Result<Self> {
        let wps: BTreeMap<_, _> = waypoints.into_iter().map(|w| (w.wp_id, w)).collect();
        let mut pairs = BTreeSet::new();
        for (a, b) in edges {
            if !wps.contains_key(&a) || !wps.contains_key(&b) {
                return Err(Error::InvalidMap(format!("edge {a}-{b} references a missing waypoint")));
            }
            if a != b {
                pairs.insert(ordered(a, b));
            }
        }
        let mut g = RoadGraph {
            roads: BTreeMap::new(),
            waypoints: wps,
            adjacency: BTreeMap::new(),
        };
        g.set_edges(pairs);
        Ok(g)
    }

    fn set_edges(&mut self, pairs: BTreeSet<(WpId, WpId)>) {
        let mut adj: BTreeMap<WpId, Vec<Edge>> = self.waypoints.keys().map(|k| (*k, Vec::new())).collect();
        for (a, b) in pairs {
            let (pa, pb) = (self.waypoints[&a].position, self.waypoints[&b].position);
            let length = pa.dist(pb);
            adj.get_mut(&a).unwrap().push(Edge {
                to: b,
                length,
                bearing: (pb - pa).angle(),
            });
            adj.get_mut(&b).unwrap().push(Edge {
                to: a,
                length,
                bearing: (pa - pb).angle(),
            });
        }
        for edges in adj.values_mut() {
            edges.sort_by_key(|e| e.to);
        }
        self.adjacency = adj;
    }

    pub fn position(&self, id: WpId) -> Point2 {
        self.waypoints[&id].position
    }

    pub fn neighbors(&self, id: WpId) -> &[Edge] {
        self.adjacency.get(&id).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn edge(&self, a: WpId, b: WpId) -> Option<&Edge> {
        self.neighbors(a).iter().find(|e| e.to == b)
    }

    /// Nearest waypoint to `p`, ties broken by smaller id.
    pub fn nearest_waypoint(&self, p: Point2) -> Option<(WpId, f64)> {
        self.waypoints
            .values()
            .map(|w| (w.wp_id, w.position.dist(p)))
            .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.values().map(Vec::len).sum::<usize>() / 2
    }
}

fn ordered(a: WpId, b: WpId) -> (WpId, WpId) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Yaw of the direction from `a` to `b`, normalized to [−π, π).
pub fn yaw_between(a: Point2, b: Point2) -> f64 {
    normalize_yaw((b - a).angle())
}
