use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::camera::{point_in_fov, CameraSpec, FovPolygon};
use super::graph::{RoadGraph, RoadId, WpId};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoadCctvGate {
    pub road_id: RoadId,
    pub cctv_id: String,
    /// Inclusive index ranges into the road's waypoint sequence.
    pub covered_wp_indices: Vec<(usize, usize)>,
    pub coverage_ratio: f64,
    pub boundary_wp_ids: Vec<WpId>,
}

impl RoadCctvGate {
    pub fn covered_count(&self) -> usize {
        self.covered_wp_indices.iter().map(|(a, b)| b - a + 1).sum()
    }
}

/// One gate per (road, camera) pair with at least one covered waypoint,
/// ordered by road id then camera id.
pub fn compute_gates(graph: &RoadGraph, fovs: &[FovPolygon]) -> Vec<RoadCctvGate> {
    let mut order: Vec<&FovPolygon> = fovs.iter().collect();
    order.sort_by(|a, b| a.cctv_id.cmp(&b.cctv_id));
    let mut out = Vec::new();
    for road in graph.roads.values() {
        for fov in &order {
            let covered: Vec<bool> = road
                .waypoints
                .iter()
                .map(|id| point_in_fov(fov, graph.position(*id)))
                .collect();
            let n_cov = covered.iter().filter(|c| **c).count();
            if n_cov == 0 {
                continue;
            }
            let mut runs = Vec::new();
            let mut start = None;
            for (i, c) in covered.iter().enumerate() {
                match (c, start) {
                    (true, None) => start = Some(i),
                    (false, Some(s)) => {
                        runs.push((s, i - 1));
                        start = None;
                    }
                    _ => {}
                }
            }
            if let Some(s) = start {
                runs.push((s, covered.len() - 1));
            }
            let mut boundary = Vec::new();
            for (a, b) in &runs {
                boundary.push(road.waypoints[*a]);
                if b != a {
                    boundary.push(road.waypoints[*b]);
                }
            }
            out.push(RoadCctvGate {
                road_id: road.road_id,
                cctv_id: fov.cctv_id.clone(),
                covered_wp_indices: runs,
                coverage_ratio: n_cov as f64 / road.waypoints.len() as f64,
                boundary_wp_ids: boundary,
            });
        }
    }
    out
}

/// Road-level neighbourhood of one camera.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Zone {
    pub zone_id: String,
    pub cctvs: BTreeSet<String>,
    pub covered_roads: BTreeSet<RoadId>,
    pub neighbor_roads: BTreeSet<RoadId>,
}

/// One zone per camera, numbered `Z_0_1`, `Z_0_2`, ... in camera id order.
pub fn build_zones(graph: &RoadGraph, gates: &[RoadCctvGate], cams: &[CameraSpec]) -> Vec<Zone> {
    let mut ids: Vec<&str> = cams.iter().map(|c| c.cctv_id.as_str()).collect();
    ids.sort_unstable();
    ids.dedup();
    ids.iter()
        .enumerate()
        .map(|(k, id)| {
            let covered: BTreeSet<RoadId> = gates.iter().filter(|g| g.cctv_id == *id).map(|g| g.road_id).collect();
            let neighbors = covered
                .iter()
                .filter_map(|r| graph.roads.get(r))
                .flat_map(|r| r.neighbors.iter().copied())
                .filter(|r| !covered.contains(r))
                .collect();
            Zone {
                zone_id: format!("Z_0_{}", k + 1),
                cctvs: std::iter::once(id.to_string()).collect(),
                covered_roads: covered,
                neighbor_roads: neighbors,
            }
        })
        .collect()
}
