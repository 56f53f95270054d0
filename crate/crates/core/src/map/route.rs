use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap};

use super::camera::FovPolygon;
use super::gates::RoadCctvGate;
use super::graph::{RoadGraph, Waypoint, WpId};
use crate::error::{Error, Result};
use crate::geometry::Point2;

/// Gated waypoint of `cctv` nearest to `anchor` (ties by smaller id).
pub fn anchor_waypoint(graph: &RoadGraph, gates: &[RoadCctvGate], cctv: &str, anchor: Point2) -> Option<WpId> {
    gates
        .iter()
        .filter(|g| g.cctv_id == cctv)
        .flat_map(|g| {
            let road = &graph.roads[&g.road_id];
            g.covered_wp_indices
                .iter()
                .flat_map(move |(a, b)| road.waypoints[*a..=*b].iter().copied())
        })
        .map(|id| (graph.position(id).dist(anchor), id))
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
        .map(|(_, id)| id)
}

#[derive(PartialEq)]
struct Item(f64, WpId);

impl Eq for Item {}

impl Ord for Item {
    fn cmp(&self, o: &Self) -> Ordering {
        // min-heap on (distance, id)
        o.0.total_cmp(&self.0).then(o.1.cmp(&self.1))
    }
}

impl PartialOrd for Item {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// Uniform-cost search; equal-cost predecessors resolve to the smaller id.
pub fn shortest_path(graph: &RoadGraph, from: WpId, to: WpId) -> Option<(Vec<WpId>, f64)> {
    let mut dist: BTreeMap<WpId, f64> = BTreeMap::new();
    let mut pred: BTreeMap<WpId, WpId> = BTreeMap::new();
    let mut heap = BinaryHeap::new();
    dist.insert(from, 0.0);
    heap.push(Item(0.0, from));
    while let Some(Item(d, u)) = heap.pop() {
        if d > dist[&u] {
            continue;
        }
        if u == to {
            break;
        }
        for e in graph.neighbors(u) {
            let nd = d + e.length;
            let better = match dist.get(&e.to) {
                None => true,
                Some(&old) => nd < old - 1e-12 || ((nd - old).abs() <= 1e-12 && u < pred.get(&e.to).copied().unwrap_or(WpId::MAX)),
            };
            if better {
                let improved = dist.get(&e.to).is_none_or(|old| nd < *old - 1e-12);
                dist.insert(e.to, nd);
                pred.insert(e.to, u);
                if improved {
                    heap.push(Item(nd, e.to));
                }
            }
        }
    }
    let total = *dist.get(&to)?;
    let mut path = vec![to];
    let mut cur = to;
    while cur != from {
        cur = pred[&cur];
        path.push(cur);
    }
    path.reverse();
    Some((path, total))
}

/// Shortest waypoint route between the gated waypoints of two cameras, each
/// anchored at the gated waypoint nearest its camera's footprint centroid.
pub fn shortest_route(
    graph: &RoadGraph,
    gates: &[RoadCctvGate],
    fovs: &[FovPolygon],
    from_cam: &str,
    to_cam: &str,
) -> Result<Vec<Waypoint>> {
    let anchor = |cam: &str| -> Result<WpId> {
        let fov = fovs
            .iter()
            .find(|f| f.cctv_id == cam)
            .ok_or_else(|| Error::InvalidInput(format!("unknown camera {cam}")))?;
        anchor_waypoint(graph, gates, cam, fov.centroid())
            .ok_or_else(|| Error::InvalidInput(format!("camera {cam} covers no waypoint")))
    };
    let (a, b) = (anchor(from_cam)?, anchor(to_cam)?);
    let (path, _) = shortest_path(graph, a, b).ok_or_else(|| Error::Unreachable {
        from: from_cam.to_string(),
        to: to_cam.to_string(),
    })?;
    Ok(path.into_iter().map(|id| graph.waypoints[&id].clone()).collect())
}
