use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{normalize_yaw, Point2};
use crate::map::{RoadGraph, RoadId, RoadSegment, Waypoint, WpId};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TownSpec {
    pub blocks_x: u32,
    pub blocks_y: u32,
    pub block_size: f64,
    pub seed: u64,
}

impl Default for TownSpec {
    fn default() -> Self {
        TownSpec {
            blocks_x: 4,
            blocks_y: 4,
            block_size: 50.0,
            seed: 7,
        }
    }
}

impl TownSpec {
    pub fn validate(&self) -> Result<()> {
        if self.blocks_x < 2 || self.blocks_y < 2 {
            return Err(Error::InvalidInput(format!(
                "town needs at least 2 blocks per axis, got {}x{}",
                self.blocks_x, self.blocks_y
            )));
        }
        if !(self.block_size >= 20.0) || !self.block_size.is_finite() {
            return Err(Error::InvalidInput(format!("block_size must be >= 20 m, got {}", self.block_size)));
        }
        Ok(())
    }
}

/// Compass directions on the lattice, counter-clockwise from east.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Heading4 {
    East,
    North,
    West,
    South,
}

impl Heading4 {
    pub const ALL: [Heading4; 4] = [Heading4::East, Heading4::North, Heading4::West, Heading4::South];

    pub fn delta(self) -> (i64, i64) {
        match self {
            Heading4::East => (1, 0),
            Heading4::North => (0, 1),
            Heading4::West => (-1, 0),
            Heading4::South => (0, -1),
        }
    }

    pub fn yaw(self) -> f64 {
        let (dx, dy) = self.delta();
        normalize_yaw((dy as f64).atan2(dx as f64))
    }

    pub fn unit(self) -> Point2 {
        let (dx, dy) = self.delta();
        Point2::new(dx as f64, dy as f64)
    }

    pub fn left(self) -> Heading4 {
        Heading4::ALL[(self as usize + 1) % 4]
    }

    pub fn right(self) -> Heading4 {
        Heading4::ALL[(self as usize + 3) % 4]
    }
}

/// A generated grid town: the road graph plus the lattice bookkeeping the
/// simulator needs.
#[derive(Debug, Clone)]
pub struct Town {
    pub spec: TownSpec,
    pub graph: RoadGraph,
    /// Junction waypoint of each lattice node `(i, j)`.
    pub junctions: BTreeMap<(u32, u32), WpId>,
}

impl Town {
    pub fn node_position(&self, node: (u32, u32)) -> Point2 {
        Point2::new(node.0 as f64 * self.spec.block_size, node.1 as f64 * self.spec.block_size)
    }

    pub fn step(&self, node: (u32, u32), h: Heading4) -> Option<(u32, u32)> {
        let (dx, dy) = h.delta();
        let (x, y) = (node.0 as i64 + dx, node.1 as i64 + dy);
        (x >= 0 && y >= 0 && x <= self.spec.blocks_x as i64 && y <= self.spec.blocks_y as i64).then_some((x as u32, y as u32))
    }

    /// Node nearest to a world point.
    pub fn nearest_node(&self, p: Point2) -> (u32, u32) {
        let b = self.spec.block_size;
        let i = (p.x / b).round().clamp(0.0, self.spec.blocks_x as f64) as u32;
        let j = (p.y / b).round().clamp(0.0, self.spec.blocks_y as f64) as u32;
        (i, j)
    }
}

/// Grid of streets at `block_size` spacing with waypoints about 1 m apart.
///
/// Each lattice node is a junction road holding one intersection waypoint;
/// each street between adjacent nodes is a road whose waypoints start and
/// end one spacing away from the junctions. Ids are assigned junctions
/// first, then horizontal streets, then vertical streets, so the layout is
/// a pure function of the `TownSpec`.
pub fn generate_town(spec: &TownSpec) -> Result<Town> {
    spec.validate()?;
    let (nx, ny) = (spec.blocks_x + 1, spec.blocks_y + 1);
    let b = spec.block_size;
    let pieces = b.round() as u32;
    let spacing = b / pieces as f64;

    let mut waypoints = Vec::new();
    let mut roads: Vec<RoadSegment> = Vec::new();
    let mut junctions = BTreeMap::new();
    let mut next_wp: WpId = 0;
    for j in 0..ny {
        for i in 0..nx {
            let road_id = j * nx + i;
            waypoints.push(Waypoint {
                wp_id: next_wp,
                road_id,
                lane_id: 0,
                position: Point2::new(i as f64 * b, j as f64 * b),
                yaw: 0.0,
                is_intersection: true,
            });
            roads.push(RoadSegment {
                road_id,
                waypoints: vec![next_wp],
                neighbors: BTreeSet::new(),
            });
            junctions.insert((i, j), next_wp);
            next_wp += 1;
        }
    }
    let mut next_road: RoadId = nx * ny;
    let mut streets: Vec<((u32, u32), Heading4)> = Vec::new();
    for j in 0..ny {
        for i in 0..nx - 1 {
            streets.push(((i, j), Heading4::East));
        }
    }
    for j in 0..ny - 1 {
        for i in 0..nx {
            streets.push(((i, j), Heading4::North));
        }
    }
    for (from, h) in streets {
        let to = match h {
            Heading4::East => (from.0 + 1, from.1),
            _ => (from.0, from.1 + 1),
        };
        let origin = Point2::new(from.0 as f64 * b, from.1 as f64 * b);
        let ids: Vec<WpId> = (1..pieces).map(|k| next_wp + k - 1).collect();
        for (k, id) in ids.iter().enumerate() {
            waypoints.push(Waypoint {
                wp_id: *id,
                road_id: next_road,
                lane_id: 0,
                position: origin + h.unit() * (spacing * (k + 1) as f64),
                yaw: h.yaw(),
                is_intersection: false,
            });
        }
        next_wp += pieces - 1;
        let (ja, jb) = (from.1 * nx + from.0, to.1 * nx + to.0);
        roads.push(RoadSegment {
            road_id: next_road,
            waypoints: ids,
            neighbors: [ja, jb].into_iter().collect(),
        });
        roads[ja as usize].neighbors.insert(next_road);
        roads[jb as usize].neighbors.insert(next_road);
        next_road += 1;
    }
    let graph = RoadGraph::new(waypoints, roads)?;
    Ok(Town {
        spec: spec.clone(),
        graph,
        junctions,
    })
}
