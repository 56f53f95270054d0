use std::path::Path;

use serde::{Deserialize, Serialize};

use super::camera::CameraSpec;
use super::graph::{RoadGraph, RoadSegment, Waypoint};
use crate::error::{Error, Result};

/// On-disk map: waypoints, roads and cameras. Adjacency is derived on load.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct MapFile {
    pub waypoints: Vec<Waypoint>,
    pub roads: Vec<RoadSegment>,
    #[serde(default)]
    pub cameras: Vec<CameraSpec>,
}

impl MapFile {
    pub fn from_graph(graph: &RoadGraph, cameras: &[CameraSpec]) -> Self {
        MapFile {
            waypoints: graph.waypoints.values().cloned().collect(),
            roads: graph.roads.values().cloned().collect(),
            cameras: cameras.to_vec(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("map file serializes")
    }

    /// Builds and validates the graph and cameras.
    pub fn into_parts(self) -> Result<(RoadGraph, Vec<CameraSpec>)> {
        for c in &self.cameras {
            c.validate()?;
        }
        let mut ids: Vec<&str> = self.cameras.iter().map(|c| c.cctv_id.as_str()).collect();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidMap("duplicate camera id".into()));
        }
        let graph = RoadGraph::new(self.waypoints, self.roads)?;
        Ok((graph, self.cameras))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}
