//! Road graph, camera footprints, road-camera gates, zones and map documents.

pub mod camera;
pub mod documents;
pub mod file;
pub mod gates;
pub mod graph;
pub mod route;

pub use camera::{build_fov_polygon, cctv_id, parse_cctv_index, point_in_fov, CameraSpec, FovPolygon};
pub use documents::{generate_documents, parse_document_line, DocBody, MapDocument};
pub use file::MapFile;
pub use gates::{build_zones, compute_gates, RoadCctvGate, Zone};
pub use graph::{Edge, RoadGraph, RoadId, RoadSegment, Waypoint, WpId};
pub use route::{shortest_path, shortest_route};

/// Footprints for all cameras, in input order.
pub fn build_fovs(cams: &[CameraSpec], ground_z: f64) -> crate::error::Result<Vec<FovPolygon>> {
    cams.iter().map(|c| build_fov_polygon(c, ground_z)).collect()
}
