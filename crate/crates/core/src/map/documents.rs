//! Textual map documents: one line per road, camera and zone.
//!
//! ```text
//! Road 131: Waypoints = 18, Coverage = CCTV_13 (54.3%), CCTV_00 (12.8%), Neighbors = [8, 11, 92, 93]
//! CCTV_00: Pos = (50.0, 100.0, 6.0), Yaw = 90.0, Pitch = -20.0, FOV = 60.0
//! Zone Z_0_1: CCTVs = [CCTV_00], Roads = [8], Neighbors = [4, 5]
//! ```
//!
//! Decimal fields are held as integer tenths so that parsing a rendered
//! line gives back exactly the same record, and rendering a parsed line gives
//! back exactly the same text.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::camera::{parse_cctv_index, CameraSpec, FovPolygon};
use super::gates::{RoadCctvGate, Zone};
use super::graph::{RoadGraph, RoadId};
use crate::error::{Error, Result};
use crate::geometry::Aabb;
use crate::retrieval::minhash::MinHashSignature;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoadDoc {
    pub road_id: RoadId,
    pub waypoints: usize,
    /// (camera, coverage in tenths of a percent), highest first.
    pub coverage: Vec<(String, i64)>,
    pub neighbors: Vec<RoadId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CameraDoc {
    pub cctv_id: String,
    /// Tenths of a meter / degree.
    pub pos: [i64; 3],
    pub yaw: i64,
    pub pitch: i64,
    pub fov: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZoneDoc {
    pub zone_id: String,
    pub cctvs: Vec<String>,
    pub roads: Vec<RoadId>,
    pub neighbors: Vec<RoadId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum DocBody {
    Road(RoadDoc),
    Camera(CameraDoc),
    Zone(ZoneDoc),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapDocument {
    pub doc_id: String,
    pub text: String,
    pub subject_ids: Vec<String>,
    pub bbox: Aabb,
    pub body: DocBody,
    pub signature_slot: Option<MinHashSignature>,
}

/// Round half up to tenths.
pub fn to_tenths(x: f64) -> i64 {
    (x * 10.0 + 0.5 + 1e-9).floor() as i64
}

pub fn ratio_to_tenths_pct(ratio: f64) -> i64 {
    (ratio * 1000.0 + 0.5 + 1e-9).floor() as i64
}

pub fn fmt_tenths(t: i64) -> String {
    let sign = if t < 0 { "-" } else { "" };
    let a = t.unsigned_abs();
    format!("{sign}{}.{}", a / 10, a % 10)
}

fn join_ids<T: ToString>(ids: &[T]) -> String {
    ids.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

impl DocBody {
    pub fn render(&self) -> String {
        match self {
            DocBody::Road(r) => {
                let mut s = format!("Road {}: Waypoints = {}, Coverage = ", r.road_id, r.waypoints);
                if r.coverage.is_empty() {
                    s.push_str("none");
                } else {
                    let parts: Vec<String> = r
                        .coverage
                        .iter()
                        .map(|(id, t)| format!("{id} ({}%)", fmt_tenths(*t)))
                        .collect();
                    s.push_str(&parts.join(", "));
                }
                let _ = write!(s, ", Neighbors = [{}]", join_ids(&r.neighbors));
                s
            }
            DocBody::Camera(c) => format!(
                "{}: Pos = ({}, {}, {}), Yaw = {}, Pitch = {}, FOV = {}",
                c.cctv_id,
                fmt_tenths(c.pos[0]),
                fmt_tenths(c.pos[1]),
                fmt_tenths(c.pos[2]),
                fmt_tenths(c.yaw),
                fmt_tenths(c.pitch),
                fmt_tenths(c.fov)
            ),
            DocBody::Zone(z) => format!(
                "Zone {}: CCTVs = [{}], Roads = [{}], Neighbors = [{}]",
                z.zone_id,
                z.cctvs.join(", "),
                join_ids(&z.roads),
                join_ids(&z.neighbors)
            ),
        }
    }

    pub fn doc_id(&self) -> String {
        match self {
            DocBody::Road(r) => format!("road:{}", r.road_id),
            DocBody::Camera(c) => format!("cctv:{}", c.cctv_id),
            DocBody::Zone(z) => format!("zone:{}", z.zone_id),
        }
    }
}

struct Cursor<'a> {
    s: &'a str,
}

fn bad(msg: impl Into<String>) -> Error {
    Error::parse(1, msg)
}

impl<'a> Cursor<'a> {
    fn lit(&mut self, p: &str) -> Result<()> {
        self.s = self
            .s
            .strip_prefix(p)
            .ok_or_else(|| bad(format!("expected {p:?} before {:?}", truncate(self.s))))?;
        Ok(())
    }

    fn take_while(&mut self, f: impl Fn(char) -> bool) -> &'a str {
        let end = self.s.find(|c: char| !f(c)).unwrap_or(self.s.len());
        let (head, tail) = self.s.split_at(end);
        self.s = tail;
        head
    }

    fn uint<T: std::str::FromStr>(&mut self) -> Result<T> {
        let d = self.take_while(|c| c.is_ascii_digit());
        if d.is_empty() || (d.len() > 1 && d.starts_with('0')) {
            return Err(bad("expected a canonical unsigned integer"));
        }
        d.parse().map_err(|_| bad("integer out of range"))
    }

    fn tenths(&mut self) -> Result<i64> {
        let neg = self.s.starts_with('-');
        if neg {
            self.s = &self.s[1..];
        }
        let whole: i64 = self.uint()?;
        self.lit(".")?;
        let frac = self.take_while(|c| c.is_ascii_digit());
        if frac.len() != 1 {
            return Err(bad("expected exactly one decimal digit"));
        }
        let t = whole
            .checked_mul(10)
            .and_then(|w| w.checked_add(frac.parse::<i64>().unwrap()))
            .ok_or_else(|| bad("number out of range"))?;
        if neg && t == 0 {
            return Err(bad("negative zero"));
        }
        Ok(if neg { -t } else { t })
    }

    fn cctv(&mut self) -> Result<String> {
        let id = self.take_while(|c| c.is_ascii_alphanumeric() || c == '_');
        if parse_cctv_index(id).is_none() {
            return Err(bad(format!("bad camera id {id:?}")));
        }
        Ok(id.to_string())
    }

    /// `[a, b, c]` with items parsed by `item`.
    fn list<T>(&mut self, mut item: impl FnMut(&mut Self) -> Result<T>) -> Result<Vec<T>> {
        self.lit("[")?;
        let mut out = Vec::new();
        if self.s.starts_with(']') {
            self.s = &self.s[1..];
            return Ok(out);
        }
        loop {
            out.push(item(self)?);
            if self.s.starts_with(']') {
                self.s = &self.s[1..];
                return Ok(out);
            }
            self.lit(", ")?;
        }
    }

    fn end(&self) -> Result<()> {
        if self.s.is_empty() {
            Ok(())
        } else {
            Err(bad(format!("trailing input {:?}", truncate(self.s))))
        }
    }
}

fn truncate(s: &str) -> &str {
    match s.char_indices().nth(24) {
        Some((i, _)) => &s[..i],
        None => s,
    }
}

fn valid_zone_id(id: &str) -> bool {
    let mut parts = id.split('_');
    parts.next() == Some("Z")
        && parts.by_ref().take(2).filter(|p| !p.is_empty() && p.bytes().all(|b| b.is_ascii_digit())).count() == 2
        && parts.next().is_none()
}

/// Parses one document line into its structured record.
pub fn parse_document_line(line: &str) -> Result<DocBody> {
    let mut c = Cursor { s: line };
    if line.starts_with("Road ") {
        c.lit("Road ")?;
        let road_id = c.uint()?;
        c.lit(": Waypoints = ")?;
        let waypoints = c.uint()?;
        c.lit(", Coverage = ")?;
        let mut coverage = Vec::new();
        if c.s.starts_with("none") {
            c.lit("none")?;
        } else {
            loop {
                let id = c.cctv()?;
                c.lit(" (")?;
                let pct = c.tenths()?;
                c.lit("%)")?;
                coverage.push((id, pct));
                if c.s.starts_with(", Neighbors") {
                    break;
                }
                c.lit(", ")?;
            }
        }
        c.lit(", Neighbors = ")?;
        let neighbors = c.list(|c| c.uint())?;
        c.end()?;
        Ok(DocBody::Road(RoadDoc {
            road_id,
            waypoints,
            coverage,
            neighbors,
        }))
    } else if line.starts_with("Zone ") {
        c.lit("Zone ")?;
        let zone_id = c.take_while(|ch| ch.is_ascii_alphanumeric() || ch == '_').to_string();
        if !valid_zone_id(&zone_id) {
            return Err(bad(format!("bad zone id {zone_id:?}")));
        }
        c.lit(": CCTVs = ")?;
        let cctvs = c.list(|c| c.cctv())?;
        c.lit(", Roads = ")?;
        let roads = c.list(|c| c.uint())?;
        c.lit(", Neighbors = ")?;
        let neighbors = c.list(|c| c.uint())?;
        c.end()?;
        Ok(DocBody::Zone(ZoneDoc {
            zone_id,
            cctvs,
            roads,
            neighbors,
        }))
    } else if line.starts_with("CCTV_") {
        let cctv_id = c.cctv()?;
        c.lit(": Pos = (")?;
        let x = c.tenths()?;
        c.lit(", ")?;
        let y = c.tenths()?;
        c.lit(", ")?;
        let z = c.tenths()?;
        c.lit("), Yaw = ")?;
        let yaw = c.tenths()?;
        c.lit(", Pitch = ")?;
        let pitch = c.tenths()?;
        c.lit(", FOV = ")?;
        let fov = c.tenths()?;
        c.end()?;
        Ok(DocBody::Camera(CameraDoc {
            cctv_id,
            pos: [x, y, z],
            yaw,
            pitch,
            fov,
        }))
    } else {
        Err(bad("unknown document kind"))
    }
}

/// Parses a documents file (one line each, blank lines ignored), reporting
/// the failing line number.
pub fn parse_documents(text: &str) -> Result<Vec<DocBody>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, l)| {
            parse_document_line(l).map_err(|e| match e {
                Error::Parse { msg, .. } => Error::parse(i + 1, msg),
                other => other,
            })
        })
        .collect()
}

pub fn road_doc(graph: &RoadGraph, gates: &[RoadCctvGate], road_id: RoadId) -> Option<RoadDoc> {
    let road = graph.roads.get(&road_id)?;
    let mut cov: Vec<(f64, String)> = gates
        .iter()
        .filter(|g| g.road_id == road_id)
        .map(|g| (g.coverage_ratio, g.cctv_id.clone()))
        .collect();
    cov.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.cmp(&b.1)));
    let mut coverage: Vec<(String, i64)> = cov.into_iter().map(|(r, id)| (id, ratio_to_tenths_pct(r))).collect();
    // rendered order must agree with the rendered values
    coverage.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    Some(RoadDoc {
        road_id,
        waypoints: road.waypoints.len(),
        coverage,
        neighbors: road.neighbors.iter().copied().collect(),
    })
}

pub fn camera_doc(cam: &CameraSpec) -> CameraDoc {
    CameraDoc {
        cctv_id: cam.cctv_id.clone(),
        pos: [to_tenths(cam.position[0]), to_tenths(cam.position[1]), to_tenths(cam.position[2])],
        yaw: to_tenths(cam.yaw),
        pitch: to_tenths(cam.pitch),
        fov: to_tenths(cam.fov_deg),
    }
}

pub fn zone_doc(zone: &Zone) -> ZoneDoc {
    ZoneDoc {
        zone_id: zone.zone_id.clone(),
        cctvs: zone.cctvs.iter().cloned().collect(),
        roads: zone.covered_roads.iter().copied().collect(),
        neighbors: zone.neighbor_roads.iter().copied().collect(),
    }
}

/// Road documents in id order, then cameras, then zones.
pub fn generate_documents(
    graph: &RoadGraph,
    gates: &[RoadCctvGate],
    zones: &[Zone],
    cams: &[CameraSpec],
    fovs: &[FovPolygon],
) -> Vec<MapDocument> {
    let fov_by_id: BTreeMap<&str, &FovPolygon> = fovs.iter().map(|f| (f.cctv_id.as_str(), f)).collect();
    let road_bbox = |r: RoadId| -> Option<Aabb> {
        let road = graph.roads.get(&r)?;
        Aabb::from_points(road.waypoints.iter().map(|id| &graph.waypoints[id].position))
    };
    let cam_bbox = |c: &CameraSpec| -> Aabb {
        let foot = c.foot_point();
        let mut bb = Aabb { min: foot, max: foot };
        if let Some(f) = fov_by_id.get(c.cctv_id.as_str()) {
            for v in &f.vertices {
                bb.include(*v);
            }
        }
        bb
    };
    let mut docs = Vec::new();
    for road_id in graph.roads.keys() {
        let Some(body) = road_doc(graph, gates, *road_id) else { continue };
        let Some(bbox) = road_bbox(*road_id) else { continue };
        let body = DocBody::Road(body);
        docs.push(MapDocument {
            doc_id: body.doc_id(),
            text: body.render(),
            subject_ids: vec![road_id.to_string()],
            bbox,
            body,
            signature_slot: None,
        });
    }
    let mut cams_sorted: Vec<&CameraSpec> = cams.iter().collect();
    cams_sorted.sort_by(|a, b| a.cctv_id.cmp(&b.cctv_id));
    for cam in &cams_sorted {
        let body = DocBody::Camera(camera_doc(cam));
        docs.push(MapDocument {
            doc_id: body.doc_id(),
            text: body.render(),
            subject_ids: vec![cam.cctv_id.clone()],
            bbox: cam_bbox(cam),
            body,
            signature_slot: None,
        });
    }
    for zone in zones {
        let mut bbox: Option<Aabb> = None;
        let mut grow = |b: Aabb| bbox = Some(bbox.map_or(b, |x| x.union(&b)));
        for cam in cams_sorted.iter().filter(|c| zone.cctvs.contains(&c.cctv_id)) {
            grow(cam_bbox(cam));
        }
        for r in &zone.covered_roads {
            if let Some(b) = road_bbox(*r) {
                grow(b);
            }
        }
        let Some(bbox) = bbox else { continue };
        let mut subjects = vec![zone.zone_id.clone()];
        subjects.extend(zone.cctvs.iter().cloned());
        subjects.extend(zone.covered_roads.iter().map(|r| r.to_string()));
        let body = DocBody::Zone(zone_doc(zone));
        docs.push(MapDocument {
            doc_id: body.doc_id(),
            text: body.render(),
            subject_ids: subjects,
            bbox,
            body,
            signature_slot: None,
        });
    }
    docs
}

pub fn render_documents_file(docs: &[MapDocument]) -> String {
    let mut s = String::new();
    for d in docs {
        s.push_str(&d.text);
        s.push('\n');
    }
    s
}
