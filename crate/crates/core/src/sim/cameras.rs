use serde::{Deserialize, Serialize};

use super::town::{Heading4, Town};
use crate::error::{Error, Result};
use crate::geometry::polygons_overlap;
use crate::map::{build_fov_polygon, cctv_id, CameraSpec, FovPolygon};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CameraParams {
    pub count: usize,
    pub height: f64,
    pub pitch_deg: f64,
    pub fov_deg: f64,
    pub max_range: f64,
    pub image_width: u32,
    pub image_height: u32,
}

impl Default for CameraParams {
    fn default() -> Self {
        CameraParams {
            count: 8,
            height: 6.0,
            pitch_deg: -20.0,
            fov_deg: 60.0,
            max_range: 30.0,
            image_width: 800,
            image_height: 600,
        }
    }
}

impl CameraParams {
    pub fn validate(&self) -> Result<()> {
        if self.count == 0 || !(self.height > 0.0) || !(self.max_range > 0.0) {
            return Err(Error::InvalidInput(format!("invalid camera params {self:?}")));
        }
        if !(self.fov_deg > 0.0 && self.fov_deg < 180.0) {
            return Err(Error::InvalidFov(self.fov_deg));
        }
        Ok(())
    }
}

/// Interior junctions first, each group in farthest-point order from the
/// node nearest the town centre, so cameras spread out.
pub fn placement_order(town: &Town) -> Vec<(u32, u32)> {
    let (bx, by) = (town.spec.blocks_x, town.spec.blocks_y);
    let centre = (bx as f64 / 2.0, by as f64 / 2.0);
    let d2 = |a: (u32, u32), b: (f64, f64)| (a.0 as f64 - b.0).powi(2) + (a.1 as f64 - b.1).powi(2);
    let mut out: Vec<(u32, u32)> = Vec::new();
    for interior in [true, false] {
        let mut pool: Vec<(u32, u32)> = town
            .junctions
            .keys()
            .copied()
            .filter(|&(i, j)| (i > 0 && j > 0 && i < bx && j < by) == interior)
            .collect();
        while !pool.is_empty() {
            let pick = if out.is_empty() {
                pool.iter()
                    .copied()
                    .min_by(|a, b| d2(*a, centre).total_cmp(&d2(*b, centre)).then(a.cmp(b)))
                    .unwrap()
            } else {
                let spread = |n: (u32, u32)| {
                    out.iter()
                        .map(|o| d2(n, (o.0 as f64, o.1 as f64)))
                        .fold(f64::INFINITY, f64::min)
                };
                pool.iter()
                    .copied()
                    .max_by(|a, b| spread(*a).total_cmp(&spread(*b)).then(b.cmp(a)))
                    .unwrap()
            };
            pool.retain(|n| *n != pick);
            out.push(pick);
        }
    }
    out
}

fn spec_at(town: &Town, node: (u32, u32), h: Heading4, index: usize, p: &CameraParams) -> CameraSpec {
    let pos = town.node_position(node);
    CameraSpec {
        cctv_id: cctv_id(index as u32),
        position: [pos.x, pos.y, p.height],
        yaw: h.yaw().to_degrees(),
        pitch: p.pitch_deg,
        roll: 0.0,
        fov_deg: p.fov_deg,
        max_range: p.max_range,
        image_width: p.image_width,
        image_height: p.image_height,
    }
}

/// Tries the given junctions in order, one camera each, looking down an
/// incident street. Street choice is round-robin over compass directions
/// starting from the camera's index; the first direction whose footprint
/// clears every placed camera wins. Stops once `p.count` cameras stand.
pub fn place_cameras_at(town: &Town, nodes: &[(u32, u32)], p: &CameraParams) -> Result<Vec<CameraSpec>> {
    p.validate()?;
    let mut cams: Vec<CameraSpec> = Vec::new();
    let mut fovs: Vec<FovPolygon> = Vec::new();
    for &node in nodes {
        if cams.len() == p.count {
            break;
        }
        let k = cams.len();
        for r in 0..4 {
            let h = Heading4::ALL[(k + r) % 4];
            if town.step(node, h).is_none() {
                continue;
            }
            let spec = spec_at(town, node, h, k, p);
            let fov = build_fov_polygon(&spec, 0.0)?;
            if fovs.iter().all(|f| !polygons_overlap(&f.vertices, &fov.vertices)) {
                cams.push(spec);
                fovs.push(fov);
                break;
            }
        }
    }
    if cams.len() < p.count {
        return Err(Error::OverlapUnavoidable {
            requested: p.count,
            placed: cams.len(),
        });
    }
    Ok(cams)
}

pub fn place_cameras(town: &Town, p: &CameraParams) -> Result<Vec<CameraSpec>> {
    place_cameras_at(town, &placement_order(town), p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::is_simple_polygon;
    use crate::map::build_fovs;
    use crate::sim::town::{generate_town, TownSpec};

    fn town(b: u32) -> Town {
        generate_town(&TownSpec {
            blocks_x: b,
            blocks_y: b,
            block_size: 50.0,
            seed: 0,
        })
        .unwrap()
    }

    /// Independent overlap oracle: dense grid sampling of both polygons.
    fn sampled_overlap(a: &FovPolygon, b: &FovPolygon) -> bool {
        let mut x = -60.0;
        while x <= 260.0 {
            let mut y = -60.0;
            while y <= 260.0 {
                let p = crate::geometry::Point2::new(x, y);
                if a.contains(p) && b.contains(p) {
                    return true;
                }
                y += 0.5;
            }
            x += 0.5;
        }
        false
    }

    #[test]
    fn corners_of_small_town_are_disjoint() {
        let t = town(2);
        let p = CameraParams {
            count: 4,
            max_range: 25.0,
            ..Default::default()
        };
        let cams = place_cameras_at(&t, &[(0, 0), (2, 0), (0, 2), (2, 2)], &p).unwrap();
        let fovs = build_fovs(&cams, 0.0).unwrap();
        for i in 0..fovs.len() {
            assert!(is_simple_polygon(&fovs[i].vertices));
            for j in i + 1..fovs.len() {
                assert!(!sampled_overlap(&fovs[i], &fovs[j]));
            }
        }
        for c in &cams {
            assert_eq!((c.position[2], c.pitch, c.fov_deg), (6.0, -20.0, 60.0));
        }
    }

    #[test]
    fn dense_long_range_overlaps() {
        let t = town(2);
        let p = CameraParams {
            count: 9,
            max_range: 60.0,
            ..Default::default()
        };
        assert!(matches!(place_cameras(&t, &p), Err(Error::OverlapUnavoidable { .. })));
    }

    #[test]
    fn fleet_town_gets_eight_disjoint_cameras() {
        let t = town(4);
        let cams = place_cameras(&t, &CameraParams::default()).unwrap();
        assert_eq!(cams.len(), 8);
        let fovs = build_fovs(&cams, 0.0).unwrap();
        for i in 0..fovs.len() {
            for j in i + 1..fovs.len() {
                assert!(!polygons_overlap(&fovs[i].vertices, &fovs[j].vertices));
            }
        }
    }
}
