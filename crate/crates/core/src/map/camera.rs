use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{centroid, point_in_polygon, signed_area, Point2};
use crate::perception::camera_model::{ray_ground_intersect, CameraModel};

/// Border samples per image edge when casting the footprint.
pub const BORDER_SAMPLES: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CameraSpec {
    pub cctv_id: String,
    pub position: [f64; 3],
    pub yaw: f64,
    pub pitch: f64,
    pub roll: f64,
    pub fov_deg: f64,
    pub max_range: f64,
    pub image_width: u32,
    pub image_height: u32,
}

impl CameraSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.fov_deg > 0.0 && self.fov_deg < 180.0) {
            return Err(Error::InvalidFov(self.fov_deg));
        }
        if !(self.position[2] > 0.0) {
            return Err(Error::InvalidMap(format!("{}: camera height must be positive", self.cctv_id)));
        }
        if !(self.max_range > 0.0) {
            return Err(Error::InvalidMap(format!("{}: max_range must be positive", self.cctv_id)));
        }
        if self.image_width == 0 || self.image_height == 0 {
            return Err(Error::InvalidMap(format!("{}: empty image", self.cctv_id)));
        }
        if parse_cctv_index(&self.cctv_id).is_none() {
            return Err(Error::InvalidMap(format!("camera id {:?} is not CCTV_NN", self.cctv_id)));
        }
        Ok(())
    }

    pub fn foot_point(&self) -> Point2 {
        Point2::new(self.position[0], self.position[1])
    }
}

/// `CCTV_07` -> 7.
pub fn parse_cctv_index(id: &str) -> Option<u32> {
    let digits = id.strip_prefix("CCTV_")?;
    if digits.len() < 2 || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

pub fn cctv_id(index: u32) -> String {
    format!("CCTV_{index:02}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FovPolygon {
    pub cctv_id: String,
    pub vertices: Vec<Point2>,
}

impl FovPolygon {
    pub fn contains(&self, p: Point2) -> bool {
        point_in_fov(self, p)
    }

    pub fn centroid(&self) -> Point2 {
        centroid(&self.vertices)
    }
}

pub fn point_in_fov(fov: &FovPolygon, p: Point2) -> bool {
    point_in_polygon(&fov.vertices, p)
}

/// Image border sampled clockwise from the top-left corner.
pub fn border_pixels(width: u32, height: u32, per_edge: usize) -> Vec<(f64, f64)> {
    let (w, h) = (width as f64, height as f64);
    let n = per_edge as f64;
    let mut out = Vec::with_capacity(4 * per_edge);
    for i in 0..per_edge {
        out.push((w * i as f64 / n, 0.0));
    }
    for i in 0..per_edge {
        out.push((w, h * i as f64 / n));
    }
    for i in 0..per_edge {
        out.push((w - w * i as f64 / n, h));
    }
    for i in 0..per_edge {
        out.push((0.0, h - h * i as f64 / n));
    }
    out
}

/// Ground footprint of the camera frustum.
///
/// Each border ray is cast to `ground_z`. Hits beyond `max_range` (measured
/// horizontally from the foot point) and rays that never reach the ground are
/// pulled in to `max_range` along their azimuth.
pub fn build_fov_polygon(cam: &CameraSpec, ground_z: f64) -> Result<FovPolygon> {
    cam.validate()?;
    let model = CameraModel::from_spec(cam)?;
    let foot = cam.foot_point();
    let mut verts: Vec<Point2> = Vec::new();
    let mut any_hit = false;
    for (u, v) in border_pixels(cam.image_width, cam.image_height, BORDER_SAMPLES) {
        let d = model.world_ray(u, v);
        let azimuth = d.y.atan2(d.x);
        let clipped = foot + Point2::from_angle(azimuth) * cam.max_range;
        let p = match ray_ground_intersect(&model.c_w, &d, ground_z) {
            Ok(hit) if hit.dist(foot) <= cam.max_range => {
                any_hit = true;
                hit
            }
            _ => clipped,
        };
        if verts.last().is_none_or(|q| q.dist(p) > 1e-9) {
            verts.push(p);
        }
    }
    while verts.len() > 1 && verts[0].dist(*verts.last().unwrap()) <= 1e-9 {
        verts.pop();
    }
    if !any_hit || verts.len() < 3 || signed_area(&verts).abs() < 1e-9 {
        return Err(Error::DegenerateFov(cam.cctv_id.clone()));
    }
    if signed_area(&verts) < 0.0 {
        verts.reverse();
    }
    Ok(FovPolygon {
        cctv_id: cam.cctv_id.clone(),
        vertices: verts,
    })
}
