//! Pinhole camera model and ray casting onto the ground plane.
//!
//! World frame: right-handed, z up, yaw counterclockwise from +x, negative
//! pitch looks down. The camera body frame is x forward, y left, z up; image
//! coordinates follow the usual u-right/v-down convention, and `t_coord` maps
//! that optical frame into the body frame.

use nalgebra::{Matrix3, Rotation3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::map::CameraSpec;

/// Which axis convention the body frame uses.
///
/// `LeftHanded` mirrors the lateral axis (as simulators built on left-handed
/// engines do). The mirror is folded into both the rotation and `t_coord`,
/// so both conventions cast identical rays.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Handedness {
    #[default]
    RightHanded,
    LeftHanded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CameraModel {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    /// World to body rotation (mirrored for left-handed bodies).
    pub rotation: Matrix3<f64>,
    pub c_w: Vector3<f64>,
    pub handedness: Handedness,
    pub width: u32,
    pub height: u32,
}

pub fn intrinsics_from_fov(width: u32, height: u32, fov_deg: f64) -> Result<(f64, f64, f64, f64)> {
    if !(fov_deg > 0.0 && fov_deg < 180.0) {
        return Err(Error::InvalidFov(fov_deg));
    }
    let f = width as f64 / (2.0 * (fov_deg.to_radians() / 2.0).tan());
    Ok((f, f, width as f64 / 2.0, height as f64 / 2.0))
}

fn mirror(h: Handedness) -> Matrix3<f64> {
    match h {
        Handedness::RightHanded => Matrix3::identity(),
        Handedness::LeftHanded => Matrix3::from_diagonal(&Vector3::new(1.0, -1.0, 1.0)),
    }
}

impl CameraModel {
    pub fn from_spec(spec: &CameraSpec) -> Result<Self> {
        Self::with_handedness(spec, Handedness::RightHanded)
    }

    pub fn with_handedness(spec: &CameraSpec, handedness: Handedness) -> Result<Self> {
        let (fx, fy, cx, cy) = intrinsics_from_fov(spec.image_width, spec.image_height, spec.fov_deg)?;
        // body -> world: yaw about z, then pitch (negative = down), then roll
        let body_to_world = Rotation3::from_axis_angle(&Vector3::z_axis(), spec.yaw.to_radians())
            * Rotation3::from_axis_angle(&Vector3::y_axis(), -spec.pitch.to_radians())
            * Rotation3::from_axis_angle(&Vector3::x_axis(), spec.roll.to_radians());
        let rotation = mirror(handedness) * body_to_world.matrix().transpose();
        Ok(CameraModel {
            fx,
            fy,
            cx,
            cy,
            rotation,
            c_w: Vector3::new(spec.position[0], spec.position[1], spec.position[2]),
            handedness,
            width: spec.image_width,
            height: spec.image_height,
        })
    }

    /// Optical (u right, v down, z forward) to body axes.
    pub fn t_coord(&self) -> Matrix3<f64> {
        let t = Matrix3::new(0.0, 0.0, 1.0, -1.0, 0.0, 0.0, 0.0, -1.0, 0.0);
        mirror(self.handedness) * t
    }

    pub fn pixel_to_ray(&self, u: f64, v: f64) -> Vector3<f64> {
        Vector3::new((u - self.cx) / self.fx, (v - self.cy) / self.fy, 1.0)
    }

    /// World-frame direction of the ray through pixel (u, v).
    pub fn world_ray(&self, u: f64, v: f64) -> Vector3<f64> {
        // rotation is orthonormal, so its inverse is its transpose
        self.rotation.transpose() * (self.t_coord() * self.pixel_to_ray(u, v))
    }

    /// Forward projection; `None` when the point is not in front of the camera.
    pub fn project(&self, p: &Vector3<f64>) -> Option<(f64, f64)> {
        let p_cam = self.t_coord().transpose() * (self.rotation * (p - self.c_w));
        if p_cam.z <= 1e-12 {
            return None;
        }
        Some((self.fx * p_cam.x / p_cam.z + self.cx, self.fy * p_cam.y / p_cam.z + self.cy))
    }

    pub fn in_image(&self, u: f64, v: f64) -> bool {
        u >= 0.0 && v >= 0.0 && u < self.width as f64 && v < self.height as f64
    }

    pub fn is_orthonormal(&self) -> bool {
        (self.rotation.transpose() * self.rotation - Matrix3::identity()).amax() < 1e-9
    }
}

pub fn ray_ground_intersect(c_w: &Vector3<f64>, d_world: &Vector3<f64>, ground_z: f64) -> Result<Point2> {
    if d_world.z == 0.0 || (c_w.z > ground_z && d_world.z > 0.0) {
        return Err(Error::SkywardRay);
    }
    let lambda = (ground_z - c_w.z) / d_world.z;
    if lambda <= 0.0 {
        return Err(Error::BehindCamera);
    }
    let p = c_w + d_world * lambda;
    Ok(Point2::new(p.x, p.y))
}
