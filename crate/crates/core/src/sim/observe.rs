use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::vehicle::GroundTruthRecord;
use crate::error::Result;
use crate::map::{build_fov_polygon, CameraSpec};
use crate::perception::{CameraModel, PixelObservation};

/// Track id of the simulated vehicle in every camera.
pub const TRACK_ID: u64 = 1;

/// Frames a visit must last.
pub const MIN_VISIT_STEPS: usize = 15;

/// Same-camera runs closer than this many frames are one visit.
pub const MERGE_GAP: u64 = 3;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Visit {
    pub cctv_id: String,
    pub first_frame: u64,
    pub last_frame: u64,
}

impl Visit {
    pub fn frames(&self) -> u64 {
        self.last_frame - self.first_frame + 1
    }
}

/// Forward pinhole projection of every ground-truth point inside a
/// camera's footprint and image. Output is ordered by frame, then camera.
pub fn project_observations(gt: &[GroundTruthRecord], cams: &[CameraSpec]) -> Result<Vec<PixelObservation>> {
    let views = cams
        .iter()
        .map(|c| Ok((c, CameraModel::from_spec(c)?, build_fov_polygon(c, 0.0)?)))
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::new();
    for r in gt {
        for (spec, model, fov) in &views {
            if !fov.contains(r.xy()) {
                continue;
            }
            let p = Vector3::new(r.position[0], r.position[1], r.position[2]);
            let Some((u, v)) = model.project(&p) else { continue };
            if model.in_image(u, v) {
                out.push(PixelObservation {
                    frame: r.frame,
                    t: r.t,
                    cctv_id: spec.cctv_id.clone(),
                    track_id: TRACK_ID,
                    u,
                    v,
                });
            }
        }
    }
    Ok(out)
}

/// Maximal visibility runs per camera, merged across gaps shorter than
/// [`MERGE_GAP`], keeping those of at least `min_steps` frames, in order of
/// first frame.
pub fn derive_visit_sequence(gt: &[GroundTruthRecord], min_steps: usize) -> Vec<Visit> {
    let mut open: Vec<Visit> = Vec::new();
    let mut closed: Vec<Visit> = Vec::new();
    for r in gt {
        for id in &r.visible_cams {
            match open.iter_mut().find(|v| &v.cctv_id == id) {
                Some(v) if r.frame - v.last_frame <= MERGE_GAP => v.last_frame = r.frame,
                Some(v) => {
                    closed.push(v.clone());
                    *v = Visit {
                        cctv_id: id.clone(),
                        first_frame: r.frame,
                        last_frame: r.frame,
                    };
                }
                None => open.push(Visit {
                    cctv_id: id.clone(),
                    first_frame: r.frame,
                    last_frame: r.frame,
                }),
            }
        }
    }
    closed.extend(open);
    closed.retain(|v| v.frames() >= min_steps as u64);
    closed.sort_by(|a, b| (a.first_frame, &a.cctv_id).cmp(&(b.first_frame, &b.cctv_id)));
    closed
}
