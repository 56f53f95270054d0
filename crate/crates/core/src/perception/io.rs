use std::io::{Read, Write};

use super::kinematics::{PixelObservation, WorldSample};
use crate::error::{Error, Result};

pub const OBSERVATIONS_HEADER: [&str; 6] = ["frame", "t", "cctv_id", "track_id", "u", "v"];

/// Reads `frame,t,cctv_id,track_id,u,v`. Errors name the 1-based file line.
pub fn read_observations<R: Read>(r: R) -> Result<Vec<PixelObservation>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(r);
    let headers = rdr.headers().map_err(|e| Error::parse(1, e.to_string()))?.clone();
    if headers.iter().ne(OBSERVATIONS_HEADER.iter().copied()) {
        return Err(Error::parse(1, format!("expected header {}", OBSERVATIONS_HEADER.join(","))));
    }
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
            Error::parse(line, e.to_string())
        })?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        let obs: PixelObservation = rec
            .deserialize(Some(&headers))
            .map_err(|e| Error::parse(line, e.to_string()))?;
        if ![obs.t, obs.u, obs.v].iter().all(|x| x.is_finite()) {
            return Err(Error::parse(line, "non-finite number"));
        }
        out.push(obs);
    }
    Ok(out)
}

pub fn write_observations<W: Write>(w: W, obs: &[PixelObservation]) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    wtr.write_record(OBSERVATIONS_HEADER)?;
    for o in obs {
        wtr.write_record([
            o.frame.to_string(),
            format!("{:.6}", o.t),
            o.cctv_id.clone(),
            o.track_id.to_string(),
            format!("{:.9}", o.u),
            format!("{:.9}", o.v),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

/// Writes `t,track_id,x,y,valid`; invalid samples leave x and y empty.
pub fn write_world_track<W: Write>(w: W, track_id: u64, samples: &[WorldSample]) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    wtr.write_record(["t", "track_id", "x", "y", "valid"])?;
    for s in samples {
        let (x, y, valid) = match s.position {
            Some(p) => (format!("{:.6}", p.x), format!("{:.6}", p.y), "1"),
            None => (String::new(), String::new(), "0"),
        };
        wtr.write_record([format!("{:.6}", s.t), track_id.to_string(), x, y, valid.to_string()])?;
    }
    wtr.flush()?;
    Ok(())
}
