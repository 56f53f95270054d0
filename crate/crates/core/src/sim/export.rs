use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use super::observe::Visit;
use super::vehicle::GroundTruthRecord;
use crate::error::{Error, Result};
use crate::perception::io::write_observations;
use crate::perception::PixelObservation;

pub const GT_HEADER: [&str; 8] = ["frame", "t", "x", "y", "z", "speed", "heading", "visible_cams"];
pub const VISITS_HEADER: [&str; 4] = ["order", "cctv_id", "first_frame", "last_frame"];

pub fn write_gt<W: Write>(w: W, gt: &[GroundTruthRecord]) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    wtr.write_record(GT_HEADER)?;
    for r in gt {
        wtr.write_record([
            r.frame.to_string(),
            format!("{:.6}", r.t),
            format!("{:.9}", r.position[0]),
            format!("{:.9}", r.position[1]),
            format!("{:.9}", r.position[2]),
            format!("{:.9}", r.speed),
            format!("{:.9}", r.heading),
            r.visible_cams.join(";"),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_gt<R: Read>(r: R) -> Result<Vec<GroundTruthRecord>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(r);
    let headers = rdr.headers().map_err(|e| Error::parse(1, e.to_string()))?;
    if headers.iter().ne(GT_HEADER.iter().copied()) {
        return Err(Error::parse(1, format!("expected header {}", GT_HEADER.join(","))));
    }
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::parse(e.position().map_or(0, |p| p.line() as usize), e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let num = |i: usize| -> Result<f64> {
            rec[i]
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| Error::parse(line, format!("bad {} value {:?}", GT_HEADER[i], &rec[i])))
        };
        out.push(GroundTruthRecord {
            frame: rec[0].parse().map_err(|_| Error::parse(line, "bad frame"))?,
            t: num(1)?,
            position: [num(2)?, num(3)?, num(4)?],
            speed: num(5)?,
            heading: num(6)?,
            visible_cams: rec[7].split(';').filter(|s| !s.is_empty()).map(str::to_owned).collect(),
        });
    }
    Ok(out)
}

pub fn write_visits<W: Write>(w: W, visits: &[Visit]) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    wtr.write_record(VISITS_HEADER)?;
    for (i, v) in visits.iter().enumerate() {
        wtr.write_record([i.to_string(), v.cctv_id.clone(), v.first_frame.to_string(), v.last_frame.to_string()])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_visits<R: Read>(r: R) -> Result<Vec<Visit>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(r);
    let headers = rdr.headers().map_err(|e| Error::parse(1, e.to_string()))?;
    if headers.iter().ne(VISITS_HEADER.iter().copied()) {
        return Err(Error::parse(1, format!("expected header {}", VISITS_HEADER.join(","))));
    }
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::parse(e.position().map_or(0, |p| p.line() as usize), e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let int = |i: usize| rec[i].parse::<u64>().map_err(|_| Error::parse(line, format!("bad {}", VISITS_HEADER[i])));
        if int(0)? != out.len() as u64 {
            return Err(Error::parse(line, "order must count up from 0"));
        }
        let v = Visit {
            cctv_id: rec[1].to_owned(),
            first_frame: int(2)?,
            last_frame: int(3)?,
        };
        if v.last_frame < v.first_frame {
            return Err(Error::parse(line, "last_frame before first_frame"));
        }
        out.push(v);
    }
    Ok(out)
}

/// Writes `gt_traj.csv`, `observations.csv` and `visits.csv` into `out_dir`.
pub fn export(gt: &[GroundTruthRecord], obs: &[PixelObservation], visits: &[Visit], out_dir: &Path) -> Result<()> {
    std::fs::create_dir_all(out_dir)?;
    write_gt(BufWriter::new(File::create(out_dir.join("gt_traj.csv"))?), gt)?;
    write_observations(BufWriter::new(File::create(out_dir.join("observations.csv"))?), obs)?;
    write_visits(BufWriter::new(File::create(out_dir.join("visits.csv"))?), visits)?;
    Ok(())
}
