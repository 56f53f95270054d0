use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const REPORT_COLUMNS: [&str; 6] = [
    "Model Configuration",
    "FDE(X) [m]",
    "FDE(Y) [m]",
    "ADE [m]",
    "CCTV Top-1 (GT(T1))",
    "CCTV Top-K (GT(TK))",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub model: String,
    pub fde_x: f64,
    pub fde_y: f64,
    pub ade: f64,
    pub top1: usize,
    pub topk: usize,
    pub n_cases: usize,
}

impl ReportRow {
    fn validate(&self) -> Result<()> {
        if self.top1 > self.topk || self.topk > self.n_cases {
            return Err(Error::InvalidInput(format!(
                "{}: need top1 <= topk <= n, got {} / {} / {}",
                self.model, self.top1, self.topk, self.n_cases
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct ReportJson {
    columns: Vec<String>,
    rows: Vec<ReportRow>,
}

/// Markdown table plus pretty JSON of the same rows. Metres get two
/// decimals; counts are integers.
pub fn render_report(rows: &[ReportRow]) -> Result<(String, String)> {
    for r in rows {
        r.validate()?;
    }
    let mut text = format!("| {} |\n", REPORT_COLUMNS.join(" | "));
    text.push_str(&format!("|{}\n", "---|".repeat(REPORT_COLUMNS.len())));
    for r in rows {
        text.push_str(&format!(
            "| {} | {:.2} | {:.2} | {:.2} | {} | {} |\n",
            r.model, r.fde_x, r.fde_y, r.ade, r.top1, r.topk
        ));
    }
    let json = serde_json::to_string_pretty(&ReportJson {
        columns: REPORT_COLUMNS.iter().map(|s| s.to_string()).collect(),
        rows: rows.to_vec(),
    })?;
    Ok((text, json + "\n"))
}

pub fn rows_from_json(json: &str) -> Result<Vec<ReportRow>> {
    let r: ReportJson = serde_json::from_str(json)?;
    if r.columns.iter().ne(REPORT_COLUMNS.iter()) {
        return Err(Error::InvalidInput("report columns differ from the results table".into()));
    }
    for row in &r.rows {
        row.validate()?;
    }
    Ok(r.rows)
}

/// `step,distance` rows, one per aligned index.
pub fn write_per_step<W: Write>(w: W, rows: &[(String, usize, f64)]) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    wtr.write_record(["scenario_id", "step", "distance"])?;
    for (id, step, d) in rows {
        wtr.write_record([id.clone(), step.to_string(), format!("{d:.6}")])?;
    }
    wtr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row() -> ReportRow {
        ReportRow {
            model: "heuristic".into(),
            fde_x: 9.35,
            fde_y: 9.84,
            ade: 15.78,
            top1: 27,
            topk: 28,
            n_cases: 40,
        }
    }

    #[test]
    fn empty_is_header_only() {
        let (text, json) = render_report(&[]).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert!(rows_from_json(&json).unwrap().is_empty());
    }

    #[test]
    fn header_matches_results_table() {
        let (text, _) = render_report(&[]).unwrap();
        let cols: Vec<&str> = text.lines().next().unwrap().trim_matches('|').split('|').map(str::trim).collect();
        assert_eq!(
            cols,
            ["Model Configuration", "FDE(X) [m]", "FDE(Y) [m]", "ADE [m]", "CCTV Top-1 (GT(T1))", "CCTV Top-K (GT(TK))"]
        );
    }

    #[test]
    fn row_round_trips() {
        let (text, json) = render_report(&[row()]).unwrap();
        let back = rows_from_json(&json).unwrap();
        assert_eq!(back, vec![row()]);
        assert_eq!(render_report(&back).unwrap().0, text);
        assert!(text.ends_with("| heuristic | 9.35 | 9.84 | 15.78 | 27 | 28 |\n"));
    }

    #[test]
    fn inconsistent_counts_rejected() {
        assert!(render_report(&[ReportRow { top1: 30, ..row() }]).is_err());
        assert!(render_report(&[ReportRow { n_cases: 20, ..row() }]).is_err());
    }

    #[test]
    fn per_step_csv() {
        let mut buf = Vec::new();
        write_per_step(&mut buf, &[("S000".into(), 0, 0.5)]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "scenario_id,step,distance\nS000,0,0.500000\n");
    }
}
