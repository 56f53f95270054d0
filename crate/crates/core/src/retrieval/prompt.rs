use std::fmt::Write as _;

use super::rerank::RankedDoc;
use crate::geometry::Point2;

fn render(query: &str, docs: &[(&RankedDoc, &str)], path: &[Point2]) -> String {
    let mut s = format!("[QUERY]\n{query}\n");
    for (d, text) in docs {
        let _ = write!(s, "[DOC {} score={:.4}]\n{text}\n", d.doc_id, d.s_final);
    }
    if !path.is_empty() {
        let pts: Vec<String> = path.iter().map(|p| format!("({:.1}, {:.1})", p.x, p.y)).collect();
        let _ = writeln!(s, "[PATH]\n{}", pts.join(" "));
    }
    s
}

/// Query block, ranked documents, then the path, within `budget` chars.
///
/// Lowest-ranked documents are dropped first; the top document is always
/// kept.
pub fn synthesize_prompt(query: &str, ranked: &[(RankedDoc, String)], path: &[Point2], budget: usize) -> String {
    let mut docs: Vec<(&RankedDoc, &str)> = ranked.iter().map(|(d, t)| (d, t.as_str())).collect();
    loop {
        let s = render(query, &docs, path);
        if s.chars().count() <= budget || docs.len() <= 1 {
            return s;
        }
        docs.pop();
    }
}
