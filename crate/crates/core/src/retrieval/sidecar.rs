//! JSON sidecar holding one MinHash signature per document.

use serde::{Deserialize, Serialize};

use super::minhash::MinHashSignature;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SidecarEntry {
    pub doc_id: String,
    pub seed: u64,
    pub k: usize,
    #[serde(rename = "L")]
    pub len: usize,
    pub slots: Vec<u64>,
}

impl SidecarEntry {
    pub fn new(doc_id: &str, sig: &MinHashSignature) -> Self {
        SidecarEntry {
            doc_id: doc_id.to_string(),
            seed: sig.seed,
            k: sig.shingle_k,
            len: sig.len(),
            slots: sig.slots.clone(),
        }
    }

    pub fn signature(&self) -> MinHashSignature {
        MinHashSignature {
            seed: self.seed,
            shingle_k: self.k,
            slots: self.slots.clone(),
        }
    }
}

pub fn write_sidecar(entries: &[SidecarEntry]) -> String {
    let mut s = serde_json::to_string(entries).expect("sidecar serializes");
    s.push('\n');
    s
}

/// Parses and validates a sidecar: declared lengths must match, ids must be
/// unique, and all signatures must share one (seed, k, L).
pub fn read_sidecar(text: &str) -> Result<Vec<SidecarEntry>> {
    let entries: Vec<SidecarEntry> = serde_json::from_str(text)?;
    let mut seen = std::collections::BTreeSet::new();
    for e in &entries {
        if e.len != e.slots.len() || e.len == 0 {
            return Err(Error::InvalidInput(format!("{}: L = {} but {} slots", e.doc_id, e.len, e.slots.len())));
        }
        if !seen.insert(e.doc_id.as_str()) {
            return Err(Error::InvalidInput(format!("duplicate doc id {}", e.doc_id)));
        }
    }
    if let Some(first) = entries.first() {
        if entries.iter().any(|e| (e.seed, e.k, e.len) != (first.seed, first.k, first.len)) {
            return Err(Error::IncompatibleSignatures);
        }
    }
    Ok(entries)
}
