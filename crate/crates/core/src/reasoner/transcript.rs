//! Append-only JSONL record of reasoner exchanges, usable for replay.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub request_hash: String,
    pub prompt: String,
    pub reply: String,
    /// Seconds since the Unix epoch.
    pub timestamp: f64,
}

pub fn request_hash(prompt: &str) -> String {
    hex::encode(Sha256::digest(prompt.as_bytes()))
}

pub struct Transcript {
    path: PathBuf,
    lock: Mutex<()>,
}

impl Transcript {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        Transcript {
            path: path.into(),
            lock: Mutex::new(()),
        }
    }

    pub fn append(&self, prompt: &str, reply: &str) -> Result<()> {
        let entry = TranscriptEntry {
            request_hash: request_hash(prompt),
            prompt: prompt.to_string(),
            reply: reply.to_string(),
            timestamp: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0),
        };
        let line = serde_json::to_string(&entry)?;
        let _g = self.lock.lock().unwrap_or_else(|e| e.into_inner());
        let mut f = OpenOptions::new().create(true).append(true).open(&self.path)?;
        writeln!(f, "{line}")?;
        Ok(())
    }
}

pub fn read_transcript(path: &Path) -> Result<Vec<TranscriptEntry>> {
    let f = File::open(path)?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(f).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let e: TranscriptEntry = serde_json::from_str(&line).map_err(|e| Error::parse(i + 1, e.to_string()))?;
        out.push(e);
    }
    Ok(out)
}

/// Replies indexed by request hash; the last entry for a hash wins.
pub fn replay_table(entries: &[TranscriptEntry]) -> HashMap<String, String> {
    entries.iter().map(|e| (e.request_hash.clone(), e.reply.clone())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.jsonl");
        let t = Transcript::new(&p);
        t.append("hello", "{\"a\":1}").unwrap();
        t.append("world", "r2").unwrap();
        let es = read_transcript(&p).unwrap();
        assert_eq!(es.len(), 2);
        assert_eq!(es[0].request_hash, request_hash("hello"));
        assert_eq!(es[0].request_hash.len(), 64);
        assert_eq!(replay_table(&es)[&request_hash("world")], "r2");
    }

    #[test]
    fn known_digest() {
        assert_eq!(
            request_hash("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
