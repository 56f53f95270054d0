use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::embed::EmbeddingVector;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemoryEntry {
    pub text: String,
    pub embedding: EmbeddingVector,
    pub timestamp: f64,
}

/// Bounded FIFO of past exchanges. Single writer.
#[derive(Debug, Clone, PartialEq)]
pub struct SessionMemory {
    capacity: usize,
    entries: VecDeque<MemoryEntry>,
}

impl SessionMemory {
    pub fn new(capacity: usize) -> Self {
        SessionMemory {
            capacity: capacity.max(1),
            entries: VecDeque::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = &MemoryEntry> {
        self.entries.iter()
    }

    pub fn push(&mut self, text: impl Into<String>, embedding: EmbeddingVector, t: f64) {
        self.entries.push_back(MemoryEntry {
            text: text.into(),
            embedding,
            timestamp: t,
        });
        while self.entries.len() > self.capacity {
            self.entries.pop_front();
        }
    }

    /// The `k` entries most similar to `query`; equal similarity prefers
    /// the newer entry.
    pub fn select(&self, query: &EmbeddingVector, k: usize) -> Vec<&MemoryEntry> {
        let mut scored: Vec<(f64, usize, &MemoryEntry)> = self
            .entries
            .iter()
            .enumerate()
            .map(|(i, e)| (query.cosine(&e.embedding), i, e))
            .collect();
        scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(b.1.cmp(&a.1)));
        scored.into_iter().take(k).map(|(_, _, e)| e).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::retrieval::embed::embed;
    use proptest::prelude::*;

    #[test]
    fn evicts_oldest() {
        let mut m = SessionMemory::new(3);
        for (i, t) in ["one", "two", "three", "four"].iter().enumerate() {
            m.push(*t, embed(t, 32).unwrap(), i as f64);
        }
        let texts: Vec<_> = m.entries().map(|e| e.text.as_str()).collect();
        assert_eq!(texts, vec!["two", "three", "four"]);
    }

    #[test]
    fn exact_match_first_and_recency_ties() {
        let mut m = SessionMemory::new(8);
        assert!(m.select(&embed("x", 32).unwrap(), 3).is_empty());
        for (i, t) in ["route to cctv", "zone school", "same", "same"].iter().enumerate() {
            m.push(format!("{t}#{i}"), embed(t, 64).unwrap(), i as f64);
        }
        let top = m.select(&embed("zone school", 64).unwrap(), 1);
        assert_eq!(top[0].text, "zone school#1");
        let top = m.select(&embed("same", 64).unwrap(), 2);
        assert_eq!(top[0].text, "same#3");
        assert_eq!(top[1].text, "same#2");
    }

    proptest! {
        #[test]
        fn holds_last_m_in_order(cap in 1usize..10, pushes in 0usize..30) {
            let mut m = SessionMemory::new(cap);
            let e = embed("a", 8).unwrap();
            for i in 0..pushes {
                m.push(i.to_string(), e.clone(), i as f64);
            }
            let got: Vec<String> = m.entries().map(|e| e.text.clone()).collect();
            let want: Vec<String> = (pushes.saturating_sub(cap)..pushes).map(|i| i.to_string()).collect();
            prop_assert_eq!(got, want);
        }
    }
}
