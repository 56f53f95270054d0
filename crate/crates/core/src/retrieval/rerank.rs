use serde::{Deserialize, Serialize};

use super::embed::{align_prob, EmbeddingVector};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RetrievalConfig {
    pub radius: f64,
    pub tau_sim: f64,
    pub signature_len: usize,
    pub shingle_k: usize,
    pub seed: u64,
    pub beta_base: f64,
    pub n_optimal: usize,
    pub top_k: usize,
    pub embed_dims: usize,
    pub memory_capacity: usize,
    pub prompt_budget: usize,
}

impl Default for RetrievalConfig {
    fn default() -> Self {
        RetrievalConfig {
            radius: 60.0,
            tau_sim: 0.2,
            signature_len: 128,
            shingle_k: 2,
            seed: 1,
            beta_base: 0.5,
            n_optimal: 5,
            top_k: 5,
            embed_dims: 256,
            memory_capacity: 32,
            prompt_budget: 8000,
        }
    }
}

impl RetrievalConfig {
    pub fn validate(&self) -> Result<()> {
        let unit = |x: f64| (0.0..=1.0).contains(&x);
        if !(self.radius > 0.0) || !unit(self.tau_sim) || !unit(self.beta_base) {
            return Err(Error::InvalidInput("retrieval: radius > 0, tau_sim and beta_base in [0, 1]".into()));
        }
        let counts = [
            self.signature_len,
            self.shingle_k,
            self.n_optimal,
            self.top_k,
            self.embed_dims,
            self.memory_capacity,
            self.prompt_budget,
        ];
        if counts.contains(&0) {
            return Err(Error::InvalidInput("retrieval: counts must be positive".into()));
        }
        Ok(())
    }

    pub fn minhash(&self) -> super::minhash::MinHashConfig {
        super::minhash::MinHashConfig {
            len: self.signature_len,
            seed: self.seed,
            shingle_k: self.shingle_k,
        }
    }
}

/// Reranking weight: smaller when the candidate set is already rich.
pub fn context_beta(n_cand: usize, cfg: &RetrievalConfig) -> f64 {
    let cr = (n_cand as f64 / cfg.n_optimal as f64).min(1.0);
    cfg.beta_base * (0.3 + 0.7 * (1.0 - cr))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedDoc {
    pub doc_id: String,
    pub s_base: f64,
    pub p_align: f64,
    pub s_final: f64,
}

pub struct Candidate<'a> {
    pub doc_id: &'a str,
    pub s_base: f64,
    pub key: &'a EmbeddingVector,
}

pub fn fuse(s_base: f64, p_align: f64, beta: f64) -> f64 {
    (1.0 - beta) * s_base + beta * p_align
}

/// Scores candidates against the scene embedding with β from the
/// candidate count, then keeps the best `top_k` (ties by doc id).
pub fn rerank(cands: &[Candidate<'_>], scene: &EmbeddingVector, cfg: &RetrievalConfig) -> Result<Vec<RankedDoc>> {
    let beta = context_beta(cands.len(), cfg);
    rerank_with_beta(cands, scene, beta, cfg.top_k)
}

pub fn rerank_with_beta(cands: &[Candidate<'_>], scene: &EmbeddingVector, beta: f64, top_k: usize) -> Result<Vec<RankedDoc>> {
    let mut out = cands
        .iter()
        .map(|c| {
            let p = align_prob(scene, c.key)?;
            Ok(RankedDoc {
                doc_id: c.doc_id.to_string(),
                s_base: c.s_base,
                p_align: p,
                s_final: fuse(c.s_base, p, beta),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    out.sort_by(|a, b| b.s_final.total_cmp(&a.s_final).then_with(|| a.doc_id.cmp(&b.doc_id)));
    out.truncate(top_k);
    Ok(out)
}
