use serde::{Deserialize, Serialize};

use super::minhash::{hash64, words};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingVector {
    pub values: Vec<f64>,
    pub normalized: bool,
}

impl EmbeddingVector {
    pub fn dims(&self) -> usize {
        self.values.len()
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn dot(&self, o: &EmbeddingVector) -> f64 {
        self.values.iter().zip(&o.values).map(|(a, b)| a * b).sum()
    }

    pub fn cosine(&self, o: &EmbeddingVector) -> f64 {
        let n = self.norm() * o.norm();
        if n == 0.0 {
            0.0
        } else {
            self.dot(o) / n
        }
    }

    fn check_normalized(&self) -> Result<()> {
        if self.normalized && (self.norm() - 1.0).abs() <= 1e-9 {
            Ok(())
        } else {
            Err(Error::NotNormalized)
        }
    }
}

pub trait Embedder: Send + Sync {
    fn dims(&self) -> usize;
    fn embed(&self, text: &str) -> Result<EmbeddingVector>;
}

/// Signed feature hashing of word unigrams and bigrams, L2-normalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HashingEmbedder {
    pub dims: usize,
}

impl Default for HashingEmbedder {
    fn default() -> Self {
        HashingEmbedder { dims: 256 }
    }
}

impl Embedder for HashingEmbedder {
    fn dims(&self) -> usize {
        self.dims
    }

    fn embed(&self, text: &str) -> Result<EmbeddingVector> {
        let w = words(text);
        if w.is_empty() || self.dims == 0 {
            return Err(Error::EmptyText);
        }
        let mut v = vec![0.0; self.dims];
        let mut add = |feature: &str| {
            let h = hash64(feature);
            let sign = if h >> 63 == 0 { 1.0 } else { -1.0 };
            v[(h % self.dims as u64) as usize] += sign;
        };
        for word in &w {
            add(&format!("u:{word}"));
        }
        for pair in w.windows(2) {
            add(&format!("b:{} {}", pair[0], pair[1]));
        }
        let mut n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n == 0.0 {
            // every feature cancelled out; fall back to a whole-text bucket
            let h = hash64(&w.join(" "));
            v[(h % self.dims as u64) as usize] = 1.0;
            n = 1.0;
        }
        v.iter_mut().for_each(|x| *x /= n);
        Ok(EmbeddingVector {
            values: v,
            normalized: true,
        })
    }
}

pub fn embed(text: &str, dims: usize) -> Result<EmbeddingVector> {
    HashingEmbedder { dims }.embed(text)
}

pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Logistic of the dot product of two unit vectors.
pub fn align_prob(e_scene: &EmbeddingVector, e_key: &EmbeddingVector) -> Result<f64> {
    e_scene.check_normalized()?;
    e_key.check_normalized()?;
    Ok(sigmoid(e_scene.dot(e_key)))
}
