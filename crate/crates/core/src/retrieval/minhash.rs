//! MinHash signatures over word shingles.
//!
//! Slot `i` uses the universal hash `(a_i·h + b_i) mod (2^61 − 1)` where `h`
//! is a 64-bit hash of the shingle and `(a_i, b_i)` come from a SplitMix64
//! stream keyed by the seed.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const MERSENNE_61: u64 = (1 << 61) - 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinHashConfig {
    pub len: usize,
    pub seed: u64,
    pub shingle_k: usize,
}

impl Default for MinHashConfig {
    fn default() -> Self {
        MinHashConfig {
            len: 128,
            seed: 1,
            shingle_k: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinHashSignature {
    pub seed: u64,
    pub shingle_k: usize,
    pub slots: Vec<u64>,
}

impl MinHashSignature {
    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn compatible(&self, o: &MinHashSignature) -> bool {
        self.slots.len() == o.slots.len() && self.seed == o.seed && self.shingle_k == o.shingle_k
    }
}

pub fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stable 64-bit string hash (FNV-1a followed by a SplitMix64 finalizer).
pub fn hash64(s: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in s.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    let mut st = h;
    splitmix64(&mut st)
}

/// Lowercased words: maximal runs of alphanumerics and underscores.
pub fn words(text: &str) -> Vec<String> {
    text.split(|c: char| !(c.is_alphanumeric() || c == '_'))
        .filter(|w| !w.is_empty())
        .map(str::to_lowercase)
        .collect()
}

/// Overlapping word k-grams; a text shorter than k words is one shingle.
pub fn shingles(text: &str, k: usize) -> BTreeSet<String> {
    let w = words(text);
    let k = k.max(1);
    if w.is_empty() {
        return BTreeSet::new();
    }
    if w.len() < k {
        return std::iter::once(w.join(" ")).collect();
    }
    w.windows(k).map(|g| g.join(" ")).collect()
}

fn coefficients(seed: u64, len: usize) -> Vec<(u64, u64)> {
    let mut st = seed;
    (0..len)
        .map(|_| {
            let a = splitmix64(&mut st) % (MERSENNE_61 - 1) + 1;
            let b = splitmix64(&mut st) % MERSENNE_61;
            (a, b)
        })
        .collect()
}

fn universal(a: u64, b: u64, h: u64) -> u64 {
    ((a as u128 * (h % MERSENNE_61) as u128 + b as u128) % MERSENNE_61 as u128) as u64
}

pub fn minhash(text: &str, cfg: &MinHashConfig) -> Result<MinHashSignature> {
    let sh = shingles(text, cfg.shingle_k);
    if sh.is_empty() {
        return Err(Error::EmptyText);
    }
    Ok(minhash_shingles(sh.iter().map(String::as_str), cfg))
}

/// Signature of an explicit shingle set.
pub fn minhash_shingles<'a>(shingles: impl IntoIterator<Item = &'a str>, cfg: &MinHashConfig) -> MinHashSignature {
    let coef = coefficients(cfg.seed, cfg.len);
    let mut slots = vec![u64::MAX; cfg.len];
    for s in shingles {
        let h = hash64(s);
        for (slot, (a, b)) in slots.iter_mut().zip(&coef) {
            let v = universal(*a, *b, h);
            if v < *slot {
                *slot = v;
            }
        }
    }
    MinHashSignature {
        seed: cfg.seed,
        shingle_k: cfg.shingle_k,
        slots,
    }
}

pub fn jaccard_estimate(a: &MinHashSignature, b: &MinHashSignature) -> Result<f64> {
    if !a.compatible(b) || a.is_empty() {
        return Err(Error::IncompatibleSignatures);
    }
    let eq = a.slots.iter().zip(&b.slots).filter(|(x, y)| x == y).count();
    Ok(eq as f64 / a.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_texts() {
        let cfg = MinHashConfig::default();
        let a = minhash("Road 131: Waypoints = 18", &cfg).unwrap();
        let b = minhash("road 131 waypoints 18", &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(jaccard_estimate(&a, &a).unwrap(), 1.0);
    }

    #[test]
    fn empty_and_incompatible() {
        let cfg = MinHashConfig::default();
        assert!(matches!(minhash("  ,, ", &cfg), Err(Error::EmptyText)));
        let a = minhash("a b c", &cfg).unwrap();
        let b = minhash("a b c", &MinHashConfig { len: 64, ..cfg }).unwrap();
        assert!(matches!(jaccard_estimate(&a, &b), Err(Error::IncompatibleSignatures)));
        let c = minhash("a b c", &MinHashConfig { seed: 9, ..cfg }).unwrap();
        assert!(jaccard_estimate(&a, &c).is_err());
    }

    #[test]
    fn shingling() {
        let s = shingles("The quick, brown fox", 2);
        assert_eq!(
            s.into_iter().collect::<Vec<_>>(),
            vec!["brown fox", "quick brown", "the quick"]
        );
        assert_eq!(shingles("solo", 2).len(), 1);
    }
}
