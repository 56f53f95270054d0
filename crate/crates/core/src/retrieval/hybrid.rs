use std::collections::BTreeMap;

use super::embed::{Embedder, EmbeddingVector, HashingEmbedder};
use super::minhash::{jaccard_estimate, minhash, MinHashSignature};
use super::rerank::{rerank, Candidate, RankedDoc, RetrievalConfig};
use super::spatial::SpatialIndex;
use crate::error::Result;
use crate::geometry::{Aabb, Point2};

/// A retrievable unit: id, text and ground-plane bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexedDoc {
    pub doc_id: String,
    pub text: String,
    pub bbox: Aabb,
}

/// Documents with their spatial index, signatures and embeddings.
pub struct RetrievalIndex {
    pub docs: BTreeMap<String, IndexedDoc>,
    pub spatial: SpatialIndex,
    pub signatures: BTreeMap<String, MinHashSignature>,
    pub embeddings: BTreeMap<String, EmbeddingVector>,
    pub cfg: RetrievalConfig,
}

/// Spatial hits within `radius` of `position` (every document when no
/// position is given) intersected with documents whose estimated Jaccard
/// similarity to the query reaches `tau_sim`. Sorted by doc id, each with
/// its estimate.
pub fn hybrid_retrieve(
    query_sig: &MinHashSignature,
    position: Option<Point2>,
    spatial: &SpatialIndex,
    signatures: &BTreeMap<String, MinHashSignature>,
    radius: f64,
    tau_sim: f64,
) -> Result<Vec<(String, f64)>> {
    let spatial_hits: Vec<String> = match position {
        Some(p) => spatial.query_radius(p, radius),
        None => signatures.keys().cloned().collect(),
    };
    let mut out = Vec::new();
    for id in spatial_hits {
        let Some(sig) = signatures.get(&id) else { continue };
        let j = jaccard_estimate(query_sig, sig)?;
        if j >= tau_sim {
            out.push((id, j));
        }
    }
    Ok(out)
}

impl RetrievalIndex {
    pub fn build(docs: Vec<IndexedDoc>, cfg: &RetrievalConfig) -> Result<Self> {
        let embedder = HashingEmbedder { dims: cfg.embed_dims };
        let mh = cfg.minhash();
        let mut signatures = BTreeMap::new();
        let mut embeddings = BTreeMap::new();
        for d in &docs {
            signatures.insert(d.doc_id.clone(), minhash(&d.text, &mh)?);
            embeddings.insert(d.doc_id.clone(), embedder.embed(&d.text)?);
        }
        let spatial = SpatialIndex::build(docs.iter().map(|d| (d.bbox, d.doc_id.clone())));
        Ok(RetrievalIndex {
            docs: docs.into_iter().map(|d| (d.doc_id.clone(), d)).collect(),
            spatial,
            signatures,
            embeddings,
            cfg: cfg.clone(),
        })
    }

    pub fn retrieve(&self, query: &str, position: Option<Point2>) -> Result<Vec<(String, f64)>> {
        let q = minhash(query, &self.cfg.minhash())?;
        hybrid_retrieve(&q, position, &self.spatial, &self.signatures, self.cfg.radius, self.cfg.tau_sim)
    }

    /// Retrieval followed by reranking against `scene_text` (the query
    /// itself when no scene is given).
    pub fn search(&self, query: &str, position: Option<Point2>, scene_text: Option<&str>) -> Result<Vec<RankedDoc>> {
        let hits = self.retrieve(query, position)?;
        let embedder = HashingEmbedder { dims: self.cfg.embed_dims };
        let scene = embedder.embed(scene_text.unwrap_or(query))?;
        let cands: Vec<Candidate> = hits
            .iter()
            .map(|(id, s)| Candidate {
                doc_id: id,
                s_base: *s,
                key: &self.embeddings[id],
            })
            .collect();
        rerank(&cands, &scene, &self.cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(id: &str, text: &str, x: f64) -> IndexedDoc {
        IndexedDoc {
            doc_id: id.into(),
            text: text.into(),
            bbox: Aabb {
                min: Point2::new(x, 0.0),
                max: Point2::new(x + 10.0, 10.0),
            },
        }
    }

    #[test]
    fn spatial_filter_wins() {
        let cfg = RetrievalConfig {
            radius: 100.0,
            ..Default::default()
        };
        let idx = RetrievalIndex::build(
            vec![
                doc("near", "Road 7: Waypoints = 49, Coverage = none", 0.0),
                doc("far", "Road 8: Waypoints = 49, Coverage = none", 1000.0),
            ],
            &cfg,
        )
        .unwrap();
        let hits = idx.retrieve("Road 8: Waypoints = 49, Coverage = none", Some(Point2::new(5.0, 5.0))).unwrap();
        assert!(hits.iter().all(|(id, _)| id != "far"));
        let hits = idx.retrieve("Road 8: Waypoints = 49, Coverage = none", None).unwrap();
        assert!(hits.iter().any(|(id, _)| id == "far"));
    }

    #[test]
    fn similarity_threshold_applies() {
        let cfg = RetrievalConfig {
            tau_sim: 0.9,
            ..Default::default()
        };
        let idx = RetrievalIndex::build(vec![doc("a", "zone school crossing alpha beta", 0.0)], &cfg).unwrap();
        assert!(idx.retrieve("entirely different words here", Some(Point2::new(0.0, 0.0))).unwrap().is_empty());
        let r = idx.search("zone school crossing alpha beta", Some(Point2::new(0.0, 0.0)), None).unwrap();
        assert_eq!(r[0].doc_id, "a");
    }
}
