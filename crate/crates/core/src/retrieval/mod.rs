//! Tokenization, MinHash, spatial indexing, hybrid retrieval, reranking,
//! session memory and prompt assembly.

pub mod embed;
pub mod hybrid;
pub mod memory;
pub mod minhash;
pub mod prompt;
pub mod rerank;
pub mod sidecar;
pub mod spatial;
pub mod tokens;

pub use embed::{align_prob, embed, Embedder, EmbeddingVector, HashingEmbedder};
pub use hybrid::{hybrid_retrieve, IndexedDoc, RetrievalIndex};
pub use memory::{MemoryEntry, SessionMemory};
pub use minhash::{jaccard_estimate, minhash, MinHashConfig, MinHashSignature};
pub use prompt::synthesize_prompt;
pub use rerank::{context_beta, rerank, Candidate, RankedDoc, RetrievalConfig};
pub use spatial::SpatialIndex;
pub use tokens::{parse_token, tokenize_doc, tokenize_route, tokenize_scene, ParsedToken, Token};
