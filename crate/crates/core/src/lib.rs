//! Desk-scale multi-vector retrieval engine and trade-off workbench.
//!
//! The crate bundles the moving parts of a late-interaction retrieval
//! pipeline behind a deterministic toy encoder, so the whole stack runs
//! end to end without any neural model:
//!
//! - [`scoring`] — token-matrix representations, MaxSim late interaction,
//!   pooling, projection, and binary sign quantization.
//! - [`encoder`] — hash-seeded deterministic token embedder.
//! - [`training`] — InfoNCE loss with analytic gradients for a linear
//!   head, hard-negative mining, and a two-stage training demo.
//! - [`index`] — persistent exact-search corpus index over multi-vector,
//!   pooled, and binary representations at several storage precisions.
//! - [`eval`] — nDCG@k harness over qrels/run files.
//! - [`cost`] — storage and reranker-latency estimation.

pub mod cost;
pub mod encoder;
pub mod error;
pub mod eval;
pub mod index;
pub mod interchange;
pub mod rng;
pub mod scoring;
pub mod synthetic;
pub mod training;

pub use error::{Error, Result};
pub use scoring::{BinaryMatrix, PooledVector, PoolingKind, SimilarityKind, TokenMatrix};
