//! Geometry of softmax unembeddings.
//!
//! A softmax classifier scores label `y` for input embedding `f` by
//! `exp(f · g(y))` normalised over labels. This crate builds such models,
//! applies the probability-preserving transforms (common translation of the
//! unembeddings, reciprocal scaling), measures similarity between label
//! vectors, and decides with a small LP solver whether two labels can tie for
//! the top probability.

pub mod error;
pub mod fixtures;
pub mod geometry;
pub mod io;
pub mod lp;
pub mod model;
pub mod transforms;

pub use error::{Error, Result};
pub use model::{
    argmax_label, logits, predict_proba, softmax, EmbeddingBatch, LabelVector,
    ProbabilityDistribution, SoftmaxModel, UnembeddingSet,
};
