//! Construction, validation, and evaluation machinery for a temporally
//! grounded biomedical knowledge graph.
//!
//! The pipeline runs four stages per disease: profile (ontology metadata
//! and literature tier), harvest (PubMed retrieval with caching), extract
//! (multi-model triple extraction), and consensus + quality control
//! (union-find clustering, plausibility rules, schema grading, credibility
//! scoring). Validated records land in a tiered JSONL store with a
//! temporal query API, which feeds gold-standard validation, a temporal QA
//! benchmark generator and scorers, a retrieval-rescue evaluation harness,
//! and a translation-embedding ablation over onset-binned relations.
//!
//! Every stochastic stage takes an explicit seed and every provider
//! contract has a deterministic offline implementation, so full runs are
//! replayable byte-for-byte. The `examples/` directory has one runnable
//! program per capability; the `chronokg` binary exposes the same stages
//! as subcommands.

pub mod acquisition;
pub mod benchmark;
pub mod cli;
pub mod consensus;
pub mod error;
pub mod evaluation;
pub mod extraction;
pub mod model;
pub mod pipeline;
pub mod quality;
pub mod store;
pub mod validation;

pub use error::{Error, Result};
