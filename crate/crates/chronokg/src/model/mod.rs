//! Domain types shared by every pipeline stage, plus the pure age-bin and
//! era lookup functions.
//!
//! Everything in this module is an immutable value; all functions are pure
//! and safe to call from multiple threads.

mod bins;
mod config;
mod hash;
mod triple;

pub use bins::{collapse_bin, era_adjacent, era_of_range, range_to_fine_bin, AgeBin, OnsetBinTable};
pub use config::{CredibilityWeights, DocumentCaps, PipelineConfig, SeedRegistry};
pub use hash::edge_hash;
pub use triple::{
    DiseaseProfile, EvidenceBlock, Grade, LiteratureTier, StudyType, TemporalContext,
    TemporalResolution, TemporalTriple, EVIDENCE_TEXT_CAP, MAX_AGE_YEARS,
};
