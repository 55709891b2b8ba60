//! Disease profiling and literature harvesting.
//!
//! Two provider contracts ([`OntologySource`], [`DocumentSource`]) each have
//! a live HTTP implementation and a fixture implementation backed by local
//! files; both are interchangeable behind the same trait.

mod eutils;
mod fixtures;
mod harvest;
mod ols;

pub use eutils::{EutilsClient, TokenBucket};
pub use fixtures::{FixtureDocumentSource, FixtureOntologySource};
pub use ols::OlsOntologySource;
pub use harvest::{
    assign_tier, build_search_query, harvest, journal_signal, label_study_type, pre_rank,
    profile_disease, recency_signal, HarvestOutcome,
};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::StudyType;

/// One retrieved document after study-type labeling and pre-ranking.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceDocument {
    /// Numeric PubMed id, non-empty.
    pub pmid: String,
    pub pmc_id: Option<String>,
    pub title: String,
    /// Abstract or full text; non-empty.
    pub text: String,
    pub publication_year: Option<i32>,
    pub journal: Option<String>,
    pub study_type: StudyType,
    /// Harvest-time ranking score in [0, 1].
    pub pre_rank_score: f64,
}

impl SourceDocument {
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.pmid.is_empty() || !self.pmid.chars().all(|c| c.is_ascii_digit()) {
            out.push(format!("pmid '{}' is not numeric", self.pmid));
        }
        if self.text.trim().is_empty() {
            out.push("document text is empty".into());
        }
        out
    }
}

/// Raw ontology payload for one disease, before tier assignment.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RawDiseaseRecord {
    pub name: String,
    #[serde(default)]
    pub synonyms: Vec<String>,
    #[serde(default)]
    pub differential_diseases: Vec<String>,
    #[serde(default)]
    pub known_genes: Vec<String>,
    #[serde(default)]
    pub known_phenotypes: Vec<String>,
    #[serde(default)]
    pub category: Option<String>,
    #[serde(default)]
    pub inheritance_pattern: Option<String>,
    #[serde(default)]
    pub pubmed_count: u64,
    #[serde(default)]
    pub pmc_fulltext_available: bool,
}

/// Raw document payload as fetched, before labeling.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RawDocument {
    pub pmid: String,
    #[serde(default)]
    pub pmc_id: Option<String>,
    #[serde(default)]
    pub title: String,
    #[serde(default)]
    pub text: String,
    #[serde(default)]
    pub publication_year: Option<i32>,
    #[serde(default)]
    pub journal: Option<String>,
    #[serde(default)]
    pub publication_types: Vec<String>,
}

/// Ontology metadata lookup for the disease profiler.
pub trait OntologySource: Sync {
    fn lookup(&self, disease_id: &str) -> Result<RawDiseaseRecord>;
    /// Version string folded into cache keys.
    fn version(&self) -> String;
}

/// Literature search and retrieval for the evidence harvester.
pub trait DocumentSource: Sync {
    fn search(&self, query: &str) -> Result<Vec<String>>;
    fn fetch(&self, pmids: &[String]) -> Result<Vec<RawDocument>>;
    fn version(&self) -> String;
}
