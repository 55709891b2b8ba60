//! Pipeline configuration: thresholds, weights, caps, and seeds.
//!
//! Defaults reproduce the released pipeline settings; every value can be
//! overridden from the TOML config file so the tables stay auditable.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::model::bins::OnsetBinTable;
use crate::model::triple::MAX_AGE_YEARS;

/// Weights of the six credibility signals. Must sum to 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CredibilityWeights {
    pub journal_tier: f64,
    pub citation_velocity: f64,
    pub study_type: f64,
    pub replication: f64,
    pub retraction: f64,
    pub llm_consensus: f64,
}

impl Default for CredibilityWeights {
    fn default() -> Self {
        CredibilityWeights {
            journal_tier: 0.15,
            citation_velocity: 0.15,
            study_type: 0.25,
            replication: 0.15,
            retraction: 0.15,
            llm_consensus: 0.15,
        }
    }
}

impl CredibilityWeights {
    pub fn sum(&self) -> f64 {
        self.journal_tier
            + self.citation_velocity
            + self.study_type
            + self.replication
            + self.retraction
            + self.llm_consensus
    }
}

/// Per-tier harvest caps; `None` means take everything the source returns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocumentCaps {
    pub standard: Option<usize>,
    pub light: Option<usize>,
    pub minimal: Option<usize>,
}

impl Default for DocumentCaps {
    fn default() -> Self {
        DocumentCaps {
            standard: Some(150),
            light: None,
            minimal: None,
        }
    }
}

/// Named seeds so every stochastic stage is replayable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedRegistry {
    pub default: u64,
    pub bootstrap: u64,
    pub novelty_sample: u64,
    pub link_prediction: Vec<u64>,
}

impl Default for SeedRegistry {
    fn default() -> Self {
        SeedRegistry {
            default: 42,
            bootstrap: 42,
            novelty_sample: 42,
            link_prediction: vec![42, 7, 123],
        }
    }
}

fn default_study_type_weights() -> BTreeMap<String, f64> {
    [
        ("meta-analysis", 1.0),
        ("guideline", 0.95),
        ("rct", 0.9),
        ("database", 0.85),
        ("cohort", 0.7),
        ("case-control", 0.6),
        ("review", 0.5),
        ("case-series", 0.4),
        ("case-report", 0.3),
        ("expert-opinion", 0.2),
        ("other", 0.1),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect()
}

fn default_journal_tiers() -> BTreeMap<String, f64> {
    // Four-level lookup; unlisted journals yield no journal-tier signal.
    [
        ("new england journal of medicine", 1.0),
        ("lancet", 1.0),
        ("nature", 1.0),
        ("jama", 1.0),
        ("lancet neurology", 0.75),
        ("brain", 0.75),
        ("neurology", 0.75),
        ("neuromuscular disorders", 0.5),
        ("journal of neuromuscular diseases", 0.5),
        ("orphanet journal of rare diseases", 0.5),
        ("case reports in medicine", 0.25),
        ("cureus", 0.25),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect()
}

fn default_timing_lexicon() -> Vec<String> {
    // Trailing '-' marks a prefix entry.
    [
        "age", "onset", "year", "month", "decade", "trimester", "neonatal", "infan-", "child-",
        "adolescen-", "adult", "elderly", "congenital", "prenatal", "birth",
    ]
    .into_iter()
    .map(String::from)
    .collect()
}

/// Every tunable of the construction pipeline in one place.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    /// Minimum distinct models that must agree for a triple to survive.
    pub consensus_threshold: u32,
    /// Fuzzy match percentage for entity clustering.
    pub fuzzy_threshold: u32,
    pub age_min: f64,
    pub age_max: f64,
    pub credibility_weights: CredibilityWeights,
    pub study_type_weights: BTreeMap<String, f64>,
    pub journal_tiers: BTreeMap<String, f64>,
    pub document_caps: DocumentCaps,
    pub evidence_text_cap: usize,
    /// Second extraction pass fires when the first pass produced fewer
    /// temporal triples than this floor.
    pub second_pass_floor: usize,
    /// Onset-range gap (years) beyond which same-edge conflicts are flagged.
    pub conflict_gap_years: f64,
    pub seeds: SeedRegistry,
    pub bin_table: OnsetBinTable,
    /// Keyword lexicon for selecting the most timing-informative triple.
    pub timing_lexicon: Vec<String>,
    pub pipeline_version: String,
    /// ISO date stamped on produced records; fixed in config so replays are
    /// byte-identical.
    pub extraction_date: Option<String>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            consensus_threshold: 2,
            fuzzy_threshold: 80,
            age_min: 0.0,
            age_max: MAX_AGE_YEARS,
            credibility_weights: CredibilityWeights::default(),
            study_type_weights: default_study_type_weights(),
            journal_tiers: default_journal_tiers(),
            document_caps: DocumentCaps::default(),
            evidence_text_cap: 300,
            second_pass_floor: 1,
            conflict_gap_years: 10.0,
            seeds: SeedRegistry::default(),
            bin_table: OnsetBinTable::default(),
            timing_lexicon: default_timing_lexicon(),
            pipeline_version: "1.0.0".into(),
            extraction_date: None,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if (self.credibility_weights.sum() - 1.0).abs() > 1e-9 {
            return Err(Error::config(format!(
                "credibility weights sum to {}, expected 1.0",
                self.credibility_weights.sum()
            )));
        }
        if self.consensus_threshold < 2 {
            return Err(Error::config("consensus_threshold must be >= 2"));
        }
        if self.fuzzy_threshold > 100 {
            return Err(Error::config("fuzzy_threshold is a percentage in 0..=100"));
        }
        self.bin_table.validate()?;
        Ok(())
    }

    /// Date stamped on produced records.
    pub fn extraction_date(&self) -> String {
        self.extraction_date
            .clone()
            .unwrap_or_else(|| chrono::Utc::now().format("%Y-%m-%d").to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        PipelineConfig::default().validate().unwrap();
    }

    #[test]
    fn default_weights_sum_to_one_exactly() {
        assert_eq!(CredibilityWeights::default().sum(), 1.0);
    }

    #[test]
    fn threshold_below_two_rejected() {
        let cfg = PipelineConfig {
            consensus_threshold: 1,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn unbalanced_weights_rejected() {
        let cfg = PipelineConfig {
            credibility_weights: CredibilityWeights {
                journal_tier: 0.5,
                ..Default::default()
            },
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn toml_round_trip_with_partial_override() {
        let toml_src = "consensus_threshold = 3\nfuzzy_threshold = 85\n";
        let cfg: PipelineConfig = toml::from_str(toml_src).unwrap();
        assert_eq!(cfg.consensus_threshold, 3);
        assert_eq!(cfg.fuzzy_threshold, 85);
        assert_eq!(cfg.evidence_text_cap, 300);
        cfg.validate().unwrap();
    }
}
