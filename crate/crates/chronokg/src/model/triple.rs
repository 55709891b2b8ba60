//! The released record schema: one knowledge-graph edge with temporal
//! context, evidence provenance, and quality grading.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::consensus::normalize_entity;

/// Maximum years of age accepted anywhere in the pipeline.
pub const MAX_AGE_YEARS: f64 = 120.0;

/// Length cap on verbatim evidence quotes, in characters.
pub const EVIDENCE_TEXT_CAP: usize = 300;

/// Quality grade assigned by the quality controller: `A` when the edge is
/// confirmed against the reference schema snapshot, `B` when novel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Grade {
    A,
    B,
}

/// Resolution of the temporal annotation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TemporalResolution {
    Year,
    Month,
    Day,
    #[default]
    Unknown,
}

/// Study design of the supporting document. Weights for credibility scoring
/// live in [`crate::quality::study_type_weight`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum StudyType {
    #[serde(rename = "meta-analysis")]
    MetaAnalysis,
    #[serde(rename = "guideline")]
    Guideline,
    #[serde(rename = "rct")]
    Rct,
    #[serde(rename = "database")]
    Database,
    #[serde(rename = "cohort")]
    Cohort,
    #[serde(rename = "case-control")]
    CaseControl,
    #[serde(rename = "review")]
    Review,
    #[serde(rename = "case-series")]
    CaseSeries,
    #[serde(rename = "case-report")]
    CaseReport,
    #[serde(rename = "expert-opinion")]
    ExpertOpinion,
    #[serde(rename = "other")]
    Other,
}

impl StudyType {
    /// All eleven kinds, in descending evidence-weight order.
    pub const ALL: [StudyType; 11] = [
        StudyType::MetaAnalysis,
        StudyType::Guideline,
        StudyType::Rct,
        StudyType::Database,
        StudyType::Cohort,
        StudyType::CaseControl,
        StudyType::Review,
        StudyType::CaseSeries,
        StudyType::CaseReport,
        StudyType::ExpertOpinion,
        StudyType::Other,
    ];
}

/// When in the disease course the asserted fact holds.
///
/// `discovery_date`, `validity_start`, `validity_end`, and `superseded_by`
/// are carried for forward compatibility but unused in v1.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TemporalContext {
    pub onset_age_min: Option<f64>,
    pub onset_age_max: Option<f64>,
    pub progression_stage: Option<String>,
    pub milestone: Option<String>,
    pub temporal_qualifier: Option<String>,
    pub discovery_date: Option<String>,
    pub validity_start: Option<String>,
    pub validity_end: Option<String>,
    pub superseded_by: Option<String>,
    #[serde(default)]
    pub temporal_resolution: TemporalResolution,
    pub duration: Option<f64>,
    pub treatment_start_age: Option<f64>,
}

impl TemporalContext {
    /// True when the context carries at least one of the forms that count as
    /// temporal grounding: an onset pair, a stage, a milestone, or a
    /// qualifier.
    pub fn is_temporal(&self) -> bool {
        (self.onset_age_min.is_some() && self.onset_age_max.is_some())
            || self.progression_stage.is_some()
            || self.milestone.is_some()
            || self.temporal_qualifier.is_some()
    }

    /// Violated plausibility rules, empty when the context is admissible.
    /// These are exactly the cases the quality controller filters.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let (Some(min), Some(max)) = (self.onset_age_min, self.onset_age_max) {
            if min < 0.0 || max < 0.0 {
                out.push(format!("negative onset age ({min}, {max})"));
            }
            if min > max {
                out.push(format!("onset_age_min {min} exceeds onset_age_max {max}"));
            }
            if max > MAX_AGE_YEARS {
                out.push(format!("onset_age_max {max} exceeds {MAX_AGE_YEARS}"));
            }
        } else if self.onset_age_min.is_some() != self.onset_age_max.is_some() {
            out.push("onset age endpoints must both be present or both absent".into());
        }
        out
    }
}

/// Provenance and quality metadata attached to every released edge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvidenceBlock {
    /// Evidence tier; 2 = PubMed multi-model consensus.
    pub tier: u8,
    /// Supporting PMIDs, `PMID:`-prefixed. Never empty for validated records.
    pub source_ids: Vec<String>,
    /// Verbatim quote from the source, at most 300 characters.
    pub evidence_text: String,
    pub study_type: StudyType,
    pub credibility_score: f64,
    /// Fraction of models that processed the document and agreed; in (0, 1].
    pub consensus_confidence: f64,
    /// Model whose surviving extraction was kept as the representative row.
    pub extraction_models: Vec<String>,
    pub extraction_method: String,
    pub citation_count: Option<u64>,
    pub is_retracted: bool,
    /// Publication year of the primary source, when E-utilities supplied it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub publication_year: Option<i32>,
}

impl EvidenceBlock {
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.source_ids.is_empty() {
            out.push("evidence has no source PMIDs".into());
        }
        if self.evidence_text.chars().count() > EVIDENCE_TEXT_CAP {
            out.push(format!("evidence_text exceeds {EVIDENCE_TEXT_CAP} characters"));
        }
        if !(0.0..=1.0).contains(&self.credibility_score) {
            out.push(format!("credibility_score {} outside [0,1]", self.credibility_score));
        }
        if !(self.consensus_confidence > 0.0 && self.consensus_confidence <= 1.0) {
            out.push(format!(
                "consensus_confidence {} outside (0,1]",
                self.consensus_confidence
            ));
        }
        out
    }
}

/// One released knowledge-graph edge. Field order matches the released
/// JSONL record byte-for-byte so serialized output is stable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TemporalTriple {
    /// 12-hex-char content hash of the canonical edge tuple.
    pub edge_id: String,
    pub source_id: String,
    pub source_type: String,
    pub source_name: String,
    pub relation: String,
    pub target_id: String,
    pub target_type: String,
    pub target_name: String,
    pub temporal: TemporalContext,
    pub evidence: EvidenceBlock,
    pub conditions: Option<BTreeMap<String, String>>,
    pub extraction_date: String,
    pub pipeline_version: String,
    pub disease_profile_id: String,
    pub quality_grade: Grade,
}

impl TemporalTriple {
    /// Violated record invariants; empty for an admissible record.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let src = normalize_entity(&self.source_name);
        let tgt = normalize_entity(&self.target_name);
        if src.key.is_empty() {
            out.push("source_name empty after normalization".into());
        }
        if tgt.key.is_empty() {
            out.push("target_name empty after normalization".into());
        }
        if !src.key.is_empty() && src.key == tgt.key {
            out.push(format!("self-reference: '{}' relates to itself", src.key));
        }
        out.extend(self.temporal.violations());
        out.extend(self.evidence.violations());
        out
    }

    /// Onset pair when both endpoints are present.
    pub fn onset_range(&self) -> Option<(f64, f64)> {
        match (self.temporal.onset_age_min, self.temporal.onset_age_max) {
            (Some(a), Some(b)) => Some((a, b)),
            _ => None,
        }
    }
}

/// Per-disease document budget class derived from the PubMed article count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LiteratureTier {
    Standard,
    Light,
    Minimal,
}

/// Ontology-derived metadata for one disease, assembled by the profiler.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiseaseProfile {
    /// CURIE such as `MONDO:0010679`.
    pub disease_id: String,
    pub name: String,
    pub synonyms: Vec<String>,
    pub differential_diseases: Vec<String>,
    pub known_genes: Vec<String>,
    pub known_phenotypes: Vec<String>,
    pub category: Option<String>,
    pub inheritance_pattern: Option<String>,
    pub pubmed_count: u64,
    pub pmc_fulltext_available: bool,
    pub tier: LiteratureTier,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal_evidence() -> EvidenceBlock {
        EvidenceBlock {
            tier: 2,
            source_ids: vec!["PMID:1".into()],
            evidence_text: "quote".into(),
            study_type: StudyType::Review,
            credibility_score: 0.5,
            consensus_confidence: 1.0,
            extraction_models: vec!["m".into()],
            extraction_method: "tier2_llm_consensus".into(),
            citation_count: None,
            is_retracted: false,
            publication_year: None,
        }
    }

    fn minimal_triple() -> TemporalTriple {
        TemporalTriple {
            edge_id: "0123456789ab".into(),
            source_id: "d1".into(),
            source_type: "disease".into(),
            source_name: "Becker muscular dystrophy".into(),
            relation: "disease_phenotype_positive".into(),
            target_id: "p1".into(),
            target_type: "phenotype".into(),
            target_name: "cardiomyopathy".into(),
            temporal: TemporalContext {
                onset_age_min: Some(20.0),
                onset_age_max: Some(40.0),
                ..Default::default()
            },
            evidence: minimal_evidence(),
            conditions: None,
            extraction_date: "2026-04-03".into(),
            pipeline_version: "1.0.0".into(),
            disease_profile_id: "MONDO:10311".into(),
            quality_grade: Grade::A,
        }
    }

    #[test]
    fn admissible_record_has_no_violations() {
        assert!(minimal_triple().violations().is_empty());
    }

    #[test]
    fn age_bounds_rejected() {
        let mut t = minimal_triple();
        t.temporal.onset_age_min = Some(130.0);
        t.temporal.onset_age_max = Some(140.0);
        assert!(t.violations().iter().any(|v| v.contains("exceeds 120")));
    }

    #[test]
    fn min_above_max_rejected() {
        let mut t = minimal_triple();
        t.temporal.onset_age_min = Some(10.0);
        t.temporal.onset_age_max = Some(5.0);
        assert!(!t.violations().is_empty());
    }

    #[test]
    fn negative_age_rejected() {
        let mut t = minimal_triple();
        t.temporal.onset_age_min = Some(-1.0);
        t.temporal.onset_age_max = Some(2.0);
        assert!(t.violations().iter().any(|v| v.contains("negative")));
    }

    #[test]
    fn self_reference_rejected() {
        let mut t = minimal_triple();
        t.target_name = "Becker Muscular Dystrophy (BMD)".into();
        assert!(t.violations().iter().any(|v| v.contains("self-reference")));
    }

    #[test]
    fn temporal_forms_counted() {
        let mut c = TemporalContext::default();
        assert!(!c.is_temporal());
        c.milestone = Some("loss of ambulation".into());
        assert!(c.is_temporal());
    }

    #[test]
    fn study_type_serializes_with_hyphens() {
        let s = serde_json::to_string(&StudyType::MetaAnalysis).unwrap();
        assert_eq!(s, "\"meta-analysis\"");
        let s = serde_json::to_string(&StudyType::CaseControl).unwrap();
        assert_eq!(s, "\"case-control\"");
    }
}
