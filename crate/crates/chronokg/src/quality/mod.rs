//! Quality controller: per-triple validation, schema alignment and grading,
//! six-signal credibility scoring, conflict detection.

mod schema_index;

pub use schema_index::SchemaIndex;

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::consensus::ConsensusTriple;
use crate::acquisition::SourceDocument;
use crate::error::Result;
use crate::model::{
    edge_hash, CredibilityWeights, DiseaseProfile, EvidenceBlock, Grade, PipelineConfig,
    StudyType, TemporalContext, TemporalTriple,
};

/// The six credibility signals for one triple. Absent signals contribute
/// zero to the score rather than renormalizing the weights.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct CredibilitySignals {
    pub journal_tier: Option<f64>,
    pub citation_velocity: Option<f64>,
    pub study_type_weight: f64,
    pub replication_signal: Option<f64>,
    /// 1.0 means "checked, not retracted".
    pub retraction_check: Option<f64>,
    pub llm_consensus: f64,
}

/// Weight of a study-type name; unknown names fall back to "other".
pub fn study_type_weight(study_type: &str, weights: &BTreeMap<String, f64>) -> f64 {
    weights
        .get(study_type)
        .copied()
        .unwrap_or_else(|| weights.get("other").copied().unwrap_or(0.1))
}

/// Weight of a typed study kind.
pub fn weight_of(study_type: StudyType, weights: &BTreeMap<String, f64>) -> f64 {
    let name = serde_json::to_value(study_type)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_else(|| "other".to_string());
    study_type_weight(&name, weights)
}

/// Weighted blend of the six signals, clamped to [0, 1].
pub fn credibility_score(signals: &CredibilitySignals, weights: &CredibilityWeights) -> f64 {
    let score = weights.journal_tier * signals.journal_tier.unwrap_or(0.0)
        + weights.citation_velocity * signals.citation_velocity.unwrap_or(0.0)
        + weights.study_type * signals.study_type_weight
        + weights.replication * signals.replication_signal.unwrap_or(0.0)
        + weights.retraction * signals.retraction_check.unwrap_or(0.0)
        + weights.llm_consensus * signals.llm_consensus;
    score.clamp(0.0, 1.0)
}

/// Outcome of the rule checks for one consensus triple.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Validation {
    Pass,
    Fail(Vec<String>),
}

/// Apply the plausibility rules: non-empty entities, age bounds,
/// self-reference prevention. Failures are data, not errors.
pub fn validate_triple(triple: &ConsensusTriple, config: &PipelineConfig) -> Validation {
    let mut reasons = Vec::new();
    if triple.subject_key.is_empty() {
        reasons.push("subject empty after normalization".to_string());
    }
    if triple.object_key.is_empty() {
        reasons.push("object empty after normalization".to_string());
    }
    if !triple.subject_key.is_empty() && triple.subject_key == triple.object_key {
        reasons.push(format!("self-reference on '{}'", triple.subject_key));
    }
    if let Some(ctx) = &triple.representative.temporal {
        match (ctx.onset_age_min, ctx.onset_age_max) {
            (Some(min), Some(max)) => {
                if min < config.age_min || max > config.age_max {
                    reasons.push(format!(
                        "onset ({min}, {max}) outside [{}, {}]",
                        config.age_min, config.age_max
                    ));
                }
                if min > max {
                    reasons.push(format!("onset min {min} exceeds max {max}"));
                }
            }
            (None, None) => {}
            _ => reasons.push("onset age endpoints must both be present or both absent".into()),
        }
    }
    if reasons.is_empty() {
        Validation::Pass
    } else {
        Validation::Fail(reasons)
    }
}

/// Alignment result: grade plus normalized ids and type labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alignment {
    pub grade: Grade,
    pub source_id: String,
    pub source_type: String,
    pub target_id: String,
    pub target_type: String,
}

/// Grade A when the normalized edge resolves in the reference snapshot,
/// B when novel. Type labels are taken from the snapshot vocabulary when
/// the entity is known there.
pub fn align_schema(triple: &ConsensusTriple, index: &SchemaIndex) -> Alignment {
    let known = index.has_edge(&triple.subject_key, &triple.relation, &triple.object_key);
    Alignment {
        grade: if known { Grade::A } else { Grade::B },
        source_id: triple.subject_key.clone(),
        source_type: index
            .type_of(&triple.subject_key)
            .unwrap_or(&triple.representative.subject_type)
            .to_string(),
        target_id: triple.object_key.clone(),
        target_type: index
            .type_of(&triple.object_key)
            .unwrap_or(&triple.representative.object_type)
            .to_string(),
    }
}

/// One rejected triple with every violated rule.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rejection {
    pub subject: String,
    pub relation: String,
    pub object: String,
    pub model: String,
    pub pmid: String,
    pub reasons: Vec<String>,
}

/// Flag for same-edge onset conflicts; both records are kept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConflictFlag {
    pub subject: String,
    pub relation: String,
    pub object: String,
    pub range_a: (f64, f64),
    pub range_b: (f64, f64),
    pub gap_years: f64,
}

/// Output of the quality controller for one disease.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct QcOutcome {
    pub validated: Vec<TemporalTriple>,
    pub rejected: Vec<Rejection>,
    pub conflicts: Vec<ConflictFlag>,
    pub warnings: Vec<String>,
}

fn build_signals(
    triple: &ConsensusTriple,
    doc: Option<&SourceDocument>,
    config: &PipelineConfig,
) -> CredibilitySignals {
    CredibilitySignals {
        journal_tier: doc
            .and_then(|d| crate::acquisition::journal_signal(d.journal.as_deref(), config)),
        // Unpopulated in v1: input metadata carries no citation or
        // replication counts, and no retraction database is polled.
        citation_velocity: None,
        replication_signal: None,
        retraction_check: None,
        study_type_weight: doc
            .map(|d| weight_of(d.study_type, &config.study_type_weights))
            .unwrap_or_else(|| study_type_weight("other", &config.study_type_weights)),
        llm_consensus: triple.consensus_confidence,
    }
}

/// Validate, align, score, and assemble releasable records; report every
/// dropped triple and every onset conflict. Record conservation holds:
/// `input = validated + rejected`.
pub fn qc_pipeline(
    consensus: Vec<ConsensusTriple>,
    documents: &BTreeMap<String, SourceDocument>,
    profile: &DiseaseProfile,
    config: &PipelineConfig,
    index: &SchemaIndex,
) -> Result<QcOutcome> {
    let mut out = QcOutcome::default();
    let extraction_date = config.extraction_date();

    for triple in consensus {
        match validate_triple(&triple, config) {
            Validation::Fail(reasons) => {
                out.rejected.push(Rejection {
                    subject: triple.representative.subject.clone(),
                    relation: triple.relation.clone(),
                    object: triple.representative.object.clone(),
                    model: triple.representative.model.clone(),
                    pmid: triple.representative.pmid.clone(),
                    reasons,
                });
                continue;
            }
            Validation::Pass => {}
        }
        let doc = documents.get(&triple.representative.pmid);
        if doc.is_none() {
            out.warnings.push(format!(
                "no harvested document metadata for PMID {}",
                triple.representative.pmid
            ));
        }
        let alignment = align_schema(&triple, index);
        let signals = build_signals(&triple, doc, config);
        let score = credibility_score(&signals, &config.credibility_weights);
        let primary_source = format!("PMID:{}", triple.representative.pmid);
        let record = TemporalTriple {
            edge_id: edge_hash(
                &alignment.source_id,
                &triple.relation,
                &alignment.target_id,
                &primary_source,
            ),
            source_id: alignment.source_id,
            source_type: alignment.source_type,
            source_name: triple.representative.subject.clone(),
            relation: triple.relation.clone(),
            target_id: alignment.target_id,
            target_type: alignment.target_type,
            target_name: triple.representative.object.clone(),
            temporal: triple
                .representative
                .temporal
                .clone()
                .unwrap_or_else(TemporalContext::default),
            evidence: EvidenceBlock {
                tier: 2,
                source_ids: vec![primary_source],
                evidence_text: triple.representative.evidence_text.clone(),
                study_type: doc.map(|d| d.study_type).unwrap_or(StudyType::Other),
                credibility_score: score,
                consensus_confidence: triple.consensus_confidence,
                extraction_models: vec![triple.representative.model.clone()],
                extraction_method: "tier2_llm_consensus".to_string(),
                citation_count: None,
                is_retracted: false,
                publication_year: triple.representative.publication_year,
            },
            conditions: triple.representative.conditions.clone(),
            extraction_date: extraction_date.clone(),
            pipeline_version: config.pipeline_version.clone(),
            disease_profile_id: profile.disease_id.clone(),
            quality_grade: alignment.grade,
        };
        out.validated.push(record);
    }

    out.conflicts = detect_conflicts(&out.validated, config.conflict_gap_years);
    Ok(out)
}

/// Same-edge pairs whose onset ranges are disjoint with a gap above the
/// threshold. Reported, never auto-resolved.
pub fn detect_conflicts(records: &[TemporalTriple], gap_years: f64) -> Vec<ConflictFlag> {
    let mut flags = Vec::new();
    for i in 0..records.len() {
        for j in (i + 1)..records.len() {
            let (a, b) = (&records[i], &records[j]);
            if a.source_id != b.source_id || a.relation != b.relation || a.target_id != b.target_id
            {
                continue;
            }
            if let (Some((alo, ahi)), Some((blo, bhi))) = (a.onset_range(), b.onset_range()) {
                let gap = if ahi < blo {
                    blo - ahi
                } else if bhi < alo {
                    alo - bhi
                } else {
                    continue;
                };
                if gap > gap_years {
                    flags.push(ConflictFlag {
                        subject: a.source_name.clone(),
                        relation: a.relation.clone(),
                        object: a.target_name.clone(),
                        range_a: (alo, ahi),
                        range_b: (blo, bhi),
                        gap_years: gap,
                    });
                }
            }
        }
    }
    flags
}
