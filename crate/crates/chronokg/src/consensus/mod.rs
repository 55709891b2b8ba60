//! Multi-model consensus filter.
//!
//! Candidate triples from independent extraction models are normalized,
//! clustered with union-find under fuzzy entity matching, filtered by the
//! distinct-model threshold, and reduced to one representative per cluster
//! carrying a consensus confidence.

mod similarity;
mod union_find;

pub use similarity::similarity_ratio;
pub use union_find::UnionFind;

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

use crate::extraction::{Confidence, RawTriple};
use crate::model::TemporalTriple;

/// Entity string after cleanup. Slash-separated compounds keep the first
/// component as the clustering key; the rest are recorded as variants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedEntity {
    pub key: String,
    pub variants: Vec<String>,
}

/// Lowercase, strip parenthetical spans, collapse whitespace, slash-split.
pub fn normalize_entity(name: &str) -> NormalizedEntity {
    let lower = name.to_lowercase();
    let mut depth = 0usize;
    let mut stripped = String::with_capacity(lower.len());
    for ch in lower.chars() {
        match ch {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            _ if depth == 0 => stripped.push(ch),
            _ => {}
        }
    }
    let mut parts = stripped
        .split('/')
        .map(|p| p.split_whitespace().collect::<Vec<_>>().join(" "))
        .filter(|p| !p.is_empty());
    let key = parts.next().unwrap_or_default();
    NormalizedEntity {
        key,
        variants: parts.collect(),
    }
}

/// The relation vocabulary used by the reference schema.
pub const RELATION_VOCABULARY: [&str; 10] = [
    "disease_phenotype_positive",
    "disease_protein",
    "indication",
    "contraindication",
    "off_label_use",
    "disease_disease",
    "phenotype_protein",
    "drug_effect",
    "anatomy_involvement",
    "exposure_disease",
];

/// Canonical form of a surface relation. Quarantined relations never take
/// part in clustering, so single-model oddities cannot sneak through.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CanonicalRelation {
    Known(&'static str),
    Quarantine(String),
}

impl CanonicalRelation {
    pub fn as_str(&self) -> &str {
        match self {
            CanonicalRelation::Known(s) => s,
            CanonicalRelation::Quarantine(s) => s,
        }
    }

    pub fn is_quarantined(&self) -> bool {
        matches!(self, CanonicalRelation::Quarantine(_))
    }
}

/// Map a surface relation onto the ten-relation vocabulary.
pub fn relation_canonical(relation: &str) -> CanonicalRelation {
    let norm: String = relation
        .to_lowercase()
        .chars()
        .map(|c| if c == '-' || c == '/' || c.is_whitespace() { '_' } else { c })
        .collect::<String>()
        .split('_')
        .filter(|s| !s.is_empty())
        .collect::<Vec<_>>()
        .join("_");
    if let Some(v) = RELATION_VOCABULARY.iter().find(|v| **v == norm) {
        return CanonicalRelation::Known(v);
    }
    let mapped = match norm.as_str() {
        "has_phenotype" | "phenotype" | "presents_with" | "disease_phenotype"
        | "associated_with_phenotype" | "causes_phenotype" | "phenotype_positive" => {
            Some("disease_phenotype_positive")
        }
        "disease_gene" | "associated_gene" | "gene_association" | "caused_by"
        | "caused_by_gene" | "gene" | "disease_protein_association" => Some("disease_protein"),
        "treats" | "treatment" | "indicated_for" | "treated_with" | "drug_indication"
        | "therapy" => Some("indication"),
        "contraindicated" | "contraindicated_in" => Some("contraindication"),
        "off_label" | "off_label_drug" => Some("off_label_use"),
        "differential" | "differential_diagnosis" | "related_disease" | "comorbid"
        | "comorbidity" | "disease_association" => Some("disease_disease"),
        "phenotype_gene" | "gene_phenotype" => Some("phenotype_protein"),
        "side_effect" | "adverse_effect" | "drug_side_effect" | "causes_side_effect" => {
            Some("drug_effect")
        }
        "affects_anatomy" | "anatomy" | "localized_to" | "anatomical_involvement"
        | "involves_anatomy" => Some("anatomy_involvement"),
        "exposure" | "risk_factor" | "environmental_exposure" | "exposure_risk" => {
            Some("exposure_disease")
        }
        _ => None,
    };
    match mapped {
        Some(c) => CanonicalRelation::Known(c),
        None => CanonicalRelation::Quarantine(norm),
    }
}

/// A surviving cluster: the representative extraction plus agreement data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsensusTriple {
    pub representative: RawTriple,
    /// Canonical relation the cluster formed under.
    pub relation: String,
    /// Normalized clustering keys of the representative.
    pub subject_key: String,
    pub object_key: String,
    /// Slash-split remainders recorded during normalization.
    pub subject_variants: Vec<String>,
    pub object_variants: Vec<String>,
    /// `|agreeing_models| / total models that processed the document`.
    pub consensus_confidence: f64,
    pub agreeing_models: BTreeSet<String>,
    pub cluster_members: usize,
}

struct Candidate {
    triple: RawTriple,
    model: String,
    subject: NormalizedEntity,
    object: NormalizedEntity,
    relation: CanonicalRelation,
}

fn confidence_rank(c: Confidence) -> u8 {
    match c {
        Confidence::High => 3,
        Confidence::Medium => 2,
        Confidence::Low => 1,
    }
}

/// Whether two candidates may be merged into one cluster.
fn can_union(a: &Candidate, b: &Candidate, fuzzy_threshold: u32) -> bool {
    !a.relation.is_quarantined()
        && !b.relation.is_quarantined()
        && a.relation == b.relation
        && a.model != b.model
        && similarity_ratio(&a.subject.key, &b.subject.key) >= fuzzy_threshold
        && similarity_ratio(&a.object.key, &b.object.key) >= fuzzy_threshold
}

/// Consensus over one document's per-model extractions.
///
/// `total_models` counts every model that processed the document, including
/// a tiebreaker that returned nothing.
pub fn compute_consensus(
    per_model_triples: &BTreeMap<String, Vec<RawTriple>>,
    total_models: usize,
    threshold: u32,
    fuzzy_threshold: u32,
) -> Vec<ConsensusTriple> {
    let mut candidates: Vec<Candidate> = Vec::new();
    for (model, triples) in per_model_triples {
        for t in triples {
            candidates.push(Candidate {
                subject: normalize_entity(&t.subject),
                object: normalize_entity(&t.object),
                relation: relation_canonical(&t.relation),
                model: model.clone(),
                triple: t.clone(),
            });
        }
    }
    if candidates.is_empty() || total_models == 0 {
        return Vec::new();
    }

    let mut uf = UnionFind::new(candidates.len());
    for i in 0..candidates.len() {
        for j in (i + 1)..candidates.len() {
            if can_union(&candidates[i], &candidates[j], fuzzy_threshold) {
                uf.union(i, j);
            }
        }
    }

    let mut out = Vec::new();
    for group in uf.groups() {
        let models: BTreeSet<String> =
            group.iter().map(|&i| candidates[i].model.clone()).collect();
        if (models.len() as u32) < threshold {
            continue;
        }
        // Highest model-reported confidence wins; ties go to the
        // lexicographically smallest (model, subject, object).
        let rep_idx = *group
            .iter()
            .min_by(|&&a, &&b| {
                let (ca, cb) = (&candidates[a], &candidates[b]);
                confidence_rank(cb.triple.confidence)
                    .cmp(&confidence_rank(ca.triple.confidence))
                    .then_with(|| {
                        (&ca.model, &ca.triple.subject, &ca.triple.object).cmp(&(
                            &cb.model,
                            &cb.triple.subject,
                            &cb.triple.object,
                        ))
                    })
            })
            .unwrap();
        let rep = &candidates[rep_idx];
        out.push(ConsensusTriple {
            representative: rep.triple.clone(),
            relation: rep.relation.as_str().to_string(),
            subject_key: rep.subject.key.clone(),
            object_key: rep.object.key.clone(),
            subject_variants: rep.subject.variants.clone(),
            object_variants: rep.object.variants.clone(),
            consensus_confidence: models.len() as f64 / total_models as f64,
            agreeing_models: models,
            cluster_members: group.len(),
        });
    }
    out.sort_by(|a, b| {
        (&a.subject_key, &a.relation, &a.object_key, &a.representative.model).cmp(&(
            &b.subject_key,
            &b.relation,
            &b.object_key,
            &b.representative.model,
        ))
    });
    out
}

fn ranges_compatible(a: Option<(f64, f64)>, b: Option<(f64, f64)>) -> bool {
    match (a, b) {
        (None, None) => true,
        (Some((alo, ahi)), Some((blo, bhi))) => alo <= bhi && blo <= ahi,
        _ => false,
    }
}

/// Cross-document merge: validated triples with identical canonical
/// (subject, relation, object) and compatible onset ranges pool their
/// supporting PMIDs. Everything else about the earlier record is kept.
pub fn merge_multi_source(mut records: Vec<TemporalTriple>) -> Vec<TemporalTriple> {
    records.sort_by(|a, b| a.edge_id.cmp(&b.edge_id));
    let mut merged: Vec<TemporalTriple> = Vec::new();
    for rec in records {
        let key = (
            normalize_entity(&rec.source_name).key,
            rec.relation.clone(),
            normalize_entity(&rec.target_name).key,
        );
        let slot = merged.iter_mut().find(|m| {
            (
                normalize_entity(&m.source_name).key,
                m.relation.clone(),
                normalize_entity(&m.target_name).key,
            ) == key
                && ranges_compatible(m.onset_range(), rec.onset_range())
        });
        match slot {
            Some(base) => {
                for id in &rec.evidence.source_ids {
                    if !base.evidence.source_ids.contains(id) {
                        base.evidence.source_ids.push(id.clone());
                    }
                }
                base.evidence.source_ids.sort();
            }
            None => merged.push(rec),
        }
    }
    merged
}
