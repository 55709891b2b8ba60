//! Per-disease pipeline: profile, harvest, extract, consensus, quality
//! control, store write.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

use crate::acquisition::{harvest, profile_disease, DocumentSource, OntologySource, SourceDocument};
use crate::consensus::{compute_consensus, merge_multi_source, ConsensusTriple};
use crate::error::Result;
use crate::extraction::{extract_document, ProviderSet, RawTriple};
use crate::model::{DiseaseProfile, PipelineConfig};
use crate::quality::{qc_pipeline, QcOutcome, SchemaIndex};
use crate::store::{KgStore, StoreTier};

/// Everything a disease run needs besides configuration.
pub struct PipelineSources<'a> {
    pub ontology: &'a dyn OntologySource,
    pub documents: &'a dyn DocumentSource,
    pub providers: ProviderSet<'a>,
    pub schema_index: &'a SchemaIndex,
}

/// Stage counts and warnings for one disease run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiseaseRunReport {
    pub disease_id: String,
    pub disease_name: String,
    pub tier: crate::model::LiteratureTier,
    pub documents: usize,
    pub raw_triples: usize,
    pub consensus_triples: usize,
    /// Records surviving QC before the cross-document source merge;
    /// conservation holds against this count.
    pub validated_pre_merge: usize,
    pub validated: usize,
    pub rejected: usize,
    pub conflicts: usize,
    pub warnings: Vec<String>,
}

/// In-memory result of the extract/consensus/qc stages.
pub struct DiseaseRunOutput {
    pub profile: DiseaseProfile,
    pub documents: Vec<SourceDocument>,
    pub raw: Vec<RawTriple>,
    pub consensus: Vec<ConsensusTriple>,
    pub qc: QcOutcome,
    pub report: DiseaseRunReport,
}

/// Run profile → harvest → extract → consensus → qc for one disease.
pub fn run_disease(
    disease_id: &str,
    sources: &PipelineSources<'_>,
    config: &PipelineConfig,
    cache_dir: &Path,
) -> Result<DiseaseRunOutput> {
    let profile = profile_disease(disease_id, sources.ontology)?;
    let harvested = harvest(&profile, sources.documents, config, cache_dir)?;
    let mut warnings = harvested.warnings.clone();

    let doc_meta: BTreeMap<String, SourceDocument> = harvested
        .documents
        .iter()
        .map(|d| (d.pmid.clone(), d.clone()))
        .collect();

    let mut raw: Vec<RawTriple> = Vec::new();
    let mut consensus: Vec<ConsensusTriple> = Vec::new();
    for doc in &harvested.documents {
        let extraction = extract_document(doc, &profile, &sources.providers, config);
        for diag in &extraction.diagnostics {
            warnings.push(format!("pmid {}: [{}] {}", doc.pmid, diag.model, diag.message));
        }
        let survivors = compute_consensus(
            &extraction.per_model,
            extraction.models_processed.len(),
            config.consensus_threshold,
            config.fuzzy_threshold,
        );
        consensus.extend(survivors);
        for triples in extraction.per_model.into_values() {
            raw.extend(triples);
        }
    }

    let mut qc = qc_pipeline(consensus.clone(), &doc_meta, &profile, config, sources.schema_index)?;
    let validated_pre_merge = qc.validated.len();
    qc.validated = merge_multi_source(qc.validated);
    warnings.extend(qc.warnings.clone());

    let report = DiseaseRunReport {
        disease_id: disease_id.to_string(),
        disease_name: profile.name.clone(),
        tier: profile.tier,
        documents: harvested.documents.len(),
        raw_triples: raw.len(),
        consensus_triples: consensus.len(),
        validated_pre_merge,
        validated: qc.validated.len(),
        rejected: qc.rejected.len(),
        conflicts: qc.conflicts.len(),
        warnings: warnings.clone(),
    };

    Ok(DiseaseRunOutput {
        profile,
        documents: harvested.documents,
        raw,
        consensus,
        qc,
        report,
    })
}

/// Persist one disease run into the store's per-disease subtree,
/// replacing any previous run so re-runs stay byte-identical.
pub fn persist_disease_run(store: &KgStore, output: &DiseaseRunOutput) -> Result<()> {
    let disease_id = &output.report.disease_id;
    for tier in [StoreTier::Raw, StoreTier::Consensus, StoreTier::Validated] {
        let path = store.disease_tier_path(disease_id, tier);
        if path.exists() {
            std::fs::remove_file(&path)?;
        }
    }
    store.append_disease_records(disease_id, &output.raw, StoreTier::Raw)?;
    store.append_disease_records(disease_id, &output.consensus, StoreTier::Consensus)?;
    store.append_disease_records(disease_id, &output.qc.validated, StoreTier::Validated)?;

    let dir = store
        .disease_tier_path(disease_id, StoreTier::Validated)
        .parent()
        .map(Path::to_path_buf)
        .expect("disease tier path has a parent");
    std::fs::write(
        dir.join("qc_report.json"),
        serde_json::to_string_pretty(&serde_json::json!({
            "rejected": output.qc.rejected,
            "conflicts": output.qc.conflicts,
            "report": output.report,
        }))?,
    )?;
    Ok(())
}
