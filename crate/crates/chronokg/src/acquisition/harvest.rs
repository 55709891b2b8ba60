//! Tier assignment, disease profiling, and document harvesting with an
//! on-disk cache.

use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::acquisition::fixtures::{pmid_order, sanitize_curie};
use crate::acquisition::{DocumentSource, OntologySource, RawDocument, SourceDocument};
use crate::error::{Error, Result};
use crate::model::{DiseaseProfile, LiteratureTier, PipelineConfig, StudyType};

/// Literature tier from the PubMed article count: Standard >= 100,
/// Light 20..=99, Minimal < 20.
pub fn assign_tier(article_count: u64) -> LiteratureTier {
    if article_count >= 100 {
        LiteratureTier::Standard
    } else if article_count >= 20 {
        LiteratureTier::Light
    } else {
        LiteratureTier::Minimal
    }
}

fn is_curie(id: &str) -> bool {
    match id.split_once(':') {
        Some((prefix, local)) => !prefix.is_empty() && !local.is_empty(),
        None => false,
    }
}

/// Assemble a [`DiseaseProfile`] from ontology metadata.
pub fn profile_disease(
    disease_id: &str,
    ontology: &dyn OntologySource,
) -> Result<DiseaseProfile> {
    if !is_curie(disease_id) {
        return Err(Error::not_found(format!(
            "'{disease_id}' is not a CURIE (expected prefix:localid)"
        )));
    }
    let raw = ontology.lookup(disease_id)?;
    Ok(DiseaseProfile {
        disease_id: disease_id.to_string(),
        tier: assign_tier(raw.pubmed_count),
        name: raw.name,
        synonyms: raw.synonyms,
        differential_diseases: raw.differential_diseases,
        known_genes: raw.known_genes,
        known_phenotypes: raw.known_phenotypes,
        category: raw.category,
        inheritance_pattern: raw.inheritance_pattern,
        pubmed_count: raw.pubmed_count,
        pmc_fulltext_available: raw.pmc_fulltext_available,
    })
}

/// Search term: disease name OR each synonym, in title/abstract fields.
pub fn build_search_query(profile: &DiseaseProfile) -> String {
    let mut terms = vec![format!("\"{}\"[tiab]", profile.name)];
    for syn in &profile.synonyms {
        terms.push(format!("\"{syn}\"[tiab]"));
    }
    terms.join(" OR ")
}

/// Equal-weight blend of the two harvest ranking signals; a missing signal
/// contributes zero, so the result stays in [0, 1].
pub fn pre_rank(journal_tier: Option<f64>, recency: Option<f64>) -> f64 {
    let sum = journal_tier.unwrap_or(0.0) + recency.unwrap_or(0.0);
    (sum / 2.0).clamp(0.0, 1.0)
}

/// Journal-tier signal from the configured lookup table.
pub fn journal_signal(journal: Option<&str>, config: &PipelineConfig) -> Option<f64> {
    journal.and_then(|j| config.journal_tiers.get(&j.to_lowercase()).copied())
}

/// Recency signal: 1.0 for current-year evidence, linear decay to 0 over 50
/// years.
pub fn recency_signal(publication_year: Option<i32>, reference_year: i32) -> Option<f64> {
    publication_year.map(|y| {
        let age = (reference_year - y).max(0) as f64;
        (1.0 - age / 50.0).clamp(0.0, 1.0)
    })
}

/// Keyword rules over publication-type metadata; "other" when ambiguous.
pub fn label_study_type(publication_types: &[String], title: &str) -> StudyType {
    let haystack = format!("{} {}", publication_types.join(" "), title).to_lowercase();
    let has = |needle: &str| haystack.contains(needle);
    if has("meta-analysis") || has("meta analysis") {
        StudyType::MetaAnalysis
    } else if has("guideline") {
        StudyType::Guideline
    } else if has("randomized controlled trial") || has("randomised controlled trial") {
        StudyType::Rct
    } else if has("registry") || has("database") {
        StudyType::Database
    } else if has("cohort") {
        StudyType::Cohort
    } else if has("case-control") || has("case control") {
        StudyType::CaseControl
    } else if has("case series") {
        StudyType::CaseSeries
    } else if has("case report") {
        StudyType::CaseReport
    } else if has("editorial") || has("comment") || has("expert opinion") {
        StudyType::ExpertOpinion
    } else if has("review") {
        StudyType::Review
    } else {
        StudyType::Other
    }
}

/// Harvest result: ranked documents plus non-fatal warnings.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HarvestOutcome {
    pub documents: Vec<SourceDocument>,
    pub warnings: Vec<String>,
    pub from_cache: bool,
}

#[derive(Serialize, Deserialize)]
struct CacheManifest {
    disease_id: String,
    source_version: String,
    fetched_pmids: Vec<String>,
    warnings: Vec<String>,
}

fn reference_year(config: &PipelineConfig) -> i32 {
    config
        .extraction_date()
        .get(..4)
        .and_then(|y| y.parse().ok())
        .unwrap_or(2026)
}

fn finalize(
    raw_docs: Vec<RawDocument>,
    profile: &DiseaseProfile,
    config: &PipelineConfig,
    warnings: &mut Vec<String>,
) -> Vec<SourceDocument> {
    let ref_year = reference_year(config);
    let mut docs: Vec<SourceDocument> = Vec::new();
    for raw in raw_docs {
        let doc = SourceDocument {
            study_type: label_study_type(&raw.publication_types, &raw.title),
            pre_rank_score: pre_rank(
                journal_signal(raw.journal.as_deref(), config),
                recency_signal(raw.publication_year, ref_year),
            ),
            pmid: raw.pmid,
            pmc_id: raw.pmc_id,
            title: raw.title,
            text: raw.text,
            publication_year: raw.publication_year,
            journal: raw.journal,
        };
        let violations = doc.violations();
        if violations.is_empty() {
            docs.push(doc);
        } else {
            warnings.push(format!("dropped document {}: {}", doc.pmid, violations.join("; ")));
        }
    }
    // Descending rank, ascending PMID on ties.
    docs.sort_by(|a, b| {
        b.pre_rank_score
            .partial_cmp(&a.pre_rank_score)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| pmid_order(&a.pmid).cmp(&pmid_order(&b.pmid)))
    });
    let cap = match profile.tier {
        LiteratureTier::Standard => config.document_caps.standard,
        LiteratureTier::Light => config.document_caps.light,
        LiteratureTier::Minimal => config.document_caps.minimal,
    };
    if let Some(cap) = cap {
        docs.truncate(cap);
    }
    docs
}

/// Retrieve, label, rank, and cap documents for one disease.
///
/// All fetched payloads are cached under
/// `<cache>/<disease>/<source version>/`; a subsequent call with the same
/// key issues zero source requests and returns byte-identical output.
pub fn harvest(
    profile: &DiseaseProfile,
    source: &dyn DocumentSource,
    config: &PipelineConfig,
    cache_dir: &Path,
) -> Result<HarvestOutcome> {
    let key_dir = cache_dir
        .join(sanitize_curie(&profile.disease_id))
        .join(sanitize_version(&source.version()));
    let manifest_path = key_dir.join("manifest.json");

    if manifest_path.exists() {
        let manifest: CacheManifest =
            serde_json::from_str(&std::fs::read_to_string(&manifest_path)?)?;
        let mut raw_docs = Vec::with_capacity(manifest.fetched_pmids.len());
        for pmid in &manifest.fetched_pmids {
            let text = std::fs::read_to_string(key_dir.join("docs").join(format!("{pmid}.json")))?;
            raw_docs.push(serde_json::from_str(&text)?);
        }
        let mut warnings = manifest.warnings;
        let documents = finalize(raw_docs, profile, config, &mut warnings);
        return Ok(HarvestOutcome {
            documents,
            warnings,
            from_cache: true,
        });
    }

    let mut warnings = Vec::new();
    let query = build_search_query(profile);
    let mut pmids = source.search(&query)?;
    pmids.sort_by_key(|a| pmid_order(a));
    pmids.dedup();

    let mut raw_docs: Vec<RawDocument> = Vec::new();
    for chunk in pmids.chunks(50) {
        match source.fetch(chunk) {
            Ok(batch) => raw_docs.extend(batch),
            Err(e) => {
                // Keep the retrieved prefix; record what was lost.
                warnings.push(format!(
                    "partial fetch: {} documents retrieved before '{e}'",
                    raw_docs.len()
                ));
                break;
            }
        }
    }

    std::fs::create_dir_all(key_dir.join("docs"))?;
    for doc in &raw_docs {
        std::fs::write(
            key_dir.join("docs").join(format!("{}.json", doc.pmid)),
            serde_json::to_string(doc)?,
        )?;
    }
    let manifest = CacheManifest {
        disease_id: profile.disease_id.clone(),
        source_version: source.version(),
        fetched_pmids: raw_docs.iter().map(|d| d.pmid.clone()).collect(),
        warnings: warnings.clone(),
    };
    std::fs::write(&manifest_path, serde_json::to_string_pretty(&manifest)?)?;

    let documents = finalize(raw_docs, profile, config, &mut warnings);
    Ok(HarvestOutcome {
        documents,
        warnings,
        from_cache: false,
    })
}

fn sanitize_version(v: &str) -> String {
    v.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '.' { c } else { '_' })
        .collect()
}
