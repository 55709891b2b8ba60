//! Gold-standard validation: disease matching, containment, the
//! six-category discrepancy taxonomy, accuracy metrics, and coverage-gap
//! analysis.

mod gold;
mod judge;

pub use gold::{
    bin_to_range, load_genereviews, load_hpoa, load_orphadata, load_phenopacket_cases,
    phenopackets_to_gold, PhenopacketCase,
};
pub use judge::{
    aggregate_verdicts, judge_pair, sample_novel, JudgeVerdict, MockJudge, NovelDisease,
    OnsetClaim, PanelReport, SampledPair, VerdictKind,
};

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

use crate::consensus::normalize_entity;
use crate::error::{Error, Result};
use crate::model::{era_of_range, OnsetBinTable};
use crate::store::median;

/// Where a gold onset range came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GoldSource {
    Orphadata,
    Hpoa,
    GeneReviews,
    Phenopackets,
}

/// One gold-standard disease-level onset range, already numeric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoldRecord {
    pub source: GoldSource,
    pub disease_name: String,
    pub normalized_key: String,
    pub onset_min: f64,
    pub onset_max: f64,
}

/// Suffix tokens stripped during disease-name normalization.
pub const DISEASE_SUFFIXES: [&str; 3] = ["syndrome", "disease", "disorder"];

fn is_type_numeral(token: &str) -> bool {
    !token.is_empty()
        && (token.chars().all(|c| c.is_ascii_digit())
            || token.chars().all(|c| matches!(c, 'i' | 'v' | 'x')))
}

/// Matching key for a disease name: lowercase, parentheticals stripped,
/// then common suffix tokens ("syndrome", "disease", "disorder") and
/// trailing "type N" numeral pairs removed. Never strips to empty.
pub fn normalize_disease_key(name: &str) -> String {
    let base = normalize_entity(name).key;
    let mut tokens: Vec<&str> = base.split_whitespace().collect();
    loop {
        match tokens.last() {
            Some(last) if DISEASE_SUFFIXES.contains(last) => {
                tokens.pop();
            }
            Some(last)
                if is_type_numeral(last)
                    && tokens.len() >= 2
                    && tokens[tokens.len() - 2] == "type" =>
            {
                tokens.pop();
                tokens.pop();
            }
            _ => break,
        }
    }
    if tokens.is_empty() {
        base
    } else {
        tokens.join(" ")
    }
}

/// Result of matching KG disease names against gold records.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Matching {
    /// (kg name, index into the gold slice), exactly one-to-one.
    pub pairs: Vec<(String, usize)>,
    /// Keys carried by more than one KG name or gold record.
    pub ambiguous: Vec<String>,
}

/// Exact match on normalized keys; keys shared by multiple entries on
/// either side are reported ambiguous and left unmatched.
pub fn match_diseases(kg_disease_names: &[String], gold_records: &[GoldRecord]) -> Matching {
    let mut kg_by_key: BTreeMap<String, Vec<&String>> = BTreeMap::new();
    for name in kg_disease_names {
        kg_by_key.entry(normalize_disease_key(name)).or_default().push(name);
    }
    let mut gold_by_key: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (i, g) in gold_records.iter().enumerate() {
        gold_by_key.entry(g.normalized_key.clone()).or_default().push(i);
    }

    let mut out = Matching::default();
    for (key, kg_names) in &kg_by_key {
        let Some(gold_ids) = gold_by_key.get(key) else {
            continue;
        };
        if kg_names.len() == 1 && gold_ids.len() == 1 {
            out.pairs.push((kg_names[0].clone(), gold_ids[0]));
        } else {
            out.ambiguous.push(key.clone());
        }
    }
    out
}

/// Closed-interval containment: the KG range lies inside the gold range.
pub fn containment(kg_range: (f64, f64), gold_range: (f64, f64)) -> bool {
    kg_range.0 >= gold_range.0 && kg_range.1 <= gold_range.1
}

/// The six discrepancy categories, exactly one per matched disease.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TaxonomyVerdict {
    Contained,
    AdjacentStage,
    GranularityMismatch,
    WiderButOverlaps,
    SingleTripleNoise,
    GenuinelyWrong,
}

impl TaxonomyVerdict {
    pub const ALL: [TaxonomyVerdict; 6] = [
        TaxonomyVerdict::Contained,
        TaxonomyVerdict::AdjacentStage,
        TaxonomyVerdict::GranularityMismatch,
        TaxonomyVerdict::WiderButOverlaps,
        TaxonomyVerdict::SingleTripleNoise,
        TaxonomyVerdict::GenuinelyWrong,
    ];
}

fn pooled(onsets: &[(f64, f64)]) -> (f64, f64) {
    (
        onsets.iter().map(|o| o.0).fold(f64::INFINITY, f64::min),
        onsets.iter().map(|o| o.1).fold(f64::NEG_INFINITY, f64::max),
    )
}

fn median_range(onsets: &[(f64, f64)]) -> (f64, f64) {
    let mins: Vec<f64> = onsets.iter().map(|o| o.0).collect();
    let maxs: Vec<f64> = onsets.iter().map(|o| o.1).collect();
    (median(&mins).unwrap(), median(&maxs).unwrap())
}

fn ranges_disjoint_gap(a: (f64, f64), b: (f64, f64)) -> Option<f64> {
    if a.1 < b.0 {
        Some(b.0 - a.1)
    } else if b.1 < a.0 {
        Some(a.0 - b.1)
    } else {
        None
    }
}

/// Classify one matched disease by fixed rule order.
///
/// The disease's pooled onset envelope drives the containment checks
/// (rules 1–2): a single outlier triple can break containment and
/// leave-one-out can restore it. The robust median range drives the era
/// and gap logic (rules 3–5). Rule 6 is the residual class for
/// overlapping granularity differences.
pub fn classify_discrepancy(
    triple_onsets: &[(f64, f64)],
    gold_range: (f64, f64),
    table: &OnsetBinTable,
) -> Result<TaxonomyVerdict> {
    if triple_onsets.is_empty() {
        return Err(Error::domain("classification needs at least one onset-bearing triple"));
    }
    // Rule 1: Contained.
    if containment(pooled(triple_onsets), gold_range) {
        return Ok(TaxonomyVerdict::Contained);
    }
    // Rule 2: SingleTripleNoise - one removal restores containment.
    if triple_onsets.len() >= 2 {
        for skip in 0..triple_onsets.len() {
            let rest: Vec<(f64, f64)> = triple_onsets
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != skip)
                .map(|(_, o)| *o)
                .collect();
            if containment(pooled(&rest), gold_range) {
                return Ok(TaxonomyVerdict::SingleTripleNoise);
            }
        }
    }
    let median_rng = median_range(triple_onsets);
    // Rule 3: GenuinelyWrong - disjoint with a gap above ten years.
    if let Some(gap) = ranges_disjoint_gap(median_rng, gold_range) {
        if gap > 10.0 {
            return Ok(TaxonomyVerdict::GenuinelyWrong);
        }
    }
    // Rule 4: AdjacentStage - neighboring eras, overlapping or nearly so.
    let kg_era = era_of_range(median_rng.0.clamp(0.0, 120.0), median_rng.1.clamp(0.0, 120.0), table)?;
    let gold_era = era_of_range(gold_range.0.clamp(0.0, 120.0), gold_range.1.clamp(0.0, 120.0), table)?;
    let near = match ranges_disjoint_gap(median_rng, gold_range) {
        None => true,
        Some(gap) => gap <= 10.0,
    };
    if crate::model::era_adjacent(kg_era, gold_era, table) && near {
        return Ok(TaxonomyVerdict::AdjacentStage);
    }
    // Rule 5: WiderButOverlaps - the gold range sits inside ours.
    if containment(gold_range, median_rng) {
        return Ok(TaxonomyVerdict::WiderButOverlaps);
    }
    // Rule 6: residual granularity differences.
    Ok(TaxonomyVerdict::GranularityMismatch)
}

/// Strict and effective accuracy over a verdict set.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AccuracyMetrics {
    pub n: usize,
    pub strict_precision: f64,
    pub effective_accuracy: f64,
    pub fractions: BTreeMap<String, f64>,
    pub counts: BTreeMap<String, usize>,
}

pub fn accuracy_metrics(verdicts: &[TaxonomyVerdict]) -> Result<AccuracyMetrics> {
    if verdicts.is_empty() {
        return Err(Error::domain("accuracy metrics need at least one verdict"));
    }
    let n = verdicts.len();
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for v in TaxonomyVerdict::ALL {
        counts.insert(format!("{v:?}"), 0);
    }
    for v in verdicts {
        *counts.get_mut(&format!("{v:?}")).unwrap() += 1;
    }
    let fractions = counts
        .iter()
        .map(|(k, c)| (k.clone(), *c as f64 / n as f64))
        .collect();
    let contained = counts["Contained"] as f64;
    let wrong = counts["GenuinelyWrong"] as f64;
    Ok(AccuracyMetrics {
        n,
        strict_precision: contained / n as f64,
        effective_accuracy: 1.0 - wrong / n as f64,
        fractions,
        counts,
    })
}

/// One row of the coverage table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoverageRow {
    pub resource: String,
    pub diseases_with_onset: usize,
    pub coverage_pct: f64,
}

/// Coverage-gap report against a disease universe.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoverageReport {
    pub universe: usize,
    pub rows: Vec<CoverageRow>,
    pub kg_count: usize,
    pub kg_pct: f64,
    pub novel_count: usize,
    pub novel_pct: f64,
}

/// Per-resource coverage plus the novel set (KG minus the union of all
/// gold resources), as percentages of the universe.
pub fn coverage_gap(
    kg_diseases: &BTreeSet<String>,
    resource_sets: &BTreeMap<String, BTreeSet<String>>,
    universe: usize,
) -> CoverageReport {
    let pct = |n: usize| 100.0 * n as f64 / universe as f64;
    let rows = resource_sets
        .iter()
        .map(|(name, set)| CoverageRow {
            resource: name.clone(),
            diseases_with_onset: set.len(),
            coverage_pct: pct(set.len()),
        })
        .collect();
    let union: BTreeSet<&String> = resource_sets.values().flatten().collect();
    let novel_count = kg_diseases.iter().filter(|d| !union.contains(d)).count();
    CoverageReport {
        universe,
        rows,
        kg_count: kg_diseases.len(),
        kg_pct: pct(kg_diseases.len()),
        novel_count,
        novel_pct: pct(novel_count),
    }
}
