//! Temporal QA benchmark: question generation for nine task types,
//! automated QC, and answer scoring.
//!
//! Generation is fully template-based and seeded; the same sources, count,
//! and seed produce byte-identical question files. Every tier-1 gold
//! carries a trace back to its source record so it can be re-derived and
//! verified with zero mismatches.

mod scoring;

pub use scoring::{
    calibrated_onset_score, calibrated_onset_score_text, onset_tolerance, parse_age_range,
    score_answer, ScoreOutcome,
};

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::model::{era_of_range, OnsetBinTable};
use crate::quality::SchemaIndex;
use crate::store::StoreIndex;
use crate::validation::{GoldRecord, PhenopacketCase};

/// Benchmark tier: external gold standards, KG-derived, static controls,
/// or supplementary diagnostic probes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BenchmarkTier {
    Tier1,
    Tier2,
    Static,
    Supplementary,
}

/// The nine task types.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskType {
    TemporalWindow,
    TemporalDifferential,
    CrossDiseaseComparison,
    PhenopacketsOnset,
    PhenotypeOrdering,
    StageConditional,
    StaticDrug,
    StaticGene,
    NegativeTemporal,
}

impl TaskType {
    pub const ALL: [TaskType; 9] = [
        TaskType::TemporalWindow,
        TaskType::TemporalDifferential,
        TaskType::CrossDiseaseComparison,
        TaskType::PhenopacketsOnset,
        TaskType::PhenotypeOrdering,
        TaskType::StageConditional,
        TaskType::StaticDrug,
        TaskType::StaticGene,
        TaskType::NegativeTemporal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TaskType::TemporalWindow => "temporal_window",
            TaskType::TemporalDifferential => "temporal_differential",
            TaskType::CrossDiseaseComparison => "cross_disease_comparison",
            TaskType::PhenopacketsOnset => "phenopackets_onset",
            TaskType::PhenotypeOrdering => "phenotype_ordering",
            TaskType::StageConditional => "stage_conditional",
            TaskType::StaticDrug => "static_drug",
            TaskType::StaticGene => "static_gene",
            TaskType::NegativeTemporal => "negative_temporal",
        }
    }

    pub fn parse(s: &str) -> Option<TaskType> {
        TaskType::ALL.into_iter().find(|t| t.name() == s)
    }

    pub fn tier(self) -> BenchmarkTier {
        match self {
            TaskType::TemporalWindow
            | TaskType::TemporalDifferential
            | TaskType::CrossDiseaseComparison
            | TaskType::PhenopacketsOnset => BenchmarkTier::Tier1,
            TaskType::PhenotypeOrdering | TaskType::StageConditional => BenchmarkTier::Tier2,
            TaskType::StaticDrug | TaskType::StaticGene => BenchmarkTier::Static,
            TaskType::NegativeTemporal => BenchmarkTier::Supplementary,
        }
    }

    pub fn difficulty(self) -> Difficulty {
        match self {
            TaskType::StaticDrug | TaskType::StaticGene => Difficulty::Easy,
            TaskType::TemporalWindow | TaskType::CrossDiseaseComparison => Difficulty::Medium,
            _ => Difficulty::Hard,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Difficulty {
    Easy,
    Medium,
    Hard,
}

/// Gold answer payload.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum GoldAnswer {
    YesNo(bool),
    Label(String),
    Range { min: f64, max: f64 },
    Ordering(Vec<String>),
    List(Vec<String>),
}

/// Trace back to the record the gold was derived from.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GoldSourceTrace {
    pub source: String,
    /// Key of the source record (normalized disease, case group, edge).
    pub record: String,
    pub pmids: Vec<String>,
}

/// Machine-checkable facts retained for QC re-verification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AuditFacts {
    Window { probe: f64, gold_min: f64, gold_max: f64 },
    Differential { stated_era: String, option_eras: Vec<String> },
    Comparison { range_a: (f64, f64), range_b: (f64, f64) },
    Ordering { gold_onsets: Vec<f64> },
    Choice { option_consistent: Vec<bool> },
    None,
}

/// One benchmark item.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkQuestion {
    pub id: String,
    pub tier: BenchmarkTier,
    pub task_type: TaskType,
    pub difficulty: Difficulty,
    pub prompt: String,
    pub options: Option<Vec<String>>,
    pub gold: GoldAnswer,
    pub gold_source: GoldSourceTrace,
    pub disease: Option<String>,
    pub phenotype: Option<String>,
    pub audit: AuditFacts,
}

/// Source material handed to the generators.
pub struct BenchmarkSources<'a> {
    pub orphadata: &'a [GoldRecord],
    pub hpoa: &'a [GoldRecord],
    pub phenopacket_cases: &'a [PhenopacketCase],
    pub store: Option<&'a StoreIndex>,
    pub schema: Option<&'a SchemaIndex>,
    pub table: &'a OnsetBinTable,
}

fn fmt_age(a: f64) -> String {
    if a.fract() == 0.0 {
        format!("{}", a as i64)
    } else {
        format!("{a:.1}")
    }
}

fn letters(n: usize) -> Vec<char> {
    (0..n).map(|i| (b'A' + i as u8) as char).collect()
}

fn question_id(task: TaskType, idx: usize) -> String {
    format!("{}_{idx:04}", task.name())
}

fn rng_for(task: TaskType, seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let stream = TaskType::ALL.iter().position(|t| *t == task).unwrap() as u64;
    rng.set_stream(stream);
    rng
}

/// Generate up to `n` questions of one task type. Returns fewer with a
/// shortfall warning when the sources cannot support `n`.
pub fn generate_questions(
    task: TaskType,
    sources: &BenchmarkSources<'_>,
    n: usize,
    seed: u64,
) -> (Vec<BenchmarkQuestion>, Vec<String>) {
    let mut rng = rng_for(task, seed);
    let mut warnings = Vec::new();
    let questions = match task {
        TaskType::TemporalWindow => gen_window(sources, n, &mut rng),
        TaskType::TemporalDifferential => gen_differential(sources, n, &mut rng),
        TaskType::CrossDiseaseComparison => gen_comparison(sources, n, &mut rng),
        TaskType::PhenopacketsOnset => gen_phenopackets(sources, n, &mut rng),
        TaskType::PhenotypeOrdering => gen_ordering(sources, n, &mut rng),
        TaskType::StageConditional => gen_stage(sources, n, &mut rng),
        TaskType::StaticDrug => gen_static(sources, n, &mut rng, true),
        TaskType::StaticGene => gen_static(sources, n, &mut rng, false),
        TaskType::NegativeTemporal => gen_negative(sources, n, &mut rng),
    };
    if questions.len() < n {
        warnings.push(format!(
            "{}: requested {n}, generated {} (insufficient eligible material)",
            task.name(),
            questions.len()
        ));
    }
    (questions, warnings)
}

fn base_question(task: TaskType, idx: usize) -> BenchmarkQuestion {
    BenchmarkQuestion {
        id: question_id(task, idx),
        tier: task.tier(),
        task_type: task,
        difficulty: task.difficulty(),
        prompt: String::new(),
        options: None,
        gold: GoldAnswer::YesNo(false),
        gold_source: GoldSourceTrace::default(),
        disease: None,
        phenotype: None,
        audit: AuditFacts::None,
    }
}

/// Inside probe: an integer strictly between the bounds when one exists,
/// otherwise the midpoint (if itself strictly inside).
fn inside_probe(lo: f64, hi: f64, rng: &mut ChaCha8Rng) -> Option<f64> {
    let lo_int = (lo + 1.0).ceil() as i64;
    let hi_int = (hi - 1.0).floor() as i64;
    let candidates: Vec<f64> = (lo_int..=hi_int)
        .map(|v| v as f64)
        .filter(|v| *v > lo && *v < hi)
        .collect();
    if !candidates.is_empty() {
        return Some(candidates[rng.random_range(0..candidates.len())]);
    }
    let mid = (lo + hi) / 2.0;
    (mid > lo && mid < hi).then_some(mid)
}

/// Outside probe at least `margin` years from the nearer bound.
fn outside_probe(lo: f64, hi: f64, margin: f64, rng: &mut ChaCha8Rng) -> Option<f64> {
    let mut sides = Vec::new();
    if lo - margin >= 0.0 {
        sides.push(false);
    }
    if hi + margin <= 120.0 {
        sides.push(true);
    }
    if sides.is_empty() {
        return None;
    }
    let above = sides[rng.random_range(0..sides.len())];
    if above {
        let max = (hi + margin + 8.0).min(120.0).floor() as i64;
        let min = (hi + margin).ceil() as i64;
        Some(rng.random_range(min..=max.max(min)) as f64)
    } else {
        let max = (lo - margin).floor() as i64;
        let min = (lo - margin - 8.0).max(0.0).ceil() as i64;
        Some(rng.random_range(min..=max.min(max).max(min)) as f64)
    }
}

const OUTSIDE_MARGIN: f64 = 2.0;

fn gen_window(
    sources: &BenchmarkSources<'_>,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<BenchmarkQuestion> {
    let mut records: Vec<&GoldRecord> = sources.orphadata.iter().collect();
    records.sort_by(|a, b| a.normalized_key.cmp(&b.normalized_key));
    records.shuffle(rng);
    let mut out = Vec::new();
    let mut want_yes = true;
    for record in records.iter().cycle().take(records.len() * 2) {
        if out.len() == n {
            break;
        }
        let (lo, hi) = (record.onset_min, record.onset_max);
        let probe = if want_yes {
            inside_probe(lo, hi, rng)
        } else {
            outside_probe(lo, hi, OUTSIDE_MARGIN, rng)
        };
        let Some(probe) = probe else { continue };
        let mut q = base_question(TaskType::TemporalWindow, out.len());
        q.prompt = format!(
            "Is age {} years within the typical onset window for {}?",
            fmt_age(probe),
            record.disease_name
        );
        q.gold = GoldAnswer::YesNo(want_yes);
        q.gold_source = GoldSourceTrace {
            source: "orphadata".into(),
            record: record.normalized_key.clone(),
            pmids: vec![],
        };
        q.disease = Some(record.disease_name.clone());
        q.audit = AuditFacts::Window {
            probe,
            gold_min: lo,
            gold_max: hi,
        };
        out.push(q);
        want_yes = !want_yes;
    }
    out
}

fn era_of_record<'t>(r: &GoldRecord, table: &'t OnsetBinTable) -> Option<&'t str> {
    era_of_range(
        r.onset_min.clamp(0.0, 120.0),
        r.onset_max.clamp(0.0, 120.0),
        table,
    )
    .ok()
}

/// Distractor eras must sit at least two era indices away so adjacent-era
/// ambiguity never reaches QC.
const DIFFERENTIAL_ERA_DISTANCE: usize = 2;

fn gen_differential(
    sources: &BenchmarkSources<'_>,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<BenchmarkQuestion> {
    let table = sources.table;
    let mut records: Vec<(&GoldRecord, usize)> = sources
        .orphadata
        .iter()
        .filter_map(|r| {
            era_of_record(r, table).and_then(|e| table.era_index(e)).map(|i| (r, i))
        })
        .collect();
    records.sort_by(|a, b| a.0.normalized_key.cmp(&b.0.normalized_key));
    records.shuffle(rng);
    let mut out = Vec::new();
    for (target, target_era) in &records {
        if out.len() == n {
            break;
        }
        let mut distractors: Vec<&(&GoldRecord, usize)> = records
            .iter()
            .filter(|(r, idx)| {
                idx.abs_diff(*target_era) >= DIFFERENTIAL_ERA_DISTANCE
                    && r.normalized_key != target.normalized_key
            })
            .collect();
        if distractors.len() < 3 {
            continue;
        }
        distractors.shuffle(rng);
        let mut option_records: Vec<&GoldRecord> =
            vec![*target, distractors[0].0, distractors[1].0, distractors[2].0];
        option_records.shuffle(rng);
        let gold_pos = option_records
            .iter()
            .position(|r| r.normalized_key == target.normalized_key)
            .unwrap();
        let labels = letters(4);
        let body = option_records
            .iter()
            .zip(&labels)
            .map(|(r, l)| format!("({l}) {}", r.disease_name))
            .collect::<Vec<_>>()
            .join(", ");
        let era_name = era_of_record(target, table).unwrap();
        let mut q = base_question(TaskType::TemporalDifferential, out.len());
        q.prompt = format!(
            "A patient presents with symptoms during the {era_name} period. Based on typical age of onset, which of the following diseases is most consistent: {body}?"
        );
        q.options = Some(option_records.iter().map(|r| r.disease_name.clone()).collect());
        q.gold = GoldAnswer::Label(labels[gold_pos].to_string());
        q.gold_source = GoldSourceTrace {
            source: "orphadata".into(),
            record: target.normalized_key.clone(),
            pmids: vec![],
        };
        q.audit = AuditFacts::Differential {
            stated_era: era_name.to_string(),
            option_eras: option_records
                .iter()
                .map(|r| era_of_record(r, table).unwrap().to_string())
                .collect(),
        };
        out.push(q);
    }
    out
}

fn gen_comparison(
    sources: &BenchmarkSources<'_>,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<BenchmarkQuestion> {
    let mut records: Vec<&GoldRecord> = sources.orphadata.iter().collect();
    records.sort_by(|a, b| a.normalized_key.cmp(&b.normalized_key));
    records.shuffle(rng);
    let mut out = Vec::new();
    'outer: for i in 0..records.len() {
        for j in (i + 1)..records.len() {
            if out.len() == n {
                break 'outer;
            }
            let (a, b) = (records[i], records[j]);
            // Disjoint ranges make "earlier" unambiguous.
            if a.onset_max >= b.onset_min && b.onset_max >= a.onset_min {
                continue;
            }
            let (first, second) = if rng.random_bool(0.5) { (a, b) } else { (b, a) };
            let earlier = if a.onset_max < b.onset_min { a } else { b };
            let mut q = base_question(TaskType::CrossDiseaseComparison, out.len());
            q.prompt = format!(
                "Which disease typically has an earlier age of onset: {} or {}?",
                first.disease_name, second.disease_name
            );
            q.gold = GoldAnswer::Label(earlier.disease_name.clone());
            q.gold_source = GoldSourceTrace {
                source: "orphadata".into(),
                record: format!("{}|{}", a.normalized_key, b.normalized_key),
                pmids: vec![],
            };
            q.audit = AuditFacts::Comparison {
                range_a: (first.onset_min, first.onset_max),
                range_b: (second.onset_min, second.onset_max),
            };
            out.push(q);
        }
    }
    out
}

fn gen_phenopackets(
    sources: &BenchmarkSources<'_>,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<BenchmarkQuestion> {
    let mut groups: BTreeMap<(String, String), Vec<f64>> = BTreeMap::new();
    for case in sources.phenopacket_cases {
        groups
            .entry((case.disease.clone(), case.phenotype.clone()))
            .or_default()
            .push(case.onset_age);
    }
    let mut keys: Vec<(String, String)> = groups.keys().cloned().collect();
    keys.shuffle(rng);
    let mut out = Vec::new();
    for (disease, phenotype) in keys.into_iter().take(n) {
        let ages = &groups[&(disease.clone(), phenotype.clone())];
        let min = ages.iter().copied().fold(f64::INFINITY, f64::min);
        let max = ages.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut q = base_question(TaskType::PhenopacketsOnset, out.len());
        q.prompt = format!(
            "At what age does '{phenotype}' typically present in {disease}? (Based on patient case data)"
        );
        q.gold = GoldAnswer::Range { min, max };
        q.gold_source = GoldSourceTrace {
            source: "phenopackets".into(),
            record: format!("{disease}|{phenotype}|{} cases", ages.len()),
            pmids: vec![],
        };
        q.disease = Some(disease);
        q.phenotype = Some(phenotype);
        out.push(q);
    }
    out
}

fn gen_ordering(
    sources: &BenchmarkSources<'_>,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<BenchmarkQuestion> {
    let Some(store) = sources.store else {
        return Vec::new();
    };
    let mut out = Vec::new();
    let mut diseases: Vec<&str> = store
        .disease_keys()
        .into_iter()
        .filter(|k| k.contains(':'))
        .collect();
    diseases.sort();
    for disease in diseases {
        if out.len() == n {
            break;
        }
        let Ok(profile) = store.temporal_profile(disease) else {
            continue;
        };
        // Milestone rows with strictly ordered onset midpoints.
        let mut milestones: Vec<(String, f64, Vec<String>)> = profile
            .entries
            .iter()
            .filter_map(|e| match (&e.milestone, e.onset_min, e.onset_max) {
                (Some(m), Some(lo), Some(hi)) => Some((m.clone(), (lo + hi) / 2.0, e.pmids.clone())),
                _ => None,
            })
            .collect();
        milestones.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
        milestones.dedup_by(|a, b| a.0 == b.0);
        if milestones.len() < 3 {
            continue;
        }
        let strictly_ordered = milestones.windows(2).all(|w| w[0].1 < w[1].1);
        if !strictly_ordered {
            continue;
        }
        let milestones: Vec<_> = milestones.into_iter().take(4).collect();
        let mut listing: Vec<String> = milestones.iter().map(|(m, _, _)| m.clone()).collect();
        listing.shuffle(rng);
        let mut q = base_question(TaskType::PhenotypeOrdering, out.len());
        q.prompt = format!(
            "Rank the following clinical milestones for {} by typical age of occurrence: {}.",
            profile.disease_name,
            listing.join(", ")
        );
        q.gold = GoldAnswer::Ordering(milestones.iter().map(|(m, _, _)| m.clone()).collect());
        q.gold_source = GoldSourceTrace {
            source: "kg".into(),
            record: profile.disease_id.clone(),
            pmids: milestones.iter().flat_map(|(_, _, p)| p.clone()).collect(),
        };
        q.disease = Some(profile.disease_name.clone());
        q.audit = AuditFacts::Ordering {
            gold_onsets: milestones.iter().map(|(_, mid, _)| *mid).collect(),
        };
        out.push(q);
    }
    out
}

fn gen_stage(
    sources: &BenchmarkSources<'_>,
    n: usize,
    _rng: &mut ChaCha8Rng,
) -> Vec<BenchmarkQuestion> {
    let Some(store) = sources.store else {
        return Vec::new();
    };
    let mut out = Vec::new();
    let mut diseases: Vec<&str> = store
        .disease_keys()
        .into_iter()
        .filter(|k| k.contains(':'))
        .collect();
    diseases.sort();
    for disease in diseases {
        for stage in store.stages_of(disease) {
            if out.len() == n {
                return out;
            }
            let phenotypes = store.query_stage(disease, &stage);
            if phenotypes.is_empty() {
                continue;
            }
            let mut pmids: Vec<String> = store
                .disease_triples(disease)
                .unwrap_or_default()
                .iter()
                .filter(|t| {
                    t.temporal
                        .progression_stage
                        .as_deref()
                        .is_some_and(|s| s.trim().to_lowercase() == stage)
                })
                .flat_map(|t| t.evidence.source_ids.clone())
                .collect();
            pmids.sort();
            pmids.dedup();
            let profile = store.temporal_profile(disease).ok();
            let name = profile
                .as_ref()
                .map(|p| p.disease_name.clone())
                .unwrap_or_else(|| disease.to_string());
            let mut q = base_question(TaskType::StageConditional, out.len());
            q.prompt = format!("What phenotypes are characteristic of the {stage} stage of {name}?");
            q.gold = GoldAnswer::List(phenotypes);
            q.gold_source = GoldSourceTrace {
                source: "kg".into(),
                record: format!("{disease}|{stage}"),
                pmids,
            };
            q.disease = Some(name);
            out.push(q);
        }
    }
    out
}

fn gen_static(
    sources: &BenchmarkSources<'_>,
    n: usize,
    rng: &mut ChaCha8Rng,
    drugs: bool,
) -> Vec<BenchmarkQuestion> {
    let Some(schema) = sources.schema else {
        return Vec::new();
    };
    let relation = if drugs { "indication" } else { "disease_protein" };
    let task = if drugs { TaskType::StaticDrug } else { TaskType::StaticGene };
    // indication rows are (drug, indication, disease); gene rows are
    // (disease, disease_protein, gene).
    let edges: Vec<(String, String)> = schema
        .edges_sorted()
        .into_iter()
        .filter(|(_, r, _)| r == relation)
        .map(|(h, _, t)| if drugs { (t, h) } else { (h, t) })
        .collect();
    if edges.is_empty() {
        return Vec::new();
    }
    let mut answers_by_disease: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for (disease, answer) in &edges {
        answers_by_disease
            .entry(disease.clone())
            .or_default()
            .push(answer.clone());
    }
    let all_answers: Vec<String> = {
        let mut v: Vec<String> = edges.iter().map(|(_, a)| a.clone()).collect();
        v.sort();
        v.dedup();
        v
    };
    let mut diseases: Vec<String> = answers_by_disease.keys().cloned().collect();
    diseases.shuffle(rng);
    let mut out = Vec::new();
    for disease in diseases {
        if out.len() == n {
            break;
        }
        let linked = &answers_by_disease[&disease];
        let mut pool: Vec<&String> = all_answers.iter().filter(|a| !linked.contains(a)).collect();
        if pool.len() < 3 {
            continue;
        }
        pool.shuffle(rng);
        let gold_answer = linked[rng.random_range(0..linked.len())].clone();
        let mut options = vec![gold_answer.clone()];
        options.extend(pool.into_iter().take(3).cloned());
        options.shuffle(rng);
        let gold_pos = options.iter().position(|o| *o == gold_answer).unwrap();
        let labels = letters(4);
        let body = options
            .iter()
            .zip(&labels)
            .map(|(o, l)| format!("({l}) {o}"))
            .collect::<Vec<_>>()
            .join(", ");
        let mut q = base_question(task, out.len());
        q.prompt = if drugs {
            format!("Which drug is indicated for {disease}: {body}?")
        } else {
            format!("Which gene is associated with {disease}: {body}?")
        };
        q.gold = GoldAnswer::Label(labels[gold_pos].to_string());
        q.audit = AuditFacts::Choice {
            option_consistent: options.iter().map(|o| linked.contains(o)).collect(),
        };
        q.options = Some(options);
        q.gold_source = GoldSourceTrace {
            source: "schema".into(),
            record: format!("{disease}|{relation}|{gold_answer}"),
            pmids: vec![],
        };
        q.disease = Some(disease);
        out.push(q);
    }
    out
}

fn gen_negative(
    sources: &BenchmarkSources<'_>,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<BenchmarkQuestion> {
    let mut records: Vec<&GoldRecord> = sources.hpoa.iter().collect();
    records.sort_by(|a, b| a.normalized_key.cmp(&b.normalized_key));
    records.shuffle(rng);
    let mut out = Vec::new();
    for target in &records {
        if out.len() == n {
            break;
        }
        // The rule-out disease must exclude the probe age by >= 2 years.
        let Some(probe) = outside_probe(target.onset_min, target.onset_max, OUTSIDE_MARGIN, rng)
        else {
            continue;
        };
        let consistent: Vec<&&GoldRecord> = records
            .iter()
            .filter(|r| {
                r.normalized_key != target.normalized_key
                    && probe >= r.onset_min
                    && probe <= r.onset_max
            })
            .collect();
        if consistent.len() < 3 {
            continue;
        }
        let mut option_records: Vec<&GoldRecord> =
            vec![*target, consistent[0], consistent[1], consistent[2]];
        option_records.shuffle(rng);
        let gold_pos = option_records
            .iter()
            .position(|r| r.normalized_key == target.normalized_key)
            .unwrap();
        let labels = letters(4);
        let body = option_records
            .iter()
            .zip(&labels)
            .map(|(r, l)| format!("({l}) {}", r.disease_name))
            .collect::<Vec<_>>()
            .join(", ");
        let mut q = base_question(TaskType::NegativeTemporal, out.len());
        q.prompt = format!(
            "A patient first develops symptoms at age {} years. Which of the following diseases is LEAST consistent with this age of onset: {body}?",
            fmt_age(probe)
        );
        q.options = Some(option_records.iter().map(|r| r.disease_name.clone()).collect());
        q.gold = GoldAnswer::Label(labels[gold_pos].to_string());
        q.gold_source = GoldSourceTrace {
            source: "hpoa".into(),
            record: target.normalized_key.clone(),
            pmids: vec![],
        };
        q.audit = AuditFacts::Choice {
            option_consistent: option_records
                .iter()
                .map(|r| probe >= r.onset_min && probe <= r.onset_max)
                .collect(),
        };
        out.push(q);
    }
    out
}

/// One removed question and its machine-readable reason.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RemovedQuestion {
    pub id: String,
    pub reason: String,
}

/// Automated QC: drops logically inconsistent items.
///
/// * `ambiguous-options` — two or more MCQ options satisfy the stated
///   constraint simultaneously;
/// * `boundary-probe` — a window probe sits exactly on a gold bound;
/// * `tied-ordering` — an ordering gold has tied onsets.
pub fn qc_questions(
    questions: Vec<BenchmarkQuestion>,
) -> (Vec<BenchmarkQuestion>, Vec<RemovedQuestion>) {
    let mut kept = Vec::new();
    let mut removed = Vec::new();
    for q in questions {
        let verdict = match &q.audit {
            AuditFacts::Window { probe, gold_min, gold_max } => {
                (probe == gold_min || probe == gold_max).then_some("boundary-probe")
            }
            AuditFacts::Differential { stated_era, option_eras } => {
                (option_eras.iter().filter(|e| *e == stated_era).count() >= 2)
                    .then_some("ambiguous-options")
            }
            AuditFacts::Choice { option_consistent } => match q.task_type {
                // Rule-out MCQ: exactly one inconsistent option allowed.
                TaskType::NegativeTemporal => {
                    (option_consistent.iter().filter(|c| !**c).count() >= 2)
                        .then_some("ambiguous-options")
                }
                // Association MCQ: exactly one linked option allowed.
                _ => (option_consistent.iter().filter(|c| **c).count() >= 2)
                    .then_some("ambiguous-options"),
            },
            AuditFacts::Ordering { gold_onsets } => gold_onsets
                .windows(2)
                .any(|w| w[0] == w[1])
                .then_some("tied-ordering"),
            AuditFacts::Comparison { range_a, range_b } => {
                (range_a.0 <= range_b.1 && range_b.0 <= range_a.1).then_some("ambiguous-options")
            }
            AuditFacts::None => None,
        };
        match verdict {
            Some(reason) => removed.push(RemovedQuestion {
                id: q.id.clone(),
                reason: reason.to_string(),
            }),
            None => kept.push(q),
        }
    }
    (kept, removed)
}

/// Re-derive every tier-1 gold from its source record; returns mismatch
/// descriptions (empty means the gold set verifies cleanly).
pub fn verify_tier1_golds(
    questions: &[BenchmarkQuestion],
    sources: &BenchmarkSources<'_>,
) -> Vec<String> {
    let mut mismatches = Vec::new();
    let orphadata: BTreeMap<&str, &GoldRecord> = sources
        .orphadata
        .iter()
        .map(|r| (r.normalized_key.as_str(), r))
        .collect();
    for q in questions.iter().filter(|q| q.tier == BenchmarkTier::Tier1) {
        match (&q.task_type, &q.audit, &q.gold) {
            (TaskType::TemporalWindow, AuditFacts::Window { probe, .. }, GoldAnswer::YesNo(ans)) => {
                match orphadata.get(q.gold_source.record.as_str()) {
                    Some(rec) => {
                        let inside = *probe >= rec.onset_min && *probe <= rec.onset_max;
                        if inside != *ans {
                            mismatches.push(format!("{}: gold disagrees with source range", q.id));
                        }
                    }
                    None => mismatches.push(format!("{}: source record missing", q.id)),
                }
            }
            (TaskType::CrossDiseaseComparison, AuditFacts::Comparison { .. }, GoldAnswer::Label(gold)) => {
                let Some((ka, kb)) = q.gold_source.record.split_once('|') else {
                    mismatches.push(format!("{}: malformed trace", q.id));
                    continue;
                };
                match (orphadata.get(ka), orphadata.get(kb)) {
                    (Some(a), Some(b)) => {
                        let earlier = if a.onset_max < b.onset_min {
                            &a.disease_name
                        } else {
                            &b.disease_name
                        };
                        if earlier != gold {
                            mismatches.push(format!("{}: earlier-disease gold mismatch", q.id));
                        }
                    }
                    _ => mismatches.push(format!("{}: source record missing", q.id)),
                }
            }
            (TaskType::TemporalDifferential, AuditFacts::Differential { stated_era, .. }, GoldAnswer::Label(gold)) => {
                match orphadata.get(q.gold_source.record.as_str()) {
                    Some(rec) => {
                        let era = era_of_record(rec, sources.table).unwrap_or("?");
                        let gold_idx = (gold.as_bytes()[0] - b'A') as usize;
                        let named = q.options.as_ref().and_then(|o| o.get(gold_idx));
                        if era != stated_era || named != Some(&rec.disease_name) {
                            mismatches.push(format!("{}: era or option mismatch", q.id));
                        }
                    }
                    None => mismatches.push(format!("{}: source record missing", q.id)),
                }
            }
            (TaskType::PhenopacketsOnset, _, GoldAnswer::Range { min, max }) => {
                let (Some(disease), Some(phenotype)) = (&q.disease, &q.phenotype) else {
                    mismatches.push(format!("{}: missing case keys", q.id));
                    continue;
                };
                let ages: Vec<f64> = sources
                    .phenopacket_cases
                    .iter()
                    .filter(|c| &c.disease == disease && &c.phenotype == phenotype)
                    .map(|c| c.onset_age)
                    .collect();
                if ages.is_empty() {
                    mismatches.push(format!("{}: cases missing", q.id));
                    continue;
                }
                let lo = ages.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = ages.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                if lo != *min || hi != *max {
                    mismatches.push(format!("{}: case range mismatch", q.id));
                }
            }
            _ => {}
        }
    }
    mismatches
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::validation::{normalize_disease_key, GoldSource};

    fn gold(name: &str, lo: f64, hi: f64) -> GoldRecord {
        GoldRecord {
            source: GoldSource::Orphadata,
            disease_name: name.into(),
            normalized_key: normalize_disease_key(name),
            onset_min: lo,
            onset_max: hi,
        }
    }

    fn fixture_gold() -> Vec<GoldRecord> {
        vec![
            gold("Kleefstra Syndrome", 0.0, 2.0),
            gold("Maffucci Syndrome", 5.0, 30.0),
            gold("Congenital Hydrocephalus", 0.0, 1.0),
            gold("Huntington Disease", 30.0, 50.0),
            gold("Wilson Disease", 15.0, 45.0),
            gold("Early Onset Parkinson", 21.0, 45.0),
            gold("Rett Syndrome", 0.5, 1.5),
            gold("ALS", 40.0, 70.0),
            gold("Prostate Cancer", 60.0, 85.0),
            gold("Gaucher Disease", 2.0, 20.0),
        ]
    }

    fn sources(gold: &[GoldRecord]) -> BenchmarkSources<'_> {
        static TABLE: std::sync::OnceLock<OnsetBinTable> = std::sync::OnceLock::new();
        BenchmarkSources {
            orphadata: gold,
            hpoa: gold,
            phenopacket_cases: &[],
            store: None,
            schema: None,
            table: TABLE.get_or_init(OnsetBinTable::default),
        }
    }

    #[test]
    fn window_balance_and_determinism() {
        let g = fixture_gold();
        let s = sources(&g);
        let (a, _) = generate_questions(TaskType::TemporalWindow, &s, 10, 42);
        let (b, _) = generate_questions(TaskType::TemporalWindow, &s, 10, 42);
        assert_eq!(a, b);
        let yes = a
            .iter()
            .filter(|q| matches!(q.gold, GoldAnswer::YesNo(true)))
            .count();
        let no = a.len() - yes;
        assert!(yes.abs_diff(no) <= 1, "yes {yes} no {no}");
    }

    #[test]
    fn window_outside_probe_is_at_least_two_years_out() {
        let g = fixture_gold();
        let s = sources(&g);
        let (qs, _) = generate_questions(TaskType::TemporalWindow, &s, 10, 7);
        for q in qs {
            if let (AuditFacts::Window { probe, gold_min, gold_max }, GoldAnswer::YesNo(false)) =
                (&q.audit, &q.gold)
            {
                assert!(
                    *probe <= gold_min - 2.0 || *probe >= gold_max + 2.0,
                    "probe {probe} too close to ({gold_min}, {gold_max})"
                );
            }
        }
    }

    #[test]
    fn differential_distractors_are_era_distant() {
        let g = fixture_gold();
        let s = sources(&g);
        let (qs, _) = generate_questions(TaskType::TemporalDifferential, &s, 5, 42);
        assert!(!qs.is_empty());
        let table = OnsetBinTable::default();
        for q in &qs {
            let AuditFacts::Differential { stated_era, option_eras } = &q.audit else {
                panic!("missing audit");
            };
            let stated_idx = table.era_index(stated_era).unwrap();
            let matching = option_eras.iter().filter(|e| *e == stated_era).count();
            assert_eq!(matching, 1, "exactly the gold option may match");
            for era in option_eras.iter().filter(|e| *e != stated_era) {
                assert!(table.era_index(era).unwrap().abs_diff(stated_idx) >= 2);
            }
        }
    }

    #[test]
    fn comparison_requires_disjoint_ranges() {
        let g = fixture_gold();
        let s = sources(&g);
        let (qs, _) = generate_questions(TaskType::CrossDiseaseComparison, &s, 8, 42);
        assert!(!qs.is_empty());
        for q in &qs {
            let AuditFacts::Comparison { range_a, range_b } = &q.audit else {
                panic!("missing audit")
            };
            assert!(range_a.1 < range_b.0 || range_b.1 < range_a.0);
        }
    }

    #[test]
    fn shortfall_warns_instead_of_failing() {
        let g = vec![gold("Lonely Disease", 0.0, 1.0)];
        let s = sources(&g);
        let (qs, warnings) = generate_questions(TaskType::TemporalDifferential, &s, 5, 42);
        assert!(qs.is_empty());
        assert_eq!(warnings.len(), 1);
    }

    #[test]
    fn qc_removes_boundary_probe() {
        let mut q = base_question(TaskType::TemporalWindow, 0);
        q.audit = AuditFacts::Window { probe: 2.0, gold_min: 0.0, gold_max: 2.0 };
        let (kept, removed) = qc_questions(vec![q]);
        assert!(kept.is_empty());
        assert_eq!(removed[0].reason, "boundary-probe");
    }

    #[test]
    fn qc_removes_ambiguous_differential() {
        let mut q = base_question(TaskType::TemporalDifferential, 0);
        q.audit = AuditFacts::Differential {
            stated_era: "infancy".into(),
            option_eras: vec!["infancy".into(), "infancy".into(), "adulthood".into(), "adulthood".into()],
        };
        let (kept, removed) = qc_questions(vec![q]);
        assert!(kept.is_empty());
        assert_eq!(removed[0].reason, "ambiguous-options");
    }

    #[test]
    fn qc_removes_tied_ordering_and_keeps_clean_items() {
        let mut tied = base_question(TaskType::PhenotypeOrdering, 0);
        tied.audit = AuditFacts::Ordering { gold_onsets: vec![2.0, 2.0, 8.0] };
        let mut clean = base_question(TaskType::PhenotypeOrdering, 1);
        clean.audit = AuditFacts::Ordering { gold_onsets: vec![2.0, 5.0, 8.0] };
        let (kept, removed) = qc_questions(vec![tied, clean]);
        assert_eq!(kept.len(), 1);
        assert_eq!(removed[0].reason, "tied-ordering");
    }

    #[test]
    fn tier1_golds_verify_against_sources() {
        let g = fixture_gold();
        let s = sources(&g);
        let mut all = Vec::new();
        for task in [
            TaskType::TemporalWindow,
            TaskType::TemporalDifferential,
            TaskType::CrossDiseaseComparison,
        ] {
            all.extend(generate_questions(task, &s, 6, 42).0);
        }
        let mismatches = verify_tier1_golds(&all, &s);
        assert!(mismatches.is_empty(), "{mismatches:?}");
    }

    #[test]
    fn probe_outside_narrow_gold_window_scores_no() {
        // Probe 8 against a 0-2 gold range.
        let g = vec![gold("Kleefstra Syndrome Due To 9q34 Microdeletion", 0.0, 2.0)];
        let mut q = base_question(TaskType::TemporalWindow, 0);
        q.prompt = format!(
            "Is age 8 years within the typical onset window for {}?",
            g[0].disease_name
        );
        q.gold = GoldAnswer::YesNo(false);
        q.audit = AuditFacts::Window { probe: 8.0, gold_min: 0.0, gold_max: 2.0 };
        q.gold_source = GoldSourceTrace {
            source: "orphadata".into(),
            record: g[0].normalized_key.clone(),
            pmids: vec![],
        };
        let s = sources(&g);
        assert!(verify_tier1_golds(&[q.clone()], &s).is_empty());
        let t = OnsetBinTable::default();
        assert_eq!(score_answer(&q, "No", &t), ScoreOutcome::Correct);
        assert_eq!(score_answer(&q, "Yes", &t), ScoreOutcome::Incorrect);
    }
}
