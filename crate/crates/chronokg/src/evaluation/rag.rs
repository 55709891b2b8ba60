//! Retrieval-condition harness: context construction per retrieval source,
//! condition runs, and the long-tail rescue metric.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::time::Duration;

use crate::benchmark::{score_answer, BenchmarkQuestion, ScoreOutcome};
use crate::consensus::similarity_ratio;
use crate::error::Result;
use crate::evaluation::stats::bootstrap_ci;
use crate::extraction::ModelProvider;
use crate::model::OnsetBinTable;
use crate::quality::SchemaIndex;
use crate::store::StoreIndex;
use crate::validation::GoldRecord;

/// The four retrieval conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    /// No retrieval.
    Nr,
    /// Static association edges, no temporal fields.
    StaticKg,
    /// Disease-level coarse onset bin.
    CoarseOnset,
    /// Temporal KG retrieval with ranges, stages, and PMIDs.
    ChronoKg,
}

impl Condition {
    pub fn parse(s: &str) -> Option<Condition> {
        Some(match s {
            "nr" => Condition::Nr,
            "static_kg" | "static" => Condition::StaticKg,
            "coarse_onset" | "coarse" => Condition::CoarseOnset,
            "chrono_kg" | "chrono" => Condition::ChronoKg,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Condition::Nr => "nr",
            Condition::StaticKg => "static_kg",
            Condition::CoarseOnset => "coarse_onset",
            Condition::ChronoKg => "chrono_kg",
        }
    }
}

/// Retrieval sources available to context construction.
pub struct RagSources<'a> {
    pub store: Option<&'a StoreIndex>,
    pub schema: Option<&'a SchemaIndex>,
    pub coarse_gold: &'a [GoldRecord],
    pub table: &'a OnsetBinTable,
}

/// Context text plus a flag when the source had nothing for the disease.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ContextResult {
    pub text: String,
    pub source_missing_disease: bool,
}

/// Build the retrieval context for one question under one condition.
///
/// Lines are ordered by relevance: phenotype match first (descending
/// similarity), then credibility, then edge id, so context is
/// deterministic.
pub fn build_context(
    question: &BenchmarkQuestion,
    condition: Condition,
    sources: &RagSources<'_>,
    k: usize,
) -> ContextResult {
    let disease = match &question.disease {
        Some(d) => d.clone(),
        None => {
            return ContextResult {
                text: String::new(),
                source_missing_disease: condition != Condition::Nr,
            }
        }
    };
    match condition {
        Condition::Nr => ContextResult::default(),
        Condition::StaticKg => {
            let Some(schema) = sources.schema else {
                return missing();
            };
            let key = crate::consensus::normalize_entity(&disease).key;
            let mut lines: Vec<String> = schema
                .edges_sorted()
                .into_iter()
                .filter(|(h, _, t)| *h == key || *t == key)
                .take(k)
                .map(|(h, r, t)| format!("- {h} {r} {t}"))
                .collect();
            if lines.is_empty() {
                return missing();
            }
            lines.truncate(k);
            ContextResult {
                text: lines.join("\n"),
                source_missing_disease: false,
            }
        }
        Condition::CoarseOnset => {
            let key = crate::validation::normalize_disease_key(&disease);
            match sources.coarse_gold.iter().find(|g| g.normalized_key == key) {
                Some(g) => {
                    let era = crate::model::era_of_range(
                        g.onset_min.clamp(0.0, 120.0),
                        g.onset_max.clamp(0.0, 120.0),
                        sources.table,
                    )
                    .unwrap_or("unknown");
                    ContextResult {
                        text: format!("- {}: onset category {era}", g.disease_name),
                        source_missing_disease: false,
                    }
                }
                None => missing(),
            }
        }
        Condition::ChronoKg => {
            let Some(store) = sources.store else {
                return missing();
            };
            let Some(triples) = store.disease_triples(&disease) else {
                return missing();
            };
            let want = question
                .phenotype
                .as_deref()
                .map(|p| crate::consensus::normalize_entity(p).key);
            let mut rows: Vec<(u32, i64, String, String)> = triples
                .iter()
                .filter(|t| t.onset_range().is_some())
                .map(|t| {
                    let (lo, hi) = t.onset_range().unwrap();
                    let relevance = want
                        .as_deref()
                        .map(|w| {
                            similarity_ratio(
                                &crate::consensus::normalize_entity(&t.target_name).key,
                                w,
                            )
                        })
                        .unwrap_or(0);
                    let credibility = (t.evidence.credibility_score * 1_000_000.0) as i64;
                    let stage = t
                        .temporal
                        .progression_stage
                        .as_deref()
                        .map(|s| format!(", stage {s}"))
                        .unwrap_or_default();
                    let line = format!(
                        "- {}: {} at ages {}-{} years{} [{}]",
                        t.source_name,
                        t.target_name,
                        lo,
                        hi,
                        stage,
                        t.evidence.source_ids.join(", ")
                    );
                    (relevance, credibility, t.edge_id.clone(), line)
                })
                .collect();
            if rows.is_empty() {
                return missing();
            }
            rows.sort_by(|a, b| {
                b.0.cmp(&a.0)
                    .then_with(|| b.1.cmp(&a.1))
                    .then_with(|| a.2.cmp(&b.2))
            });
            ContextResult {
                text: rows
                    .into_iter()
                    .take(k)
                    .map(|(_, _, _, line)| line)
                    .collect::<Vec<_>>()
                    .join("\n"),
                source_missing_disease: false,
            }
        }
    }
}

fn missing() -> ContextResult {
    ContextResult {
        text: String::new(),
        source_missing_disease: true,
    }
}

/// One answered question under one condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionRow {
    pub question_id: String,
    pub answer: String,
    pub outcome: ScoreOutcome,
    pub correct: bool,
    pub context: String,
}

/// Full transcript of one (model, condition) run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConditionResult {
    pub condition: Condition,
    pub model: String,
    pub rows: Vec<ConditionRow>,
}

impl ConditionResult {
    pub fn accuracy(&self) -> f64 {
        if self.rows.is_empty() {
            return 0.0;
        }
        self.rows.iter().filter(|r| r.correct).count() as f64 / self.rows.len() as f64
    }
}

const ANSWER_TIMEOUT: Duration = Duration::from_secs(120);

/// Answer every question under one retrieval condition. Provider failures
/// mark the item unanswered (scored incorrect) and the run continues.
pub fn run_condition(
    questions: &[BenchmarkQuestion],
    provider: &dyn ModelProvider,
    condition: Condition,
    sources: &RagSources<'_>,
    k: usize,
) -> ConditionResult {
    let mut rows = Vec::with_capacity(questions.len());
    for q in questions {
        let context = build_context(q, condition, sources, k);
        let prompt = if context.text.is_empty() {
            q.prompt.clone()
        } else {
            format!("{}\n\nContext:\n{}", q.prompt, context.text)
        };
        let (answer, outcome) = match provider.complete(&prompt, 0.0, ANSWER_TIMEOUT) {
            Ok(text) => {
                let outcome = score_answer(q, &text, sources.table);
                (text, outcome)
            }
            Err(e) => (format!("<unanswered: {e}>"), ScoreOutcome::Incorrect),
        };
        rows.push(ConditionRow {
            question_id: q.id.clone(),
            correct: outcome == ScoreOutcome::Correct,
            answer,
            outcome,
            context: context.text,
        });
    }
    ConditionResult {
        condition,
        model: provider.name().to_string(),
        rows,
    }
}

/// Long-tail rescue: of the questions failed with no retrieval, the
/// fraction recovered under a retrieval condition.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RescueReport {
    pub n_fail: usize,
    pub n_rescued: usize,
    pub rescued_fraction: Option<f64>,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
    pub bootstrap_resamples: usize,
    pub bootstrap_seed: u64,
}

/// Restrict to NR-incorrect questions and bootstrap the rescued fraction.
pub fn rescue_rate(
    nr_result: &ConditionResult,
    cond_result: &ConditionResult,
    resamples: usize,
    seed: u64,
) -> Result<RescueReport> {
    let cond_by_id: BTreeMap<&str, &ConditionRow> = cond_result
        .rows
        .iter()
        .map(|r| (r.question_id.as_str(), r))
        .collect();
    let mut outcomes: Vec<f64> = Vec::new();
    for row in &nr_result.rows {
        if row.correct {
            continue;
        }
        let Some(cond_row) = cond_by_id.get(row.question_id.as_str()) else {
            return Err(crate::error::Error::domain(format!(
                "question {} missing from the condition run",
                row.question_id
            )));
        };
        outcomes.push(if cond_row.correct { 1.0 } else { 0.0 });
    }
    if outcomes.is_empty() {
        return Ok(RescueReport {
            n_fail: 0,
            n_rescued: 0,
            rescued_fraction: None,
            ci_low: None,
            ci_high: None,
            bootstrap_resamples: resamples,
            bootstrap_seed: seed,
        });
    }
    let rescued = outcomes.iter().filter(|x| **x == 1.0).count();
    let (lo, hi) = bootstrap_ci(&outcomes, resamples, seed, 0.95)?;
    Ok(RescueReport {
        n_fail: outcomes.len(),
        n_rescued: rescued,
        rescued_fraction: Some(rescued as f64 / outcomes.len() as f64),
        ci_low: Some(lo),
        ci_high: Some(hi),
        bootstrap_resamples: resamples,
        bootstrap_seed: seed,
    })
}

/// Deterministic answering provider for rescue arithmetic: replies with
/// the first age range it finds in the prompt's context section, otherwise
/// a fixed wrong answer.
pub struct MockRagProvider {
    name: String,
}

impl MockRagProvider {
    pub fn new(name: impl Into<String>) -> Self {
        MockRagProvider { name: name.into() }
    }
}

impl ModelProvider for MockRagProvider {
    fn name(&self) -> &str {
        &self.name
    }

    fn complete(&self, prompt: &str, _temperature: f64, _timeout: Duration) -> Result<String> {
        let context = prompt.split("\nContext:\n").nth(1).unwrap_or("");
        let range = regex::Regex::new(r"ages (\d+(?:\.\d+)?)-(\d+(?:\.\d+)?) years").unwrap();
        match range.captures(context) {
            Some(c) => Ok(format!("{} to {} years", &c[1], &c[2])),
            None => Ok("990 years".to_string()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmark::{AuditFacts, BenchmarkTier, Difficulty, GoldAnswer, GoldSourceTrace, TaskType};
    use crate::model::{EvidenceBlock, Grade, StudyType, TemporalContext, TemporalTriple};

    fn onset_question(id: &str, disease: &str, phenotype: &str, gold: (f64, f64)) -> BenchmarkQuestion {
        BenchmarkQuestion {
            id: id.into(),
            tier: BenchmarkTier::Tier1,
            task_type: TaskType::PhenopacketsOnset,
            difficulty: Difficulty::Hard,
            prompt: format!("At what age does '{phenotype}' typically present in {disease}?"),
            options: None,
            gold: GoldAnswer::Range { min: gold.0, max: gold.1 },
            gold_source: GoldSourceTrace::default(),
            disease: Some(disease.into()),
            phenotype: Some(phenotype.into()),
            audit: AuditFacts::None,
        }
    }

    fn store_with(records: Vec<(&str, &str, (f64, f64))>) -> StoreIndex {
        let triples: Vec<TemporalTriple> = records
            .into_iter()
            .enumerate()
            .map(|(i, (disease, phenotype, onset))| TemporalTriple {
                edge_id: format!("e{i:03}"),
                source_id: disease.to_lowercase(),
                source_type: "disease".into(),
                source_name: disease.into(),
                relation: "disease_phenotype_positive".into(),
                target_id: phenotype.to_lowercase(),
                target_type: "phenotype".into(),
                target_name: phenotype.into(),
                temporal: TemporalContext {
                    onset_age_min: Some(onset.0),
                    onset_age_max: Some(onset.1),
                    progression_stage: Some("ambulatory".into()),
                    ..Default::default()
                },
                evidence: EvidenceBlock {
                    tier: 2,
                    source_ids: vec![format!("PMID:{}", 9000 + i)],
                    evidence_text: "q".into(),
                    study_type: StudyType::Review,
                    credibility_score: 0.3,
                    consensus_confidence: 1.0,
                    extraction_models: vec!["alpha".into()],
                    extraction_method: "tier2_llm_consensus".into(),
                    citation_count: None,
                    is_retracted: false,
                    publication_year: None,
                },
                conditions: None,
                extraction_date: "2026-01-01".into(),
                pipeline_version: "1.0.0".into(),
                disease_profile_id: format!("MONDO:{i}"),
                quality_grade: Grade::B,
            })
            .collect();
        StoreIndex::build(triples)
    }

    fn sources<'a>(store: &'a StoreIndex, table: &'a OnsetBinTable) -> RagSources<'a> {
        RagSources {
            store: Some(store),
            schema: None,
            coarse_gold: &[],
            table,
        }
    }

    #[test]
    fn nr_context_is_empty() {
        let table = OnsetBinTable::default();
        let store = store_with(vec![("DMD", "cardiomyopathy", (10.0, 18.0))]);
        let q = onset_question("q1", "DMD", "cardiomyopathy", (10.0, 18.0));
        let ctx = build_context(&q, Condition::Nr, &sources(&store, &table), 3);
        assert!(ctx.text.is_empty());
        assert!(!ctx.source_missing_disease);
    }

    #[test]
    fn chrono_context_lines_have_ranges_and_pmids() {
        let table = OnsetBinTable::default();
        let store = store_with(vec![
            ("DMD", "cardiomyopathy", (10.0, 18.0)),
            ("DMD", "walking delay", (2.0, 5.0)),
            ("DMD", "scoliosis", (8.0, 14.0)),
        ]);
        let q = onset_question("q1", "DMD", "cardiomyopathy", (10.0, 18.0));
        let ctx = build_context(&q, Condition::ChronoKg, &sources(&store, &table), 3);
        let lines: Vec<&str> = ctx.text.lines().collect();
        assert_eq!(lines.len(), 3);
        for line in &lines {
            assert!(line.contains("years"), "{line}");
            assert!(line.contains("PMID:"), "{line}");
        }
        // Phenotype match ranks first.
        assert!(lines[0].contains("cardiomyopathy"));
    }

    #[test]
    fn missing_disease_flags_and_empties() {
        let table = OnsetBinTable::default();
        let store = store_with(vec![("DMD", "cardiomyopathy", (10.0, 18.0))]);
        let q = onset_question("q1", "Nonexistent", "x", (0.0, 1.0));
        let ctx = build_context(&q, Condition::ChronoKg, &sources(&store, &table), 3);
        assert!(ctx.text.is_empty());
        assert!(ctx.source_missing_disease);
    }

    #[test]
    fn coarse_context_names_the_onset_era() {
        use crate::validation::{normalize_disease_key, GoldRecord, GoldSource};
        let table = OnsetBinTable::default();
        let store = store_with(vec![]);
        let coarse = vec![GoldRecord {
            source: GoldSource::Hpoa,
            disease_name: "Duchenne Muscular Dystrophy".into(),
            normalized_key: normalize_disease_key("Duchenne Muscular Dystrophy"),
            onset_min: 1.0,
            onset_max: 5.0,
        }];
        let sources = RagSources {
            store: Some(&store),
            schema: None,
            coarse_gold: &coarse,
            table: &table,
        };
        let q = onset_question("q1", "Duchenne Muscular Dystrophy", "cardiomyopathy", (10.0, 18.0));
        let ctx = build_context(&q, Condition::CoarseOnset, &sources, 3);
        assert!(ctx.text.contains("onset category early childhood"), "{}", ctx.text);
        let miss = onset_question("q2", "Absent Disease", "x", (0.0, 1.0));
        assert!(build_context(&miss, Condition::CoarseOnset, &sources, 3).source_missing_disease);
    }

    #[test]
    fn static_context_for_onset_question_has_no_age_numerals() {
        let table = OnsetBinTable::default();
        let store = store_with(vec![]);
        let mut schema = crate::quality::SchemaIndex::default();
        schema.insert("dmd", "disease", "disease_protein", "dystrophin", "gene/protein");
        schema.insert("prednisone", "drug", "indication", "dmd", "disease");
        let sources = RagSources {
            store: Some(&store),
            schema: Some(&schema),
            coarse_gold: &[],
            table: &table,
        };
        let q = onset_question("q1", "DMD", "cardiomyopathy", (10.0, 18.0));
        let ctx = build_context(&q, Condition::StaticKg, &sources, 5);
        assert!(!ctx.text.is_empty());
        assert!(
            !ctx.text.chars().any(|c| c.is_ascii_digit()),
            "static context leaked numerals: {}",
            ctx.text
        );
    }

    #[test]
    fn mock_provider_rescues_answerable_fixtures() {
        let table = OnsetBinTable::default();
        let store = store_with(vec![
            ("DMD", "cardiomyopathy", (10.0, 18.0)),
            ("BMD", "cardiomyopathy", (20.0, 40.0)),
        ]);
        let questions = vec![
            onset_question("q1", "DMD", "cardiomyopathy", (10.0, 18.0)),
            onset_question("q2", "BMD", "cardiomyopathy", (20.0, 40.0)),
        ];
        let provider = MockRagProvider::new("mock-rag");
        let s = sources(&store, &table);
        let nr = run_condition(&questions, &provider, Condition::Nr, &s, 3);
        assert_eq!(nr.accuracy(), 0.0);
        let chrono = run_condition(&questions, &provider, Condition::ChronoKg, &s, 3);
        assert_eq!(chrono.accuracy(), 1.0);
        let rescue = rescue_rate(&nr, &chrono, 1000, 42).unwrap();
        assert_eq!(rescue.n_fail, 2);
        assert_eq!(rescue.rescued_fraction, Some(1.0));
        assert_eq!((rescue.ci_low, rescue.ci_high), (Some(1.0), Some(1.0)));
    }

    #[test]
    fn empty_question_list_gives_empty_result() {
        let table = OnsetBinTable::default();
        let store = store_with(vec![]);
        let provider = MockRagProvider::new("mock-rag");
        let out = run_condition(&[], &provider, Condition::Nr, &sources(&store, &table), 3);
        assert!(out.rows.is_empty());
    }

    #[test]
    fn zero_fail_rescue_is_defined_empty() {
        let nr = ConditionResult {
            condition: Condition::Nr,
            model: "m".into(),
            rows: vec![ConditionRow {
                question_id: "q1".into(),
                answer: "right".into(),
                outcome: ScoreOutcome::Correct,
                correct: true,
                context: String::new(),
            }],
        };
        let rescue = rescue_rate(&nr, &nr, 100, 42).unwrap();
        assert_eq!(rescue.n_fail, 0);
        assert!(rescue.rescued_fraction.is_none());
    }
}
