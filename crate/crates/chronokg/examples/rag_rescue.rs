//! Long-tail rescue arithmetic with the deterministic answering mock:
//! a 35-question fixture where retrieval contexts contain the gold answer
//! for 21 questions, reproducing a 60.0% rescue rate with a seeded
//! bootstrap interval.
//!
//! Run with `cargo run --example rag_rescue`.

use chronokg::benchmark::{
    AuditFacts, BenchmarkQuestion, BenchmarkTier, Difficulty, GoldAnswer, GoldSourceTrace,
    TaskType,
};
use chronokg::evaluation::{
    rescue_rate, run_condition, Condition, MockRagProvider, RagSources,
};
use chronokg::model::{
    EvidenceBlock, Grade, OnsetBinTable, StudyType, TemporalContext, TemporalTriple,
};
use chronokg::store::StoreIndex;

fn record(disease: &str, onset: (f64, f64), idx: usize) -> TemporalTriple {
    TemporalTriple {
        edge_id: format!("r{idx:03}"),
        source_id: disease.to_lowercase(),
        source_type: "disease".into(),
        source_name: disease.into(),
        relation: "disease_phenotype_positive".into(),
        target_id: "cardinal finding".into(),
        target_type: "phenotype".into(),
        target_name: "cardinal finding".into(),
        temporal: TemporalContext {
            onset_age_min: Some(onset.0),
            onset_age_max: Some(onset.1),
            ..Default::default()
        },
        evidence: EvidenceBlock {
            tier: 2,
            source_ids: vec![format!("PMID:{}", 500000 + idx)],
            evidence_text: "quote".into(),
            study_type: StudyType::Review,
            credibility_score: 0.275,
            consensus_confidence: 1.0,
            extraction_models: vec!["alpha".into()],
            extraction_method: "tier2_llm_consensus".into(),
            citation_count: None,
            is_retracted: false,
            publication_year: Some(2015),
        },
        conditions: None,
        extraction_date: "2026-04-03".into(),
        pipeline_version: "1.0.0".into(),
        disease_profile_id: format!("MONDO:{idx:07}"),
        quality_grade: Grade::B,
    }
}

fn main() -> chronokg::Result<()> {
    let mut records = Vec::new();
    let mut questions = Vec::new();
    for i in 0..35 {
        let disease = format!("Fixture Disease {i:02}");
        let gold = (5.0 + i as f64, 10.0 + i as f64);
        if i < 21 {
            records.push(record(&disease, gold, i));
        }
        questions.push(BenchmarkQuestion {
            id: format!("q{i:02}"),
            tier: BenchmarkTier::Tier1,
            task_type: TaskType::PhenopacketsOnset,
            difficulty: Difficulty::Hard,
            prompt: format!("At what age does 'cardinal finding' typically present in {disease}?"),
            options: None,
            gold: GoldAnswer::Range { min: gold.0, max: gold.1 },
            gold_source: GoldSourceTrace::default(),
            disease: Some(disease),
            phenotype: Some("cardinal finding".into()),
            audit: AuditFacts::None,
        });
    }

    let table = OnsetBinTable::default();
    let store = StoreIndex::build(records);
    let sources = RagSources {
        store: Some(&store),
        schema: None,
        coarse_gold: &[],
        table: &table,
    };
    let reader = MockRagProvider::new("reader");

    let nr = run_condition(&questions, &reader, Condition::Nr, &sources, 3);
    let chrono = run_condition(&questions, &reader, Condition::ChronoKg, &sources, 3);
    println!("no-retrieval accuracy:  {:.1}%", 100.0 * nr.accuracy());
    println!("with-retrieval accuracy: {:.1}%", 100.0 * chrono.accuracy());

    let rescue = rescue_rate(&nr, &chrono, 10_000, 42)?;
    println!(
        "\nlong-tail rescue: {} of {} NR failures recovered = {:.1}%  [{:.0}, {:.0}] (10,000 resamples, seed 42)",
        rescue.n_rescued,
        rescue.n_fail,
        100.0 * rescue.rescued_fraction.unwrap(),
        100.0 * rescue.ci_low.unwrap(),
        100.0 * rescue.ci_high.unwrap(),
    );
    Ok(())
}
