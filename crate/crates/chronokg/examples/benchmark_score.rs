//! The three scoring rubrics: exact label match, bidirectional substring,
//! and the calibrated onset tolerance.
//!
//! Run with `cargo run --example benchmark_score`.

use chronokg::benchmark::{
    calibrated_onset_score, onset_tolerance, parse_age_range, score_answer, AuditFacts,
    BenchmarkQuestion, BenchmarkTier, Difficulty, GoldAnswer, GoldSourceTrace, TaskType,
};
use chronokg::model::OnsetBinTable;

fn question(task: TaskType, gold: GoldAnswer, options: Option<Vec<&str>>) -> BenchmarkQuestion {
    BenchmarkQuestion {
        id: "demo".into(),
        tier: BenchmarkTier::Tier1,
        task_type: task,
        difficulty: Difficulty::Medium,
        prompt: String::new(),
        options: options.map(|o| o.into_iter().map(String::from).collect()),
        gold,
        gold_source: GoldSourceTrace::default(),
        disease: None,
        phenotype: None,
        audit: AuditFacts::None,
    }
}

fn main() {
    let table = OnsetBinTable::default();

    let mcq = question(
        TaskType::TemporalDifferential,
        GoldAnswer::Label("C".into()),
        Some(vec!["Acute Zonal Occult Outer Retinopathy", "Lipodystrophy", "Isolated Congenital Microcephaly", "Trichofolliculoma"]),
    );
    for answer in ["C) Isolated Congenital Microcephaly", "isolated congenital microcephaly", "B"] {
        println!("MCQ answer {answer:?} -> {:?}", score_answer(&mcq, answer, &table));
    }

    let free = question(
        TaskType::CrossDiseaseComparison,
        GoldAnswer::Label("Congenital Hydrocephalus".into()),
        None,
    );
    println!(
        "\nfree text 'congenital hydrocephalus (earlier)' -> {:?}",
        score_answer(&free, "congenital hydrocephalus (earlier)", &table)
    );

    println!("\nanswer-range grammar:");
    for text in ["0-3 years", "between 2 and 5 years", "10 to 18", "around 7 years", "no idea"] {
        println!("  {text:?} -> {:?}", parse_age_range(text));
    }

    println!("\ncalibrated onset tolerance = min(2, max(0.5, half the gold width)):");
    for width in [0.0, 1.0, 3.0, 4.0, 10.0] {
        println!("  gold width {width:>4} -> tolerance {}", onset_tolerance((10.0, 10.0 + width)));
    }
    println!(
        "\ngold (0.0, 2.7): predicted (0, 3) accepted = {}, predicted (30, 40) accepted = {}",
        calibrated_onset_score((0.0, 3.0), (0.0, 2.7)),
        calibrated_onset_score((30.0, 40.0), (0.0, 2.7)),
    );

    let onset = question(
        TaskType::PhenopacketsOnset,
        GoldAnswer::Range { min: 0.0, max: 2.7 },
        None,
    );
    for answer in ["0 to 3 years", "in infancy", "in adulthood", "30-40 years"] {
        println!("onset answer {answer:?} -> {:?}", score_answer(&onset, answer, &table));
    }
}
