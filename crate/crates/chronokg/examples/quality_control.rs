//! Quality controller in isolation: plausibility rules, schema grading,
//! and the six-signal credibility formula.
//!
//! Run with `cargo run --example quality_control`.

use chronokg::model::{CredibilityWeights, PipelineConfig};
use chronokg::quality::{credibility_score, study_type_weight, CredibilitySignals, SchemaIndex};

fn main() {
    let config = PipelineConfig::default();
    let weights = CredibilityWeights::default();

    println!("study-type weights:");
    for name in ["meta-analysis", "guideline", "rct", "cohort", "review", "case-report", "other"] {
        println!("  {name:<14} {}", study_type_weight(name, &config.study_type_weights));
    }

    // A review backed by full model consensus, with the other four signals
    // unpopulated: they contribute zero rather than renormalizing.
    let signals = CredibilitySignals {
        study_type_weight: study_type_weight("review", &config.study_type_weights),
        llm_consensus: 1.0,
        ..Default::default()
    };
    println!(
        "\nreview + full consensus, four signals absent -> credibility {}",
        credibility_score(&signals, &weights)
    );
    let full = CredibilitySignals {
        journal_tier: Some(1.0),
        citation_velocity: Some(1.0),
        study_type_weight: 1.0,
        replication_signal: Some(1.0),
        retraction_check: Some(1.0),
        llm_consensus: 1.0,
    };
    println!("all six signals at maximum -> credibility {}", credibility_score(&full, &weights));

    let mut index = SchemaIndex::default();
    index.insert("duchenne muscular dystrophy", "disease", "disease_phenotype_positive", "cardiomyopathy", "phenotype");
    println!(
        "\nknown edge resolves after normalization: {}",
        index.has_edge("Duchenne Muscular Dystrophy (DMD)", "disease_phenotype_positive", "Cardiomyopathy")
    );
    println!(
        "unlisted edge found in snapshot: {} (graded B, novel)",
        index.has_edge("duchenne muscular dystrophy", "disease_phenotype_positive", "new finding")
    );
}
