//! The multi-model consensus filter in isolation: normalization, fuzzy
//! similarity, union-find clustering, and the distinct-model threshold.
//!
//! Run with `cargo run --example consensus_filter`.

use std::collections::BTreeMap;

use chronokg::consensus::{compute_consensus, normalize_entity, similarity_ratio};
use chronokg::extraction::{Confidence, RawTriple};

fn triple(model: &str, subject: &str, relation: &str, object: &str, conf: Confidence) -> RawTriple {
    RawTriple {
        subject: subject.into(),
        subject_type: "disease".into(),
        relation: relation.into(),
        object: object.into(),
        object_type: "phenotype".into(),
        confidence: conf,
        evidence_text: format!("\"{object}\" was reported"),
        temporal: None,
        conditions: None,
        model: model.into(),
        pmid: "12345".into(),
        publication_year: Some(2020),
    }
}

fn main() {
    let n = normalize_entity("Duchenne Muscular Dystrophy (DMD)");
    println!("normalize: 'Duchenne Muscular Dystrophy (DMD)' -> '{}'", n.key);
    let n = normalize_entity("weakness/fatigue");
    println!("normalize: 'weakness/fatigue' -> key '{}', variants {:?}", n.key, n.variants);
    println!(
        "similarity('proximal weakness', 'proximal muscle weakness') = {}",
        similarity_ratio("proximal weakness", "proximal muscle weakness")
    );

    // Three models extract from the same document. Two agree on the same
    // fact under fuzzy-variant surface forms; one hallucinates.
    let mut per_model: BTreeMap<String, Vec<RawTriple>> = BTreeMap::new();
    per_model.insert(
        "deepseek".into(),
        vec![
            triple("deepseek", "DMD", "disease_phenotype_positive", "proximal weakness", Confidence::Medium),
            triple("deepseek", "DMD", "has phenotype", "cardiomyopathy", Confidence::High),
        ],
    );
    per_model.insert(
        "gpt-mini".into(),
        vec![
            triple("gpt-mini", "DMD", "disease_phenotype_positive", "proximal muscle weakness", Confidence::High),
            triple("gpt-mini", "DMD", "disease_phenotype_positive", "cardiomyopathy", Confidence::High),
        ],
    );
    per_model.insert(
        "haiku".into(),
        vec![triple("haiku", "DMD", "disease_phenotype_positive", "spurious finding", Confidence::Low)],
    );

    let survivors = compute_consensus(&per_model, 3, 2, 80);
    println!("\n{} clusters survive the >=2-model threshold:", survivors.len());
    for c in &survivors {
        println!(
            "  ({}, {}, {})  confidence {:.2}  models {:?}  representative from {}",
            c.subject_key, c.relation, c.object_key, c.consensus_confidence, c.agreeing_models,
            c.representative.model
        );
    }
    println!("\nthe single-model 'spurious finding' never clusters and is dropped");
}
