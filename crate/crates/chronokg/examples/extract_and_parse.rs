//! Prompt construction and tolerant response parsing: the first-pass and
//! temporal-only prompts, the mock extractor, and the JSON repair ladder.
//!
//! Run with `cargo run --example extract_and_parse`.

use std::time::Duration;

use chronokg::acquisition::SourceDocument;
use chronokg::extraction::{
    build_primary_prompt, build_temporal_prompt, parse_extraction_response, MockExtractor,
    MockSkew, ModelProvider,
};
use chronokg::model::{DiseaseProfile, LiteratureTier, StudyType};

fn main() -> chronokg::Result<()> {
    let profile = DiseaseProfile {
        disease_id: "MONDO:0010679".into(),
        name: "Duchenne muscular dystrophy".into(),
        synonyms: vec!["DMD".into()],
        differential_diseases: vec!["Becker muscular dystrophy".into()],
        known_genes: vec!["DMD".into()],
        known_phenotypes: vec!["cardiomyopathy".into()],
        category: Some("neuromuscular disease".into()),
        inheritance_pattern: Some("X-linked recessive".into()),
        pubmed_count: 150,
        pmc_fulltext_available: true,
        tier: LiteratureTier::Standard,
    };
    let doc = SourceDocument {
        pmid: "9000003".into(),
        pmc_id: None,
        title: "Cardiorespiratory course".into(),
        text: "Cardiomyopathy typically appears between ages 10 and 18 years.".into(),
        publication_year: Some(2015),
        journal: Some("Neurology".into()),
        study_type: StudyType::Other,
        pre_rank_score: 0.5,
    };

    let prompt = build_primary_prompt(&profile, &doc);
    println!("--- first-pass prompt (first 12 lines) ---");
    for line in prompt.lines().take(12) {
        println!("{line}");
    }
    println!("... ({} bytes total)\n", prompt.len());
    println!("--- temporal second-pass prompt header ---");
    println!("{}\n", build_temporal_prompt(&doc).lines().next().unwrap());

    // The paraphrase mock wraps its JSON in markdown fences; the parser
    // repairs it.
    let fenced = MockExtractor::new("beta", MockSkew::Paraphrase);
    let response = fenced.complete(&prompt, 0.0, Duration::from_secs(120))?;
    println!("--- fenced response starts with: {}", response.lines().next().unwrap());
    let (triples, diagnostics) = parse_extraction_response(&response);
    println!("parsed {} triples; diagnostics:", triples.len());
    for d in &diagnostics {
        println!("  {:?}: {}", d.kind, d.detail);
    }
    for t in &triples {
        println!(
            "  ({}, {}, {})  onset {:?}",
            t.subject,
            t.relation,
            t.object,
            t.temporal.as_ref().map(|c| (c.onset_age_min, c.onset_age_max))
        );
    }

    let (none, diags) = parse_extraction_response("I could not find anything.");
    println!("\nprose response -> {} triples, diagnostic: {}", none.len(), diags[0].detail);
    Ok(())
}
