//! Full per-disease pipeline over the bundled fixtures: profile, harvest,
//! extract with two mock models, consensus, quality control, store write,
//! then a few temporal queries against the result.
//!
//! Run with `cargo run --example pipeline_run`.

use std::path::Path;

use chronokg::acquisition::{FixtureDocumentSource, FixtureOntologySource};
use chronokg::extraction::{MockExtractor, MockSkew, ProviderSet};
use chronokg::model::PipelineConfig;
use chronokg::pipeline::{persist_disease_run, run_disease, PipelineSources};
use chronokg::quality::SchemaIndex;
use chronokg::store::KgStore;

fn main() -> chronokg::Result<()> {
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let tmp = tempfile::tempdir()?;

    let ontology = FixtureOntologySource::new(fixtures.join("ontology"));
    let documents = FixtureDocumentSource::new(fixtures.join("docs"));
    let schema = SchemaIndex::load(&fixtures.join("schema/reference_edges.tsv"))?;
    let alpha = MockExtractor::new("alpha", MockSkew::Verbatim);
    let beta = MockExtractor::new("beta", MockSkew::Paraphrase);
    let gamma = MockExtractor::new("gamma", MockSkew::Verbatim);

    let config = PipelineConfig {
        extraction_date: Some("2026-04-03".into()),
        ..Default::default()
    };

    let store = KgStore::open(tmp.path().join("store"));
    for disease in [
        "MONDO:0010679",
        "MONDO:0010311",
        "MONDO:0010200",
        "MONDO:0015000",
    ] {
        let sources = PipelineSources {
            ontology: &ontology,
            documents: &documents,
            providers: ProviderSet {
                primaries: vec![&alpha, &beta],
                tiebreaker: Some(&gamma),
            },
            schema_index: &schema,
        };
        let output = run_disease(disease, &sources, &config, &tmp.path().join("cache"))?;
        persist_disease_run(&store, &output)?;
        let r = &output.report;
        println!(
            "{disease} ({}, {:?}): {} docs -> {} raw -> {} consensus -> {} validated (+{} rejected, {} conflicts)",
            r.disease_name, r.tier, r.documents, r.raw_triples, r.consensus_triples, r.validated,
            r.rejected, r.conflicts
        );
    }
    store.merge_validated()?;

    let index = store.index()?;
    println!("\nstore holds {} validated records", index.len());
    let ans = index.query_onset("MONDO:0010679", "cardiomyopathy")?;
    println!(
        "cardiomyopathy onset in Duchenne muscular dystrophy: {}-{} years {:?}",
        ans.onset_min, ans.onset_max, ans.pmids
    );
    let stages = index.query_stage("MONDO:0010311", "adult");
    println!("adult-stage phenotypes of Becker muscular dystrophy: {stages:?}");
    let profile = index.temporal_profile("MONDO:0010679")?;
    println!("\ntemporal profile of {}:", profile.disease_name);
    for e in &profile.entries {
        println!(
            "  {:<28} onset {:?}-{:?}  stage {:?}  milestone {:?}",
            e.phenotype, e.onset_min, e.onset_max, e.stage, e.milestone
        );
    }
    Ok(())
}
