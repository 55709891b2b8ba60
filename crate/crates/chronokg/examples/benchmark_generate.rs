//! Temporal QA benchmark generation over the bundled fixtures: all nine
//! task types, automated QC, and tier-1 gold verification.
//!
//! Run with `cargo run --example benchmark_generate`.

use std::path::Path;

use chronokg::acquisition::{FixtureDocumentSource, FixtureOntologySource};
use chronokg::benchmark::{
    generate_questions, qc_questions, verify_tier1_golds, BenchmarkSources, TaskType,
};
use chronokg::extraction::{MockExtractor, MockSkew, ProviderSet};
use chronokg::model::PipelineConfig;
use chronokg::pipeline::{persist_disease_run, run_disease, PipelineSources};
use chronokg::quality::SchemaIndex;
use chronokg::store::KgStore;
use chronokg::validation::{load_hpoa, load_orphadata, load_phenopacket_cases};

fn main() -> chronokg::Result<()> {
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let tmp = tempfile::tempdir()?;
    let config = PipelineConfig::default();

    // Tier-2 types need a populated store; build one from the fixtures.
    let ontology = FixtureOntologySource::new(fixtures.join("ontology"));
    let documents = FixtureDocumentSource::new(fixtures.join("docs"));
    let schema = SchemaIndex::load(&fixtures.join("schema/reference_edges.tsv"))?;
    let alpha = MockExtractor::new("alpha", MockSkew::Verbatim);
    let beta = MockExtractor::new("beta", MockSkew::Paraphrase);
    let store = KgStore::open(tmp.path().join("store"));
    for disease in ["MONDO:0010679", "MONDO:0010311", "MONDO:0010200"] {
        let sources = PipelineSources {
            ontology: &ontology,
            documents: &documents,
            providers: ProviderSet { primaries: vec![&alpha, &beta], tiebreaker: None },
            schema_index: &schema,
        };
        let out = run_disease(disease, &sources, &config, &tmp.path().join("cache"))?;
        persist_disease_run(&store, &out)?;
    }
    store.merge_validated()?;
    let index = store.index()?;

    let orphadata = load_orphadata(&fixtures.join("gold/orphadata.csv"), &config.bin_table)?;
    let hpoa = load_hpoa(&fixtures.join("gold/hpoa.tsv"), &config.bin_table)?;
    let cases = load_phenopacket_cases(&fixtures.join("gold/phenopacket_cases.json"))?;
    let sources = BenchmarkSources {
        orphadata: &orphadata,
        hpoa: &hpoa,
        phenopacket_cases: &cases,
        store: Some(&index),
        schema: Some(&schema),
        table: &config.bin_table,
    };

    let mut reported = Vec::new();
    for task in TaskType::ALL {
        let (generated, warnings) = generate_questions(task, &sources, 6, 42);
        let (kept, removed) = qc_questions(generated);
        println!(
            "{:<26} generated {:>2} kept {:>2} removed {:>2}  {}",
            task.name(),
            kept.len() + removed.len(),
            kept.len(),
            removed.len(),
            warnings.first().map(String::as_str).unwrap_or("")
        );
        reported.extend(kept);
    }
    let mismatches = verify_tier1_golds(&reported, &sources);
    println!("\ntier-1 gold re-derivation mismatches: {}", mismatches.len());

    println!("\nsample questions:");
    for q in reported.iter().take(4) {
        println!("  [{}] {}", q.task_type.name(), q.prompt);
        println!("     gold: {:?}", q.gold);
    }
    Ok(())
}
