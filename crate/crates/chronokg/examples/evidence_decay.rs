//! Evidence-age statistics over the publication years of a validated
//! store: median year, recency fractions, and the year histogram.
//!
//! Run with `cargo run --example evidence_decay`.

use std::path::Path;

use chronokg::acquisition::{FixtureDocumentSource, FixtureOntologySource};
use chronokg::evaluation::evidence_age_stats;
use chronokg::extraction::{MockExtractor, MockSkew, ProviderSet};
use chronokg::model::PipelineConfig;
use chronokg::pipeline::{run_disease, PipelineSources};
use chronokg::quality::SchemaIndex;

fn main() -> chronokg::Result<()> {
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let tmp = tempfile::tempdir()?;
    let ontology = FixtureOntologySource::new(fixtures.join("ontology"));
    let documents = FixtureDocumentSource::new(fixtures.join("docs"));
    let schema = SchemaIndex::load(&fixtures.join("schema/reference_edges.tsv"))?;
    let alpha = MockExtractor::new("alpha", MockSkew::Verbatim);
    let beta = MockExtractor::new("beta", MockSkew::Verbatim);
    let config = PipelineConfig::default();

    let mut validated = Vec::new();
    for disease in ["MONDO:0010679", "MONDO:0010311", "MONDO:0010200", "MONDO:0015000"] {
        let sources = PipelineSources {
            ontology: &ontology,
            documents: &documents,
            providers: ProviderSet { primaries: vec![&alpha, &beta], tiebreaker: None },
            schema_index: &schema,
        };
        let out = run_disease(disease, &sources, &config, &tmp.path().join("cache"))?;
        validated.extend(out.qc.validated);
    }

    let stats = evidence_age_stats(&validated, 2026);
    println!("validated records: {} ({} dated)", stats.total_triples, stats.dated_triples);
    println!("median evidence year: {:?}", stats.median_year);
    println!(
        "within 5 years: {:.1}%   older than 20 years: {:.1}%",
        100.0 * stats.fraction_within_5y.unwrap_or(0.0),
        100.0 * stats.fraction_over_20y.unwrap_or(0.0)
    );
    println!("\nyear histogram:");
    for (year, count) in &stats.histogram {
        println!("  {year}  {}", "#".repeat(*count));
    }
    Ok(())
}
