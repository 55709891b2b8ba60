//! Gold-standard validation: disease matching, containment, the
//! six-category discrepancy taxonomy, and its accuracy metrics.
//!
//! Run with `cargo run --example gold_validation`.

use std::path::Path;

use chronokg::model::OnsetBinTable;
use chronokg::validation::{
    accuracy_metrics, classify_discrepancy, containment, load_orphadata, match_diseases,
};

fn main() -> chronokg::Result<()> {
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let table = OnsetBinTable::default();
    let gold = load_orphadata(&fixtures.join("gold/orphadata.csv"), &table)?;
    println!("loaded {} gold records; categorical bins pre-converted to years", gold.len());

    let kg_names = vec![
        "Duchenne Muscular Dystrophy".to_string(),
        "Wilson disease".to_string(),
        "Gaucher".to_string(),
    ];
    let matching = match_diseases(&kg_names, &gold);
    for (name, idx) in &matching.pairs {
        let g = &gold[*idx];
        println!("matched '{name}' -> '{}' ({}-{}y)", g.disease_name, g.onset_min, g.onset_max);
    }

    println!("\ncontainment((2,5), (1,5)) = {}", containment((2.0, 5.0), (1.0, 5.0)));
    println!("containment((30,60), (0,1)) = {}", containment((30.0, 60.0), (0.0, 1.0)));

    // Each taxonomy category on a constructed disease.
    type Case = (&'static str, Vec<(f64, f64)>, (f64, f64));
    let cases: Vec<Case> = vec![
        ("clean containment", vec![(2.0, 4.0), (3.0, 5.0)], (1.0, 5.0)),
        ("one era off", vec![(2.0, 12.0), (2.0, 12.0)], (10.0, 18.0)),
        ("per-phenotype detail vs one bin", vec![(2.0, 40.0), (2.0, 40.0)], (1.0, 5.0)),
        ("wider but overlapping", vec![(0.0, 40.0), (0.0, 40.0)], (5.0, 12.0)),
        ("outlier pulls the envelope", {
            let mut v = vec![(2.0, 8.0); 49];
            v.push((60.0, 60.0));
            v
        }, (2.0, 8.0)),
        ("genuinely wrong", vec![(30.0, 60.0), (30.0, 60.0)], (0.0, 1.0)),
    ];
    let mut verdicts = Vec::new();
    println!();
    for (label, onsets, gold_range) in &cases {
        let v = classify_discrepancy(onsets, *gold_range, &table)?;
        println!("{label:<34} -> {v:?}");
        verdicts.push(v);
    }
    let metrics = accuracy_metrics(&verdicts)?;
    println!(
        "\nstrict precision {:.1}%  effective accuracy {:.1}%",
        100.0 * metrics.strict_precision,
        100.0 * metrics.effective_accuracy
    );
    Ok(())
}
