//! Coverage-gap analysis: which diseases have onset data in which
//! resource, and how many are covered by none of the gold standards.
//!
//! Run with `cargo run --example coverage_gap`.

use std::collections::{BTreeMap, BTreeSet};

use chronokg::validation::coverage_gap;

fn main() {
    // Published-scale fixture: cardinalities chosen so the percentages are
    // reproduced exactly from set algebra alone.
    let universe = 17_080usize;
    let name = |i: usize| format!("disease-{i:05}");
    let mut resources: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    resources.insert("hpoa".into(), (0..1429).map(name).collect());
    resources.insert("orphadata".into(), (0..5796).map(name).collect());
    resources.insert("phenopackets".into(), (0..518).map(name).collect());
    let kg: BTreeSet<String> = (3111..12046).map(name).collect();

    let report = coverage_gap(&kg, &resources, universe);
    println!("onset coverage against a {universe}-disease universe:");
    for row in &report.rows {
        println!(
            "  {:<14} {:>6} diseases  {:>5.1}%",
            row.resource, row.diseases_with_onset, row.coverage_pct
        );
    }
    println!("  {:<14} {:>6} diseases  {:>5.1}%", "temporal KG", report.kg_count, report.kg_pct);
    println!(
        "  {:<14} {:>6} diseases  {:>5.1}%  (absent from every gold standard)",
        "novel", report.novel_count, report.novel_pct
    );
}
