//! Three-judge audit of (claim, evidence) pairs: stratified sampling,
//! the chain-of-thought era-lookup prompt, and panel aggregation.
//!
//! Run with `cargo run --example judge_panel`.

use chronokg::model::{OnsetBinTable, PipelineConfig};
use chronokg::validation::{aggregate_verdicts, judge_pair, MockJudge, OnsetClaim};

fn main() -> chronokg::Result<()> {
    let table = OnsetBinTable::default();
    let judges = [
        MockJudge::new("judge-a"),
        MockJudge::new("judge-b"),
        MockJudge::new("judge-c"),
    ];

    // (claim, evidence) pairs with different support relationships.
    let pairs = [
        (
            OnsetClaim {
                disease: "Chanarin-Dorfman syndrome".into(),
                phenotype: "ichthyosis".into(),
                onset_min: 0.0,
                onset_max: 1.0,
            },
            "Ichthyosis is present from birth, with onset in infancy.",
        ),
        (
            OnsetClaim {
                disease: "fixture disease".into(),
                phenotype: "tremor".into(),
                onset_min: 0.0,
                onset_max: 5.0,
            },
            "The literature describes an elderly onset of tremor.",
        ),
        (
            OnsetClaim {
                disease: "fixture disease".into(),
                phenotype: "weakness".into(),
                onset_min: 2.0,
                onset_max: 10.0,
            },
            "Weakness was frequently reported.",
        ),
    ];

    let lexicon = PipelineConfig::default().timing_lexicon;
    println!("timing lexicon: {lexicon:?}\n");

    let mut per_item = Vec::new();
    for (claim, evidence) in &pairs {
        println!("claim: {} in {}: {}-{}y", claim.phenotype, claim.disease, claim.onset_min, claim.onset_max);
        println!("evidence: \"{evidence}\"");
        let mut verdicts = Vec::new();
        for judge in &judges {
            let v = judge_pair(claim, evidence, judge, &table)?;
            println!("  {} -> {:?}", v.judge, v.verdict);
            verdicts.push(v);
        }
        per_item.push(verdicts);
        println!();
    }

    let report = aggregate_verdicts(&per_item);
    print!("{}", report.render_table());
    Ok(())
}
