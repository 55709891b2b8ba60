//! CLI surface checks: exit codes, error prefixes, and help coverage.

use std::path::Path;
use std::process::Output;

fn bin(args: &[&str]) -> Output {
    std::process::Command::new(env!("CARGO_BIN_EXE_chronokg"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn missing_config_exits_2_with_machine_parseable_error() {
    let out = bin(&["--config", "/nonexistent/nope.toml", "store", "merge"]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.starts_with("error:"), "stderr: {stderr}");
    assert!(stderr.contains("config-not-found"), "stderr: {stderr}");
}

#[test]
fn unknown_flag_exits_2() {
    let out = bin(&["--definitely-not-a-flag"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn domain_failure_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let config = dir.path().join("config.toml");
    std::fs::write(
        &config,
        format!(
            "[paths]\nstore_root = \"store\"\ncache_dir = \"cache\"\noutput_dir = \"out\"\nontology_dir = \"{}\"\ndocs_dir = \"{}\"\nschema_snapshot = \"{}\"\n",
            fixtures.join("ontology").display(),
            fixtures.join("docs").display(),
            fixtures.join("schema/reference_edges.tsv").display(),
        ),
    )
    .unwrap();
    // Unknown disease id is a domain failure, not a usage error.
    let out = bin(&[
        "--config",
        config.to_str().unwrap(),
        "profile",
        "--disease",
        "MONDO:9999999",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}

#[test]
fn help_documents_defaults_on_every_subcommand() {
    let top = bin(&["--help"]);
    assert!(top.status.success());
    let text = String::from_utf8_lossy(&top.stdout);
    for sub in [
        "profile", "harvest", "extract", "consensus", "qc", "store", "validate", "judge",
        "coverage", "bench", "rag", "linkpred", "cluster", "decay", "pipeline",
    ] {
        assert!(text.contains(sub), "top-level help lacks '{sub}'");
    }

    let gen = bin(&["bench", "gen", "--help"]);
    let text = String::from_utf8_lossy(&gen.stdout);
    assert!(text.contains("--seed"));
    assert!(text.contains("42"), "bench gen help does not show the default seed");

    let linkpred = bin(&["linkpred", "--help"]);
    let text = String::from_utf8_lossy(&linkpred.stdout);
    assert!(text.contains("--seeds"));
    assert!(text.contains("--bins"));

    let rescue = bin(&["rag", "rescue", "--help"]);
    let text = String::from_utf8_lossy(&rescue.stdout);
    assert!(text.contains("10000") || text.contains("10_000"), "resample default missing");
}

#[test]
fn staged_subcommands_match_pipeline_run_byte_for_byte() {
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let write_cfg = |dir: &Path| {
        let config = dir.join("config.toml");
        std::fs::write(
            &config,
            format!(
                "[pipeline]\nextraction_date = \"2026-04-03\"\n\n[paths]\nstore_root = \"store\"\ncache_dir = \"cache\"\noutput_dir = \"out\"\nontology_dir = \"{}\"\ndocs_dir = \"{}\"\nschema_snapshot = \"{}\"\n",
                fixtures.join("ontology").display(),
                fixtures.join("docs").display(),
                fixtures.join("schema/reference_edges.tsv").display(),
            ),
        )
        .unwrap();
        config
    };

    let a = tempfile::tempdir().unwrap();
    let cfg_a = write_cfg(a.path());
    let out = bin(&["--config", cfg_a.to_str().unwrap(), "pipeline", "run", "--disease", "MONDO:0010200"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let b = tempfile::tempdir().unwrap();
    let cfg_b = write_cfg(b.path());
    for stage in ["extract", "consensus", "qc"] {
        let out = bin(&["--config", cfg_b.to_str().unwrap(), stage, "--disease", "MONDO:0010200"]);
        assert!(out.status.success(), "{stage}: {}", String::from_utf8_lossy(&out.stderr));
    }

    let rel = "store/diseases/MONDO_0010200/validated_triples.jsonl";
    assert_eq!(
        std::fs::read(a.path().join(rel)).unwrap(),
        std::fs::read(b.path().join(rel)).unwrap(),
        "staged stages diverge from the chained pipeline"
    );
}

#[test]
fn bench_score_and_store_merge_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let config = dir.path().join("config.toml");
    std::fs::write(
        &config,
        format!(
            "[pipeline]\nextraction_date = \"2026-04-03\"\n\n[paths]\nstore_root = \"store\"\ncache_dir = \"cache\"\noutput_dir = \"out\"\nontology_dir = \"{}\"\ndocs_dir = \"{}\"\nschema_snapshot = \"{}\"\norphadata = \"{}\"\nhpoa = \"{}\"\nphenopackets = \"{}\"\n",
            fixtures.join("ontology").display(),
            fixtures.join("docs").display(),
            fixtures.join("schema/reference_edges.tsv").display(),
            fixtures.join("gold/orphadata.csv").display(),
            fixtures.join("gold/hpoa.tsv").display(),
            fixtures.join("gold/phenopacket_cases.json").display(),
        ),
    )
    .unwrap();
    let cfg = config.to_str().unwrap();

    // Stage one disease, then rebuild the flat file via store merge.
    for stage in [
        vec!["extract", "--disease", "MONDO:0010679"],
        vec!["consensus", "--disease", "MONDO:0010679"],
        vec!["qc", "--disease", "MONDO:0010679"],
        vec!["store", "merge"],
    ] {
        let mut args = vec!["--config", cfg];
        args.extend(stage.iter().copied());
        let out = bin(&args);
        assert!(out.status.success(), "{stage:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
    assert!(dir.path().join("store/validated_triples.jsonl").exists());

    // Generate a benchmark, answer two items, and score the answers file.
    let out = bin(&["--config", cfg, "bench", "gen", "--type", "temporal_window", "--n", "4", "--seed", "42"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let bench_path = dir.path().join("out/benchmark/benchmark.json");
    let questions: Vec<serde_json::Value> =
        serde_json::from_str(&std::fs::read_to_string(&bench_path).unwrap()).unwrap();
    let answers: String = questions
        .iter()
        .map(|q| {
            let gold_yes = q["gold"]["value"] == serde_json::Value::Bool(true);
            format!(
                "{}\n",
                serde_json::json!({"id": q["id"], "answer": if gold_yes { "Yes" } else { "No" }})
            )
        })
        .collect();
    let answers_path = dir.path().join("answers.jsonl");
    std::fs::write(&answers_path, answers).unwrap();
    let out = bin(&[
        "--config", cfg, "--json", "bench", "score",
        "--benchmark", bench_path.to_str().unwrap(),
        "--answers", answers_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let row = &report["per_type"][0];
    assert_eq!(row["task"], "temporal_window");
    assert_eq!(row["accuracy"], 1.0);
}

#[test]
fn profile_writes_output_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let config = dir.path().join("config.toml");
    std::fs::write(
        &config,
        format!(
            "[paths]\nstore_root = \"store\"\ncache_dir = \"cache\"\noutput_dir = \"out\"\nontology_dir = \"{}\"\ndocs_dir = \"{}\"\nschema_snapshot = \"{}\"\n",
            fixtures.join("ontology").display(),
            fixtures.join("docs").display(),
            fixtures.join("schema/reference_edges.tsv").display(),
        ),
    )
    .unwrap();
    let out = bin(&[
        "--config",
        config.to_str().unwrap(),
        "--json",
        "profile",
        "--disease",
        "MONDO:0010679",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(summary["tier"], "Standard");
    let profile: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("out/profiles/MONDO_0010679.json")).unwrap(),
    )
    .unwrap();
    assert!(profile["known_genes"]
        .as_array()
        .unwrap()
        .iter()
        .any(|g| g == "DMD"));
    assert!(dir.path().join("out/manifests/profile.json").exists());
}
