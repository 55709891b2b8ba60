//! Subcommand definitions and runners. Each runner reads the config, runs
//! one module pipeline, writes outputs atomically, and emits a
//! [`RunManifest`].

use clap::{Args, Parser, Subcommand};
use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use crate::acquisition::{
    DocumentSource, EutilsClient, FixtureDocumentSource, FixtureOntologySource,
    OlsOntologySource, OntologySource,
};
use crate::benchmark::{
    generate_questions, qc_questions, score_answer, verify_tier1_golds, BenchmarkQuestion,
    BenchmarkSources, ScoreOutcome, TaskType,
};
use crate::cli::config::AppConfig;
use crate::cli::manifest::{write_atomic, write_jsonl_atomic, RunManifest};
use crate::cli::plot::{bar_chart_svg, scatter_svg};
use crate::error::{Error, Result};
use crate::evaluation::{
    ablation_run, cluster_trajectories, evidence_age_stats, rescue_rate, run_condition, BinMode,
    Condition, ConditionResult, GraphTriple, MockRagProvider, RagSources, TransEParams,
    trajectory_features,
};
use crate::extraction::{provider_from_spec, ModelProvider, ProviderSet, RecordingProvider};
use crate::model::{era_of_range, LiteratureTier, TemporalTriple};
use crate::pipeline::{persist_disease_run, run_disease, PipelineSources};
use crate::quality::SchemaIndex;
use crate::store::{KgStore, LinePolicy, StoreIndex, StoreTier};
use crate::validation::{
    accuracy_metrics, aggregate_verdicts, classify_discrepancy, coverage_gap, judge_pair,
    load_genereviews, load_hpoa, load_orphadata, load_phenopacket_cases, match_diseases,
    normalize_disease_key, phenopackets_to_gold, sample_novel, GoldRecord, JudgeVerdict,
    MockJudge, NovelDisease, OnsetClaim,
};

/// Temporal biomedical KG construction, validation, and evaluation.
#[derive(Debug, Parser)]
#[command(name = "chronokg", version, about)]
pub struct Cli {
    /// Path to the TOML config file.
    #[arg(long, global = true, default_value = "chronokg.toml")]
    pub config: PathBuf,
    /// Print a JSON summary to stdout.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Assemble the ontology profile for one disease.
    Profile(DiseaseArgs),
    /// Retrieve, rank, and cache documents for one disease.
    Harvest(DiseaseArgs),
    /// Run multi-model extraction over the harvested documents.
    Extract(DiseaseArgs),
    /// Apply the multi-model consensus filter to raw extractions.
    Consensus(DiseaseArgs),
    /// Validate, grade, and score consensus triples.
    Qc(DiseaseArgs),
    /// Store maintenance.
    Store {
        #[command(subcommand)]
        action: StoreAction,
    },
    /// Gold-standard validation.
    Validate {
        #[command(subcommand)]
        action: ValidateAction,
    },
    /// Three-judge novel-coverage audit.
    Judge(JudgeArgs),
    /// Onset coverage against gold resources.
    Coverage(CoverageArgs),
    /// Benchmark generation and scoring.
    Bench {
        #[command(subcommand)]
        action: BenchAction,
    },
    /// Retrieval-condition runs and rescue analysis.
    Rag {
        #[command(subcommand)]
        action: RagAction,
    },
    /// Link-prediction ablation over onset-binned relations.
    Linkpred(LinkpredArgs),
    /// Disease-trajectory clustering.
    Cluster(ClusterArgs),
    /// Evidence-age statistics.
    Decay(DecayArgs),
    /// Multi-stage pipeline.
    Pipeline {
        #[command(subcommand)]
        action: PipelineAction,
    },
}

#[derive(Debug, Args)]
pub struct DiseaseArgs {
    /// Disease CURIE, e.g. MONDO:0010679.
    #[arg(long)]
    pub disease: String,
}

#[derive(Debug, Subcommand)]
pub enum StoreAction {
    /// Merge per-disease validated files into the flat store file.
    Merge,
}

#[derive(Debug, Subcommand)]
pub enum ValidateAction {
    /// Containment against a gold standard (strict precision).
    Gold(GoldArgs),
    /// Six-category discrepancy taxonomy and effective accuracy.
    Taxonomy(GoldArgs),
}

#[derive(Debug, Args)]
pub struct GoldArgs {
    /// Gold source: orphadata | hpoa | genereviews | phenopackets.
    #[arg(long, default_value = "orphadata")]
    pub source: String,
}

#[derive(Debug, Args)]
pub struct JudgeArgs {
    /// Diseases to sample from the novel-coverage set.
    #[arg(long, default_value_t = 10)]
    pub sample_size: usize,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct CoverageArgs {
    /// Disease universe size (defaults to the config value).
    #[arg(long)]
    pub universe: Option<usize>,
    /// Also write an SVG bar chart.
    #[arg(long)]
    pub svg: bool,
}

#[derive(Debug, Subcommand)]
pub enum BenchAction {
    /// Generate questions.
    Gen(BenchGenArgs),
    /// Score an answers file against a benchmark file.
    Score(BenchScoreArgs),
}

#[derive(Debug, Args)]
pub struct BenchGenArgs {
    /// Task types to generate (default: all nine).
    #[arg(long = "type", value_name = "TASK")]
    pub types: Vec<String>,
    /// Questions per task type.
    #[arg(long, default_value_t = 10)]
    pub n: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct BenchScoreArgs {
    /// Benchmark JSON file (array of questions).
    #[arg(long)]
    pub benchmark: PathBuf,
    /// JSONL answers: {"id": ..., "answer": ...} per line.
    #[arg(long)]
    pub answers: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum RagAction {
    /// Answer benchmark questions under one retrieval condition.
    Run(RagRunArgs),
    /// Long-tail rescue between two condition transcripts.
    Rescue(RagRescueArgs),
}

#[derive(Debug, Args)]
pub struct RagRunArgs {
    #[arg(long)]
    pub benchmark: PathBuf,
    /// nr | static_kg | coarse_onset | chrono_kg
    #[arg(long)]
    pub condition: String,
    /// Retrieved lines per question.
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    /// Restrict to one task type (e.g. phenopackets_onset).
    #[arg(long = "type")]
    pub task_type: Option<String>,
}

#[derive(Debug, Args)]
pub struct RagRescueArgs {
    /// Transcript of the no-retrieval run.
    #[arg(long)]
    pub nr: PathBuf,
    /// Transcript of the retrieval condition run.
    #[arg(long)]
    pub cond: PathBuf,
    #[arg(long, default_value_t = 10_000)]
    pub resamples: usize,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct LinkpredArgs {
    /// JSONL file of {head, relation, tail, onset} rows; defaults to the
    /// disease-phenotype edges of the validated store.
    #[arg(long)]
    pub triples: Option<PathBuf>,
    /// Seeds for independent runs (defaults to the config registry).
    #[arg(long, value_delimiter = ',')]
    pub seeds: Vec<u64>,
    /// fine8 | coarse5
    #[arg(long, default_value = "fine8")]
    pub bins: String,
    #[arg(long, default_value_t = 100)]
    pub epochs: usize,
    #[arg(long, default_value_t = 100)]
    pub dim: usize,
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    #[arg(long, default_value_t = 4)]
    pub k_min: usize,
    #[arg(long, default_value_t = 8)]
    pub k_max: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub svg: bool,
}

#[derive(Debug, Args)]
pub struct DecayArgs {
    #[arg(long, default_value_t = 2026)]
    pub reference_year: i32,
    #[arg(long)]
    pub svg: bool,
}

#[derive(Debug, Subcommand)]
pub enum PipelineAction {
    /// Chain profile→harvest→extract→consensus→qc→store for diseases.
    Run(PipelineRunArgs),
}

#[derive(Debug, Args)]
pub struct PipelineRunArgs {
    /// Disease CURIE; repeatable.
    #[arg(long)]
    pub disease: Vec<String>,
}


fn ontology_source(config: &AppConfig) -> Result<Box<dyn OntologySource>> {
    match config.sources.ontology.as_str() {
        "fixture" => Ok(Box::new(FixtureOntologySource::new(&config.paths.ontology_dir))),
        "ols" => Ok(Box::new(OlsOntologySource::new())),
        other => Err(Error::config(format!("unknown ontology source '{other}'"))),
    }
}

fn document_source(config: &AppConfig) -> Result<Box<dyn DocumentSource>> {
    match config.sources.documents.as_str() {
        "fixture" => Ok(Box::new(FixtureDocumentSource::new(&config.paths.docs_dir))),
        "eutils" => Ok(Box::new(EutilsClient::new())),
        other => Err(Error::config(format!("unknown document source '{other}'"))),
    }
}

fn build_provider(spec: &str, config: &AppConfig) -> Result<Box<dyn ModelProvider>> {
    let inner = provider_from_spec(spec, Some(&config.providers.replay_dir))?;
    if config.providers.record {
        Ok(Box::new(RecordingProvider::new(inner, &config.providers.replay_dir)))
    } else {
        Ok(inner)
    }
}

struct Providers {
    primaries: Vec<Box<dyn ModelProvider>>,
    tiebreaker: Option<Box<dyn ModelProvider>>,
}

impl Providers {
    fn build(config: &AppConfig) -> Result<Providers> {
        if config.providers.primaries.len() < 2 {
            return Err(Error::config("at least two primary providers are required"));
        }
        let primaries = config
            .providers
            .primaries
            .iter()
            .map(|spec| build_provider(spec, config))
            .collect::<Result<Vec<_>>>()?;
        let tiebreaker = config
            .providers
            .tiebreaker
            .as_ref()
            .map(|spec| build_provider(spec, config))
            .transpose()?;
        Ok(Providers {
            primaries,
            tiebreaker,
        })
    }

    fn as_set(&self) -> ProviderSet<'_> {
        ProviderSet {
            primaries: self.primaries.iter().map(|b| b as &dyn ModelProvider).collect(),
            tiebreaker: self.tiebreaker.as_ref().map(|b| b as &dyn ModelProvider),
        }
    }
}

fn judge_provider(spec: &str, config: &AppConfig) -> Result<Box<dyn ModelProvider>> {
    match spec.split_once(':') {
        Some(("mockjudge", name)) => Ok(Box::new(MockJudge::new(name))),
        _ => build_provider(spec, config),
    }
}

fn rag_provider(spec: &str, config: &AppConfig) -> Result<Box<dyn ModelProvider>> {
    match spec.split_once(':') {
        Some(("mockrag", name)) => Ok(Box::new(MockRagProvider::new(name))),
        _ => build_provider(spec, config),
    }
}

fn load_gold(config: &AppConfig, source: &str) -> Result<Vec<GoldRecord>> {
    let table = &config.pipeline.bin_table;
    match source {
        "orphadata" => load_orphadata(&config.paths.orphadata, table),
        "hpoa" => load_hpoa(&config.paths.hpoa, table),
        "genereviews" => load_genereviews(&config.paths.genereviews, table),
        "phenopackets" => Ok(phenopackets_to_gold(&load_phenopacket_cases(
            &config.paths.phenopackets,
        )?)),
        other => Err(Error::config(format!("unknown gold source '{other}'"))),
    }
}

fn store_index(config: &AppConfig) -> Result<StoreIndex> {
    KgStore::open(&config.paths.store_root).index()
}

/// Disease display names present in the store (source side of
/// disease-typed edges), deduplicated.
fn store_disease_names(index: &StoreIndex) -> Vec<String> {
    let mut names: Vec<String> = index
        .records()
        .iter()
        .filter(|t| t.source_type == "disease")
        .map(|t| t.source_name.clone())
        .collect();
    names.sort();
    names.dedup();
    names
}

fn triples_by_disease(index: &StoreIndex) -> BTreeMap<String, Vec<&TemporalTriple>> {
    let mut map: BTreeMap<String, Vec<&TemporalTriple>> = BTreeMap::new();
    for t in index.records() {
        map.entry(t.disease_profile_id.clone()).or_default().push(t);
    }
    map
}

/// Summary of one subcommand run, printed as JSON with `--json`.
pub struct RunSummary {
    pub value: serde_json::Value,
}

pub fn execute(cli: &Cli) -> Result<RunSummary> {
    let config = AppConfig::load(&cli.config)?;
    match &cli.command {
        Command::Profile(args) => cmd_profile(&config, args),
        Command::Harvest(args) => cmd_harvest(&config, args),
        Command::Extract(args) => cmd_extract(&config, args),
        Command::Consensus(args) => cmd_consensus(&config, args),
        Command::Qc(args) => cmd_qc(&config, args),
        Command::Store { action } => match action {
            StoreAction::Merge => cmd_store_merge(&config),
        },
        Command::Validate { action } => match action {
            ValidateAction::Gold(args) => cmd_validate_gold(&config, args),
            ValidateAction::Taxonomy(args) => cmd_validate_taxonomy(&config, args),
        },
        Command::Judge(args) => cmd_judge(&config, args),
        Command::Coverage(args) => cmd_coverage(&config, args),
        Command::Bench { action } => match action {
            BenchAction::Gen(args) => cmd_bench_gen(&config, args),
            BenchAction::Score(args) => cmd_bench_score(&config, args),
        },
        Command::Rag { action } => match action {
            RagAction::Run(args) => cmd_rag_run(&config, args),
            RagAction::Rescue(args) => cmd_rag_rescue(&config, args),
        },
        Command::Linkpred(args) => cmd_linkpred(&config, args),
        Command::Cluster(args) => cmd_cluster(&config, args),
        Command::Decay(args) => cmd_decay(&config, args),
        Command::Pipeline { action } => match action {
            PipelineAction::Run(args) => cmd_pipeline_run(&config, args),
        },
    }
}

fn out_path(config: &AppConfig, rel: &str) -> PathBuf {
    config.paths.output_dir.join(rel)
}

fn cmd_profile(config: &AppConfig, args: &DiseaseArgs) -> Result<RunSummary> {
    let ontology = ontology_source(config)?;
    let profile = crate::acquisition::profile_disease(&args.disease, ontology.as_ref())?;
    let path = out_path(config, &format!("profiles/{}.json", args.disease.replace(':', "_")));
    write_atomic(&path, serde_json::to_string_pretty(&profile)?.as_bytes())?;
    let mut manifest = RunManifest::start("profile", &config.config_hash);
    manifest.output(&path);
    manifest.finish(&config.paths.output_dir)?;
    Ok(RunSummary {
        value: serde_json::json!({
            "disease": args.disease,
            "name": profile.name,
            "tier": profile.tier,
            "pubmed_count": profile.pubmed_count,
            "profile": path,
        }),
    })
}

fn cmd_harvest(config: &AppConfig, args: &DiseaseArgs) -> Result<RunSummary> {
    let ontology = ontology_source(config)?;
    let documents = document_source(config)?;
    let profile = crate::acquisition::profile_disease(&args.disease, ontology.as_ref())?;
    let outcome = crate::acquisition::harvest(
        &profile,
        documents.as_ref(),
        &config.pipeline,
        &config.paths.cache_dir,
    )?;
    let path = out_path(config, &format!("harvest/{}.json", args.disease.replace(':', "_")));
    write_atomic(&path, serde_json::to_string_pretty(&outcome.documents)?.as_bytes())?;
    let mut manifest = RunManifest::start("harvest", &config.config_hash);
    manifest.output(&path);
    for w in &outcome.warnings {
        manifest.warnings.push(w.clone());
    }
    manifest.finish(&config.paths.output_dir)?;
    Ok(RunSummary {
        value: serde_json::json!({
            "disease": args.disease,
            "documents": outcome.documents.len(),
            "from_cache": outcome.from_cache,
            "warnings": outcome.warnings,
        }),
    })
}

/// Per-document models-processed counts persisted by `extract` so the
/// standalone `consensus` stage can rebuild confidence denominators.
#[derive(serde::Serialize, serde::Deserialize)]
struct ExtractionMeta {
    models_processed: BTreeMap<String, Vec<String>>,
}

fn disease_dir(config: &AppConfig, disease: &str) -> PathBuf {
    config
        .paths
        .store_root
        .join("diseases")
        .join(disease.replace(':', "_"))
}

fn cmd_extract(config: &AppConfig, args: &DiseaseArgs) -> Result<RunSummary> {
    let ontology = ontology_source(config)?;
    let documents = document_source(config)?;
    let providers = Providers::build(config)?;
    let profile = crate::acquisition::profile_disease(&args.disease, ontology.as_ref())?;
    let harvested = crate::acquisition::harvest(
        &profile,
        documents.as_ref(),
        &config.pipeline,
        &config.paths.cache_dir,
    )?;
    let set = providers.as_set();
    let mut raw = Vec::new();
    let mut meta = ExtractionMeta {
        models_processed: BTreeMap::new(),
    };
    let mut diagnostics = 0usize;
    for doc in &harvested.documents {
        let extraction = crate::extraction::extract_document(doc, &profile, &set, &config.pipeline);
        diagnostics += extraction.diagnostics.len();
        meta.models_processed
            .insert(doc.pmid.clone(), extraction.models_processed.clone());
        for triples in extraction.per_model.into_values() {
            raw.extend(triples);
        }
    }
    let dir = disease_dir(config, &args.disease);
    write_jsonl_atomic(&dir.join(StoreTier::Raw.file_name(false)), &raw)?;
    write_atomic(
        &dir.join("extraction_meta.json"),
        serde_json::to_string_pretty(&meta)?.as_bytes(),
    )?;
    let mut manifest = RunManifest::start("extract", &config.config_hash);
    manifest.output(dir.join(StoreTier::Raw.file_name(false)));
    manifest.finish(&config.paths.output_dir)?;
    Ok(RunSummary {
        value: serde_json::json!({
            "disease": args.disease,
            "documents": harvested.documents.len(),
            "raw_triples": raw.len(),
            "diagnostics": diagnostics,
        }),
    })
}

fn cmd_consensus(config: &AppConfig, args: &DiseaseArgs) -> Result<RunSummary> {
    let dir = disease_dir(config, &args.disease);
    let raw_path = dir.join(StoreTier::Raw.file_name(false));
    let (raw, _) =
        crate::store::load_jsonl::<crate::extraction::RawTriple>(&raw_path, LinePolicy::Abort)?;
    let meta: ExtractionMeta = serde_json::from_str(
        &std::fs::read_to_string(dir.join("extraction_meta.json"))
            .map_err(|_| Error::not_found("extraction_meta.json (run `extract` first)"))?,
    )?;
    let mut by_doc: BTreeMap<String, BTreeMap<String, Vec<crate::extraction::RawTriple>>> =
        BTreeMap::new();
    for t in raw {
        by_doc
            .entry(t.pmid.clone())
            .or_default()
            .entry(t.model.clone())
            .or_default()
            .push(t);
    }
    let mut consensus = Vec::new();
    for (pmid, per_model) in &by_doc {
        let total = meta
            .models_processed
            .get(pmid)
            .map(Vec::len)
            .unwrap_or(per_model.len());
        consensus.extend(crate::consensus::compute_consensus(
            per_model,
            total,
            config.pipeline.consensus_threshold,
            config.pipeline.fuzzy_threshold,
        ));
    }
    let path = dir.join(StoreTier::Consensus.file_name(false));
    write_jsonl_atomic(&path, &consensus)?;
    let mut manifest = RunManifest::start("consensus", &config.config_hash);
    manifest.input(raw_path).output(&path);
    manifest.finish(&config.paths.output_dir)?;
    Ok(RunSummary {
        value: serde_json::json!({
            "disease": args.disease,
            "documents": by_doc.len(),
            "consensus_triples": consensus.len(),
        }),
    })
}

fn cmd_qc(config: &AppConfig, args: &DiseaseArgs) -> Result<RunSummary> {
    let dir = disease_dir(config, &args.disease);
    let consensus_path = dir.join(StoreTier::Consensus.file_name(false));
    let (consensus, _) = crate::store::load_jsonl::<crate::consensus::ConsensusTriple>(
        &consensus_path,
        LinePolicy::Abort,
    )?;
    let ontology = ontology_source(config)?;
    let documents = document_source(config)?;
    let profile = crate::acquisition::profile_disease(&args.disease, ontology.as_ref())?;
    let harvested = crate::acquisition::harvest(
        &profile,
        documents.as_ref(),
        &config.pipeline,
        &config.paths.cache_dir,
    )?;
    let doc_meta: BTreeMap<String, crate::acquisition::SourceDocument> = harvested
        .documents
        .iter()
        .map(|d| (d.pmid.clone(), d.clone()))
        .collect();
    let index = SchemaIndex::load(&config.paths.schema_snapshot)?;
    let mut qc =
        crate::quality::qc_pipeline(consensus, &doc_meta, &profile, &config.pipeline, &index)?;
    qc.validated = crate::consensus::merge_multi_source(qc.validated);
    let validated_path = dir.join(StoreTier::Validated.file_name(false));
    write_jsonl_atomic(&validated_path, &qc.validated)?;
    write_atomic(
        &dir.join("qc_report.json"),
        serde_json::to_string_pretty(&serde_json::json!({
            "rejected": qc.rejected,
            "conflicts": qc.conflicts,
            "warnings": qc.warnings,
        }))?
        .as_bytes(),
    )?;
    let mut manifest = RunManifest::start("qc", &config.config_hash);
    manifest.input(consensus_path).output(&validated_path);
    manifest.finish(&config.paths.output_dir)?;
    Ok(RunSummary {
        value: serde_json::json!({
            "disease": args.disease,
            "validated": qc.validated.len(),
            "rejected": qc.rejected.len(),
            "conflicts": qc.conflicts.len(),
        }),
    })
}

fn cmd_store_merge(config: &AppConfig) -> Result<RunSummary> {
    let store = KgStore::open(&config.paths.store_root);
    let merged = store.merge_validated()?;
    let mut manifest = RunManifest::start("store merge", &config.config_hash);
    manifest.output(store.tier_path(StoreTier::Validated));
    manifest.finish(&config.paths.output_dir)?;
    Ok(RunSummary {
        value: serde_json::json!({
            "merged_records": merged,
            "flat_file": store.tier_path(StoreTier::Validated),
        }),
    })
}

fn kg_onsets_by_name(index: &StoreIndex) -> BTreeMap<String, Vec<(f64, f64)>> {
    let mut map: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
    for t in index.records() {
        if t.source_type != "disease" {
            continue;
        }
        if let Some(range) = t.onset_range() {
            map.entry(t.source_name.clone()).or_default().push(range);
        }
    }
    map
}

fn cmd_validate_gold(config: &AppConfig, args: &GoldArgs) -> Result<RunSummary> {
    let gold = load_gold(config, &args.source)?;
    let index = store_index(config)?;
    let kg_onsets = kg_onsets_by_name(&index);
    let kg_names: Vec<String> = kg_onsets.keys().cloned().collect();
    let matching = match_diseases(&kg_names, &gold);
    let mut rows = Vec::new();
    let mut contained = 0usize;
    for (kg_name, gold_idx) in &matching.pairs {
        let onsets = &kg_onsets[kg_name];
        let mins: Vec<f64> = onsets.iter().map(|o| o.0).collect();
        let maxs: Vec<f64> = onsets.iter().map(|o| o.1).collect();
        let median = (
            crate::store::median(&mins).unwrap(),
            crate::store::median(&maxs).unwrap(),
        );
        let g = &gold[*gold_idx];
        let is_contained = crate::validation::containment(median, (g.onset_min, g.onset_max));
        contained += is_contained as usize;
        rows.push(serde_json::json!({
            "disease": kg_name,
            "kg_median": median,
            "gold": [g.onset_min, g.onset_max],
            "contained": is_contained,
        }));
    }
    let strict = if matching.pairs.is_empty() {
        None
    } else {
        Some(contained as f64 / matching.pairs.len() as f64)
    };
    let path = out_path(config, &format!("validation/gold_{}.json", args.source));
    let report = serde_json::json!({
        "source": args.source,
        "matched": matching.pairs.len(),
        "ambiguous": matching.ambiguous,
        "strict_precision": strict,
        "rows": rows,
    });
    write_atomic(&path, serde_json::to_string_pretty(&report)?.as_bytes())?;
    let mut manifest = RunManifest::start("validate gold", &config.config_hash);
    manifest.output(&path);
    manifest.finish(&config.paths.output_dir)?;
    Ok(RunSummary { value: report })
}

fn cmd_validate_taxonomy(config: &AppConfig, args: &GoldArgs) -> Result<RunSummary> {
    let gold = load_gold(config, &args.source)?;
    let index = store_index(config)?;
    let kg_onsets = kg_onsets_by_name(&index);
    let kg_names: Vec<String> = kg_onsets.keys().cloned().collect();
    let matching = match_diseases(&kg_names, &gold);
    let mut verdicts = Vec::new();
    let mut rows = Vec::new();
    for (kg_name, gold_idx) in &matching.pairs {
        let g = &gold[*gold_idx];
        let verdict = classify_discrepancy(
            &kg_onsets[kg_name],
            (g.onset_min, g.onset_max),
            &config.pipeline.bin_table,
        )?;
        rows.push(serde_json::json!({
            "disease": kg_name,
            "verdict": verdict,
        }));
        verdicts.push(verdict);
    }
    let metrics = accuracy_metrics(&verdicts)?;
    let path = out_path(config, &format!("validation/taxonomy_{}.json", args.source));
    let report = serde_json::json!({
        "source": args.source,
        "metrics": metrics,
        "rows": rows,
    });
    write_atomic(&path, serde_json::to_string_pretty(&report)?.as_bytes())?;
    let mut manifest = RunManifest::start("validate taxonomy", &config.config_hash);
    manifest.output(&path);
    manifest.finish(&config.paths.output_dir)?;
    Ok(RunSummary { value: report })
}

fn literature_tier_of(config: &AppConfig, disease_id: &str) -> LiteratureTier {
    ontology_source(config)
        .and_then(|ontology| crate::acquisition::profile_disease(disease_id, ontology.as_ref()))
        .map(|p| p.tier)
        .unwrap_or(LiteratureTier::Minimal)
}

fn cmd_judge(config: &AppConfig, args: &JudgeArgs) -> Result<RunSummary> {
    let seed = args.seed.unwrap_or(config.pipeline.seeds.novelty_sample);
    let index = store_index(config)?;
    // Novel coverage: diseases with onset data absent from every gold
    // resource.
    let mut gold_keys: BTreeSet<String> = BTreeSet::new();
    for source in ["orphadata", "hpoa", "genereviews", "phenopackets"] {
        if let Ok(records) = load_gold(config, source) {
            gold_keys.extend(records.into_iter().map(|r| r.normalized_key));
        }
    }
    let table = &config.pipeline.bin_table;
    let mut population = Vec::new();
    for (disease_id, triples) in triples_by_disease(&index) {
        let onsets: Vec<(f64, f64)> = triples.iter().filter_map(|t| t.onset_range()).collect();
        if onsets.is_empty() {
            continue;
        }
        let name = triples
            .iter()
            .find(|t| t.source_type == "disease")
            .map(|t| t.source_name.clone())
            .unwrap_or_else(|| disease_id.clone());
        if gold_keys.contains(&normalize_disease_key(&name)) {
            continue;
        }
        let mins: Vec<f64> = onsets.iter().map(|o| o.0).collect();
        let maxs: Vec<f64> = onsets.iter().map(|o| o.1).collect();
        let median = (
            crate::store::median(&mins).unwrap().clamp(0.0, 120.0),
            crate::store::median(&maxs).unwrap().clamp(0.0, 120.0),
        );
        let era = era_of_range(median.0, median.1, table)?.to_string();
        population.push(NovelDisease {
            disease: name,
            tier: literature_tier_of(config, &disease_id),
            era,
            triples: triples.into_iter().cloned().collect(),
        });
    }
    let n = args.sample_size.min(population.len());
    let (sample, warnings) = sample_novel(&population, n, seed, &config.pipeline.timing_lexicon)?;
    let judges: Vec<Box<dyn ModelProvider>> = config
        .providers
        .judges
        .iter()
        .map(|spec| judge_provider(spec, config))
        .collect::<Result<Vec<_>>>()?;
    if judges.len() != 3 {
        return Err(Error::config("the judge panel requires exactly three judges"));
    }
    let mut per_item: Vec<Vec<JudgeVerdict>> = Vec::new();
    for pair in &sample {
        let claim = OnsetClaim {
            disease: pair.disease.clone(),
            phenotype: pair.phenotype.clone(),
            onset_min: pair.claim_min,
            onset_max: pair.claim_max,
        };
        let verdicts = judges
            .iter()
            .map(|j| judge_pair(&claim, &pair.evidence_text, j.as_ref(), table))
            .collect::<Result<Vec<_>>>()?;
        per_item.push(verdicts);
    }
    let mut report = aggregate_verdicts(&per_item);
    report.warnings.extend(warnings);
    let path = out_path(config, "judge/panel_report.json");
    write_atomic(
        &path,
        serde_json::to_string_pretty(&serde_json::json!({
            "sample": sample,
            "report": report,
        }))?
        .as_bytes(),
    )?;
    eprintln!("{}", report.render_table());
    let mut manifest = RunManifest::start("judge", &config.config_hash);
    manifest.seed("novelty_sample", seed);
    manifest.output(&path);
    manifest.finish(&config.paths.output_dir)?;
    Ok(RunSummary {
        value: serde_json::to_value(&report)?,
    })
}

fn cmd_coverage(config: &AppConfig, args: &CoverageArgs) -> Result<RunSummary> {
    let index = store_index(config)?;
    let kg: BTreeSet<String> = store_disease_names(&index)
        .into_iter()
        .map(|n| normalize_disease_key(&n))
        .collect();
    let mut resources = BTreeMap::new();
    for source in ["hpoa", "orphadata", "phenopackets"] {
        if let Ok(records) = load_gold(config, source) {
            resources.insert(
                source.to_string(),
                records.into_iter().map(|r| r.normalized_key).collect::<BTreeSet<_>>(),
            );
        }
    }
    let universe = args.universe.unwrap_or(config.coverage_universe);
    let report = coverage_gap(&kg, &resources, universe);
    let path = out_path(config, "coverage/coverage.json");
    write_atomic(&path, serde_json::to_string_pretty(&report)?.as_bytes())?;
    if args.svg {
        let mut bars: Vec<(String, f64)> = report
            .rows
            .iter()
            .map(|r| (r.resource.clone(), r.coverage_pct))
            .collect();
        bars.push(("kg".into(), report.kg_pct));
        bars.push(("novel".into(), report.novel_pct));
        write_atomic(
            &out_path(config, "coverage/coverage.svg"),
            bar_chart_svg("Onset coverage (%)", &bars).as_bytes(),
        )?;
    }
    let mut manifest = RunManifest::start("coverage", &config.config_hash);
    manifest.output(&path);
    manifest.finish(&config.paths.output_dir)?;
    Ok(RunSummary {
        value: serde_json::to_value(&report)?,
    })
}

fn bench_sources<'a>(
    config: &'a AppConfig,
    orphadata: &'a [GoldRecord],
    hpoa: &'a [GoldRecord],
    cases: &'a [crate::validation::PhenopacketCase],
    store: Option<&'a StoreIndex>,
    schema: Option<&'a SchemaIndex>,
) -> BenchmarkSources<'a> {
    BenchmarkSources {
        orphadata,
        hpoa,
        phenopacket_cases: cases,
        store,
        schema,
        table: &config.pipeline.bin_table,
    }
}

fn cmd_bench_gen(config: &AppConfig, args: &BenchGenArgs) -> Result<RunSummary> {
    let tasks: Vec<TaskType> = if args.types.is_empty() {
        TaskType::ALL.to_vec()
    } else {
        args.types
            .iter()
            .map(|t| {
                TaskType::parse(t).ok_or_else(|| Error::config(format!("unknown task type '{t}'")))
            })
            .collect::<Result<Vec<_>>>()?
    };
    let orphadata = load_gold(config, "orphadata").unwrap_or_default();
    let hpoa = load_gold(config, "hpoa").unwrap_or_default();
    let cases = load_phenopacket_cases(&config.paths.phenopackets).unwrap_or_default();
    let store = store_index(config).ok();
    let schema = SchemaIndex::load(&config.paths.schema_snapshot).ok();
    let sources = bench_sources(
        config,
        &orphadata,
        &hpoa,
        &cases,
        store.as_ref(),
        schema.as_ref(),
    );

    let mut reported: Vec<BenchmarkQuestion> = Vec::new();
    let mut supplementary: Vec<BenchmarkQuestion> = Vec::new();
    let mut all_warnings = Vec::new();
    let mut removed_total = Vec::new();
    for task in &tasks {
        let (generated, warnings) = generate_questions(*task, &sources, args.n, args.seed);
        all_warnings.extend(warnings);
        let (kept, removed) = qc_questions(generated);
        removed_total.extend(removed);
        if *task == TaskType::NegativeTemporal {
            supplementary.extend(kept);
        } else {
            reported.extend(kept);
        }
    }
    let mismatches = verify_tier1_golds(&reported, &sources);
    if !mismatches.is_empty() {
        return Err(Error::domain(format!(
            "tier1 gold verification failed: {mismatches:?}"
        )));
    }

    let bench_dir = out_path(config, "benchmark");
    let main_path = bench_dir.join("benchmark.json");
    write_atomic(&main_path, serde_json::to_string_pretty(&reported)?.as_bytes())?;
    let supp_path = bench_dir.join("supplementary_negative_temporal.json");
    write_atomic(&supp_path, serde_json::to_string_pretty(&supplementary)?.as_bytes())?;
    for task in &tasks {
        let shard: Vec<&BenchmarkQuestion> = reported
            .iter()
            .chain(supplementary.iter())
            .filter(|q| q.task_type == *task)
            .collect();
        write_jsonl_atomic(&bench_dir.join(format!("{}.jsonl", task.name())), &shard)?;
    }
    write_atomic(
        &bench_dir.join("qc_removed.json"),
        serde_json::to_string_pretty(&removed_total)?.as_bytes(),
    )?;

    let mut manifest = RunManifest::start("bench gen", &config.config_hash);
    manifest.seed("bench", args.seed);
    manifest.output(&main_path).output(&supp_path);
    manifest.warnings = all_warnings.clone();
    manifest.finish(&config.paths.output_dir)?;
    Ok(RunSummary {
        value: serde_json::json!({
            "reported_questions": reported.len(),
            "supplementary_questions": supplementary.len(),
            "qc_removed": removed_total.len(),
            "tier1_gold_mismatches": 0,
            "warnings": all_warnings,
            "benchmark": main_path,
        }),
    })
}

#[derive(serde::Deserialize)]
struct AnswerRow {
    id: String,
    answer: String,
}

fn cmd_bench_score(config: &AppConfig, args: &BenchScoreArgs) -> Result<RunSummary> {
    let questions: Vec<BenchmarkQuestion> =
        serde_json::from_str(&std::fs::read_to_string(&args.benchmark)?)?;
    let (answers, _) = crate::store::load_jsonl::<AnswerRow>(&args.answers, LinePolicy::Abort)?;
    let by_id: BTreeMap<&str, &str> = answers
        .iter()
        .map(|a| (a.id.as_str(), a.answer.as_str()))
        .collect();
    let mut per_type: BTreeMap<String, (usize, usize, usize, usize)> = BTreeMap::new();
    for q in &questions {
        let entry = per_type.entry(q.task_type.name().to_string()).or_default();
        entry.0 += 1;
        match by_id.get(q.id.as_str()) {
            Some(answer) => match score_answer(q, answer, &config.pipeline.bin_table) {
                ScoreOutcome::Correct => entry.1 += 1,
                ScoreOutcome::Incorrect => entry.2 += 1,
                ScoreOutcome::Unparseable => entry.3 += 1,
            },
            None => entry.3 += 1,
        }
    }
    let rows: Vec<serde_json::Value> = per_type
        .iter()
        .map(|(task, (n, correct, incorrect, unparseable))| {
            serde_json::json!({
                "task": task,
                "n": n,
                "correct": correct,
                "incorrect": incorrect,
                "unparseable": unparseable,
                "accuracy": *correct as f64 / (*n).max(1) as f64,
            })
        })
        .collect();
    let path = out_path(config, "benchmark/score_report.json");
    let report = serde_json::json!({ "per_type": rows });
    write_atomic(&path, serde_json::to_string_pretty(&report)?.as_bytes())?;
    let mut manifest = RunManifest::start("bench score", &config.config_hash);
    manifest.input(&args.benchmark).input(&args.answers).output(&path);
    manifest.finish(&config.paths.output_dir)?;
    Ok(RunSummary { value: report })
}

fn cmd_rag_run(config: &AppConfig, args: &RagRunArgs) -> Result<RunSummary> {
    let condition = Condition::parse(&args.condition)
        .ok_or_else(|| Error::config(format!("unknown condition '{}'", args.condition)))?;
    let mut questions: Vec<BenchmarkQuestion> =
        serde_json::from_str(&std::fs::read_to_string(&args.benchmark)?)?;
    if let Some(filter) = &args.task_type {
        let task = TaskType::parse(filter)
            .ok_or_else(|| Error::config(format!("unknown task type '{filter}'")))?;
        questions.retain(|q| q.task_type == task);
    }
    let store = store_index(config).ok();
    let schema = SchemaIndex::load(&config.paths.schema_snapshot).ok();
    let coarse = load_gold(config, "hpoa").unwrap_or_default();
    let sources = RagSources {
        store: store.as_ref(),
        schema: schema.as_ref(),
        coarse_gold: &coarse,
        table: &config.pipeline.bin_table,
    };
    let provider = rag_provider(&config.providers.rag_model, config)?;
    let result = run_condition(&questions, provider.as_ref(), condition, &sources, args.k);
    let path = out_path(
        config,
        &format!("rag/{}_{}.json", result.model, condition.name()),
    );
    write_atomic(&path, serde_json::to_string_pretty(&result)?.as_bytes())?;
    let mut manifest = RunManifest::start("rag run", &config.config_hash);
    manifest.input(&args.benchmark).output(&path);
    manifest.finish(&config.paths.output_dir)?;
    Ok(RunSummary {
        value: serde_json::json!({
            "condition": condition.name(),
            "model": result.model,
            "questions": result.rows.len(),
            "accuracy": result.accuracy(),
            "transcript": path,
        }),
    })
}

fn cmd_rag_rescue(config: &AppConfig, args: &RagRescueArgs) -> Result<RunSummary> {
    let seed = args.seed.unwrap_or(config.pipeline.seeds.bootstrap);
    let nr: ConditionResult = serde_json::from_str(&std::fs::read_to_string(&args.nr)?)?;
    let cond: ConditionResult = serde_json::from_str(&std::fs::read_to_string(&args.cond)?)?;
    let report = rescue_rate(&nr, &cond, args.resamples, seed)?;
    let path = out_path(
        config,
        &format!("rag/rescue_{}_{}.json", nr.model, cond.condition.name()),
    );
    write_atomic(&path, serde_json::to_string_pretty(&report)?.as_bytes())?;
    let mut manifest = RunManifest::start("rag rescue", &config.config_hash);
    manifest.seed("bootstrap", seed);
    manifest.input(&args.nr).input(&args.cond).output(&path);
    manifest.finish(&config.paths.output_dir)?;
    Ok(RunSummary {
        value: serde_json::to_value(&report)?,
    })
}

fn cmd_linkpred(config: &AppConfig, args: &LinkpredArgs) -> Result<RunSummary> {
    let seeds = if args.seeds.is_empty() {
        config.pipeline.seeds.link_prediction.clone()
    } else {
        args.seeds.clone()
    };
    let bin_mode = match args.bins.as_str() {
        "fine8" => BinMode::Fine8,
        "coarse5" => BinMode::Coarse5,
        other => return Err(Error::config(format!("unknown bin mode '{other}'"))),
    };
    let triples: Vec<GraphTriple> = match &args.triples {
        Some(path) => {
            let (rows, _) = crate::store::load_jsonl::<GraphTriple>(path, LinePolicy::Abort)?;
            rows
        }
        None => {
            let index = store_index(config)?;
            index
                .records()
                .iter()
                .filter(|t| t.source_type == "disease" && t.target_type == "phenotype")
                .map(|t| GraphTriple {
                    head: t.source_id.clone(),
                    relation: "has_phenotype".into(),
                    tail: t.target_id.clone(),
                    onset: t.onset_range(),
                })
                .collect()
        }
    };
    if triples.is_empty() {
        return Err(Error::domain("no disease-phenotype triples to train on"));
    }
    let params = TransEParams {
        epochs: args.epochs,
        dim: args.dim,
        ..Default::default()
    };
    let report = ablation_run(&triples, bin_mode, &seeds, &params, &config.pipeline.bin_table)?;
    let json_path = out_path(config, "linkpred/ablation.json");
    write_atomic(&json_path, serde_json::to_string_pretty(&report)?.as_bytes())?;
    let mut csv = String::from("condition,seed,mrr_filtered\n");
    for summary in [&report.structural, &report.temporal] {
        for (seed, mrr) in report.seeds.iter().zip(&summary.per_seed_mrr) {
            csv.push_str(&format!("{},{seed},{mrr}\n", summary.condition));
        }
    }
    let csv_path = out_path(config, "linkpred/ablation.csv");
    write_atomic(&csv_path, csv.as_bytes())?;
    let mut manifest = RunManifest::start("linkpred", &config.config_hash);
    for (i, s) in seeds.iter().enumerate() {
        manifest.seed(format!("run_{i}"), *s);
    }
    manifest.output(&json_path).output(&csv_path);
    manifest.finish(&config.paths.output_dir)?;
    Ok(RunSummary {
        value: serde_json::to_value(&report)?,
    })
}

fn cmd_cluster(config: &AppConfig, args: &ClusterArgs) -> Result<RunSummary> {
    let seed = args.seed.unwrap_or(config.pipeline.seeds.default);
    let index = store_index(config)?;
    let mut features = Vec::new();
    for (disease, triples) in triples_by_disease(&index) {
        if let Some(f) = trajectory_features(&disease, &triples) {
            features.push(f);
        }
    }
    if features.is_empty() {
        return Err(Error::domain("store has no onset-bearing diseases to cluster"));
    }
    let report = cluster_trajectories(&features, args.k_min..=args.k_max, seed)?;
    let path = out_path(config, "cluster/trajectories.json");
    write_atomic(
        &path,
        serde_json::to_string_pretty(&serde_json::json!({
            "features": features,
            "report": report,
        }))?
        .as_bytes(),
    )?;
    if args.svg {
        let points: Vec<(f64, f64, usize)> = features
            .iter()
            .zip(&report.assignments)
            .map(|(f, c)| (f.median_onset, f.onset_spread, *c))
            .collect();
        write_atomic(
            &out_path(config, "cluster/trajectories.svg"),
            scatter_svg("Trajectory clusters (onset vs spread)", &points).as_bytes(),
        )?;
    }
    let mut manifest = RunManifest::start("cluster", &config.config_hash);
    manifest.seed("kmeans", seed);
    manifest.output(&path);
    manifest.finish(&config.paths.output_dir)?;
    Ok(RunSummary {
        value: serde_json::json!({
            "diseases": features.len(),
            "chosen_k": report.chosen_k,
            "silhouette_per_k": report.silhouette_per_k,
            "degenerate": report.degenerate,
        }),
    })
}

fn cmd_decay(config: &AppConfig, args: &DecayArgs) -> Result<RunSummary> {
    let index = store_index(config)?;
    let stats = evidence_age_stats(index.records(), args.reference_year);
    let path = out_path(config, "decay/evidence_age.json");
    write_atomic(&path, serde_json::to_string_pretty(&stats)?.as_bytes())?;
    let mut csv = String::from("year,count\n");
    for (year, count) in &stats.histogram {
        csv.push_str(&format!("{year},{count}\n"));
    }
    write_atomic(&out_path(config, "decay/evidence_age.csv"), csv.as_bytes())?;
    if args.svg {
        let bars: Vec<(String, f64)> = stats
            .histogram
            .iter()
            .map(|(y, c)| (y.to_string(), *c as f64))
            .collect();
        write_atomic(
            &out_path(config, "decay/evidence_age.svg"),
            bar_chart_svg("Evidence publication years", &bars).as_bytes(),
        )?;
    }
    let mut manifest = RunManifest::start("decay", &config.config_hash);
    manifest.output(&path);
    manifest.finish(&config.paths.output_dir)?;
    Ok(RunSummary {
        value: serde_json::to_value(&stats)?,
    })
}

fn cmd_pipeline_run(config: &AppConfig, args: &PipelineRunArgs) -> Result<RunSummary> {
    if args.disease.is_empty() {
        return Err(Error::config("pipeline run requires at least one --disease"));
    }
    let ontology = ontology_source(config)?;
    let documents = document_source(config)?;
    let schema = SchemaIndex::load(&config.paths.schema_snapshot)?;
    let providers = Providers::build(config)?;
    let store = KgStore::open(&config.paths.store_root);
    let mut reports = Vec::new();
    for disease in &args.disease {
        let sources = PipelineSources {
            ontology: ontology.as_ref(),
            documents: documents.as_ref(),
            providers: providers.as_set(),
            schema_index: &schema,
        };
        let output = run_disease(disease, &sources, &config.pipeline, &config.paths.cache_dir)?;
        persist_disease_run(&store, &output)?;
        let profile_path = disease_dir(config, disease).join("profile.json");
        write_atomic(&profile_path, serde_json::to_string_pretty(&output.profile)?.as_bytes())?;
        reports.push(output.report);
    }
    let merged = store.merge_validated()?;
    let mut manifest = RunManifest::start("pipeline run", &config.config_hash);
    manifest.output(store.tier_path(StoreTier::Validated));
    for r in &reports {
        manifest.warnings.extend(r.warnings.clone());
    }
    manifest.finish(&config.paths.output_dir)?;
    Ok(RunSummary {
        value: serde_json::json!({
            "diseases": reports,
            "merged_records": merged,
            "validated_file": store.tier_path(StoreTier::Validated),
        }),
    })
}
