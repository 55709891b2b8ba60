//! Application config file: pipeline tunables plus paths and provider
//! specs. Relative paths resolve against the config file's directory.

use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::model::PipelineConfig;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct PathsConfig {
    pub store_root: PathBuf,
    pub cache_dir: PathBuf,
    pub output_dir: PathBuf,
    pub ontology_dir: PathBuf,
    pub docs_dir: PathBuf,
    pub schema_snapshot: PathBuf,
    pub orphadata: PathBuf,
    pub hpoa: PathBuf,
    pub genereviews: PathBuf,
    pub phenopackets: PathBuf,
}

impl Default for PathsConfig {
    fn default() -> Self {
        PathsConfig {
            store_root: "store".into(),
            cache_dir: "cache".into(),
            output_dir: "out".into(),
            ontology_dir: "fixtures/ontology".into(),
            docs_dir: "fixtures/docs".into(),
            schema_snapshot: "fixtures/schema/reference_edges.tsv".into(),
            orphadata: "fixtures/gold/orphadata.csv".into(),
            hpoa: "fixtures/gold/hpoa.tsv".into(),
            genereviews: "fixtures/gold/genereviews.csv".into(),
            phenopackets: "fixtures/gold/phenopacket_cases.json".into(),
        }
    }
}

/// Extraction/judging/answering provider wiring. API keys come from the
/// environment variables named inside `live:` specs, never from this file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct ProvidersConfig {
    /// Primary extractor specs (`mock:<skew>:<name>`, `replay:<name>`,
    /// `live:<name>:<model>:<base_url>:<key_env>`).
    pub primaries: Vec<String>,
    pub tiebreaker: Option<String>,
    /// Replay cache directory for `replay:` specs.
    pub replay_dir: PathBuf,
    /// Record every live/mock response into `replay_dir`.
    pub record: bool,
    /// Judge panel specs (`mockjudge:<name>` or provider specs).
    pub judges: Vec<String>,
    /// Answering model for retrieval runs (`mockrag:<name>` or spec).
    pub rag_model: String,
}

impl Default for ProvidersConfig {
    fn default() -> Self {
        ProvidersConfig {
            primaries: vec!["mock:verbatim:alpha".into(), "mock:paraphrase:beta".into()],
            tiebreaker: Some("mock:verbatim:gamma".into()),
            replay_dir: "replay".into(),
            record: false,
            judges: vec![
                "mockjudge:judge-a".into(),
                "mockjudge:judge-b".into(),
                "mockjudge:judge-c".into(),
            ],
            rag_model: "mockrag:reader".into(),
        }
    }
}

/// Which backend serves ontology metadata and documents.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SourcesConfig {
    /// "fixture" (local JSON files) or "ols" (live EBI OLS + E-utilities
    /// article counts).
    pub ontology: String,
    /// "fixture" (local JSON files) or "eutils" (live PubMed).
    pub documents: String,
}

impl Default for SourcesConfig {
    fn default() -> Self {
        SourcesConfig {
            ontology: "fixture".into(),
            documents: "fixture".into(),
        }
    }
}

/// Top-level config file.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct AppConfig {
    pub pipeline: PipelineConfig,
    pub paths: PathsConfig,
    pub providers: ProvidersConfig,
    pub sources: SourcesConfig,
    /// Disease universe size for coverage percentages.
    pub coverage_universe: usize,
    #[serde(skip)]
    pub config_path: PathBuf,
    #[serde(skip)]
    pub config_hash: String,
}

impl AppConfig {
    pub fn load(path: &Path) -> Result<AppConfig> {
        let bytes = std::fs::read(path)
            .map_err(|_| Error::config(format!("config-not-found: {}", path.display())))?;
        let text = String::from_utf8(bytes.clone())
            .map_err(|_| Error::config("config file is not UTF-8"))?;
        let mut config: AppConfig =
            toml::from_str(&text).map_err(|e| Error::config(format!("config-invalid: {e}")))?;
        config.pipeline.validate()?;
        config.config_path = path.to_path_buf();
        config.config_hash = crate::extraction::prompt_key(&text);
        // Resolve paths relative to the config file.
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [
            &mut config.paths.store_root,
            &mut config.paths.cache_dir,
            &mut config.paths.output_dir,
            &mut config.paths.ontology_dir,
            &mut config.paths.docs_dir,
            &mut config.paths.schema_snapshot,
            &mut config.paths.orphadata,
            &mut config.paths.hpoa,
            &mut config.paths.genereviews,
            &mut config.paths.phenopackets,
            &mut config.providers.replay_dir,
        ] {
            if p.is_relative() {
                *p = base.join(&p);
            }
        }
        if config.coverage_universe == 0 {
            config.coverage_universe = 17_080;
        }
        Ok(config)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn minimal_config_loads_with_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("config.toml");
        let mut f = std::fs::File::create(&path).unwrap();
        writeln!(f, "[pipeline]\nconsensus_threshold = 2\n").unwrap();
        let cfg = AppConfig::load(&path).unwrap();
        assert_eq!(cfg.pipeline.fuzzy_threshold, 80);
        assert!(cfg.paths.store_root.starts_with(dir.path()));
        assert!(!cfg.config_hash.is_empty());
    }

    #[test]
    fn missing_config_is_config_error() {
        match AppConfig::load(Path::new("/nonexistent/config.toml")) {
            Err(Error::Config(msg)) => assert!(msg.starts_with("config-not-found")),
            other => panic!("expected config error, got {other:?}"),
        }
    }
}
