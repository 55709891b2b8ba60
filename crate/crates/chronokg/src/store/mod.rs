//! Tiered JSONL persistence and the temporal query API.
//!
//! Three append-only tiers mirror the release layout: raw extractions,
//! consensus survivors, validated records. Raw and consensus tiers may be
//! gzip-compressed (each append writes a fresh gzip member, which decoders
//! read back as one stream). The flat per-tier file is authoritative;
//! per-disease subtrees exist for replay convenience.

mod query;

pub use query::{
    aggregate_onset, median, OnsetAggregate, OnsetAnswer, PhenotypeOnset, ProfileEntry,
    StoreIndex, TemporalProfile,
};

use flate2::read::MultiGzDecoder;
use flate2::write::GzEncoder;
use flate2::Compression;
use serde::de::DeserializeOwned;
use serde::Serialize;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::model::TemporalTriple;

/// Store tier; governs file name and compression default.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StoreTier {
    Raw,
    Consensus,
    Validated,
}

impl StoreTier {
    pub fn file_name(self, compressed: bool) -> &'static str {
        match (self, compressed) {
            (StoreTier::Raw, true) => "raw_triples.jsonl.gz",
            (StoreTier::Raw, false) => "raw_triples.jsonl",
            (StoreTier::Consensus, true) => "consensus_triples.jsonl.gz",
            (StoreTier::Consensus, false) => "consensus_triples.jsonl",
            // The validated tier is always plain text.
            (StoreTier::Validated, _) => "validated_triples.jsonl",
        }
    }
}

/// Descriptor of one on-disk tier file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TierFile {
    pub tier: StoreTier,
    pub path: PathBuf,
    pub records: usize,
    pub compressed: bool,
}

/// What to do with a malformed line on load.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinePolicy {
    /// Skip the line, reporting it in the result.
    Skip,
    /// Abort the load with a parse error carrying the line number.
    Abort,
}

/// Append records to a JSONL file, one JSON document per line. Paths ending
/// in `.gz` are written as a new gzip member.
pub fn append_jsonl<T: Serialize>(path: &Path, records: &[T]) -> Result<()> {
    if records.is_empty() {
        return Ok(());
    }
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let mut buf = Vec::new();
    for record in records {
        serde_json::to_writer(&mut buf, record)?;
        buf.push(b'\n');
    }
    let file = std::fs::OpenOptions::new().create(true).append(true).open(path)?;
    if path.extension().is_some_and(|e| e == "gz") {
        let mut enc = GzEncoder::new(file, Compression::default());
        enc.write_all(&buf)?;
        enc.finish()?;
    } else {
        let mut file = file;
        file.write_all(&buf)?;
    }
    Ok(())
}

/// (1-based line number, parse error) for each skipped line.
pub type SkippedLines = Vec<(usize, String)>;

/// Load a JSONL file. Returns the parsed records plus (line, error) pairs
/// for lines skipped under [`LinePolicy::Skip`].
pub fn load_jsonl<T: DeserializeOwned>(
    path: &Path,
    policy: LinePolicy,
) -> Result<(Vec<T>, SkippedLines)> {
    if !path.exists() {
        return Ok((Vec::new(), Vec::new()));
    }
    let file = std::fs::File::open(path)?;
    let reader: Box<dyn Read> = if path.extension().is_some_and(|e| e == "gz") {
        Box::new(MultiGzDecoder::new(file))
    } else {
        Box::new(file)
    };
    let mut records = Vec::new();
    let mut skipped = Vec::new();
    for (idx, line) in BufReader::new(reader).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<T>(&line) {
            Ok(r) => records.push(r),
            Err(e) => match policy {
                LinePolicy::Skip => skipped.push((idx + 1, e.to_string())),
                LinePolicy::Abort => {
                    return Err(Error::parse(path, Some(idx + 1), e.to_string()))
                }
            },
        }
    }
    Ok((records, skipped))
}

/// On-disk store rooted at one directory.
pub struct KgStore {
    root: PathBuf,
    compress_bulk_tiers: bool,
}

impl KgStore {
    pub fn open(root: impl Into<PathBuf>) -> Self {
        KgStore {
            root: root.into(),
            compress_bulk_tiers: false,
        }
    }

    /// Gzip the raw and consensus tiers (validated stays plain).
    pub fn with_compression(mut self, on: bool) -> Self {
        self.compress_bulk_tiers = on;
        self
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn compressed(&self, tier: StoreTier) -> bool {
        self.compress_bulk_tiers && tier != StoreTier::Validated
    }

    /// Flat (authoritative) file for a tier.
    pub fn tier_path(&self, tier: StoreTier) -> PathBuf {
        self.root.join(tier.file_name(self.compressed(tier)))
    }

    /// Per-disease subtree file for a tier.
    pub fn disease_tier_path(&self, disease_id: &str, tier: StoreTier) -> PathBuf {
        self.root
            .join("diseases")
            .join(disease_id.replace(':', "_"))
            .join(tier.file_name(self.compressed(tier)))
    }

    pub fn append_records<T: Serialize>(&self, records: &[T], tier: StoreTier) -> Result<()> {
        append_jsonl(&self.tier_path(tier), records)
    }

    pub fn append_disease_records<T: Serialize>(
        &self,
        disease_id: &str,
        records: &[T],
        tier: StoreTier,
    ) -> Result<()> {
        append_jsonl(&self.disease_tier_path(disease_id, tier), records)
    }

    /// Load every validated record from the flat file.
    pub fn load_validated(
        &self,
        policy: LinePolicy,
    ) -> Result<(Vec<TemporalTriple>, SkippedLines)> {
        load_jsonl(&self.tier_path(StoreTier::Validated), policy)
    }

    /// Merge all per-disease validated files into the flat file,
    /// replacing it. Diseases are visited in sorted order.
    pub fn merge_validated(&self) -> Result<usize> {
        let diseases_dir = self.root.join("diseases");
        let mut all: Vec<TemporalTriple> = Vec::new();
        if diseases_dir.exists() {
            let mut entries: Vec<PathBuf> = std::fs::read_dir(&diseases_dir)?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .collect();
            entries.sort();
            for dir in entries {
                let path = dir.join(StoreTier::Validated.file_name(false));
                if path.exists() {
                    let (records, _) = load_jsonl::<TemporalTriple>(&path, LinePolicy::Abort)?;
                    all.extend(records);
                }
            }
        }
        let flat = self.tier_path(StoreTier::Validated);
        if flat.exists() {
            std::fs::remove_file(&flat)?;
        }
        append_jsonl(&flat, &all)?;
        Ok(all.len())
    }

    /// Describe a tier's flat file: path, record count, compression.
    pub fn tier_file(&self, tier: StoreTier) -> Result<TierFile> {
        let path = self.tier_path(tier);
        let records = if path.exists() {
            let file = std::fs::File::open(&path)?;
            let reader: Box<dyn Read> = if self.compressed(tier) {
                Box::new(MultiGzDecoder::new(file))
            } else {
                Box::new(file)
            };
            BufReader::new(reader)
                .lines()
                .filter(|l| l.as_ref().map(|s| !s.trim().is_empty()).unwrap_or(false))
                .count()
        } else {
            0
        };
        Ok(TierFile {
            tier,
            path,
            records,
            compressed: self.compressed(tier),
        })
    }

    /// Build the in-memory query index from the flat validated file.
    pub fn index(&self) -> Result<StoreIndex> {
        let (records, _) = self.load_validated(LinePolicy::Skip)?;
        Ok(StoreIndex::build(records))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{EvidenceBlock, Grade, StudyType, TemporalContext};
    use tempfile::TempDir;

    pub(crate) fn record(edge: &str, disease: &str, phenotype: &str, onset: Option<(f64, f64)>) -> TemporalTriple {
        TemporalTriple {
            edge_id: edge.into(),
            source_id: disease.to_lowercase(),
            source_type: "disease".into(),
            source_name: disease.into(),
            relation: "disease_phenotype_positive".into(),
            target_id: phenotype.to_lowercase(),
            target_type: "phenotype".into(),
            target_name: phenotype.into(),
            temporal: TemporalContext {
                onset_age_min: onset.map(|o| o.0),
                onset_age_max: onset.map(|o| o.1),
                ..Default::default()
            },
            evidence: EvidenceBlock {
                tier: 2,
                source_ids: vec![format!("PMID:{}", edge.len())],
                evidence_text: "q".into(),
                study_type: StudyType::Review,
                credibility_score: 0.275,
                consensus_confidence: 1.0,
                extraction_models: vec!["alpha".into()],
                extraction_method: "tier2_llm_consensus".into(),
                citation_count: None,
                is_retracted: false,
                publication_year: Some(2015),
            },
            conditions: None,
            extraction_date: "2026-04-03".into(),
            pipeline_version: "1.0.0".into(),
            disease_profile_id: "MONDO:0000001".into(),
            quality_grade: Grade::B,
        }
    }

    #[test]
    fn round_trip_lossless() {
        let dir = TempDir::new().unwrap();
        let path = dir.path().join("validated_triples.jsonl");
        let records = vec![
            record("e1", "DMD", "cardiomyopathy", Some((10.0, 18.0))),
            record("e2", "DMD", "scoliosis", None),
        ];
        append_jsonl(&path, &records).unwrap();
        let (loaded, skipped) = load_jsonl::<TemporalTriple>(&path, LinePolicy::Abort).unwrap();
        assert!(skipped.is_empty());
        assert_eq!(loaded, records);
    }

    #[test]
    fn empty_file_is_empty_list() {
        let dir = TempDir::new().unwrap();
        let path = dir.path().join("none.jsonl");
        let (loaded, _) = load_jsonl::<TemporalTriple>(&path, LinePolicy::Abort).unwrap();
        assert!(loaded.is_empty());
    }

    #[test]
    fn malformed_line_skips_or_aborts() {
        let dir = TempDir::new().unwrap();
        let path = dir.path().join("bad.jsonl");
        let good = serde_json::to_string(&record("e1", "DMD", "cardiomyopathy", None)).unwrap();
        std::fs::write(&path, format!("{good}\nnot json\n{good}\n")).unwrap();
        let (loaded, skipped) = load_jsonl::<TemporalTriple>(&path, LinePolicy::Skip).unwrap();
        assert_eq!(loaded.len(), 2);
        assert_eq!(skipped.len(), 1);
        assert_eq!(skipped[0].0, 2);
        match load_jsonl::<TemporalTriple>(&path, LinePolicy::Abort) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, Some(2)),
            other => panic!("expected abort, got {other:?}"),
        }
    }

    #[test]
    fn thousand_record_write_is_byte_stable() {
        let dir = TempDir::new().unwrap();
        let records: Vec<TemporalTriple> = (0..1000)
            .map(|i| record(&format!("e{i:04}"), "DMD", &format!("pheno {i}"), Some((i as f64 % 60.0, i as f64 % 60.0 + 5.0))))
            .collect();
        let p1 = dir.path().join("a.jsonl");
        let p2 = dir.path().join("b.jsonl");
        append_jsonl(&p1, &records).unwrap();
        let (loaded, _) = load_jsonl::<TemporalTriple>(&p1, LinePolicy::Abort).unwrap();
        append_jsonl(&p2, &loaded).unwrap();
        assert_eq!(std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());
    }

    #[test]
    fn gzip_tier_round_trips_across_appends() {
        let dir = TempDir::new().unwrap();
        let path = dir.path().join("raw_triples.jsonl.gz");
        let a = vec![record("e1", "DMD", "cardiomyopathy", None)];
        let b = vec![record("e2", "DMD", "scoliosis", None)];
        append_jsonl(&path, &a).unwrap();
        append_jsonl(&path, &b).unwrap();
        let (loaded, _) = load_jsonl::<TemporalTriple>(&path, LinePolicy::Abort).unwrap();
        assert_eq!(loaded.len(), 2);
    }

    #[test]
    fn tier_file_counts_records() {
        let dir = TempDir::new().unwrap();
        let store = KgStore::open(dir.path());
        store
            .append_records(&[record("e1", "A", "p1", None), record("e2", "A", "p2", None)], StoreTier::Validated)
            .unwrap();
        let tf = store.tier_file(StoreTier::Validated).unwrap();
        assert_eq!(tf.records, 2);
        assert!(!tf.compressed);
        assert_eq!(store.tier_file(StoreTier::Raw).unwrap().records, 0);
    }

    #[test]
    fn merge_collects_per_disease_files() {
        let dir = TempDir::new().unwrap();
        let store = KgStore::open(dir.path());
        store
            .append_disease_records("MONDO:1", &[record("e1", "A", "p1", None)], StoreTier::Validated)
            .unwrap();
        store
            .append_disease_records("MONDO:2", &[record("e2", "B", "p2", None)], StoreTier::Validated)
            .unwrap();
        let n = store.merge_validated().unwrap();
        assert_eq!(n, 2);
        let (flat, _) = store.load_validated(LinePolicy::Abort).unwrap();
        assert_eq!(flat.len(), 2);
    }
}
