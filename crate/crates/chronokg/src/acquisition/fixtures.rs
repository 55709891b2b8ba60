//! File-backed sources for offline runs and tests.
//!
//! Layout: one JSON file per entity. Disease records live at
//! `<dir>/<CURIE with ':' replaced by '_'>.json`; documents live at
//! `<dir>/<pmid>.json`, one [`RawDocument`] each.

use std::path::PathBuf;

use crate::acquisition::{DocumentSource, OntologySource, RawDiseaseRecord, RawDocument};
use crate::error::{Error, Result};

pub struct FixtureOntologySource {
    dir: PathBuf,
}

impl FixtureOntologySource {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        FixtureOntologySource { dir: dir.into() }
    }
}

pub fn sanitize_curie(disease_id: &str) -> String {
    disease_id.replace(':', "_")
}

impl OntologySource for FixtureOntologySource {
    fn lookup(&self, disease_id: &str) -> Result<RawDiseaseRecord> {
        let path = self.dir.join(format!("{}.json", sanitize_curie(disease_id)));
        let text = std::fs::read_to_string(&path)
            .map_err(|_| Error::not_found(format!("disease {disease_id} not in fixture ontology")))?;
        serde_json::from_str(&text)
            .map_err(|e| Error::parse(path, None, format!("bad disease record: {e}")))
    }

    fn version(&self) -> String {
        "fixture-ontology-v1".into()
    }
}

pub struct FixtureDocumentSource {
    dir: PathBuf,
}

impl FixtureDocumentSource {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        FixtureDocumentSource { dir: dir.into() }
    }

    fn load_all(&self) -> Result<Vec<RawDocument>> {
        let mut docs = Vec::new();
        let entries = std::fs::read_dir(&self.dir)?;
        for entry in entries {
            let path = entry?.path();
            if path.extension().is_some_and(|e| e == "json") {
                let text = std::fs::read_to_string(&path)?;
                let doc: RawDocument = serde_json::from_str(&text)
                    .map_err(|e| Error::parse(path.clone(), None, format!("bad document: {e}")))?;
                docs.push(doc);
            }
        }
        docs.sort_by_key(|a| pmid_order(&a.pmid));
        Ok(docs)
    }
}

/// Numeric ordering for PMIDs with a lexicographic fallback.
pub fn pmid_order(pmid: &str) -> (u64, String) {
    (pmid.parse::<u64>().unwrap_or(u64::MAX), pmid.to_string())
}

/// Quoted terms in an E-utilities style query, lowercased.
fn query_terms(query: &str) -> Vec<String> {
    let mut terms = Vec::new();
    let mut rest = query;
    while let Some(start) = rest.find('"') {
        let after = &rest[start + 1..];
        match after.find('"') {
            Some(end) => {
                terms.push(after[..end].to_lowercase());
                rest = &after[end + 1..];
            }
            None => break,
        }
    }
    if terms.is_empty() {
        terms.push(query.to_lowercase());
    }
    terms
}

impl DocumentSource for FixtureDocumentSource {
    /// Matches documents whose title or text contains any quoted query term.
    fn search(&self, query: &str) -> Result<Vec<String>> {
        let terms = query_terms(query);
        let docs = self.load_all()?;
        Ok(docs
            .into_iter()
            .filter(|d| {
                let haystack = format!("{} {}", d.title, d.text).to_lowercase();
                terms.iter().any(|t| haystack.contains(t))
            })
            .map(|d| d.pmid)
            .collect())
    }

    fn fetch(&self, pmids: &[String]) -> Result<Vec<RawDocument>> {
        let mut out = Vec::new();
        for pmid in pmids {
            let path = self.dir.join(format!("{pmid}.json"));
            let text = std::fs::read_to_string(&path)
                .map_err(|_| Error::not_found(format!("document {pmid} not in fixture corpus")))?;
            out.push(
                serde_json::from_str(&text)
                    .map_err(|e| Error::parse(path.clone(), None, format!("bad document: {e}")))?,
            );
        }
        Ok(out)
    }

    fn version(&self) -> String {
        "fixture-docs-v1".into()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::TempDir;

    #[test]
    fn search_matches_quoted_terms() {
        let dir = TempDir::new().unwrap();
        let doc = RawDocument {
            pmid: "123".into(),
            title: "Cardiac involvement in Becker muscular dystrophy".into(),
            text: "Observations.".into(),
            ..Default::default()
        };
        std::fs::write(
            dir.path().join("123.json"),
            serde_json::to_string(&doc).unwrap(),
        )
        .unwrap();
        let src = FixtureDocumentSource::new(dir.path());
        let hits = src.search("\"becker muscular dystrophy\"[tiab]").unwrap();
        assert_eq!(hits, vec!["123"]);
        let misses = src.search("\"wilson disease\"[tiab]").unwrap();
        assert!(misses.is_empty());
    }

    #[test]
    fn unknown_disease_is_not_found() {
        let dir = TempDir::new().unwrap();
        let src = FixtureOntologySource::new(dir.path());
        assert!(matches!(
            src.lookup("MONDO:0000001"),
            Err(Error::NotFound(_))
        ));
    }
}
