//! Live ontology lookup over the EBI Ontology Lookup Service REST API,
//! with the PubMed article count filled in through E-utilities.
//!
//! OLS serves labels and synonyms for MONDO/OMIM/HPO terms; gene,
//! phenotype, and differential lists are not derivable from a single term
//! record and stay empty here — the fixture source carries them for
//! offline runs.

use crate::acquisition::{EutilsClient, OntologySource, RawDiseaseRecord};
use crate::error::{Error, Result};

const DEFAULT_BASE: &str = "https://www.ebi.ac.uk/ols4";

pub struct OlsOntologySource {
    base_url: String,
    eutils: Option<EutilsClient>,
}

impl OlsOntologySource {
    pub fn new() -> Self {
        OlsOntologySource {
            base_url: DEFAULT_BASE.into(),
            eutils: Some(EutilsClient::new()),
        }
    }

    pub fn with_base_url(base_url: impl Into<String>) -> Self {
        OlsOntologySource {
            base_url: base_url.into(),
            eutils: None,
        }
    }

    /// Also resolve PubMed article counts through this client.
    pub fn with_eutils(mut self, client: EutilsClient) -> Self {
        self.eutils = Some(client);
        self
    }

    fn fetch_term(&self, disease_id: &str) -> Result<String> {
        let ontology = disease_id
            .split(':')
            .next()
            .unwrap_or_default()
            .to_lowercase();
        let url = format!(
            "{}/api/ontologies/{ontology}/terms",
            self.base_url.trim_end_matches('/')
        );
        let mut response = ureq::get(&url)
            .query("obo_id", disease_id)
            .call()
            .map_err(|e| Error::transport(format!("ols lookup: {e}"), true))?;
        response
            .body_mut()
            .read_to_string()
            .map_err(|e| Error::transport(format!("ols read: {e}"), true))
    }
}

impl Default for OlsOntologySource {
    fn default() -> Self {
        Self::new()
    }
}

/// Parse an OLS term response into a disease record (count left at 0).
pub fn parse_ols_term(body: &str, disease_id: &str) -> Result<RawDiseaseRecord> {
    let value: serde_json::Value =
        serde_json::from_str(body).map_err(|e| Error::transport(format!("ols JSON: {e}"), false))?;
    let term = value["_embedded"]["terms"]
        .as_array()
        .and_then(|terms| terms.first())
        .ok_or_else(|| Error::not_found(format!("ontology term {disease_id} not in OLS")))?;
    let name = term["label"]
        .as_str()
        .ok_or_else(|| Error::transport("ols term lacks a label", false))?
        .to_string();
    let synonyms = term["synonyms"]
        .as_array()
        .map(|arr| {
            arr.iter()
                .filter_map(|s| s.as_str().map(str::to_string))
                .collect()
        })
        .unwrap_or_default();
    Ok(RawDiseaseRecord {
        name,
        synonyms,
        ..Default::default()
    })
}

impl OntologySource for OlsOntologySource {
    fn lookup(&self, disease_id: &str) -> Result<RawDiseaseRecord> {
        let body = self.fetch_term(disease_id)?;
        let mut record = parse_ols_term(&body, disease_id)?;
        if let Some(eutils) = &self.eutils {
            let query = format!("\"{}\"[tiab]", record.name);
            record.pubmed_count = eutils.count(&query)?;
        }
        Ok(record)
    }

    fn version(&self) -> String {
        "ols4".into()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"{"_embedded": {"terms": [{
        "iri": "http://purl.obolibrary.org/obo/MONDO_0010679",
        "label": "Duchenne muscular dystrophy",
        "synonyms": ["DMD", "muscular dystrophy, Duchenne type"],
        "obo_id": "MONDO:0010679"
    }]}}"#;

    #[test]
    fn parses_label_and_synonyms() {
        let record = parse_ols_term(SAMPLE, "MONDO:0010679").unwrap();
        assert_eq!(record.name, "Duchenne muscular dystrophy");
        assert_eq!(record.synonyms.len(), 2);
        assert_eq!(record.pubmed_count, 0);
    }

    #[test]
    fn missing_term_is_not_found() {
        let empty = r#"{"_embedded": {"terms": []}}"#;
        assert!(matches!(
            parse_ols_term(empty, "MONDO:1"),
            Err(Error::NotFound(_))
        ));
    }
}
