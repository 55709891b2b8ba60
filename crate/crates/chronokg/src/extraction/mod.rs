//! Knowledge extractor: fan one document out to several model providers,
//! parse what comes back, and stamp provenance from the source document.

mod parse;
mod prompts;
mod providers;

pub use parse::{parse_extraction_response, ParseDiagnostic, ParseDiagnosticKind};
pub use prompts::{build_primary_prompt, build_temporal_prompt, EMPTY_FIELD, SECOND_PASS_HEADER};
pub use providers::{
    provider_from_spec, prompt_key, HttpChatProvider, MockExtractor, MockSkew, ModelProvider,
    RecordingProvider, ReplayProvider,
};

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::time::Duration;

use crate::acquisition::SourceDocument;
use crate::error::Error;
use crate::model::{DiseaseProfile, PipelineConfig, TemporalContext};

/// Model-reported extraction confidence. Recorded but never trusted for
/// filtering; consensus confidence supersedes it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Confidence {
    High,
    Medium,
    Low,
}

/// One candidate triple exactly as a model produced it, plus provenance
/// stamped by the orchestrator. `pmid` and `publication_year` always come
/// from the source document's metadata, never from model output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawTriple {
    pub subject: String,
    pub subject_type: String,
    pub relation: String,
    pub object: String,
    pub object_type: String,
    pub confidence: Confidence,
    pub evidence_text: String,
    pub temporal: Option<TemporalContext>,
    pub conditions: Option<BTreeMap<String, String>>,
    pub model: String,
    pub pmid: String,
    pub publication_year: Option<i32>,
}

impl RawTriple {
    pub fn is_temporal(&self) -> bool {
        self.temporal.as_ref().is_some_and(TemporalContext::is_temporal)
    }
}

/// Diagnostics from one document extraction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractionDiagnostic {
    pub model: String,
    pub message: String,
}

/// Per-model output for one document.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct DocumentExtraction {
    pub pmid: String,
    pub per_model: BTreeMap<String, Vec<RawTriple>>,
    /// Models that returned any response (even an empty or unparseable
    /// one). A model that failed in transport did not process the document
    /// and is excluded from the consensus denominator.
    pub models_processed: Vec<String>,
    pub tiebreaker_invoked: bool,
    pub second_pass_invoked: bool,
    pub diagnostics: Vec<ExtractionDiagnostic>,
}

impl DocumentExtraction {
    pub fn total_triples(&self) -> usize {
        self.per_model.values().map(Vec::len).sum()
    }

    pub fn temporal_triples(&self) -> usize {
        self.per_model
            .values()
            .flatten()
            .filter(|t| t.is_temporal())
            .count()
    }
}

/// Providers available to the extractor: at least two primaries and an
/// optional conditional tiebreaker.
pub struct ProviderSet<'a> {
    pub primaries: Vec<&'a dyn ModelProvider>,
    pub tiebreaker: Option<&'a dyn ModelProvider>,
}

/// Tiebreaker fires when any primary model returned zero triples.
pub fn should_invoke_tiebreaker(per_model_triple_counts: &[usize]) -> bool {
    per_model_triple_counts.contains(&0)
}

/// Request timeout used for every provider call.
pub const PROVIDER_TIMEOUT: Duration = Duration::from_secs(120);

fn stamp(mut triples: Vec<RawTriple>, model: &str, doc: &SourceDocument) -> Vec<RawTriple> {
    for t in &mut triples {
        t.model = model.to_string();
        t.pmid = doc.pmid.clone();
        t.publication_year = doc.publication_year;
    }
    triples
}

/// Within-model dedup on trimmed (subject, relation, object). When a
/// duplicate arrives carrying temporal context that the kept one lacks
/// (the second pass re-finding a first-pass fact), the temporal variant
/// replaces it.
fn dedup_exact(triples: Vec<RawTriple>) -> Vec<RawTriple> {
    let mut seen: Vec<(String, String, String)> = Vec::new();
    let mut out: Vec<RawTriple> = Vec::new();
    for t in triples {
        let key = (
            t.subject.trim().to_string(),
            t.relation.trim().to_string(),
            t.object.trim().to_string(),
        );
        match seen.iter().position(|k| *k == key) {
            None => {
                seen.push(key);
                out.push(t);
            }
            Some(idx) => {
                if t.is_temporal() && !out[idx].is_temporal() {
                    out[idx] = t;
                }
            }
        }
    }
    out
}

/// Fan a prompt out to several providers with a bounded thread pool; the
/// result vector is ordered like `providers`, so assembly stays
/// deterministic regardless of completion order.
fn fan_out(
    providers: &[&dyn ModelProvider],
    prompt: &str,
) -> Vec<crate::error::Result<String>> {
    const MAX_IN_FLIGHT: usize = 4;
    let mut results: Vec<Option<crate::error::Result<String>>> =
        (0..providers.len()).map(|_| None).collect();
    for chunk_start in (0..providers.len()).step_by(MAX_IN_FLIGHT) {
        let chunk_end = (chunk_start + MAX_IN_FLIGHT).min(providers.len());
        let chunk_results: Vec<_> = std::thread::scope(|scope| {
            let handles: Vec<_> = providers[chunk_start..chunk_end]
                .iter()
                .map(|p| scope.spawn(move || p.complete(prompt, 0.0, PROVIDER_TIMEOUT)))
                .collect();
            handles.into_iter().map(|h| h.join().unwrap()).collect()
        });
        for (offset, r) in chunk_results.into_iter().enumerate() {
            results[chunk_start + offset] = Some(r);
        }
    }
    results.into_iter().map(Option::unwrap).collect()
}

fn ingest_response(
    out: &mut DocumentExtraction,
    model: &str,
    doc: &SourceDocument,
    response: crate::error::Result<String>,
    require_temporal: bool,
) {
    match response {
        Ok(text) => {
            if !out.models_processed.iter().any(|m| m == model) {
                out.models_processed.push(model.to_string());
            }
            let (mut triples, diags) = parse_extraction_response(&text);
            for d in diags {
                out.diagnostics.push(ExtractionDiagnostic {
                    model: model.to_string(),
                    message: format!("{:?}: {}", d.kind, d.detail),
                });
            }
            if require_temporal {
                let before = triples.len();
                triples.retain(RawTriple::is_temporal);
                if triples.len() < before {
                    out.diagnostics.push(ExtractionDiagnostic {
                        model: model.to_string(),
                        message: format!(
                            "second pass dropped {} non-temporal triples",
                            before - triples.len()
                        ),
                    });
                }
            }
            let stamped = stamp(triples, model, doc);
            let entry = out.per_model.entry(model.to_string()).or_default();
            entry.extend(stamped);
            let merged = dedup_exact(std::mem::take(entry));
            *entry = merged;
        }
        Err(Error::Timeout { provider, seconds }) => {
            out.diagnostics.push(ExtractionDiagnostic {
                model: model.to_string(),
                message: format!("timeout after {seconds}s for {provider}"),
            });
            out.per_model.entry(model.to_string()).or_default();
        }
        Err(e) => {
            out.diagnostics.push(ExtractionDiagnostic {
                model: model.to_string(),
                message: format!("provider error: {e}"),
            });
            out.per_model.entry(model.to_string()).or_default();
        }
    }
}

/// Run the full per-document extraction protocol.
///
/// Primary prompt to every primary provider; the tiebreaker is consulted
/// when any primary returned zero triples; the temporal second pass fires
/// when the document yielded fewer temporal triples than the configured
/// floor. The same second-pass prompt text goes to each primary, so it is
/// constructed (and cached under) exactly one key.
pub fn extract_document(
    doc: &SourceDocument,
    profile: &DiseaseProfile,
    providers: &ProviderSet<'_>,
    config: &PipelineConfig,
) -> DocumentExtraction {
    assert!(
        providers.primaries.len() >= 2,
        "extraction requires at least two primary providers"
    );
    let mut primaries: Vec<&dyn ModelProvider> = providers.primaries.clone();
    primaries.sort_by(|a, b| a.name().cmp(b.name()));

    let mut out = DocumentExtraction {
        pmid: doc.pmid.clone(),
        ..Default::default()
    };

    let primary_prompt = build_primary_prompt(profile, doc);
    let responses = fan_out(&primaries, &primary_prompt);
    for (provider, response) in primaries.iter().zip(responses) {
        ingest_response(&mut out, provider.name(), doc, response, false);
    }

    let first_pass_counts: Vec<usize> = primaries
        .iter()
        .map(|p| out.per_model.get(p.name()).map_or(0, Vec::len))
        .collect();
    if should_invoke_tiebreaker(&first_pass_counts) {
        if let Some(tb) = providers.tiebreaker {
            out.tiebreaker_invoked = true;
            let response = tb.complete(&primary_prompt, 0.0, PROVIDER_TIMEOUT);
            ingest_response(&mut out, tb.name(), doc, response, false);
        }
    }

    if out.temporal_triples() < config.second_pass_floor {
        out.second_pass_invoked = true;
        let temporal_prompt = build_temporal_prompt(doc);
        let responses = fan_out(&primaries, &temporal_prompt);
        for (provider, response) in primaries.iter().zip(responses) {
            ingest_response(&mut out, provider.name(), doc, response, true);
        }
    }

    out
}
