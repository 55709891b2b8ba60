//! Tolerant parsing of model extraction output.
//!
//! Models are asked for strict JSON but do not always comply. Parsing tries
//! the raw text first, then a bounded repair ladder: strip markdown fences,
//! trim to the outermost braces, drop trailing commas. Anything still
//! unparseable degrades to an empty result plus a diagnostic; this function
//! never fails on arbitrary input.

use serde_json::Value;

use crate::extraction::{Confidence, RawTriple};
use crate::model::{TemporalContext, EVIDENCE_TEXT_CAP};

/// One parsing note: what was repaired, dropped, or rejected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseDiagnostic {
    pub kind: ParseDiagnosticKind,
    pub detail: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseDiagnosticKind {
    RepairApplied,
    TripleDropped,
    ParseFailure,
}

fn diag(kind: ParseDiagnosticKind, detail: impl Into<String>) -> ParseDiagnostic {
    ParseDiagnostic {
        kind,
        detail: detail.into(),
    }
}

fn strip_fences(text: &str) -> Option<String> {
    let start = text.find("```")?;
    let after = &text[start + 3..];
    // Skip an optional language tag on the fence line.
    let body_start = after.find('\n')? + 1;
    let body = &after[body_start..];
    let end = body.find("```")?;
    Some(body[..end].to_string())
}

fn trim_to_braces(text: &str) -> Option<String> {
    let start = text.find('{')?;
    let end = text.rfind('}')?;
    (end > start).then(|| text[start..=end].to_string())
}

fn drop_trailing_commas(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        if chars[i] == ',' {
            let mut j = i + 1;
            while j < chars.len() && chars[j].is_whitespace() {
                j += 1;
            }
            if j < chars.len() && (chars[j] == '}' || chars[j] == ']') {
                i += 1;
                continue;
            }
        }
        out.push(chars[i]);
        i += 1;
    }
    out
}

fn try_parse(text: &str) -> Option<Value> {
    serde_json::from_str::<Value>(text).ok()
}

fn as_opt_f64(v: Option<&Value>) -> Option<f64> {
    match v? {
        Value::Number(n) => n.as_f64(),
        Value::String(s) => s.trim().parse::<f64>().ok(),
        _ => None,
    }
}

fn as_opt_string(v: Option<&Value>) -> Option<String> {
    match v? {
        Value::String(s) if !s.trim().is_empty() => Some(s.trim().to_string()),
        _ => None,
    }
}

fn required_str(obj: &Value, key: &str) -> Option<String> {
    match obj.get(key) {
        Some(Value::String(s)) if !s.trim().is_empty() => Some(s.trim().to_string()),
        _ => None,
    }
}

fn parse_temporal(v: Option<&Value>) -> Option<TemporalContext> {
    let obj = match v {
        Some(Value::Object(_)) => v.unwrap(),
        _ => return None,
    };
    let mut ctx = TemporalContext {
        onset_age_min: as_opt_f64(obj.get("onset_age_min")),
        onset_age_max: as_opt_f64(obj.get("onset_age_max")),
        progression_stage: as_opt_string(obj.get("progression_stage")),
        milestone: as_opt_string(obj.get("milestone")),
        temporal_qualifier: as_opt_string(obj.get("temporal_qualifier")),
        duration: as_opt_f64(obj.get("duration")),
        treatment_start_age: as_opt_f64(obj.get("treatment_start_age")),
        ..Default::default()
    };
    // The prompt asks for discovery_year; the schema carries discovery_date.
    if let Some(year) = as_opt_f64(obj.get("discovery_year")) {
        ctx.discovery_date = Some(format!("{}", year as i64));
    }
    Some(ctx)
}

fn truncate_chars(s: &str, cap: usize) -> String {
    if s.chars().count() <= cap {
        s.to_string()
    } else {
        s.chars().take(cap).collect()
    }
}

fn triple_from_value(item: &Value) -> Result<RawTriple, String> {
    let subject = required_str(item, "subject").ok_or("missing subject")?;
    let relation = required_str(item, "relation").ok_or("missing relation")?;
    let object = required_str(item, "object").ok_or("missing object")?;
    let confidence = match item.get("confidence").and_then(Value::as_str) {
        Some(s) if s.eq_ignore_ascii_case("high") => Confidence::High,
        Some(s) if s.eq_ignore_ascii_case("medium") => Confidence::Medium,
        _ => Confidence::Low,
    };
    let conditions = item.get("conditions").and_then(Value::as_object).map(|m| {
        m.iter()
            .filter_map(|(k, v)| v.as_str().map(|s| (k.clone(), s.to_string())))
            .collect()
    });
    Ok(RawTriple {
        subject,
        subject_type: required_str(item, "subject_type").unwrap_or_default(),
        relation,
        object,
        object_type: required_str(item, "object_type").unwrap_or_default(),
        confidence,
        evidence_text: truncate_chars(
            &required_str(item, "evidence_text").unwrap_or_default(),
            EVIDENCE_TEXT_CAP,
        ),
        temporal: parse_temporal(item.get("temporal_context")),
        conditions,
        model: String::new(),
        pmid: String::new(),
        publication_year: None,
    })
}

/// Parse one model response into raw triples.
///
/// Provenance fields (`model`, `pmid`, `publication_year`) are left empty;
/// the orchestrator stamps them from the source document, never from model
/// output.
pub fn parse_extraction_response(text: &str) -> (Vec<RawTriple>, Vec<ParseDiagnostic>) {
    let mut diagnostics = Vec::new();
    let mut parsed = try_parse(text);

    if parsed.is_none() {
        if let Some(unfenced) = strip_fences(text) {
            if let Some(v) = try_parse(&unfenced) {
                diagnostics.push(diag(ParseDiagnosticKind::RepairApplied, "stripped markdown fences"));
                parsed = Some(v);
            } else if let Some(braced) = trim_to_braces(&unfenced) {
                let repaired = drop_trailing_commas(&braced);
                if let Some(v) = try_parse(&repaired) {
                    diagnostics.push(diag(
                        ParseDiagnosticKind::RepairApplied,
                        "stripped fences, trimmed braces, dropped trailing commas",
                    ));
                    parsed = Some(v);
                }
            }
        }
    }
    if parsed.is_none() {
        if let Some(braced) = trim_to_braces(text) {
            let candidate = drop_trailing_commas(&braced);
            if let Some(v) = try_parse(&candidate) {
                diagnostics.push(diag(
                    ParseDiagnosticKind::RepairApplied,
                    "trimmed to outermost braces, dropped trailing commas",
                ));
                parsed = Some(v);
            }
        }
    }

    let value = match parsed {
        Some(v) => v,
        None => {
            diagnostics.push(diag(
                ParseDiagnosticKind::ParseFailure,
                "no parseable JSON object in response",
            ));
            return (Vec::new(), diagnostics);
        }
    };

    let items: Vec<Value> = match value.get("triples") {
        Some(Value::Array(arr)) => arr.clone(),
        // A bare array is close enough to the requested shape.
        None if value.is_array() => value.as_array().unwrap().clone(),
        _ => {
            diagnostics.push(diag(
                ParseDiagnosticKind::ParseFailure,
                "JSON object lacks a 'triples' array",
            ));
            return (Vec::new(), diagnostics);
        }
    };

    let mut triples = Vec::new();
    for (idx, item) in items.iter().enumerate() {
        match triple_from_value(item) {
            Ok(t) => triples.push(t),
            Err(reason) => diagnostics.push(diag(
                ParseDiagnosticKind::TripleDropped,
                format!("triple {idx}: {reason}"),
            )),
        }
    }
    (triples, diagnostics)
}
