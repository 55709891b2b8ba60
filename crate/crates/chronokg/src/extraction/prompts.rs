//! Prompt templates for the knowledge extractor. Substitution is plain
//! token replacement so output is byte-deterministic.

use crate::acquisition::SourceDocument;
use crate::model::DiseaseProfile;

/// Marker substituted for absent profile fields.
pub const EMPTY_FIELD: &str = "(none)";

/// Header line of the second-pass prompt; used to recognize it in tests.
pub const SECOND_PASS_HEADER: &str = "SECOND PASS — TEMPORAL ONLY";

const PRIMARY_TEMPLATE: &str = r#"You are a temporal biomedical knowledge extraction system. Your PRIMARY
task is to extract relationships WITH TEMPORAL GROUNDING from the text
about {disease_name}.

CRITICAL: Every relationship you extract MUST include temporal information
when available.

Extraction priorities (highest to lowest):
1. TEMPORAL FACTS: onset ages, disease milestones, progression timelines,
   treatment timing, discovery dates
2. EVIDENCE-DATED FACTS: relationships anchored by publication year
3. CONDITIONAL FACTS: relationships that depend on age, stage, genetic
   subtype
4. STATIC FACTS: general relationships without temporal context

Output format (JSON):
{
  "triples": [
    {
      "subject": "entity name",
      "subject_type": "disease|gene/protein|drug|phenotype|anatomy|...",
      "relation": "disease_protein|indication|disease_phenotype_positive|...",
      "object": "entity name",
      "object_type": "same vocabulary as subject_type",
      "confidence": "high|medium|low",
      "evidence_text": "exact quote from source (max 200 chars)",
      "temporal_context": {
        "onset_age_min": 3.0,
        "onset_age_max": 12.0,
        "progression_stage": "ambulatory",
        "milestone": "loss of ambulation",
        "discovery_year": 2015,
        "temporal_qualifier": "by age 12"
      },
      "conditions": {
        "age_group": "pediatric",
        "genetic_subtype": "exon deletion"
      }
    }
  ]
}

Disease context:
- Name: {disease_name}
- Category: {disease_category}
- Inheritance: {inheritance_pattern}
- Known genes: {known_genes}
- Key phenotypes: {known_phenotypes}
- Differential diagnoses: {differential_diseases}

Source text:
{text}

Extract ALL temporally-grounded relationships. Return valid JSON only.
"#;

const TEMPORAL_TEMPLATE: &str = r#"SECOND PASS — TEMPORAL ONLY: Find temporal information that was missed.
Extract ONLY relationships with temporal grounding: ages, stages, durations,
progression, milestones. Skip any fact without temporal content.

Output format (JSON): same as primary extraction, but 'temporal_context'
field is REQUIRED (non-null).

Source text:
{text}
"#;

fn list_or_marker(items: &[String]) -> String {
    if items.is_empty() {
        EMPTY_FIELD.to_string()
    } else {
        items.join(", ")
    }
}

fn opt_or_marker(item: &Option<String>) -> String {
    item.clone().unwrap_or_else(|| EMPTY_FIELD.to_string())
}

/// First-pass extraction prompt for one (profile, document) pair.
pub fn build_primary_prompt(profile: &DiseaseProfile, doc: &SourceDocument) -> String {
    PRIMARY_TEMPLATE
        .replace("{disease_name}", &profile.name)
        .replace("{disease_category}", &opt_or_marker(&profile.category))
        .replace("{inheritance_pattern}", &opt_or_marker(&profile.inheritance_pattern))
        .replace("{known_genes}", &list_or_marker(&profile.known_genes))
        .replace("{known_phenotypes}", &list_or_marker(&profile.known_phenotypes))
        .replace(
            "{differential_diseases}",
            &list_or_marker(&profile.differential_diseases),
        )
        .replace("{text}", &doc.text)
}

/// Second-pass temporal-only prompt for one document.
pub fn build_temporal_prompt(doc: &SourceDocument) -> String {
    TEMPORAL_TEMPLATE.replace("{text}", &doc.text)
}
