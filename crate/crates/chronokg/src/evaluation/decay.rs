//! Evidence-age statistics over the publication years of validated
//! records.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::model::TemporalTriple;

/// Evidence-age distribution relative to a reference year. Fractions are
/// over year-bearing triples only; `coverage` reports what share of the
/// input carried a year at all.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EvidenceAgeStats {
    pub reference_year: i32,
    pub dated_triples: usize,
    pub total_triples: usize,
    pub coverage: f64,
    pub median_year: Option<f64>,
    pub fraction_within_5y: Option<f64>,
    pub fraction_over_20y: Option<f64>,
    pub histogram: BTreeMap<i32, usize>,
}

pub fn evidence_age_stats(triples: &[TemporalTriple], reference_year: i32) -> EvidenceAgeStats {
    let years: Vec<i32> = triples
        .iter()
        .filter_map(|t| t.evidence.publication_year)
        .collect();
    let total = triples.len();
    if years.is_empty() {
        return EvidenceAgeStats {
            reference_year,
            total_triples: total,
            ..Default::default()
        };
    }
    let mut histogram: BTreeMap<i32, usize> = BTreeMap::new();
    for y in &years {
        *histogram.entry(*y).or_default() += 1;
    }
    let floats: Vec<f64> = years.iter().map(|y| *y as f64).collect();
    let n = years.len() as f64;
    let within_5 = years.iter().filter(|y| reference_year - **y <= 5).count() as f64;
    let over_20 = years.iter().filter(|y| reference_year - **y > 20).count() as f64;
    EvidenceAgeStats {
        reference_year,
        dated_triples: years.len(),
        total_triples: total,
        coverage: years.len() as f64 / total.max(1) as f64,
        median_year: crate::store::median(&floats),
        fraction_within_5y: Some(within_5 / n),
        fraction_over_20y: Some(over_20 / n),
        histogram,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{EvidenceBlock, Grade, StudyType, TemporalContext};

    fn triple(year: Option<i32>) -> TemporalTriple {
        TemporalTriple {
            edge_id: "e".into(),
            source_id: "d".into(),
            source_type: "disease".into(),
            source_name: "d".into(),
            relation: "disease_phenotype_positive".into(),
            target_id: "p".into(),
            target_type: "phenotype".into(),
            target_name: "p".into(),
            temporal: TemporalContext::default(),
            evidence: EvidenceBlock {
                tier: 2,
                source_ids: vec!["PMID:1".into()],
                evidence_text: "q".into(),
                study_type: StudyType::Review,
                credibility_score: 0.3,
                consensus_confidence: 1.0,
                extraction_models: vec!["alpha".into()],
                extraction_method: "tier2_llm_consensus".into(),
                citation_count: None,
                is_retracted: false,
                publication_year: year,
            },
            conditions: None,
            extraction_date: "2026-01-01".into(),
            pipeline_version: "1.0.0".into(),
            disease_profile_id: "MONDO:1".into(),
            quality_grade: Grade::B,
        }
    }

    #[test]
    fn hand_arithmetic_example() {
        let triples = vec![triple(Some(2005)), triple(Some(2015)), triple(Some(2025))];
        let stats = evidence_age_stats(&triples, 2026);
        assert_eq!(stats.median_year, Some(2015.0));
        assert!((stats.fraction_within_5y.unwrap() - 1.0 / 3.0).abs() < 1e-12);
        assert!((stats.fraction_over_20y.unwrap() - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(stats.coverage, 1.0);
    }

    #[test]
    fn single_year_is_its_own_median() {
        let stats = evidence_age_stats(&[triple(Some(1999))], 2026);
        assert_eq!(stats.median_year, Some(1999.0));
    }

    #[test]
    fn undated_input_is_empty_with_zero_coverage() {
        let stats = evidence_age_stats(&[triple(None), triple(None)], 2026);
        assert!(stats.median_year.is_none());
        assert_eq!(stats.coverage, 0.0);
        assert_eq!(stats.total_triples, 2);
    }

    #[test]
    fn histogram_counts_per_year() {
        let triples = vec![triple(Some(2015)), triple(Some(2015)), triple(Some(2020))];
        let stats = evidence_age_stats(&triples, 2026);
        assert_eq!(stats.histogram[&2015], 2);
        assert_eq!(stats.histogram[&2020], 1);
    }
}
