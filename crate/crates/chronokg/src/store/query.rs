//! Temporal queries over validated records: onset aggregation, stage
//! lookup, and per-disease temporal profiles.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::consensus::{normalize_entity, similarity_ratio};
use crate::error::{Error, Result};
use crate::model::TemporalTriple;

/// Median; the mean of the two central values for even counts.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len();
    Some(if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    })
}

/// Median onset range for one phenotype.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhenotypeOnset {
    pub phenotype: String,
    pub onset_min: f64,
    pub onset_max: f64,
    pub triple_count: usize,
    pub pmids: Vec<String>,
}

/// Disease-level onset aggregate. Empty option fields mean "no
/// onset-bearing triples", which is distinct from zeros.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct OnsetAggregate {
    /// (median of onset minima, median of onset maxima)
    pub median_range: Option<(f64, f64)>,
    /// (min of minima, max of maxima)
    pub pooled_range: Option<(f64, f64)>,
    pub per_phenotype: Vec<PhenotypeOnset>,
}

fn pmids_of(triples: &[&TemporalTriple]) -> Vec<String> {
    let mut out: Vec<String> = triples
        .iter()
        .flat_map(|t| t.evidence.source_ids.iter().cloned())
        .collect();
    out.sort();
    out.dedup();
    out
}

/// Aggregate onset statistics over one disease's triples, optionally
/// restricted to a phenotype (normalized exact match).
pub fn aggregate_onset(triples: &[&TemporalTriple], phenotype: Option<&str>) -> OnsetAggregate {
    let filter_key = phenotype.map(|p| normalize_entity(p).key);
    let onset_triples: Vec<&TemporalTriple> = triples
        .iter()
        .filter(|t| t.onset_range().is_some())
        .filter(|t| match &filter_key {
            Some(k) => normalize_entity(&t.target_name).key == *k,
            None => true,
        })
        .copied()
        .collect();
    if onset_triples.is_empty() {
        return OnsetAggregate::default();
    }
    let mins: Vec<f64> = onset_triples.iter().map(|t| t.onset_range().unwrap().0).collect();
    let maxs: Vec<f64> = onset_triples.iter().map(|t| t.onset_range().unwrap().1).collect();
    let median_range = Some((median(&mins).unwrap(), median(&maxs).unwrap()));
    let pooled_range = Some((
        mins.iter().copied().fold(f64::INFINITY, f64::min),
        maxs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    ));

    let mut groups: BTreeMap<String, Vec<&TemporalTriple>> = BTreeMap::new();
    for t in &onset_triples {
        groups
            .entry(normalize_entity(&t.target_name).key)
            .or_default()
            .push(t);
    }
    let per_phenotype = groups
        .into_iter()
        .map(|(phenotype, ts)| {
            let mins: Vec<f64> = ts.iter().map(|t| t.onset_range().unwrap().0).collect();
            let maxs: Vec<f64> = ts.iter().map(|t| t.onset_range().unwrap().1).collect();
            PhenotypeOnset {
                phenotype,
                onset_min: median(&mins).unwrap(),
                onset_max: median(&maxs).unwrap(),
                triple_count: ts.len(),
                pmids: pmids_of(&ts),
            }
        })
        .collect();

    OnsetAggregate {
        median_range,
        pooled_range,
        per_phenotype,
    }
}

/// Answer to an onset query, always carrying supporting PMIDs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OnsetAnswer {
    pub onset_min: f64,
    pub onset_max: f64,
    pub pmids: Vec<String>,
    /// Phenotype the answer was computed from, when one matched.
    pub matched_phenotype: Option<String>,
    /// True when no phenotype matched and the disease-level median was
    /// returned instead.
    pub disease_level_fallback: bool,
}

/// One row of a temporal profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileEntry {
    pub phenotype: String,
    pub onset_min: Option<f64>,
    pub onset_max: Option<f64>,
    pub stage: Option<String>,
    pub milestone: Option<String>,
    pub pmids: Vec<String>,
}

/// Per-disease temporal profile: entries sorted by onset onset then name;
/// rows without onset (milestone- or stage-only) sort last.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TemporalProfile {
    pub disease_id: String,
    pub disease_name: String,
    pub entries: Vec<ProfileEntry>,
}

/// Immutable in-memory index over validated records, keyed by disease
/// CURIE and by normalized disease name. Safe for concurrent reads.
pub struct StoreIndex {
    records: Vec<TemporalTriple>,
    by_disease: BTreeMap<String, Vec<usize>>,
}

impl StoreIndex {
    pub fn build(records: Vec<TemporalTriple>) -> Self {
        let mut by_disease: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        for (i, r) in records.iter().enumerate() {
            by_disease
                .entry(r.disease_profile_id.clone())
                .or_default()
                .push(i);
            let name_key = normalize_entity(&r.source_name).key;
            if !name_key.is_empty() {
                let ids = by_disease.entry(name_key).or_default();
                if ids.last() != Some(&i) {
                    ids.push(i);
                }
            }
        }
        StoreIndex { records, by_disease }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> &[TemporalTriple] {
        &self.records
    }

    /// Disease keys (CURIEs and normalized names) present in the index.
    pub fn disease_keys(&self) -> Vec<&str> {
        self.by_disease.keys().map(String::as_str).collect()
    }

    /// All triples for a disease, looked up by CURIE or name.
    pub fn disease_triples(&self, disease: &str) -> Option<Vec<&TemporalTriple>> {
        let key = if disease.contains(':') {
            disease.to_string()
        } else {
            normalize_entity(disease).key
        };
        self.by_disease
            .get(&key)
            .or_else(|| self.by_disease.get(disease))
            .map(|ids| ids.iter().map(|&i| &self.records[i]).collect())
    }

    /// Onset range for (disease, phenotype): normalized exact phenotype
    /// match first, then best fuzzy match at >= 80, then the disease-level
    /// median with a fallback flag.
    pub fn query_onset(&self, disease: &str, phenotype: &str) -> Result<OnsetAnswer> {
        let triples = self
            .disease_triples(disease)
            .ok_or_else(|| Error::not_found(format!("disease '{disease}' not in store")))?;
        let aggregate = aggregate_onset(&triples, None);
        let (dmin, dmax) = aggregate.median_range.ok_or_else(|| {
            Error::not_found(format!("no onset-bearing triples for '{disease}'"))
        })?;

        let want = normalize_entity(phenotype).key;
        if let Some(hit) = aggregate.per_phenotype.iter().find(|p| p.phenotype == want) {
            return Ok(OnsetAnswer {
                onset_min: hit.onset_min,
                onset_max: hit.onset_max,
                pmids: hit.pmids.clone(),
                matched_phenotype: Some(hit.phenotype.clone()),
                disease_level_fallback: false,
            });
        }
        let best_fuzzy = aggregate
            .per_phenotype
            .iter()
            .map(|p| (similarity_ratio(&p.phenotype, &want), p))
            .filter(|(score, _)| *score >= 80)
            .max_by(|(sa, pa), (sb, pb)| sa.cmp(sb).then_with(|| pb.phenotype.cmp(&pa.phenotype)));
        if let Some((_, hit)) = best_fuzzy {
            return Ok(OnsetAnswer {
                onset_min: hit.onset_min,
                onset_max: hit.onset_max,
                pmids: hit.pmids.clone(),
                matched_phenotype: Some(hit.phenotype.clone()),
                disease_level_fallback: false,
            });
        }
        let onset_triples: Vec<&TemporalTriple> = triples
            .iter()
            .filter(|t| t.onset_range().is_some())
            .copied()
            .collect();
        Ok(OnsetAnswer {
            onset_min: dmin,
            onset_max: dmax,
            pmids: pmids_of(&onset_triples),
            matched_phenotype: None,
            disease_level_fallback: true,
        })
    }

    /// Phenotypes recorded for a named progression stage; sorted, deduped,
    /// empty when nothing matches.
    pub fn query_stage(&self, disease: &str, stage: &str) -> Vec<String> {
        let want = stage.trim().to_lowercase();
        let mut out: Vec<String> = self
            .disease_triples(disease)
            .unwrap_or_default()
            .iter()
            .filter(|t| {
                t.temporal
                    .progression_stage
                    .as_deref()
                    .is_some_and(|s| s.trim().to_lowercase() == want)
            })
            .map(|t| t.target_name.clone())
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// Distinct progression stages recorded for a disease.
    pub fn stages_of(&self, disease: &str) -> Vec<String> {
        let mut out: Vec<String> = self
            .disease_triples(disease)
            .unwrap_or_default()
            .iter()
            .filter_map(|t| t.temporal.progression_stage.clone())
            .map(|s| s.trim().to_lowercase())
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// Sorted temporal profile for a disease.
    pub fn temporal_profile(&self, disease: &str) -> Result<TemporalProfile> {
        let triples = self
            .disease_triples(disease)
            .ok_or_else(|| Error::not_found(format!("disease '{disease}' not in store")))?;
        let temporal: Vec<&TemporalTriple> =
            triples.iter().filter(|t| t.temporal.is_temporal()).copied().collect();

        let mut groups: BTreeMap<String, Vec<&TemporalTriple>> = BTreeMap::new();
        for t in &temporal {
            groups
                .entry(normalize_entity(&t.target_name).key)
                .or_default()
                .push(t);
        }
        let mut entries: Vec<ProfileEntry> = groups
            .into_iter()
            .map(|(phenotype, ts)| {
                let mins: Vec<f64> = ts.iter().filter_map(|t| t.onset_range().map(|o| o.0)).collect();
                let maxs: Vec<f64> = ts.iter().filter_map(|t| t.onset_range().map(|o| o.1)).collect();
                let mut stages: Vec<String> =
                    ts.iter().filter_map(|t| t.temporal.progression_stage.clone()).collect();
                stages.sort();
                let mut milestones: Vec<String> =
                    ts.iter().filter_map(|t| t.temporal.milestone.clone()).collect();
                milestones.sort();
                ProfileEntry {
                    phenotype,
                    onset_min: median(&mins),
                    onset_max: median(&maxs),
                    stage: stages.into_iter().next(),
                    milestone: milestones.into_iter().next(),
                    pmids: pmids_of(&ts),
                }
            })
            .collect();
        entries.sort_by(|a, b| {
            match (a.onset_min, b.onset_min) {
                (Some(x), Some(y)) => x.partial_cmp(&y).unwrap(),
                (Some(_), None) => std::cmp::Ordering::Less,
                (None, Some(_)) => std::cmp::Ordering::Greater,
                (None, None) => std::cmp::Ordering::Equal,
            }
            .then_with(|| a.phenotype.cmp(&b.phenotype))
        });

        let (disease_id, disease_name) = temporal
            .first()
            .or_else(|| triples.first())
            .map(|t| (t.disease_profile_id.clone(), t.source_name.clone()))
            .unwrap_or_else(|| (disease.to_string(), disease.to_string()));
        Ok(TemporalProfile {
            disease_id,
            disease_name,
            entries,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{EvidenceBlock, Grade, StudyType, TemporalContext};

    fn rec(
        phenotype: &str,
        onset: Option<(f64, f64)>,
        stage: Option<&str>,
        milestone: Option<&str>,
        pmid: &str,
    ) -> TemporalTriple {
        TemporalTriple {
            edge_id: format!("{phenotype}-{pmid}"),
            source_id: "dmd".into(),
            source_type: "disease".into(),
            source_name: "Duchenne muscular dystrophy".into(),
            relation: "disease_phenotype_positive".into(),
            target_id: phenotype.to_lowercase(),
            target_type: "phenotype".into(),
            target_name: phenotype.into(),
            temporal: TemporalContext {
                onset_age_min: onset.map(|o| o.0),
                onset_age_max: onset.map(|o| o.1),
                progression_stage: stage.map(String::from),
                milestone: milestone.map(String::from),
                ..Default::default()
            },
            evidence: EvidenceBlock {
                tier: 2,
                source_ids: vec![format!("PMID:{pmid}")],
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
            disease_profile_id: "MONDO:0010679".into(),
            quality_grade: Grade::B,
        }
    }

    fn dmd_fixture() -> StoreIndex {
        StoreIndex::build(vec![
            rec("walking delay", Some((2.0, 5.0)), None, None, "1"),
            rec("Gowers sign", Some((5.0, 8.0)), Some("ambulatory"), None, "2"),
            rec("loss of ambulation", Some((8.0, 12.0)), None, Some("loss of ambulation"), "3"),
            rec("cardiomyopathy", Some((10.0, 18.0)), Some("non-ambulatory"), None, "4"),
            rec("respiratory insufficiency", Some((12.0, 20.0)), Some("non-ambulatory"), None, "5"),
        ])
    }

    #[test]
    fn median_even_count_is_mean_of_central_pair() {
        assert_eq!(median(&[2.0, 2.0, 3.0]), Some(2.0));
        assert_eq!(median(&[5.0, 5.0, 8.0]), Some(5.0));
        assert_eq!(median(&[1.0, 3.0]), Some(2.0));
        assert_eq!(median(&[]), None);
    }

    #[test]
    fn aggregate_median_by_hand() {
        let records = [rec("a", Some((2.0, 5.0)), None, None, "1"),
            rec("b", Some((2.0, 5.0)), None, None, "2"),
            rec("c", Some((3.0, 8.0)), None, None, "3")];
        let refs: Vec<&TemporalTriple> = records.iter().collect();
        let agg = aggregate_onset(&refs, None);
        assert_eq!(agg.median_range, Some((2.0, 5.0)));
        assert_eq!(agg.pooled_range, Some((2.0, 8.0)));
    }

    #[test]
    fn single_triple_median_equals_pooled() {
        let records = [rec("a", Some((10.0, 18.0)), None, None, "1")];
        let refs: Vec<&TemporalTriple> = records.iter().collect();
        let agg = aggregate_onset(&refs, None);
        assert_eq!(agg.median_range, agg.pooled_range);
        assert_eq!(agg.median_range, Some((10.0, 18.0)));
    }

    #[test]
    fn pooled_contains_median_property() {
        use rand::prelude::*;
        use rand_chacha::ChaCha8Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let n = rng.random_range(1..12);
            let records: Vec<TemporalTriple> = (0..n)
                .map(|i| {
                    let lo = rng.random_range(0.0..60.0);
                    let hi = lo + rng.random_range(0.0..40.0);
                    rec(&format!("p{i}"), Some((lo, hi)), None, None, "9")
                })
                .collect();
            let refs: Vec<&TemporalTriple> = records.iter().collect();
            let agg = aggregate_onset(&refs, None);
            let (mlo, mhi) = agg.median_range.unwrap();
            let (plo, phi) = agg.pooled_range.unwrap();
            assert!(plo <= mlo && mhi <= phi);
        }
    }

    #[test]
    fn no_onset_triples_yield_empty_aggregate() {
        let records = [rec("a", None, Some("adult"), None, "1")];
        let refs: Vec<&TemporalTriple> = records.iter().collect();
        let agg = aggregate_onset(&refs, None);
        assert!(agg.median_range.is_none());
        assert!(agg.per_phenotype.is_empty());
    }

    #[test]
    fn dmd_has_five_phenotype_pairs_with_walking_delay_earliest() {
        let index = dmd_fixture();
        let triples = index.disease_triples("Duchenne muscular dystrophy").unwrap();
        let agg = aggregate_onset(&triples, None);
        assert_eq!(agg.per_phenotype.len(), 5);
        let profile = index.temporal_profile("MONDO:0010679").unwrap();
        assert_eq!(profile.entries[0].phenotype, "walking delay");
        assert_eq!(profile.entries[0].onset_min, Some(2.0));
        assert_eq!(profile.entries[0].onset_max, Some(5.0));
    }

    #[test]
    fn query_onset_exact_phenotype() {
        let index = dmd_fixture();
        let ans = index.query_onset("MONDO:0010679", "cardiomyopathy").unwrap();
        assert_eq!((ans.onset_min, ans.onset_max), (10.0, 18.0));
        assert!(!ans.disease_level_fallback);
        assert_eq!(ans.pmids, vec!["PMID:4"]);
    }

    #[test]
    fn query_onset_unknown_phenotype_falls_back_to_disease_level() {
        let index = dmd_fixture();
        let ans = index.query_onset("MONDO:0010679", "xyzzy").unwrap();
        assert!(ans.disease_level_fallback);
        // Median of mins {2,5,8,10,12} and maxs {5,8,12,18,20}.
        assert_eq!((ans.onset_min, ans.onset_max), (8.0, 12.0));
    }

    #[test]
    fn query_onset_absent_disease_not_found() {
        let index = dmd_fixture();
        assert!(matches!(
            index.query_onset("MONDO:9999999", "x"),
            Err(Error::NotFound(_))
        ));
    }

    #[test]
    fn query_onset_provenance_subset_of_contributing_pmids() {
        let index = dmd_fixture();
        let triples = index.disease_triples("MONDO:0010679").unwrap();
        let all: Vec<String> = triples
            .iter()
            .flat_map(|t| t.evidence.source_ids.clone())
            .collect();
        let ans = index.query_onset("MONDO:0010679", "gowers sign").unwrap();
        assert!(ans.pmids.iter().all(|p| all.contains(p)));
    }

    #[test]
    fn query_stage_matches_and_sorts() {
        let index = dmd_fixture();
        let phenos = index.query_stage("MONDO:0010679", "non-ambulatory");
        assert_eq!(phenos, vec!["cardiomyopathy", "respiratory insufficiency"]);
        assert!(index.query_stage("MONDO:0010679", "unknown stage").is_empty());
    }

    #[test]
    fn milestone_only_rows_preserved_in_profile() {
        let index = StoreIndex::build(vec![
            rec("contractures", None, None, Some("first contractures"), "1"),
            rec("scoliosis", None, Some("late"), None, "2"),
        ]);
        let profile = index.temporal_profile("Duchenne muscular dystrophy").unwrap();
        assert_eq!(profile.entries.len(), 2);
        assert!(profile.entries.iter().all(|e| e.onset_min.is_none()));
        assert!(profile
            .entries
            .iter()
            .any(|e| e.milestone.as_deref() == Some("first contractures")));
    }
}
