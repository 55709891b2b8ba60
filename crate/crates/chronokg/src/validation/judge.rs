//! Novel-coverage audit: stratified sampling of (claim, evidence) pairs
//! and the three-judge verdict panel.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::time::Duration;

use crate::error::{Error, Result};
use crate::extraction::ModelProvider;
use crate::model::{LiteratureTier, OnsetBinTable, TemporalTriple};

/// A disease in the novel-coverage population, with the triples eligible
/// for claim selection and its sampling stratum (literature tier × era).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NovelDisease {
    pub disease: String,
    pub tier: LiteratureTier,
    pub era: String,
    pub triples: Vec<TemporalTriple>,
}

/// One sampled (claim, evidence) pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledPair {
    pub disease: String,
    pub tier: LiteratureTier,
    pub era: String,
    pub edge_id: String,
    pub phenotype: String,
    pub claim_min: f64,
    pub claim_max: f64,
    pub evidence_text: String,
}

fn tier_order(t: LiteratureTier) -> u8 {
    match t {
        LiteratureTier::Standard => 0,
        LiteratureTier::Light => 1,
        LiteratureTier::Minimal => 2,
    }
}

/// Timing-keyword score of an evidence text: (longest matched keyword
/// span, total match count). Lexicon entries ending in `-` match any
/// token with that prefix and score the full token length.
fn keyword_score(text: &str, lexicon: &[String]) -> (usize, usize) {
    let lower = text.to_lowercase();
    let mut longest = 0usize;
    let mut count = 0usize;
    for token in lower.split(|c: char| !c.is_alphanumeric()) {
        if token.is_empty() {
            continue;
        }
        for entry in lexicon {
            let hit = match entry.strip_suffix('-') {
                Some(prefix) => token.starts_with(prefix),
                None => token == entry,
            };
            if hit {
                count += 1;
                longest = longest.max(token.len());
            }
        }
    }
    (longest, count)
}

/// Proportionally allocate `n` samples across tier×era strata (largest
/// remainders take the leftovers), then pick diseases by seeded shuffle
/// within each stratum. Per disease the claim is the onset-bearing triple
/// whose evidence text carries the longest timing-keyword span.
pub fn sample_novel(
    population: &[NovelDisease],
    n: usize,
    seed: u64,
    lexicon: &[String],
) -> Result<(Vec<SampledPair>, Vec<String>)> {
    if n > population.len() {
        return Err(Error::domain(format!(
            "cannot sample {n} from a population of {}",
            population.len()
        )));
    }
    let mut warnings = Vec::new();

    let mut strata: BTreeMap<(u8, String), Vec<&NovelDisease>> = BTreeMap::new();
    for d in population {
        strata
            .entry((tier_order(d.tier), d.era.clone()))
            .or_default()
            .push(d);
    }
    for members in strata.values_mut() {
        members.sort_by(|a, b| a.disease.cmp(&b.disease));
    }

    // Base quota by floor, remainders by largest fractional part.
    let total = population.len() as f64;
    let mut quotas: Vec<((u8, String), usize, f64)> = strata
        .iter()
        .map(|(key, members)| {
            let exact = n as f64 * members.len() as f64 / total;
            (key.clone(), exact.floor() as usize, exact - exact.floor())
        })
        .collect();
    let mut assigned: usize = quotas.iter().map(|(_, q, _)| q).sum();
    let mut by_remainder: Vec<usize> = (0..quotas.len()).collect();
    by_remainder.sort_by(|&a, &b| {
        quotas[b]
            .2
            .partial_cmp(&quotas[a].2)
            .unwrap()
            .then_with(|| quotas[a].0.cmp(&quotas[b].0))
    });
    let mut cursor = 0;
    while assigned < n {
        let idx = by_remainder[cursor % by_remainder.len()];
        let cap = strata[&quotas[idx].0].len();
        if quotas[idx].1 < cap {
            quotas[idx].1 += 1;
            assigned += 1;
        }
        cursor += 1;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    for (key, quota, _) in &quotas {
        let mut members = strata[key].clone();
        members.shuffle(&mut rng);
        if *quota > members.len() {
            warnings.push(format!(
                "stratum {key:?} shorter than its quota; taking all {} members",
                members.len()
            ));
        }
        for disease in members.into_iter().take(*quota) {
            let Some(pair) = select_claim(disease, lexicon) else {
                warnings.push(format!(
                    "disease '{}' has no onset-bearing triple; skipped",
                    disease.disease
                ));
                continue;
            };
            out.push(pair);
        }
    }
    out.sort_by(|a, b| a.disease.cmp(&b.disease));
    Ok((out, warnings))
}

fn select_claim(disease: &NovelDisease, lexicon: &[String]) -> Option<SampledPair> {
    disease
        .triples
        .iter()
        .filter(|t| t.onset_range().is_some())
        .max_by(|a, b| {
            let sa = keyword_score(&a.evidence.evidence_text, lexicon);
            let sb = keyword_score(&b.evidence.evidence_text, lexicon);
            sa.cmp(&sb).then_with(|| b.edge_id.cmp(&a.edge_id))
        })
        .map(|t| {
            let (lo, hi) = t.onset_range().unwrap();
            SampledPair {
                disease: disease.disease.clone(),
                tier: disease.tier,
                era: disease.era.clone(),
                edge_id: t.edge_id.clone(),
                phenotype: t.target_name.clone(),
                claim_min: lo,
                claim_max: hi,
                evidence_text: t.evidence.evidence_text.clone(),
            }
        })
}

/// Four-way judge verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictKind {
    Supported,
    PartiallySupported,
    NotSupported,
    Unverifiable,
}

/// One judge's rating of one (claim, evidence) pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JudgeVerdict {
    pub judge: String,
    pub verdict: VerdictKind,
    pub rationale: String,
}

/// The claim side of a judged pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OnsetClaim {
    pub disease: String,
    pub phenotype: String,
    pub onset_min: f64,
    pub onset_max: f64,
}

fn era_lookup_text(table: &OnsetBinTable) -> String {
    table
        .clinical_eras
        .iter()
        .map(|e| format!("{} {}-{} years", e.name, e.min, e.max))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Chain-of-thought audit prompt: quote the timing clause, translate it
/// through the fixed clinical-era lookup, compare per triple, return one
/// verdict token.
pub fn build_judge_prompt(claim: &OnsetClaim, evidence: &str, table: &OnsetBinTable) -> String {
    format!(
        "You are auditing whether a quoted evidence passage supports a claimed onset age range.\n\n\
         Follow these steps in order:\n\
         1. Quote the timing clause from the evidence verbatim.\n\
         2. Translate the clause to a numeric age range using this fixed clinical-era lookup: {eras}.\n\
         3. Compare the translated range against the claimed range for this triple (not the disease as a whole).\n\
         4. Answer with exactly one verdict token: SUPPORTED, PARTIALLY_SUPPORTED, NOT_SUPPORTED, or UNVERIFIABLE.\n\n\
         CLAIM: in {disease}, '{phenotype}' first manifests between {min} and {max} years.\n\
         EVIDENCE: \"{evidence}\"\n\n\
         VERDICT:",
        eras = era_lookup_text(table),
        disease = claim.disease,
        phenotype = claim.phenotype,
        min = claim.onset_min,
        max = claim.onset_max,
    )
}

fn parse_verdict(response: &str) -> Option<VerdictKind> {
    let mut upper = response.to_uppercase();
    let mut found: Vec<(usize, VerdictKind)> = Vec::new();
    for (token, kind) in [
        ("PARTIALLY_SUPPORTED", VerdictKind::PartiallySupported),
        ("PARTIALLY SUPPORTED", VerdictKind::PartiallySupported),
        ("NOT_SUPPORTED", VerdictKind::NotSupported),
        ("NOT SUPPORTED", VerdictKind::NotSupported),
        ("UNVERIFIABLE", VerdictKind::Unverifiable),
    ] {
        while let Some(pos) = upper.rfind(token) {
            found.push((pos, kind));
            upper.replace_range(pos..pos + token.len(), &" ".repeat(token.len()));
        }
    }
    if let Some(pos) = upper.rfind("SUPPORTED") {
        found.push((pos, VerdictKind::Supported));
    }
    found.into_iter().max_by_key(|(pos, _)| *pos).map(|(_, k)| k)
}

const JUDGE_TIMEOUT: Duration = Duration::from_secs(120);

/// Rate one (claim, evidence) pair with one judge. Unparseable responses
/// degrade to `Unverifiable`; transport and timeout failures stay errors.
pub fn judge_pair(
    claim: &OnsetClaim,
    evidence: &str,
    judge: &dyn ModelProvider,
    table: &OnsetBinTable,
) -> Result<JudgeVerdict> {
    let prompt = build_judge_prompt(claim, evidence, table);
    let response = judge.complete(&prompt, 0.0, JUDGE_TIMEOUT)?;
    match parse_verdict(&response) {
        Some(verdict) => Ok(JudgeVerdict {
            judge: judge.name().to_string(),
            verdict,
            rationale: response,
        }),
        None => Ok(JudgeVerdict {
            judge: judge.name().to_string(),
            verdict: VerdictKind::Unverifiable,
            rationale: format!("unparseable judge response: {response}"),
        }),
    }
}

/// Panel aggregation over items judged by exactly three judges.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct PanelReport {
    pub items: usize,
    pub excluded: usize,
    pub majority_supported: usize,
    pub majority_partially: usize,
    pub majority_not_supported: usize,
    pub majority_unverifiable: usize,
    pub three_way_splits: usize,
    pub unanimous: usize,
    pub two_of_three: usize,
    /// (supported + partially) / (items − unverifiable − splits).
    pub verified_accuracy: Option<f64>,
    pub warnings: Vec<String>,
}

impl PanelReport {
    pub fn render_table(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("items judged          {}\n", self.items));
        s.push_str(&format!("  supported           {}\n", self.majority_supported));
        s.push_str(&format!("  partially_supported {}\n", self.majority_partially));
        s.push_str(&format!("  not_supported       {}\n", self.majority_not_supported));
        s.push_str(&format!("  unverifiable        {}\n", self.majority_unverifiable));
        s.push_str(&format!("  three-way splits    {}\n", self.three_way_splits));
        s.push_str(&format!(
            "agreement: unanimous {} / two-of-three {} / split {}\n",
            self.unanimous, self.two_of_three, self.three_way_splits
        ));
        match self.verified_accuracy {
            Some(v) => s.push_str(&format!("verified accuracy     {:.1}%\n", 100.0 * v)),
            None => s.push_str("verified accuracy     undefined (no verifiable majorities)\n"),
        }
        s
    }
}

/// Majority verdict per item; three-way splits flagged; items lacking
/// exactly three verdicts excluded with a warning.
pub fn aggregate_verdicts(per_item: &[Vec<JudgeVerdict>]) -> PanelReport {
    let mut report = PanelReport::default();
    for (idx, verdicts) in per_item.iter().enumerate() {
        if verdicts.len() != 3 {
            report.excluded += 1;
            report
                .warnings
                .push(format!("item {idx} has {} verdicts, expected 3; excluded", verdicts.len()));
            continue;
        }
        report.items += 1;
        let mut counts: BTreeMap<&'static str, usize> = BTreeMap::new();
        for v in verdicts {
            let key = match v.verdict {
                VerdictKind::Supported => "s",
                VerdictKind::PartiallySupported => "p",
                VerdictKind::NotSupported => "n",
                VerdictKind::Unverifiable => "u",
            };
            *counts.entry(key).or_default() += 1;
        }
        let max = counts.values().copied().max().unwrap();
        match max {
            3 => report.unanimous += 1,
            2 => report.two_of_three += 1,
            _ => {
                report.three_way_splits += 1;
                continue;
            }
        }
        let majority = counts.iter().find(|(_, c)| **c == max).map(|(k, _)| *k).unwrap();
        match majority {
            "s" => report.majority_supported += 1,
            "p" => report.majority_partially += 1,
            "n" => report.majority_not_supported += 1,
            _ => report.majority_unverifiable += 1,
        }
    }
    let denom = report.items - report.majority_unverifiable - report.three_way_splits;
    if denom > 0 {
        report.verified_accuracy =
            Some((report.majority_supported + report.majority_partially) as f64 / denom as f64);
    }
    report
}

/// Deterministic judge for tests and offline runs: applies the clinical-era
/// lookup mechanically to era keywords found in the evidence.
pub struct MockJudge {
    name: String,
    table: OnsetBinTable,
}

impl MockJudge {
    pub fn new(name: impl Into<String>) -> Self {
        MockJudge {
            name: name.into(),
            table: OnsetBinTable::default(),
        }
    }

    fn era_of_evidence(&self, evidence: &str) -> Option<(f64, f64)> {
        let lower = evidence.to_lowercase();
        // Most-specific keyword first.
        let keyword_map: [(&str, &str); 14] = [
            ("older adulthood", "older adulthood"),
            ("early childhood", "early childhood"),
            ("elderly", "older adulthood"),
            ("late life", "older adulthood"),
            ("old age", "older adulthood"),
            ("prenatal", "prenatal"),
            ("in utero", "prenatal"),
            ("trimester", "prenatal"),
            ("adolescen", "adolescence"),
            ("teen", "adolescence"),
            ("childhood", "childhood"),
            ("infan", "infancy"),
            ("congenital", "infancy"),
            ("adult", "adulthood"),
        ];
        for (keyword, era) in keyword_map {
            if lower.contains(keyword) {
                let e = self.table.clinical_eras.iter().find(|e| e.name == era)?;
                return Some((e.min, e.max));
            }
        }
        None
    }
}

impl ModelProvider for MockJudge {
    fn name(&self) -> &str {
        &self.name
    }

    fn complete(&self, prompt: &str, _temperature: f64, _timeout: Duration) -> Result<String> {
        let evidence = prompt
            .lines()
            .find(|l| l.starts_with("EVIDENCE: "))
            .and_then(|l| l.split('"').nth(1))
            .unwrap_or_default();
        let claim_re = regex::Regex::new(
            r"first manifests between (\d+(?:\.\d+)?) and (\d+(?:\.\d+)?) years",
        )
        .unwrap();
        let claim = prompt
            .lines()
            .find(|l| l.starts_with("CLAIM: "))
            .and_then(|l| claim_re.captures(l))
            .map(|c| (c[1].parse::<f64>().unwrap(), c[2].parse::<f64>().unwrap()));

        let verdict = match (self.era_of_evidence(evidence), claim) {
            (Some((elo, ehi)), Some((clo, chi))) => {
                if clo >= elo && chi <= ehi {
                    "SUPPORTED"
                } else if clo <= ehi && elo <= chi {
                    "PARTIALLY_SUPPORTED"
                } else {
                    "NOT_SUPPORTED"
                }
            }
            _ => "UNVERIFIABLE",
        };
        Ok(format!(
            "1. Timing clause: \"{evidence}\"\n2. Era translation applied.\n3. Compared per triple.\n4. VERDICT: {verdict}"
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{EvidenceBlock, Grade, StudyType, TemporalContext};

    fn triple(edge: &str, phenotype: &str, onset: (f64, f64), evidence: &str) -> TemporalTriple {
        TemporalTriple {
            edge_id: edge.into(),
            source_id: "d".into(),
            source_type: "disease".into(),
            source_name: "testopathy".into(),
            relation: "disease_phenotype_positive".into(),
            target_id: phenotype.into(),
            target_type: "phenotype".into(),
            target_name: phenotype.into(),
            temporal: TemporalContext {
                onset_age_min: Some(onset.0),
                onset_age_max: Some(onset.1),
                ..Default::default()
            },
            evidence: EvidenceBlock {
                tier: 2,
                source_ids: vec!["PMID:1".into()],
                evidence_text: evidence.into(),
                study_type: StudyType::Review,
                credibility_score: 0.3,
                consensus_confidence: 1.0,
                extraction_models: vec!["alpha".into()],
                extraction_method: "tier2_llm_consensus".into(),
                citation_count: None,
                is_retracted: false,
                publication_year: None,
            },
            conditions: None,
            extraction_date: "2026-01-01".into(),
            pipeline_version: "1.0.0".into(),
            disease_profile_id: "MONDO:1".into(),
            quality_grade: Grade::B,
        }
    }

    fn novel(disease: &str, tier: LiteratureTier, era: &str) -> NovelDisease {
        NovelDisease {
            disease: disease.into(),
            tier,
            era: era.into(),
            triples: vec![
                triple("aaa", "weakness", (0.0, 1.0), "mild signs noted"),
                triple("bbb", "hypotonia", (0.0, 1.0), "onset in infancy with hypotonia"),
            ],
        }
    }

    fn lexicon() -> Vec<String> {
        crate::model::PipelineConfig::default().timing_lexicon
    }

    #[test]
    fn sampling_is_deterministic() {
        let population: Vec<NovelDisease> = (0..20)
            .map(|i| {
                novel(
                    &format!("disease {i:02}"),
                    if i % 2 == 0 { LiteratureTier::Standard } else { LiteratureTier::Minimal },
                    if i % 3 == 0 { "infancy" } else { "adulthood" },
                )
            })
            .collect();
        let (a, _) = sample_novel(&population, 10, 42, &lexicon()).unwrap();
        let (b, _) = sample_novel(&population, 10, 42, &lexicon()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 10);
    }

    #[test]
    fn two_equal_strata_split_evenly() {
        let population: Vec<NovelDisease> = (0..50)
            .map(|i| {
                novel(
                    &format!("d{i:02}"),
                    if i < 25 { LiteratureTier::Standard } else { LiteratureTier::Minimal },
                    "infancy",
                )
            })
            .collect();
        let (sample, _) = sample_novel(&population, 10, 7, &lexicon()).unwrap();
        let standard = sample.iter().filter(|p| p.tier == LiteratureTier::Standard).count();
        assert_eq!(standard, 5);
    }

    #[test]
    fn single_stratum_is_plain_seeded_sample() {
        let population: Vec<NovelDisease> =
            (0..8).map(|i| novel(&format!("d{i}"), LiteratureTier::Light, "childhood")).collect();
        let (sample, warnings) = sample_novel(&population, 3, 42, &lexicon()).unwrap();
        assert_eq!(sample.len(), 3);
        assert!(warnings.is_empty());
    }

    #[test]
    fn claim_selection_prefers_longest_keyword_span() {
        let d = novel("x", LiteratureTier::Light, "infancy");
        let pair = select_claim(&d, &lexicon()).unwrap();
        // "infancy" (7 chars, keyword span) beats the no-keyword evidence.
        assert_eq!(pair.edge_id, "bbb");
    }

    #[test]
    fn oversampling_is_a_domain_error() {
        let population = vec![novel("only", LiteratureTier::Light, "infancy")];
        assert!(sample_novel(&population, 2, 42, &lexicon()).is_err());
    }

    #[test]
    fn mock_judge_supports_contained_claim() {
        let judge = MockJudge::new("judge-a");
        let claim = OnsetClaim {
            disease: "testopathy".into(),
            phenotype: "hypotonia".into(),
            onset_min: 0.0,
            onset_max: 1.0,
        };
        let v = judge_pair(&claim, "onset in infancy", &judge, &OnsetBinTable::default()).unwrap();
        assert_eq!(v.verdict, VerdictKind::Supported);
    }

    #[test]
    fn mock_judge_rejects_disjoint_claim() {
        let judge = MockJudge::new("judge-a");
        let claim = OnsetClaim {
            disease: "testopathy".into(),
            phenotype: "weakness".into(),
            onset_min: 0.0,
            onset_max: 5.0,
        };
        let v = judge_pair(&claim, "elderly onset reported", &judge, &OnsetBinTable::default()).unwrap();
        assert_eq!(v.verdict, VerdictKind::NotSupported);
    }

    #[test]
    fn mock_judge_unverifiable_without_timing() {
        let judge = MockJudge::new("judge-a");
        let claim = OnsetClaim {
            disease: "testopathy".into(),
            phenotype: "weakness".into(),
            onset_min: 0.0,
            onset_max: 5.0,
        };
        let v = judge_pair(&claim, "weakness was observed", &judge, &OnsetBinTable::default()).unwrap();
        assert_eq!(v.verdict, VerdictKind::Unverifiable);
    }

    #[test]
    fn verdict_parser_handles_token_forms() {
        assert_eq!(parse_verdict("VERDICT: SUPPORTED"), Some(VerdictKind::Supported));
        assert_eq!(
            parse_verdict("... the verdict is partially_supported"),
            Some(VerdictKind::PartiallySupported)
        );
        assert_eq!(parse_verdict("NOT_SUPPORTED"), Some(VerdictKind::NotSupported));
        assert_eq!(parse_verdict("no verdict here"), None);
    }

    fn item(kinds: [VerdictKind; 3]) -> Vec<JudgeVerdict> {
        kinds
            .iter()
            .enumerate()
            .map(|(i, k)| JudgeVerdict {
                judge: format!("j{i}"),
                verdict: *k,
                rationale: String::new(),
            })
            .collect()
    }

    #[test]
    fn unanimous_panel_scores_100() {
        use VerdictKind::*;
        let items: Vec<_> = (0..10).map(|_| item([Supported, Supported, Supported])).collect();
        let report = aggregate_verdicts(&items);
        assert_eq!(report.unanimous, 10);
        assert_eq!(report.verified_accuracy, Some(1.0));
    }

    #[test]
    fn counting_matches_hand_computed_fixture() {
        use VerdictKind::*;
        let items = vec![
            item([Supported, Supported, Supported]),
            item([Supported, Supported, NotSupported]),
            item([PartiallySupported, PartiallySupported, Supported]),
            item([NotSupported, NotSupported, Unverifiable]),
            item([Unverifiable, Unverifiable, Supported]),
            item([Supported, PartiallySupported, NotSupported]),
            item([Supported, Supported, Unverifiable]),
            item([NotSupported, NotSupported, NotSupported]),
            item([PartiallySupported, PartiallySupported, PartiallySupported]),
            item([Supported, Supported, PartiallySupported]),
        ];
        let report = aggregate_verdicts(&items);
        assert_eq!(report.items, 10);
        assert_eq!(report.majority_supported, 4);
        assert_eq!(report.majority_partially, 2);
        assert_eq!(report.majority_not_supported, 2);
        assert_eq!(report.majority_unverifiable, 1);
        assert_eq!(report.three_way_splits, 1);
        assert_eq!(report.unanimous, 3);
        assert_eq!(report.two_of_three, 6);
        // (4 + 2) / (10 - 1 - 1)
        assert_eq!(report.verified_accuracy, Some(0.75));
    }

    #[test]
    fn missing_judge_excludes_item_with_warning() {
        use VerdictKind::*;
        let mut items = vec![item([Supported, Supported, Supported])];
        items.push(item([Supported, Supported, Supported])[..2].to_vec());
        let report = aggregate_verdicts(&items);
        assert_eq!(report.items, 1);
        assert_eq!(report.excluded, 1);
        assert_eq!(report.warnings.len(), 1);
    }
}
