//! Answer scoring: exact label match for MCQ and yes/no items,
//! bidirectional substring for free text, and the calibrated onset rubric.
//!
//! Age-range grammar accepted from free-text answers (after lowering and
//! dash normalization): `between X and Y`, `X-Y`, `X to Y`, `X years`, or
//! a bare number; decimals allowed. A single age becomes the degenerate
//! range (X, X).

use regex::Regex;

use crate::benchmark::{BenchmarkQuestion, GoldAnswer};
use crate::consensus::normalize_entity;
use crate::model::OnsetBinTable;

/// Scoring outcome; `Unparseable` is a result, not an error.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScoreOutcome {
    Correct,
    Incorrect,
    Unparseable,
}

/// Parse an age range from answer text under the documented mini-grammar.
pub fn parse_age_range(text: &str) -> Option<(f64, f64)> {
    let norm = text.to_lowercase().replace(['–', '—'], "-");
    let num = r"(\d+(?:\.\d+)?)";
    let between = Regex::new(&format!(r"between\s+{num}\s+and\s+{num}")).unwrap();
    if let Some(c) = between.captures(&norm) {
        return Some(order(c[1].parse().ok()?, c[2].parse().ok()?));
    }
    let pair = Regex::new(&format!(r"{num}\s*(?:-|\bto\b)\s*{num}")).unwrap();
    if let Some(c) = pair.captures(&norm) {
        return Some(order(c[1].parse().ok()?, c[2].parse().ok()?));
    }
    let single = Regex::new(&format!(r"{num}\s*(?:years?|y\b|yrs?)")).unwrap();
    if let Some(c) = single.captures(&norm) {
        let x: f64 = c[1].parse().ok()?;
        return Some((x, x));
    }
    let bare = Regex::new(num).unwrap();
    if let Some(c) = bare.captures(&norm) {
        let x: f64 = c[1].parse().ok()?;
        return Some((x, x));
    }
    None
}

fn order(a: f64, b: f64) -> (f64, f64) {
    if a <= b { (a, b) } else { (b, a) }
}

/// Overlap tolerance: `min(2.0, max(0.5, 0.5 * gold_width))`.
pub fn onset_tolerance(gold_range: (f64, f64)) -> f64 {
    let width = gold_range.1 - gold_range.0;
    (0.5 * width).clamp(0.5, 2.0)
}

/// Calibrated onset check: the prediction must intersect the gold range
/// expanded by the tolerance on both ends.
pub fn calibrated_onset_score(predicted: (f64, f64), gold: (f64, f64)) -> bool {
    let tol = onset_tolerance(gold);
    let lo = gold.0 - tol;
    let hi = gold.1 + tol;
    predicted.0 <= hi && lo <= predicted.1
}

/// Calibrated scoring of free text: numeric ranges take priority; an era
/// keyword is accepted only when its width is compatible with the gold
/// range (era width <= gold width + 2*tol) and the era overlaps the
/// expanded gold.
pub fn calibrated_onset_score_text(
    answer: &str,
    gold: (f64, f64),
    table: &OnsetBinTable,
) -> ScoreOutcome {
    if answer.trim().is_empty() {
        return ScoreOutcome::Unparseable;
    }
    if let Some(predicted) = parse_age_range(answer) {
        return if calibrated_onset_score(predicted, gold) {
            ScoreOutcome::Correct
        } else {
            ScoreOutcome::Incorrect
        };
    }
    let tol = onset_tolerance(gold);
    let lower = answer.to_lowercase();
    for era in &table.clinical_eras {
        if lower.contains(&era.name) {
            let width_ok = (era.max - era.min) <= (gold.1 - gold.0) + 2.0 * tol;
            let overlaps = era.min <= gold.1 + tol && gold.0 - tol <= era.max;
            return if width_ok && overlaps {
                ScoreOutcome::Correct
            } else {
                ScoreOutcome::Incorrect
            };
        }
    }
    ScoreOutcome::Incorrect
}

fn leading_option_letter(answer: &str) -> Option<char> {
    let trimmed = answer.trim();
    let mut chars = trimmed.chars();
    let first = chars.next()?;
    if !first.is_ascii_alphabetic() {
        return None;
    }
    let upper = first.to_ascii_uppercase();
    if !('A'..='F').contains(&upper) {
        return None;
    }
    match chars.next() {
        None => Some(upper),
        Some(c) if c == ')' || c == '.' || c == ':' || c.is_whitespace() => Some(upper),
        _ => None,
    }
}

fn substring_match(answer: &str, gold: &str) -> bool {
    let a = answer.trim().to_lowercase();
    let g = gold.trim().to_lowercase();
    !a.is_empty() && !g.is_empty() && (a.contains(&g) || g.contains(&a))
}

fn score_label(question: &BenchmarkQuestion, gold_label: &str, answer: &str) -> ScoreOutcome {
    // MCQ path: gold is a single option letter.
    if let (1, Some(options)) = (gold_label.len(), question.options.as_ref()) {
        if let Some(letter) = leading_option_letter(answer) {
            return if letter.to_string().eq_ignore_ascii_case(gold_label) {
                ScoreOutcome::Correct
            } else {
                ScoreOutcome::Incorrect
            };
        }
        // Full-text answers: match against option texts.
        let hits: Vec<usize> = options
            .iter()
            .enumerate()
            .filter(|(_, text)| substring_match(answer, text))
            .map(|(i, _)| i)
            .collect();
        return match hits.as_slice() {
            [single] => {
                let letter = (b'A' + *single as u8) as char;
                if letter.to_string().eq_ignore_ascii_case(gold_label) {
                    ScoreOutcome::Correct
                } else {
                    ScoreOutcome::Incorrect
                }
            }
            _ => ScoreOutcome::Unparseable,
        };
    }
    // Free-text label (disease names, onset bins).
    if substring_match(answer, gold_label) {
        ScoreOutcome::Correct
    } else {
        ScoreOutcome::Incorrect
    }
}

fn score_yes_no(gold: bool, answer: &str) -> ScoreOutcome {
    let lower = answer.trim().to_lowercase();
    let first_word: String = lower
        .chars()
        .take_while(|c| c.is_alphabetic())
        .collect();
    let said = match first_word.as_str() {
        "yes" | "y" | "true" => Some(true),
        "no" | "n" | "false" => Some(false),
        _ => {
            if lower.contains("yes") && !lower.contains("no") {
                Some(true)
            } else if lower.contains("no") && !lower.contains("yes") {
                Some(false)
            } else {
                None
            }
        }
    };
    match said {
        Some(b) if b == gold => ScoreOutcome::Correct,
        Some(_) => ScoreOutcome::Incorrect,
        None => ScoreOutcome::Unparseable,
    }
}

fn parse_sequence(answer: &str) -> Vec<String> {
    let normalized = answer
        .replace("->", "\u{1}")
        .replace('→', "\u{1}")
        .replace(" then ", "\u{1}")
        .replace([',', ';', '\n'], "\u{1}");
    let marker = Regex::new(r"^\s*\(?\d+[).:]?\s*").unwrap();
    normalized
        .split('\u{1}')
        .map(|part| marker.replace(part, "").to_string())
        .map(|part| normalize_entity(&part).key)
        .filter(|k| !k.is_empty())
        .collect()
}

fn score_ordering(gold: &[String], answer: &str) -> ScoreOutcome {
    let parsed = parse_sequence(answer);
    if parsed.is_empty() {
        return ScoreOutcome::Unparseable;
    }
    let gold_keys: Vec<String> = gold.iter().map(|g| normalize_entity(g).key).collect();
    if parsed == gold_keys {
        ScoreOutcome::Correct
    } else {
        ScoreOutcome::Incorrect
    }
}

fn score_list(gold: &[String], answer: &str) -> ScoreOutcome {
    if answer.trim().is_empty() {
        return ScoreOutcome::Unparseable;
    }
    let lower = answer.to_lowercase();
    if gold.iter().all(|g| lower.contains(&g.trim().to_lowercase())) {
        ScoreOutcome::Correct
    } else {
        ScoreOutcome::Incorrect
    }
}

/// Score a model's answer text against one benchmark question.
pub fn score_answer(
    question: &BenchmarkQuestion,
    answer: &str,
    table: &OnsetBinTable,
) -> ScoreOutcome {
    if answer.trim().is_empty() {
        return ScoreOutcome::Unparseable;
    }
    match &question.gold {
        GoldAnswer::YesNo(b) => score_yes_no(*b, answer),
        GoldAnswer::Label(label) => score_label(question, label, answer),
        GoldAnswer::Range { min, max } => calibrated_onset_score_text(answer, (*min, *max), table),
        GoldAnswer::Ordering(seq) => score_ordering(seq, answer),
        GoldAnswer::List(items) => score_list(items, answer),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmark::{AuditFacts, BenchmarkTier, Difficulty, GoldSourceTrace, TaskType};
    use proptest::prelude::*;

    fn mcq(gold: &str, options: Vec<&str>) -> BenchmarkQuestion {
        BenchmarkQuestion {
            id: "q1".into(),
            tier: BenchmarkTier::Tier1,
            task_type: TaskType::TemporalDifferential,
            difficulty: Difficulty::Hard,
            prompt: "which?".into(),
            options: Some(options.into_iter().map(String::from).collect()),
            gold: GoldAnswer::Label(gold.into()),
            gold_source: GoldSourceTrace::default(),
            disease: None,
            phenotype: None,
            audit: AuditFacts::None,
        }
    }

    #[test]
    fn mcq_letter_and_full_text_match() {
        let q = mcq("C", vec!["Alpha", "Beta", "Isolated Congenital Microcephaly", "Delta"]);
        assert_eq!(score_answer(&q, "C) Isolated Congenital Microcephaly", &OnsetBinTable::default()), ScoreOutcome::Correct);
        assert_eq!(score_answer(&q, "c", &OnsetBinTable::default()), ScoreOutcome::Correct);
        assert_eq!(score_answer(&q, "isolated congenital microcephaly", &OnsetBinTable::default()), ScoreOutcome::Correct);
        assert_eq!(score_answer(&q, "B", &OnsetBinTable::default()), ScoreOutcome::Incorrect);
    }

    #[test]
    fn free_text_bidirectional_substring() {
        let mut q = mcq("Congenital Hydrocephalus", vec![]);
        q.options = None;
        assert_eq!(
            score_answer(&q, "congenital hydrocephalus (earlier)", &OnsetBinTable::default()),
            ScoreOutcome::Correct
        );
        assert_eq!(score_answer(&q, "Maffucci", &OnsetBinTable::default()), ScoreOutcome::Incorrect);
    }

    #[test]
    fn empty_answer_unparseable() {
        let q = mcq("A", vec!["x", "y"]);
        assert_eq!(score_answer(&q, "  ", &OnsetBinTable::default()), ScoreOutcome::Unparseable);
    }

    #[test]
    fn yes_no_parsing() {
        let mut q = mcq("", vec![]);
        q.options = None;
        q.gold = GoldAnswer::YesNo(false);
        let t = OnsetBinTable::default();
        assert_eq!(score_answer(&q, "No (0-2 years)", &t), ScoreOutcome::Correct);
        assert_eq!(score_answer(&q, "Yes", &t), ScoreOutcome::Incorrect);
        assert_eq!(score_answer(&q, "maybe", &t), ScoreOutcome::Unparseable);
    }

    #[test]
    fn range_grammar() {
        assert_eq!(parse_age_range("0-3 years"), Some((0.0, 3.0)));
        assert_eq!(parse_age_range("between 2 and 5 years"), Some((2.0, 5.0)));
        assert_eq!(parse_age_range("10 to 18"), Some((10.0, 18.0)));
        assert_eq!(parse_age_range("around 7 years"), Some((7.0, 7.0)));
        assert_eq!(parse_age_range("2.5"), Some((2.5, 2.5)));
        assert_eq!(parse_age_range("no idea"), None);
    }

    #[test]
    fn calibrated_examples() {
        // tol = min(2, max(0.5, 0.5 * 2.7)) = 1.35
        assert!(calibrated_onset_score((0.0, 3.0), (0.0, 2.7)));
        assert!(calibrated_onset_score((5.0, 5.0), (5.0, 5.0)));
        assert!(!calibrated_onset_score((30.0, 40.0), (1.0, 2.0)));
    }

    #[test]
    fn tolerance_sweep_matches_hand_arithmetic() {
        for (width, expected) in [(0.0, 0.5), (1.0, 0.5), (3.0, 1.5), (4.0, 2.0), (10.0, 2.0)] {
            assert_eq!(onset_tolerance((10.0, 10.0 + width)), expected, "width {width}");
        }
    }

    #[test]
    fn era_keyword_gated_by_width() {
        let t = OnsetBinTable::default();
        // Gold (0, 2.7): tol 1.35. "infancy" is 1y wide and overlaps.
        assert_eq!(
            calibrated_onset_score_text("in infancy", (0.0, 2.7), &t),
            ScoreOutcome::Correct
        );
        // "adulthood" is 47y wide: incompatible with a narrow gold.
        assert_eq!(
            calibrated_onset_score_text("in adulthood", (0.0, 2.7), &t),
            ScoreOutcome::Incorrect
        );
    }

    #[test]
    fn ordering_scored_after_normalization() {
        let mut q = mcq("", vec![]);
        q.options = None;
        q.gold = GoldAnswer::Ordering(vec![
            "diagnosis".into(),
            "loss of ambulation".into(),
            "cardiomyopathy".into(),
        ]);
        let t = OnsetBinTable::default();
        assert_eq!(
            score_answer(&q, "diagnosis -> loss of ambulation -> cardiomyopathy", &t),
            ScoreOutcome::Correct
        );
        assert_eq!(
            score_answer(&q, "1. Diagnosis\n2. Loss of ambulation\n3. Cardiomyopathy", &t),
            ScoreOutcome::Correct
        );
        assert_eq!(
            score_answer(&q, "cardiomyopathy, diagnosis, loss of ambulation", &t),
            ScoreOutcome::Incorrect
        );
    }

    #[test]
    fn list_requires_every_gold_item() {
        let mut q = mcq("", vec![]);
        q.options = None;
        q.gold = GoldAnswer::List(vec!["joint contractures".into(), "gowers sign".into()]);
        let t = OnsetBinTable::default();
        assert_eq!(
            score_answer(&q, "Gowers sign and joint contractures are typical.", &t),
            ScoreOutcome::Correct
        );
        assert_eq!(score_answer(&q, "only gowers sign", &t), ScoreOutcome::Incorrect);
    }

    proptest! {
        /// Widening the gold range never flips a correct prediction to
        /// incorrect.
        #[test]
        fn widening_gold_preserves_correct(
            plo in 0.0f64..100.0, pw in 0.0f64..20.0,
            glo in 0.0f64..100.0, gw in 0.0f64..20.0,
            extend_lo in 0.0f64..10.0, extend_hi in 0.0f64..10.0,
        ) {
            let predicted = (plo, plo + pw);
            let gold = (glo, glo + gw);
            if calibrated_onset_score(predicted, gold) {
                let wider = ((glo - extend_lo).max(0.0), glo + gw + extend_hi);
                prop_assert!(calibrated_onset_score(predicted, wider));
            }
        }
    }
}
