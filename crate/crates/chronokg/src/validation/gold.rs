//! Gold-standard loaders. Categorical onset bins are converted to numeric
//! year ranges through the clinical-era table at load time.

use serde::Deserialize;
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::OnsetBinTable;
use crate::validation::{normalize_disease_key, GoldRecord, GoldSource};

/// Numeric range for a categorical onset label, via the era table. Accepts
/// era names and the common "N-M" / "N" numeric forms.
pub fn bin_to_range(label: &str, table: &OnsetBinTable) -> Option<(f64, f64)> {
    let norm = label.trim().to_lowercase();
    if let Some(era) = table.clinical_eras.iter().find(|e| e.name == norm) {
        return Some((era.min, era.max));
    }
    if let Some((lo, hi)) = norm.split_once('-').or_else(|| norm.split_once("–")) {
        if let (Ok(a), Ok(b)) = (lo.trim().parse::<f64>(), hi.trim().parse::<f64>()) {
            return Some((a, b));
        }
    }
    norm.parse::<f64>().ok().map(|a| (a, a))
}

fn load_delimited(
    path: &Path,
    source: GoldSource,
    delimiter: char,
    table: &OnsetBinTable,
) -> Result<Vec<GoldRecord>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::parse(path, None, format!("cannot read gold file: {e}")))?;
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split(delimiter).map(str::trim).collect();
        if cols.len() < 2 {
            return Err(Error::parse(
                path,
                Some(lineno + 1),
                "expected at least (disease, onset) columns",
            ));
        }
        let (onset_min, onset_max) = bin_to_range(cols[1], table).ok_or_else(|| {
            Error::parse(path, Some(lineno + 1), format!("unparseable onset '{}'", cols[1]))
        })?;
        if !(0.0 <= onset_min && onset_min <= onset_max && onset_max <= 120.0) {
            return Err(Error::parse(
                path,
                Some(lineno + 1),
                format!("onset ({onset_min}, {onset_max}) outside 0 <= min <= max <= 120"),
            ));
        }
        out.push(GoldRecord {
            source,
            disease_name: cols[0].to_string(),
            normalized_key: normalize_disease_key(cols[0]),
            onset_min,
            onset_max,
        });
    }
    Ok(out)
}

/// Orphadata-style CSV: `disease,onset_bin`.
pub fn load_orphadata(path: &Path, table: &OnsetBinTable) -> Result<Vec<GoldRecord>> {
    load_delimited(path, GoldSource::Orphadata, ',', table)
}

/// HPOA-style TSV: `disease<TAB>onset_bin`.
pub fn load_hpoa(path: &Path, table: &OnsetBinTable) -> Result<Vec<GoldRecord>> {
    load_delimited(path, GoldSource::Hpoa, '\t', table)
}

/// GeneReviews-style CSV, same shape as Orphadata.
pub fn load_genereviews(path: &Path, table: &OnsetBinTable) -> Result<Vec<GoldRecord>> {
    load_delimited(path, GoldSource::GeneReviews, ',', table)
}

/// One patient case in a Phenopackets-style JSON file.
#[derive(Debug, Clone, Deserialize)]
pub struct PhenopacketCase {
    pub disease: String,
    pub phenotype: String,
    pub onset_age: f64,
}

/// Case files: a JSON array of `{disease, phenotype, onset_age}` records.
pub fn load_phenopacket_cases(path: &Path) -> Result<Vec<PhenopacketCase>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::parse(path, None, format!("cannot read case file: {e}")))?;
    serde_json::from_str(&text).map_err(|e| Error::parse(path, None, e.to_string()))
}

/// Collapse cases to disease-level gold records (min..max over case ages).
pub fn phenopackets_to_gold(cases: &[PhenopacketCase]) -> Vec<GoldRecord> {
    use std::collections::BTreeMap;
    let mut by_disease: BTreeMap<String, (String, f64, f64)> = BTreeMap::new();
    for case in cases {
        let key = normalize_disease_key(&case.disease);
        let entry = by_disease
            .entry(key)
            .or_insert((case.disease.clone(), f64::INFINITY, f64::NEG_INFINITY));
        entry.1 = entry.1.min(case.onset_age);
        entry.2 = entry.2.max(case.onset_age);
    }
    by_disease
        .into_iter()
        .map(|(key, (name, lo, hi))| GoldRecord {
            source: GoldSource::Phenopackets,
            disease_name: name,
            normalized_key: key,
            onset_min: lo,
            onset_max: hi,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn bin_labels_convert_via_era_table() {
        let t = OnsetBinTable::default();
        assert_eq!(bin_to_range("childhood", &t), Some((1.0, 11.0)));
        assert_eq!(bin_to_range("Adolescence", &t), Some((10.0, 18.0)));
        assert_eq!(bin_to_range("1-5", &t), Some((1.0, 5.0)));
        assert_eq!(bin_to_range("7", &t), Some((7.0, 7.0)));
        assert_eq!(bin_to_range("whenever", &t), None);
    }

    #[test]
    fn orphadata_csv_loads() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "# disease,onset").unwrap();
        writeln!(f, "Duchenne Muscular Dystrophy,early childhood").unwrap();
        writeln!(f, "Wilson Disease,18-40").unwrap();
        let records = load_orphadata(f.path(), &OnsetBinTable::default()).unwrap();
        assert_eq!(records.len(), 2);
        assert_eq!(records[0].onset_min, 1.0);
        assert_eq!(records[0].onset_max, 5.0);
        assert_eq!(records[1].normalized_key, "wilson");
    }

    #[test]
    fn phenopacket_cases_collapse_to_min_max() {
        let cases = vec![
            PhenopacketCase {
                disease: "Chitayat syndrome".into(),
                phenotype: "proptosis".into(),
                onset_age: 0.0,
            },
            PhenopacketCase {
                disease: "Chitayat syndrome".into(),
                phenotype: "proptosis".into(),
                onset_age: 2.7,
            },
        ];
        let gold = phenopackets_to_gold(&cases);
        assert_eq!(gold.len(), 1);
        assert_eq!((gold[0].onset_min, gold[0].onset_max), (0.0, 2.7));
    }
}
