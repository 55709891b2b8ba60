//! Age-bin tables: fine onset bins, their coarse collapse, and the fixed
//! clinical-era lookup used to translate qualitative timing language into
//! numeric year ranges.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::triple::MAX_AGE_YEARS;

/// A named age interval in years.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgeBin {
    pub name: String,
    pub min: f64,
    pub max: f64,
}

impl AgeBin {
    fn new(name: &str, min: f64, max: f64) -> Self {
        AgeBin { name: name.into(), min, max }
    }
}

/// The three lookup tables over the age axis.
///
/// Fine bins are contiguous and half-open (`[min, max)`, last bin closed at
/// 120) so every age maps to exactly one bin. Clinical eras overlap by
/// construction (childhood 1–11 vs adolescence 10–18); era lookup resolves
/// overlap by maximal intersection with ties going to the earlier era.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OnsetBinTable {
    pub fine_bins: Vec<AgeBin>,
    /// Parallel to `fine_bins`: coarse bin each fine bin collapses into.
    pub fine_to_coarse: Vec<(String, String)>,
    pub coarse_bins: Vec<String>,
    pub clinical_eras: Vec<AgeBin>,
}

impl Default for OnsetBinTable {
    fn default() -> Self {
        OnsetBinTable {
            fine_bins: vec![
                AgeBin::new("neonatal", 0.0, 0.08),
                AgeBin::new("infantile", 0.08, 1.0),
                AgeBin::new("early_childhood", 1.0, 5.0),
                AgeBin::new("childhood", 5.0, 10.0),
                AgeBin::new("juvenile", 10.0, 16.0),
                AgeBin::new("young_adult", 16.0, 40.0),
                AgeBin::new("adult", 40.0, 60.0),
                AgeBin::new("late_onset", 60.0, 120.0),
            ],
            fine_to_coarse: vec![
                ("neonatal".into(), "antenatal-infantile".into()),
                ("infantile".into(), "antenatal-infantile".into()),
                ("early_childhood".into(), "childhood".into()),
                ("childhood".into(), "childhood".into()),
                ("juvenile".into(), "juvenile".into()),
                ("young_adult".into(), "adult".into()),
                ("adult".into(), "adult".into()),
                ("late_onset".into(), "late-onset".into()),
            ],
            coarse_bins: vec![
                "antenatal-infantile".into(),
                "childhood".into(),
                "juvenile".into(),
                "adult".into(),
                "late-onset".into(),
            ],
            clinical_eras: vec![
                AgeBin::new("prenatal", 0.0, 0.0),
                AgeBin::new("infancy", 0.0, 1.0),
                AgeBin::new("early childhood", 1.0, 5.0),
                AgeBin::new("childhood", 1.0, 11.0),
                AgeBin::new("adolescence", 10.0, 18.0),
                AgeBin::new("adulthood", 18.0, 65.0),
                AgeBin::new("older adulthood", 65.0, 120.0),
            ],
        }
    }
}

impl OnsetBinTable {
    /// Structural checks: fine bins contiguous over [0, 120], collapse map
    /// total and surjective onto the coarse bins.
    pub fn validate(&self) -> Result<()> {
        if self.fine_bins.is_empty() {
            return Err(Error::domain("fine bin table is empty"));
        }
        if self.fine_bins[0].min != 0.0
            || self.fine_bins.last().unwrap().max != MAX_AGE_YEARS
        {
            return Err(Error::domain("fine bins must cover [0, 120]"));
        }
        for pair in self.fine_bins.windows(2) {
            if (pair[0].max - pair[1].min).abs() > 1e-12 {
                return Err(Error::domain(format!(
                    "fine bins '{}' and '{}' are not contiguous",
                    pair[0].name, pair[1].name
                )));
            }
        }
        for bin in &self.fine_bins {
            if self.coarse_of(&bin.name).is_none() {
                return Err(Error::domain(format!(
                    "fine bin '{}' has no coarse mapping",
                    bin.name
                )));
            }
        }
        for coarse in &self.coarse_bins {
            if !self.fine_to_coarse.iter().any(|(_, c)| c == coarse) {
                return Err(Error::domain(format!(
                    "coarse bin '{coarse}' is not the image of any fine bin"
                )));
            }
        }
        Ok(())
    }

    fn coarse_of(&self, fine: &str) -> Option<&str> {
        self.fine_to_coarse
            .iter()
            .find(|(f, _)| f == fine)
            .map(|(_, c)| c.as_str())
    }

    /// Index of a clinical era by name, used for adjacency checks.
    pub fn era_index(&self, name: &str) -> Option<usize> {
        self.clinical_eras.iter().position(|e| e.name == name)
    }
}

fn check_range(min_y: f64, max_y: f64) -> Result<()> {
    if !(min_y.is_finite() && max_y.is_finite()) {
        return Err(Error::domain("age range must be finite"));
    }
    if min_y < 0.0 || max_y > MAX_AGE_YEARS || min_y > max_y {
        return Err(Error::domain(format!(
            "age range ({min_y}, {max_y}) outside 0 <= min <= max <= {MAX_AGE_YEARS}"
        )));
    }
    Ok(())
}

/// Clinical era whose range has maximal overlap with `[min_y, max_y]`.
///
/// Intervals are closed; a point touch counts as overlap of length zero,
/// which still beats no intersection. Ties break toward the earlier era.
pub fn era_of_range(min_y: f64, max_y: f64, table: &OnsetBinTable) -> Result<&str> {
    check_range(min_y, max_y)?;
    let mut best: Option<(usize, f64)> = None;
    for (idx, era) in table.clinical_eras.iter().enumerate() {
        let lo = min_y.max(era.min);
        let hi = max_y.min(era.max);
        if lo > hi {
            continue;
        }
        let len = hi - lo;
        match best {
            Some((_, best_len)) if len <= best_len => {}
            _ => best = Some((idx, len)),
        }
    }
    best.map(|(idx, _)| table.clinical_eras[idx].name.as_str())
        .ok_or_else(|| Error::domain(format!("no era intersects ({min_y}, {max_y})")))
}

/// Fine onset bin containing the midpoint of `[min_y, max_y]`.
pub fn range_to_fine_bin(min_y: f64, max_y: f64, table: &OnsetBinTable) -> Result<&str> {
    check_range(min_y, max_y)?;
    let mid = (min_y + max_y) / 2.0;
    let last = table.fine_bins.len() - 1;
    for (idx, bin) in table.fine_bins.iter().enumerate() {
        let contains = if idx == last {
            mid >= bin.min && mid <= bin.max
        } else {
            mid >= bin.min && mid < bin.max
        };
        if contains {
            return Ok(bin.name.as_str());
        }
    }
    Err(Error::domain(format!("midpoint {mid} outside the fine bin table")))
}

/// Coarse category a fine bin collapses into.
pub fn collapse_bin<'t>(fine_bin: &str, table: &'t OnsetBinTable) -> Result<&'t str> {
    table
        .coarse_of(fine_bin)
        .ok_or_else(|| Error::domain(format!("unknown fine bin '{fine_bin}'")))
}

/// True when two era names sit next to each other in the era list.
pub fn era_adjacent(a: &str, b: &str, table: &OnsetBinTable) -> bool {
    match (table.era_index(a), table.era_index(b)) {
        (Some(i), Some(j)) => i.abs_diff(j) == 1,
        _ => false,
    }
}
