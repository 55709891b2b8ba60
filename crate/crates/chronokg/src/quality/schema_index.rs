//! Reference-schema snapshot: known edges and the entity-type vocabulary.

use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use crate::consensus::normalize_entity;
use crate::error::{Error, Result};

/// Edge index loaded from a tab-separated snapshot with columns
/// `head_id  head_type  relation  tail_id  tail_type`. Lines starting with
/// `#` are comments. Lookups are exact after id normalization.
#[derive(Debug, Default, Clone)]
pub struct SchemaIndex {
    edges: HashSet<(String, String, String)>,
    entity_types: BTreeMap<String, String>,
}

impl SchemaIndex {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::parse(path, None, format!("cannot read snapshot: {e}")))?;
        let mut index = SchemaIndex::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 5 {
                return Err(Error::parse(
                    path,
                    Some(lineno + 1),
                    format!("expected 5 tab-separated columns, found {}", cols.len()),
                ));
            }
            index.insert(cols[0], cols[1], cols[2], cols[3], cols[4]);
        }
        Ok(index)
    }

    pub fn insert(&mut self, head: &str, head_type: &str, relation: &str, tail: &str, tail_type: &str) {
        let h = normalize_entity(head).key;
        let t = normalize_entity(tail).key;
        self.entity_types.entry(h.clone()).or_insert_with(|| head_type.to_string());
        self.entity_types.entry(t.clone()).or_insert_with(|| tail_type.to_string());
        self.edges.insert((h, relation.to_string(), t));
    }

    pub fn has_edge(&self, head: &str, relation: &str, tail: &str) -> bool {
        let h = normalize_entity(head).key;
        let t = normalize_entity(tail).key;
        self.edges.contains(&(h, relation.to_string(), t))
    }

    /// Type label from the snapshot vocabulary, if the entity is known.
    pub fn type_of(&self, entity: &str) -> Option<&str> {
        self.entity_types
            .get(&normalize_entity(entity).key)
            .map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// All (head, relation, tail) edges, sorted; used by the static
    /// benchmark generators.
    pub fn edges_sorted(&self) -> Vec<(String, String, String)> {
        let mut all: Vec<_> = self.edges.iter().cloned().collect();
        all.sort();
        all
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn loads_and_looks_up_after_normalization() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(file, "# reference snapshot").unwrap();
        writeln!(
            file,
            "duchenne muscular dystrophy\tdisease\tdisease_phenotype_positive\tcardiomyopathy\tphenotype"
        )
        .unwrap();
        let index = SchemaIndex::load(file.path()).unwrap();
        assert_eq!(index.len(), 1);
        assert!(index.has_edge(
            "Duchenne Muscular Dystrophy (DMD)",
            "disease_phenotype_positive",
            "Cardiomyopathy"
        ));
        assert!(!index.has_edge("duchenne muscular dystrophy", "indication", "cardiomyopathy"));
        assert_eq!(index.type_of("CARDIOMYOPATHY"), Some("phenotype"));
    }

    #[test]
    fn malformed_rows_error_with_line_number() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(file, "only\tthree\tcolumns").unwrap();
        match SchemaIndex::load(file.path()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, Some(1)),
            other => panic!("expected parse error, got {other:?}"),
        }
    }
}
