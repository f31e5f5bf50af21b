//! The JSON matrix-set format: every entry is an `[re, im]` pair.
//!
//! ```json
//! {
//!   "version": 1,
//!   "dim": 2,
//!   "matrices": [
//!     { "name": "A", "entries": [[[0, 0], [1, 0]], [[0, 0], [0, 0]]] }
//!   ],
//!   "metadata": { "kind": "lie", "labels": ["nilpotent"] }
//! }
//! ```

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::closure::AlgebraKind;
use crate::error::{Error, Result};
use crate::numat::Matrix;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub labels: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<AlgebraKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NamedMatrix {
    pub name: String,
    pub entries: Vec<Vec<[f64; 2]>>,
}

/// On-disk layout.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixSetFile {
    pub version: u32,
    pub dim: usize,
    pub matrices: Vec<NamedMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<Metadata>,
}

/// A validated matrix set.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixSet {
    pub dim: usize,
    pub names: Vec<String>,
    pub matrices: Vec<Matrix>,
    pub metadata: Option<Metadata>,
}

impl MatrixSet {
    pub fn new(names: Vec<String>, matrices: Vec<Matrix>) -> Result<Self> {
        let dim = crate::numat::common_dim(&matrices)?;
        if names.len() != matrices.len() {
            return Err(Error::InvalidConfig("one name per matrix required".into()));
        }
        Ok(Self {
            dim,
            names,
            matrices,
            metadata: None,
        })
    }

    /// Names `M0`, `M1`, ...
    pub fn from_matrices(matrices: Vec<Matrix>) -> Result<Self> {
        let names = (0..matrices.len()).map(|i| format!("M{i}")).collect();
        Self::new(names, matrices)
    }

    pub fn with_metadata(mut self, metadata: Metadata) -> Self {
        self.metadata = Some(metadata);
        self
    }

    pub fn get(&self, name: &str) -> Result<&Matrix> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| &self.matrices[i])
            .ok_or_else(|| Error::UnknownMatrix(name.to_owned()))
    }

    pub fn to_file(&self) -> MatrixSetFile {
        MatrixSetFile {
            version: FORMAT_VERSION,
            dim: self.dim,
            matrices: self
                .names
                .iter()
                .zip(&self.matrices)
                .map(|(name, m)| NamedMatrix {
                    name: name.clone(),
                    entries: m.to_pairs(),
                })
                .collect(),
            metadata: self.metadata.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("matrix sets serialize")
    }
}

/// Parses and validates a matrix set; `path` only labels errors.
pub fn parse_matrix_set(text: &str, path: &Path) -> Result<MatrixSet> {
    let file: MatrixSetFile = serde_json::from_str(text).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    validate(file, path)
}

fn validate(file: MatrixSetFile, path: &Path) -> Result<MatrixSet> {
    let invalid = |name: &str, message: String| Error::InvalidMatrixSet {
        path: path.to_path_buf(),
        name: name.to_owned(),
        message,
    };
    if file.version != FORMAT_VERSION {
        return Err(invalid("", format!("unsupported version {}", file.version)));
    }
    if file.dim == 0 {
        return Err(invalid("", "dim must be positive".into()));
    }
    if file.matrices.is_empty() {
        return Err(invalid("", "matrix list is empty".into()));
    }
    let mut seen = HashSet::new();
    let mut names = Vec::with_capacity(file.matrices.len());
    let mut matrices = Vec::with_capacity(file.matrices.len());
    for nm in file.matrices {
        if !seen.insert(nm.name.clone()) {
            return Err(invalid(&nm.name, "duplicate name".into()));
        }
        if nm.entries.len() != file.dim || nm.entries.iter().any(|r| r.len() != file.dim) {
            return Err(invalid(&nm.name, format!("expected a {0}x{0} array", file.dim)));
        }
        let m = Matrix::from_pairs(&nm.entries).map_err(|e| invalid(&nm.name, e.to_string()))?;
        names.push(nm.name);
        matrices.push(m);
    }
    Ok(MatrixSet {
        dim: file.dim,
        names,
        matrices,
        metadata: file.metadata,
    })
}

pub fn load_matrix_set(path: impl AsRef<Path>) -> Result<MatrixSet> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_matrix_set(&text, path)
}

pub fn save_matrix_set(path: impl AsRef<Path>, set: &MatrixSet) -> Result<()> {
    write_text(path.as_ref(), &(set.to_json() + "\n"))
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: PathBuf::from(path),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{nilpotent_span_example, t_stable_example};

    fn p() -> &'static Path {
        Path::new("test.json")
    }

    #[test]
    fn round_trip_bits() {
        let (a, b) = t_stable_example();
        let odd = Matrix::from_pairs(&[
            vec![[0.1, -1e-300], [std::f64::consts::PI, -0.0]],
            vec![[1.0 / 3.0, 2.5e17], [0.0, 0.0]],
        ])
        .unwrap();
        let set = MatrixSet::new(vec!["A".into(), "B".into()], vec![a, b]).unwrap();
        let back = parse_matrix_set(&set.to_json(), p()).unwrap();
        assert_eq!(back, set);
        let set = MatrixSet::from_matrices(vec![odd.clone()]).unwrap();
        let back = parse_matrix_set(&set.to_json(), p()).unwrap();
        for (x, y) in back.matrices[0].inner().iter().zip(odd.inner().iter()) {
            assert_eq!(x.re.to_bits(), y.re.to_bits());
            assert_eq!(x.im.to_bits(), y.im.to_bits());
        }
    }

    #[test]
    fn errors_name_the_problem() {
        let err = parse_matrix_set("{\"version\": 1,\n \"dim\": 2,\n \"matrices\": [}", p()).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other}"),
        }
        let empty = r#"{"version": 1, "dim": 2, "matrices": []}"#;
        assert!(matches!(
            parse_matrix_set(empty, p()),
            Err(Error::InvalidMatrixSet { .. })
        ));
        let wrong = r#"{"version": 1, "dim": 2, "matrices": [{"name": "X", "entries": [[[1, 0]]]}]}"#;
        match parse_matrix_set(wrong, p()) {
            Err(Error::InvalidMatrixSet { name, .. }) => assert_eq!(name, "X"),
            other => panic!("unexpected {other:?}"),
        }
        let (a, _) = nilpotent_span_example();
        let dup = MatrixSet::new(vec!["A".into(), "A".into()], vec![a.clone(), a]).unwrap();
        assert!(parse_matrix_set(&dup.to_json(), p()).is_err());
    }
}
