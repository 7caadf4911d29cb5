//! Cost-matrix files.
//!
//! JSON: `{"n": 4, "entries": [...n*n row-major reals...], "symmetric": true}`
//! with `symmetric` optional. CSV: `n` rows of `n` comma-separated reals.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tsp::CostMatrix;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostMatrixFile {
    pub n: usize,
    pub entries: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symmetric: Option<bool>,
}

impl CostMatrixFile {
    pub fn into_matrix(self) -> Result<CostMatrix> {
        let m = CostMatrix::new(self.n, self.entries)?;
        if let Some(declared) = self.symmetric {
            if declared != m.is_symmetric() {
                return Err(Error::InvalidMatrix(format!(
                    "declared symmetric = {declared} but matrix symmetric = {}",
                    m.is_symmetric()
                )));
            }
        }
        Ok(m)
    }
}

impl From<&CostMatrix> for CostMatrixFile {
    fn from(m: &CostMatrix) -> Self {
        Self {
            n: m.n(),
            entries: m.entries().to_vec(),
            symmetric: Some(m.is_symmetric()),
        }
    }
}

pub fn parse_json(text: &str) -> Result<CostMatrix> {
    let file: CostMatrixFile = serde_json::from_str(text)?;
    file.into_matrix()
}

pub fn parse_csv(text: &str) -> Result<CostMatrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (r, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Parse(e.to_string()))?;
        let row = record
            .iter()
            .map(|cell| {
                cell.parse::<f64>()
                    .map_err(|e| Error::Parse(format!("row {}: {cell:?}: {e}", r + 1)))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    CostMatrix::from_rows(&rows)
}

/// Parses either format; JSON is recognized by a leading `{`.
pub fn parse(text: &str) -> Result<CostMatrix> {
    if text.trim_start().starts_with('{') {
        parse_json(text)
    } else {
        parse_csv(text)
    }
}

pub fn load(path: &Path) -> Result<CostMatrix> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse(&text)
}

pub fn to_json(m: &CostMatrix) -> String {
    serde_json::to_string_pretty(&CostMatrixFile::from(m)).expect("serializable")
}
