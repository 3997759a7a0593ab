//! Feature matrix exchange: CSV (one row per node) and a JSON envelope.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::graph6::parse_graph6;
use crate::linalg::Matrix;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureEnvelope {
    pub n: usize,
    pub d: usize,
    pub data: Vec<Vec<f64>>,
}

impl FeatureEnvelope {
    pub fn from_matrix(m: &Matrix) -> Self {
        Self {
            n: m.rows(),
            d: m.cols(),
            data: (0..m.rows()).map(|i| m.row(i).to_vec()).collect(),
        }
    }

    pub fn into_matrix(self) -> Result<Matrix> {
        if self.data.len() != self.n {
            return Err(Error::Features(format!(
                "envelope says n = {} but has {} rows",
                self.n,
                self.data.len()
            )));
        }
        if let Some(i) = self.data.iter().position(|r| r.len() != self.d) {
            return Err(Error::Features(format!(
                "row {i} has {} entries, expected d = {}",
                self.data[i].len(),
                self.d
            )));
        }
        let flat = self.data.into_iter().flatten().collect();
        Matrix::from_row_major(self.n, self.d, flat)
    }
}

/// Headerless CSV, one row per node. Blank lines are skipped.
pub fn features_from_csv(text: &str) -> Result<Matrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|f| {
                f.parse::<f64>()
                    .map_err(|_| Error::Features(format!("row {i}: {f:?} is not a number")))
            })
            .collect::<Result<Vec<f64>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(Error::Features(format!(
                    "row {i} has {} columns, row 0 has {}",
                    row.len(),
                    first.len()
                )));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Features("no rows".into()));
    }
    if rows.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::Features("non-finite entry".into()));
    }
    Matrix::from_rows(&rows)
}

pub fn features_to_csv(m: &Matrix) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for i in 0..m.rows() {
        w.write_record(m.row(i).iter().map(|x| format!("{x:?}")))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("ascii"))
}

pub fn features_from_json(text: &str) -> Result<Matrix> {
    let env: FeatureEnvelope = serde_json::from_str(text)?;
    env.into_matrix()
}

pub fn features_to_json(m: &Matrix) -> Result<String> {
    Ok(serde_json::to_string(&FeatureEnvelope::from_matrix(m))?)
}

/// Reads a feature file, choosing JSON for a `.json` extension and CSV
/// otherwise.
pub fn read_features(path: &Path) -> Result<Matrix> {
    let text = std::fs::read_to_string(path)?;
    if path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"))
    {
        features_from_json(&text)
    } else {
        features_from_csv(&text)
    }
}

/// Reads a graph file: graph6 if the first non-empty line parses as graph6,
/// an edge list otherwise.
pub fn read_graph(path: &Path) -> Result<Graph> {
    let text = std::fs::read_to_string(path)?;
    parse_graph_text(&text)
}

pub fn parse_graph_text(text: &str) -> Result<Graph> {
    let first = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("");
    match parse_graph6(first.trim().as_bytes()) {
        Ok(g) => Ok(g),
        Err(g6_err) => Graph::parse_edge_list(text).map_err(|el_err| {
            Error::InvalidGraph(format!(
                "neither graph6 ({g6_err}) nor edge list ({el_err})"
            ))
        }),
    }
}

/// Readout vector as a JSON array.
pub fn vector_to_json(v: &[f64]) -> Result<String> {
    Ok(serde_json::to_string(v)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let m = Matrix::from_rows(&[vec![1.0, -0.5], vec![1e-300, 3.25]]).unwrap();
        let text = features_to_csv(&m).unwrap();
        assert_eq!(features_from_csv(&text).unwrap(), m);
    }

    #[test]
    fn csv_errors() {
        assert!(features_from_csv("").is_err());
        assert!(features_from_csv("1,2\n3\n").is_err());
        assert!(features_from_csv("1,x\n").is_err());
        assert!(features_from_csv("1,NaN\n").is_err());
    }

    #[test]
    fn json_round_trip_and_validation() {
        let m = Matrix::from_rows(&[vec![1.0], vec![2.0], vec![3.0]]).unwrap();
        let text = features_to_json(&m).unwrap();
        assert_eq!(text, r#"{"n":3,"d":1,"data":[[1.0],[2.0],[3.0]]}"#);
        assert_eq!(features_from_json(&text).unwrap(), m);
        assert!(features_from_json(r#"{"n":2,"d":1,"data":[[1.0]]}"#).is_err());
        assert!(features_from_json(r#"{"n":1,"d":2,"data":[[1.0]]}"#).is_err());
    }

    #[test]
    fn graph_text_formats() {
        assert_eq!(parse_graph_text("Bw\n").unwrap().edge_count(), 3);
        let g = parse_graph_text("3\n0 1\n1 2\n").unwrap_or_else(|e| panic!("{e}"));
        assert_eq!(g.edge_count(), 2);
    }
}
