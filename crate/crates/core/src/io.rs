//! JSON file formats.
//!
//! A matrix file is `{"p": 3, "n": 2, "entries": [["1", "1/3"], ["0", "1"]]}`;
//! a generator set replaces `entries` with `"gens": [matrix, ...]`, where each
//! matrix is either a bare row list or an object with `entries`. Affine
//! elements use `{"p": 5, "a": "2", "b": "3"}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::QMatrix;
use crate::qp::ExactScalar;

type Rows = Vec<Vec<ExactScalar>>;

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum MatrixValue {
    Rows(Rows),
    Object { entries: Rows },
}

impl MatrixValue {
    fn rows(self) -> Rows {
        match self {
            MatrixValue::Rows(r) | MatrixValue::Object { entries: r } => r,
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
pub struct InputFile {
    pub p: Option<u64>,
    pub n: Option<usize>,
    entries: Option<Rows>,
    gens: Option<Vec<MatrixValue>>,
    pub a: Option<ExactScalar>,
    pub b: Option<ExactScalar>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MatrixFile {
    pub p: u64,
    pub n: usize,
    pub entries: Rows,
}

impl MatrixFile {
    pub fn new(p: u64, a: &QMatrix) -> Self {
        MatrixFile { p, n: a.rows(), entries: a.to_rows() }
    }
}

pub fn parse_input(text: &str) -> Result<InputFile> {
    serde_json::from_str(text).map_err(|e| Error::Input(format!("bad input JSON: {e}")))
}

impl InputFile {
    /// The prime from the file, reconciled with one given on the command line.
    pub fn prime(&self, given: Option<u64>) -> Result<u64> {
        match (self.p, given) {
            (Some(a), Some(b)) if a != b => Err(Error::Input(format!("file is over p = {a} but p = {b} was requested"))),
            (Some(p), _) | (None, Some(p)) => Ok(p),
            (None, None) => Err(Error::Input("no prime given (use -p or a \"p\" field)".into())),
        }
    }

    fn to_matrix(&self, rows: Rows) -> Result<QMatrix> {
        let a = QMatrix::from_rows(rows)?;
        if !a.is_square() {
            return Err(Error::DimensionMismatch(format!("expected a square matrix, got {}x{}", a.rows(), a.cols())));
        }
        if let Some(n) = self.n {
            if a.rows() != n {
                return Err(Error::DimensionMismatch(format!("\"n\" is {n} but the matrix is {}x{}", a.rows(), a.rows())));
            }
        }
        Ok(a)
    }

    pub fn matrix(&self) -> Result<QMatrix> {
        let rows = self.entries.clone().ok_or_else(|| Error::Input("missing \"entries\"".into()))?;
        self.to_matrix(rows)
    }

    /// `gens`, or the single matrix in `entries`.
    pub fn generators(&self) -> Result<Vec<QMatrix>> {
        match &self.gens {
            Some(gens) => gens.iter().map(|g| self.to_matrix(g.clone().rows())).collect(),
            None => Ok(vec![self.matrix()?]),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_matrix_and_gens() {
        let f = parse_input(r#"{"p": 3, "n": 2, "entries": [["1", "1/3"], [0, "-2"]]}"#).unwrap();
        assert_eq!(f.matrix().unwrap(), QMatrix::parse_rows(&[&["1", "1/3"], &["0", "-2"]]));
        assert_eq!(f.prime(None).unwrap(), 3);
        assert!(f.prime(Some(5)).is_err());

        let f = parse_input(r#"{"p": 3, "gens": [[["1","1"],["0","1"]], {"entries": [["1","0"],["1","1"]]}]}"#).unwrap();
        assert_eq!(f.generators().unwrap().len(), 2);

        let f = parse_input(r#"{"n": 3, "entries": [["1","0"],["0","1"]]}"#).unwrap();
        assert!(matches!(f.matrix(), Err(Error::DimensionMismatch(_))));
        assert!(parse_input(r#"{"entries": [["1/0"]]}"#).is_err());
    }

    #[test]
    fn writes_matrix_file() {
        let a = QMatrix::parse_rows(&[&["1/2", "0"], &["0", "3"]]);
        let v = serde_json::to_value(MatrixFile::new(5, &a)).unwrap();
        assert_eq!(v, serde_json::json!({"p": 5, "n": 2, "entries": [["1/2", "0"], ["0", "3"]]}));
    }
}
