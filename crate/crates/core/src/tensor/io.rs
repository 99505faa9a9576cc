//! JSON matrix files:
//! `{"rows": n, "cols": m, "re": [...], "im": [...], "factors": [{"label": s, "dim": k}, ...]}`
//! with row-major `re`/`im`. `factors` may be omitted for plain matrices.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::matrix::ComplexMatrix;
use super::operator::DensityOperator;
use super::space::{Factor, HilbertFactorization};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub rows: usize,
    pub cols: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub factors: Vec<Factor>,
}

impl MatrixFile {
    pub fn from_matrix(m: &ComplexMatrix, space: Option<&HilbertFactorization>) -> Self {
        Self {
            rows: m.rows(),
            cols: m.cols(),
            re: m.as_slice().iter().map(|z| z.re).collect(),
            im: m.as_slice().iter().map(|z| z.im).collect(),
            factors: space.map(|s| s.factors().to_vec()).unwrap_or_default(),
        }
    }

    pub fn from_density(rho: &DensityOperator) -> Self {
        Self::from_matrix(rho.matrix(), Some(rho.space()))
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        let n = self.rows * self.cols;
        if self.re.len() != n || self.im.len() != n {
            return Err(Error::arg(format!(
                "matrix file declares {}x{} but has {} real and {} imaginary entries",
                self.rows,
                self.cols,
                self.re.len(),
                self.im.len()
            )));
        }
        let data = self
            .re
            .iter()
            .zip(&self.im)
            .map(|(&re, &im)| Complex64::new(re, im))
            .collect();
        ComplexMatrix::from_row_major(self.rows, self.cols, data)
    }

    pub fn space(&self) -> Result<Option<HilbertFactorization>> {
        if self.factors.is_empty() {
            return Ok(None);
        }
        let space = HilbertFactorization::new(self.factors.clone())?;
        if space.total_dim() != self.rows {
            return Err(Error::arg(format!(
                "factors {space} have total dimension {} but the matrix has {} rows",
                space.total_dim(),
                self.rows
            )));
        }
        Ok(Some(space))
    }

    /// Reads a density operator; a missing factor list means `A (x) B` with
    /// equal dimensions.
    pub fn to_density(&self) -> Result<DensityOperator> {
        let m = self.to_matrix()?;
        let space = match self.space()? {
            Some(s) => s,
            None => {
                let d = (self.rows as f64).sqrt().round() as usize;
                if d * d != self.rows {
                    return Err(Error::arg(
                        "matrix file without factors must have a square number of rows",
                    ));
                }
                HilbertFactorization::bipartite(d, d)
            }
        };
        DensityOperator::new(m, space)
    }
}

impl Serialize for DensityOperator {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixFile::from_density(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for DensityOperator {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        MatrixFile::deserialize(de)?
            .to_density()
            .map_err(D::Error::custom)
    }
}

pub fn read_matrix_file(path: impl AsRef<Path>) -> Result<MatrixFile> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| {
        std::io::Error::new(e.kind(), format!("cannot read {}: {e}", path.display()))
    })?;
    serde_json::from_str(&text)
        .map_err(|e| Error::arg(format!("{} is not a matrix file: {e}", path.display())))
}

pub fn write_matrix_file(path: impl AsRef<Path>, file: &MatrixFile) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(file)?)?;
    Ok(())
}

pub fn read_density(path: impl AsRef<Path>) -> Result<DensityOperator> {
    read_matrix_file(path)?.to_density()
}

pub fn write_density(path: impl AsRef<Path>, rho: &DensityOperator) -> Result<()> {
    write_matrix_file(path, &MatrixFile::from_density(rho))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_mismatched_lengths() {
        let f: MatrixFile =
            serde_json::from_str(r#"{"rows":2,"cols":2,"re":[1,0,0],"im":[0,0,0,0]}"#).unwrap();
        assert!(f.to_matrix().is_err());
    }

    #[test]
    fn rejects_factor_dimension_mismatch() {
        let f: MatrixFile = serde_json::from_str(
            r#"{"rows":2,"cols":2,"re":[1,0,0,1],"im":[0,0,0,0],"factors":[{"label":"A","dim":3}]}"#,
        )
        .unwrap();
        assert!(f.space().is_err());
    }

    #[test]
    fn round_trip_through_disk() {
        let rho = DensityOperator::new(
            ComplexMatrix::diagonal(&[0.25, 0.25, 0.25, 0.25]),
            HilbertFactorization::from_pairs(&[("A", 2), ("B", 2)]).unwrap(),
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rho.json");
        write_density(&path, &rho).unwrap();
        assert_eq!(read_density(&path).unwrap(), rho);
    }
}
