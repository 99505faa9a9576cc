use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::matrix::{ComplexMatrix, ZERO};
use crate::error::{Error, Result};

/// Largest total dimension any single operator may have unless a caller
/// raises the cap explicitly.
pub const DEFAULT_MAX_DIM: usize = 256;

/// Which side of the bipartite cut a subsystem belongs to.
///
/// Parties are read off the first character of a factor label: `A...` is
/// Alice, `B...` is Bob.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Party {
    A,
    B,
}

impl Party {
    pub fn of_label(label: &str) -> Option<Party> {
        match label.chars().next() {
            Some('A') | Some('a') => Some(Party::A),
            Some('B') | Some('b') => Some(Party::B),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Factor {
    pub label: String,
    pub dim: usize,
}

impl Factor {
    pub fn new(label: impl Into<String>, dim: usize) -> Self {
        Self {
            label: label.into(),
            dim,
        }
    }
}

/// Ordered tensor structure `H_1 (x) H_2 (x) ...` with unique labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Factor>", into = "Vec<Factor>")]
pub struct HilbertFactorization {
    factors: Vec<Factor>,
}

impl TryFrom<Vec<Factor>> for HilbertFactorization {
    type Error = Error;

    fn try_from(factors: Vec<Factor>) -> Result<Self> {
        Self::new(factors)
    }
}

impl From<HilbertFactorization> for Vec<Factor> {
    fn from(f: HilbertFactorization) -> Self {
        f.factors
    }
}

impl HilbertFactorization {
    pub fn new(factors: Vec<Factor>) -> Result<Self> {
        let mut seen = HashSet::new();
        for f in &factors {
            if f.dim == 0 {
                return Err(Error::arg(format!("factor {:?} has dimension 0", f.label)));
            }
            if !seen.insert(f.label.as_str()) {
                return Err(Error::arg(format!("duplicate factor label {:?}", f.label)));
            }
        }
        Ok(Self { factors })
    }

    /// Convenience constructor from `(label, dim)` pairs.
    pub fn from_pairs(pairs: &[(&str, usize)]) -> Result<Self> {
        Self::new(pairs.iter().map(|&(l, d)| Factor::new(l, d)).collect())
    }

    /// Two factors labelled `A` and `B`.
    pub fn bipartite(da: usize, db: usize) -> Self {
        Self::from_pairs(&[("A", da), ("B", db)]).expect("static labels are unique")
    }

    pub fn single(label: &str, dim: usize) -> Self {
        Self::from_pairs(&[(label, dim)]).expect("single factor")
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.factors.iter().map(|f| f.dim).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.factors.iter().map(|f| f.dim).product()
    }

    pub fn labels(&self) -> Vec<&str> {
        self.factors.iter().map(|f| f.label.as_str()).collect()
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.factors.iter().position(|f| f.label == label)
    }

    pub fn dim_of(&self, label: &str) -> Option<usize> {
        self.position(label).map(|p| self.factors[p].dim)
    }

    /// Resolves labels to positions, rejecting unknown labels.
    pub fn positions(&self, labels: &[&str]) -> Result<Vec<usize>> {
        labels
            .iter()
            .map(|l| {
                self.position(l).ok_or_else(|| {
                    Error::arg(format!(
                        "unknown factor label {l:?} (have {:?})",
                        self.labels()
                    ))
                })
            })
            .collect()
    }

    pub fn concat(&self, other: &Self) -> Result<Self> {
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        Self::new(factors)
    }

    pub fn select(&self, positions: &[usize]) -> Self {
        Self {
            factors: positions.iter().map(|&p| self.factors[p].clone()).collect(),
        }
    }

    /// Renames factors; `map` pairs old labels with new ones.
    pub fn relabel(&self, map: &[(&str, &str)]) -> Result<Self> {
        let mut factors = self.factors.clone();
        for &(old, new) in map {
            let p = self
                .position(old)
                .ok_or_else(|| Error::arg(format!("unknown factor label {old:?}")))?;
            factors[p].label = new.to_string();
        }
        Self::new(factors)
    }

    /// Party of every factor, failing on labels that name neither party.
    pub fn parties(&self) -> Result<Vec<Party>> {
        self.factors
            .iter()
            .map(|f| {
                Party::of_label(&f.label).ok_or_else(|| {
                    Error::arg(format!(
                        "factor label {:?} does not start with A or B",
                        f.label
                    ))
                })
            })
            .collect()
    }

    /// Positions of Alice's factors followed by Bob's, each in original order.
    pub fn party_order(&self) -> Result<(Vec<usize>, Vec<usize>)> {
        let parties = self.parties()?;
        let a = (0..parties.len())
            .filter(|&i| parties[i] == Party::A)
            .collect();
        let b = (0..parties.len())
            .filter(|&i| parties[i] == Party::B)
            .collect();
        Ok((a, b))
    }

    pub fn party_labels(&self, party: Party) -> Result<Vec<&str>> {
        let parties = self.parties()?;
        Ok(self
            .factors
            .iter()
            .zip(parties)
            .filter(|(_, p)| *p == party)
            .map(|(f, _)| f.label.as_str())
            .collect())
    }
}

impl fmt::Display for HilbertFactorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|x| format!("{}[{}]", x.label, x.dim))
            .collect();
        write!(f, "{}", parts.join(" (x) "))
    }
}

/// Row-major strides for a multi-index with the given dims.
fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * dims[i + 1];
    }
    s
}

fn digits(mut index: usize, dims: &[usize], out: &mut [usize]) {
    for k in (0..dims.len()).rev() {
        out[k] = index % dims[k];
        index /= dims[k];
    }
}

/// Reorders the tensor factors of a square matrix: factor `order[k]` of the
/// input becomes factor `k` of the output.
pub(crate) fn permute_square(m: &ComplexMatrix, dims: &[usize], order: &[usize]) -> ComplexMatrix {
    let n = m.rows();
    let new_dims: Vec<usize> = order.iter().map(|&p| dims[p]).collect();
    let new_strides = strides(&new_dims);
    // old index -> new index
    let mut map = vec![0usize; n];
    let mut dig = vec![0usize; dims.len()];
    for (old, slot) in map.iter_mut().enumerate() {
        digits(old, dims, &mut dig);
        *slot = order
            .iter()
            .enumerate()
            .map(|(k, &p)| dig[p] * new_strides[k])
            .sum();
    }
    let mut out = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        let ri = map[i];
        for j in 0..n {
            out[(ri, map[j])] = m[(i, j)];
        }
    }
    out
}

pub(crate) fn permute_vector(
    v: &[num_complex::Complex64],
    dims: &[usize],
    order: &[usize],
) -> Vec<num_complex::Complex64> {
    let new_dims: Vec<usize> = order.iter().map(|&p| dims[p]).collect();
    let new_strides = strides(&new_dims);
    let mut out = vec![ZERO; v.len()];
    let mut dig = vec![0usize; dims.len()];
    for (old, &x) in v.iter().enumerate() {
        digits(old, dims, &mut dig);
        let new: usize = order
            .iter()
            .enumerate()
            .map(|(k, &p)| dig[p] * new_strides[k])
            .sum();
        out[new] = x;
    }
    out
}

/// Traces out every factor not listed in `keep` (positions, ascending).
pub(crate) fn partial_trace_square(
    m: &ComplexMatrix,
    dims: &[usize],
    keep: &[usize],
) -> ComplexMatrix {
    let traced: Vec<usize> = (0..dims.len()).filter(|p| !keep.contains(p)).collect();
    let mut order = keep.to_vec();
    order.extend(&traced);
    let permuted = permute_square(m, dims, &order);
    let dk: usize = keep.iter().map(|&p| dims[p]).product();
    let dt: usize = traced.iter().map(|&p| dims[p]).product();
    ComplexMatrix::from_fn(dk, dk, |i, j| {
        (0..dt).map(|t| permuted[(i * dt + t, j * dt + t)]).sum()
    })
}

/// Transposes the listed factors (positions) of a square matrix.
pub(crate) fn partial_transpose_square(
    m: &ComplexMatrix,
    dims: &[usize],
    which: &[usize],
) -> ComplexMatrix {
    let n = m.rows();
    let st = strides(dims);
    let mut di = vec![0usize; dims.len()];
    let mut dj = vec![0usize; dims.len()];
    let mut out = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        digits(i, dims, &mut di);
        for j in 0..n {
            digits(j, dims, &mut dj);
            let (mut ni, mut nj) = (i, j);
            for &p in which {
                let delta = dj[p] as isize - di[p] as isize;
                ni = (ni as isize + delta * st[p] as isize) as usize;
                nj = (nj as isize - delta * st[p] as isize) as usize;
            }
            out[(ni, nj)] = m[(i, j)];
        }
    }
    out
}
