use num_complex::Complex64;

use super::eigen::{checked_hermitian, min_eigenvalue_unchecked, PSD_TOL};
use super::matrix::ComplexMatrix;
use super::space::{
    partial_trace_square, partial_transpose_square, permute_square, HilbertFactorization,
    DEFAULT_MAX_DIM,
};
use crate::error::{Error, Result};

/// Tolerance on `|tr - 1|` for the normalized flag.
pub const NORMALIZATION_TOL: f64 = 1e-10;

/// Hermitian operator on a factorized space. No positivity requirement;
/// partial transposes and witnesses live here.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    matrix: ComplexMatrix,
    space: HilbertFactorization,
}

impl Operator {
    pub fn new(matrix: ComplexMatrix, space: HilbertFactorization) -> Result<Self> {
        if matrix.rows() != space.total_dim() || !matrix.is_square() {
            return Err(Error::arg(format!(
                "{}x{} matrix does not match space {space} of dimension {}",
                matrix.rows(),
                matrix.cols(),
                space.total_dim()
            )));
        }
        let matrix = checked_hermitian(&matrix)?;
        Ok(Self { matrix, space })
    }

    pub(crate) fn new_unchecked(matrix: ComplexMatrix, space: HilbertFactorization) -> Self {
        debug_assert_eq!(matrix.rows(), space.total_dim());
        Self { matrix, space }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn space(&self) -> &HilbertFactorization {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue_unchecked(&self.matrix)
    }

    /// `tr[self * other]`, real for Hermitian operands.
    pub fn expectation(&self, other: &ComplexMatrix) -> f64 {
        self.matrix.trace_product(other).re
    }

    pub fn partial_transpose(&self, labels: &[&str]) -> Result<Operator> {
        let pos = self.space.positions(labels)?;
        Ok(Operator::new_unchecked(
            partial_transpose_square(&self.matrix, &self.space.dims(), &pos),
            self.space.clone(),
        ))
    }

    pub fn partial_trace(&self, keep: &[&str]) -> Result<Operator> {
        let (m, space) = trace_keep(&self.matrix, &self.space, keep)?;
        Ok(Operator::new_unchecked(m, space))
    }

    pub fn permute(&self, order: &[&str]) -> Result<Operator> {
        let (m, space) = permute_labels(&self.matrix, &self.space, order)?;
        Ok(Operator::new_unchecked(m, space))
    }

    pub fn relabel(&self, map: &[(&str, &str)]) -> Result<Operator> {
        Ok(Operator::new_unchecked(
            self.matrix.clone(),
            self.space.relabel(map)?,
        ))
    }

    /// Full transpose in the computational basis.
    pub fn transpose(&self) -> Operator {
        Operator::new_unchecked(self.matrix.transpose(), self.space.clone())
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }
}

/// Possibly unnormalized positive-semidefinite operator on a factorized
/// space.
///
/// Construction checks Hermiticity (entrywise, `1e-10`), positivity
/// (`min eigenvalue >= -1e-9 tr`) and a strictly positive trace. Operations
/// that preserve positivity (tensor products, partial traces, reorderings)
/// skip the eigenvalue check.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    op: Operator,
    normalized: bool,
}

impl DensityOperator {
    pub fn new(matrix: ComplexMatrix, space: HilbertFactorization) -> Result<Self> {
        let op = Operator::new(matrix, space)?;
        let tr = op.trace();
        if !(tr > 0.0) {
            return Err(Error::arg(format!(
                "density operator must have positive trace (got {tr:e})"
            )));
        }
        let lo = op.min_eigenvalue();
        if lo < -PSD_TOL * tr {
            return Err(Error::arg(format!(
                "operator is not positive semidefinite (min eigenvalue {lo:e}, trace {tr:e})"
            )));
        }
        Ok(Self::from_operator_unchecked(op))
    }

    /// Pure state `|v><v|`.
    pub fn from_pure(v: &[Complex64], space: HilbertFactorization) -> Result<Self> {
        if v.len() != space.total_dim() {
            return Err(Error::arg(format!(
                "vector of length {} does not match space {space}",
                v.len()
            )));
        }
        if v.iter().all(|z| z.norm() == 0.0) {
            return Err(Error::arg("zero vector"));
        }
        Ok(Self::new_unchecked(ComplexMatrix::projector(v), space))
    }

    /// Caller guarantees Hermitian PSD with positive trace.
    pub(crate) fn new_unchecked(matrix: ComplexMatrix, space: HilbertFactorization) -> Self {
        Self::from_operator_unchecked(Operator::new_unchecked(matrix, space))
    }

    pub(crate) fn from_operator_unchecked(op: Operator) -> Self {
        let normalized = (op.trace() - 1.0).abs() <= NORMALIZATION_TOL;
        Self { op, normalized }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.op.matrix()
    }

    pub fn space(&self) -> &HilbertFactorization {
        self.op.space()
    }

    pub fn as_operator(&self) -> &Operator {
        &self.op
    }

    pub fn into_operator(self) -> Operator {
        self.op
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn trace(&self) -> f64 {
        self.op.trace()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn normalize(&self) -> DensityOperator {
        self.scale(1.0 / self.trace())
    }

    /// `tau * rho` for `tau > 0`.
    pub fn scale(&self, tau: f64) -> DensityOperator {
        assert!(tau > 0.0, "scale factor must be positive");
        Self::new_unchecked(self.matrix().scale(tau), self.space().clone())
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.op.min_eigenvalue()
    }

    pub fn expectation(&self, other: &ComplexMatrix) -> f64 {
        self.op.expectation(other)
    }

    pub fn partial_trace(&self, keep: &[&str]) -> Result<DensityOperator> {
        Ok(Self::from_operator_unchecked(self.op.partial_trace(keep)?))
    }

    pub fn partial_transpose(&self, labels: &[&str]) -> Result<Operator> {
        self.op.partial_transpose(labels)
    }

    pub fn permute(&self, order: &[&str]) -> Result<DensityOperator> {
        Ok(Self::from_operator_unchecked(self.op.permute(order)?))
    }

    pub fn relabel(&self, map: &[(&str, &str)]) -> Result<DensityOperator> {
        Ok(Self::from_operator_unchecked(self.op.relabel(map)?))
    }

    /// Full transpose; still a density operator.
    pub fn transpose(&self) -> DensityOperator {
        Self::from_operator_unchecked(self.op.transpose())
    }

    /// Mixture `sum_k w_k rho_k` over a common space.
    pub fn mixture(parts: &[(f64, &DensityOperator)]) -> Result<DensityOperator> {
        let first = parts.first().ok_or_else(|| Error::arg("empty mixture"))?.1;
        let mut acc = ComplexMatrix::zeros(first.dim(), first.dim());
        for &(w, rho) in parts {
            if rho.space() != first.space() {
                return Err(Error::arg("mixture components live on different spaces"));
            }
            if w < 0.0 {
                return Err(Error::arg("mixture weights must be nonnegative"));
            }
            acc = &acc + &rho.matrix().scale(w);
        }
        if !(acc.trace().re > 0.0) {
            return Err(Error::arg("mixture has zero trace"));
        }
        Ok(Self::new_unchecked(acc, first.space().clone()))
    }
}

fn trace_keep(
    m: &ComplexMatrix,
    space: &HilbertFactorization,
    keep: &[&str],
) -> Result<(ComplexMatrix, HilbertFactorization)> {
    let mut pos = space.positions(keep)?;
    pos.sort_unstable();
    pos.dedup();
    Ok((
        partial_trace_square(m, &space.dims(), &pos),
        space.select(&pos),
    ))
}

fn permute_labels(
    m: &ComplexMatrix,
    space: &HilbertFactorization,
    order: &[&str],
) -> Result<(ComplexMatrix, HilbertFactorization)> {
    let pos = space.positions(order)?;
    let mut sorted = pos.clone();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != space.len() || pos.len() != space.len() {
        return Err(Error::arg(format!(
            "permutation {order:?} must name every factor of {space} exactly once"
        )));
    }
    Ok((permute_square(m, &space.dims(), &pos), space.select(&pos)))
}

/// Kronecker product of two operands that carry a tensor structure.
pub trait TensorProduct: Sized {
    fn tensor_with_cap(&self, other: &Self, max_dim: usize) -> Result<Self>;

    /// Kronecker product with concatenated factorization, capped at
    /// [`DEFAULT_MAX_DIM`].
    fn tensor(&self, other: &Self) -> Result<Self> {
        self.tensor_with_cap(other, DEFAULT_MAX_DIM)
    }
}

fn check_cap(dim: usize, max: usize) -> Result<()> {
    if dim > max {
        Err(Error::Capacity { dim, max })
    } else {
        Ok(())
    }
}

impl TensorProduct for ComplexMatrix {
    fn tensor_with_cap(&self, other: &Self, max_dim: usize) -> Result<Self> {
        check_cap(self.rows() * other.rows(), max_dim)?;
        check_cap(self.cols() * other.cols(), max_dim)?;
        Ok(self.kron(other))
    }
}

impl TensorProduct for Operator {
    fn tensor_with_cap(&self, other: &Self, max_dim: usize) -> Result<Self> {
        let space = self.space.concat(&other.space)?;
        let m = self.matrix.tensor_with_cap(&other.matrix, max_dim)?;
        Ok(Operator::new_unchecked(m, space))
    }
}

impl TensorProduct for DensityOperator {
    fn tensor_with_cap(&self, other: &Self, max_dim: usize) -> Result<Self> {
        Ok(Self::from_operator_unchecked(
            self.op.tensor_with_cap(&other.op, max_dim)?,
        ))
    }
}

/// Free-function form of [`TensorProduct::tensor`].
pub fn tensor_product<T: TensorProduct>(a: &T, b: &T) -> Result<T> {
    a.tensor(b)
}

/// Traces out everything except `keep`, preserving the original factor order.
pub fn partial_trace(op: &DensityOperator, keep: &[&str]) -> Result<DensityOperator> {
    op.partial_trace(keep)
}

/// Partial transpose on the listed factors.
pub fn partial_transpose(op: &DensityOperator, labels: &[&str]) -> Result<Operator> {
    op.partial_transpose(labels)
}
