//! Hermitian eigenproblems, generalized Rayleigh maximization and the
//! Schmidt rank of pure bipartite vectors.
//!
//! Dense factorizations are delegated to `nalgebra`; everything here wraps
//! them behind the accuracy contracts the rest of the crate relies on.

use nalgebra::{Cholesky, SymmetricEigen, SVD};
use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use super::space::{permute_vector, HilbertFactorization};
use crate::error::{Error, Result};

/// Absolute entrywise tolerance on `|M - M^dagger|`, scaled by `max(1, max|M|)`.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Relative (to the trace) tolerance below zero still counted as PSD.
pub const PSD_TOL: f64 = 1e-9;

/// Singular values above this count towards the Schmidt rank.
pub const SCHMIDT_TOL: f64 = 1e-9;

/// Eigenvalues in descending order with matching orthonormal eigenvectors
/// stored as the columns of `vectors`.
#[derive(Debug, Clone)]
pub struct Eigensystem {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl Eigensystem {
    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        self.vectors.col(k)
    }

    pub fn max(&self) -> f64 {
        self.values[0]
    }

    pub fn min(&self) -> f64 {
        *self.values.last().expect("non-empty spectrum")
    }

    /// `V diag(values) V^dagger`
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.values.len();
        let v = &self.vectors;
        ComplexMatrix::from_fn(v.rows(), v.rows(), |i, j| {
            (0..n)
                .map(|k| v[(i, k)] * self.values[k] * v[(j, k)].conj())
                .sum()
        })
    }
}

pub(crate) fn hermitian_tolerance(m: &ComplexMatrix) -> f64 {
    HERMITIAN_TOL * m.max_abs().max(1.0)
}

/// Symmetrizes `m` if it is Hermitian within tolerance; errors otherwise.
pub fn checked_hermitian(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(Error::arg(format!(
            "expected a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    if !m.is_finite() {
        return Err(Error::arg("matrix has non-finite entries"));
    }
    let defect = m.hermitian_defect();
    if defect > hermitian_tolerance(m) {
        return Err(Error::arg(format!(
            "matrix is not Hermitian (defect {defect:e})"
        )));
    }
    Ok(m.hermitian_part())
}

/// Full spectral decomposition of a Hermitian matrix.
pub fn hermitian_eigensystem(m: &ComplexMatrix) -> Result<Eigensystem> {
    let h = checked_hermitian(m)?;
    Ok(eigensystem_unchecked(&h))
}

pub(crate) fn eigensystem_unchecked(h: &ComplexMatrix) -> Eigensystem {
    let n = h.rows();
    let eig = SymmetricEigen::new(h.to_nalgebra());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Eigensystem { values, vectors }
}

pub(crate) fn min_eigenvalue_unchecked(h: &ComplexMatrix) -> f64 {
    SymmetricEigen::new(h.hermitian_part().to_nalgebra())
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(m: &ComplexMatrix) -> Result<f64> {
    let h = checked_hermitian(m)?;
    Ok(min_eigenvalue_unchecked(&h))
}

/// Result of a generalized Rayleigh-quotient maximization.
#[derive(Debug, Clone)]
pub struct RayleighMax {
    pub value: f64,
    /// Unit-norm maximizer.
    pub vector: Vec<Complex64>,
}

/// Maximizes `x^dagger N x / x^dagger (D + eps I) x`.
///
/// `eps` defaults to `1e-12 * tr(D)`. `D` must be positive semidefinite up
/// to `-1e-9 * tr(D)`.
pub fn rayleigh_max(n: &ComplexMatrix, d: &ComplexMatrix, eps: Option<f64>) -> Result<RayleighMax> {
    let n = checked_hermitian(n)?;
    let d = checked_hermitian(d)?;
    if n.rows() != d.rows() {
        return Err(Error::arg(format!(
            "numerator is {}x{} but denominator is {}x{}",
            n.rows(),
            n.rows(),
            d.rows(),
            d.rows()
        )));
    }
    let tr = d.trace().re;
    let lo = min_eigenvalue_unchecked(&d);
    if lo < -PSD_TOL * tr.abs().max(f64::MIN_POSITIVE) || tr <= 0.0 {
        return Err(Error::arg(format!(
            "denominator is not positive semidefinite (min eigenvalue {lo:e}, trace {tr:e})"
        )));
    }
    if let Some(e) = eps {
        if !(e > 0.0) {
            return Err(Error::arg("regularization must be positive"));
        }
    }
    rayleigh_max_unchecked(&n, &d, eps)
}

/// Same as [`rayleigh_max`] for inputs already known to be Hermitian with
/// `D` PSD.
pub(crate) fn rayleigh_max_unchecked(
    n: &ComplexMatrix,
    d: &ComplexMatrix,
    eps: Option<f64>,
) -> Result<RayleighMax> {
    let dim = n.rows();
    let tr = d.trace().re;
    let eps = eps.unwrap_or(1e-12 * tr);
    let mut reg = d.to_nalgebra();
    for i in 0..dim {
        reg[(i, i)] += Complex64::new(eps, 0.0);
    }
    let n_na = n.to_nalgebra();

    // Whitening W with W^dagger (D + eps I) W = I, then an ordinary
    // eigenproblem for W^dagger N W.
    let (c, whiten) = match Cholesky::new(reg.clone()) {
        Some(chol) => {
            let l = chol.l();
            let linv = l
                .clone()
                .try_inverse()
                .ok_or_else(|| Error::Numerical("singular Cholesky factor".into()))?;
            let c = &linv * &n_na * linv.adjoint();
            (c, linv.adjoint())
        }
        None => {
            let eig = SymmetricEigen::new(reg);
            let mut w = eig.eigenvectors.clone();
            for (k, lam) in eig.eigenvalues.iter().enumerate() {
                let s = 1.0 / lam.max(eps).sqrt();
                w.column_mut(k).scale_mut(s);
            }
            let c = w.adjoint() * &n_na * &w;
            (c, w)
        }
    };
    let c = (&c + c.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(c);
    let (k, _) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .ok_or_else(|| Error::Numerical("empty eigenproblem".into()))?;
    let y = eig.eigenvectors.column(k).into_owned();
    let x = &whiten * y;
    let norm = x.norm();
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::Numerical("degenerate Rayleigh maximizer".into()));
    }
    let vector: Vec<Complex64> = x.iter().map(|z| z / norm).collect();
    let num = n.quadratic_form(&vector).re;
    let mut den = d.quadratic_form(&vector).re;
    den += eps;
    Ok(RayleighMax {
        value: num / den,
        vector,
    })
}

/// Number of Schmidt coefficients above `1e-9` of a normalized pure state,
/// across the cut separating the factors in `side` from the rest.
pub fn schmidt_rank(v: &[Complex64], space: &HilbertFactorization, side: &[&str]) -> Result<usize> {
    Ok(schmidt_coefficients(v, space, side)?
        .iter()
        .filter(|&&s| s > SCHMIDT_TOL)
        .count())
}

/// Singular values (descending) of the amplitude matrix reshaped across the cut.
pub fn schmidt_coefficients(
    v: &[Complex64],
    space: &HilbertFactorization,
    side: &[&str],
) -> Result<Vec<f64>> {
    if v.len() != space.total_dim() {
        return Err(Error::arg(format!(
            "vector has {} amplitudes but the space has dimension {}",
            v.len(),
            space.total_dim()
        )));
    }
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::arg(format!("state is not normalized (norm {norm})")));
    }
    let first = space.positions(side)?;
    let rest: Vec<usize> = (0..space.len()).filter(|p| !first.contains(p)).collect();
    let mut order = first.clone();
    order.extend(&rest);
    let dims = space.dims();
    let permuted = permute_vector(v, &dims, &order);
    let da: usize = first.iter().map(|&p| dims[p]).product();
    let db = v.len() / da;
    let m = nalgebra::DMatrix::from_row_slice(da, db, &permuted);
    let svd = SVD::new(m, false, false);
    let mut s: Vec<f64> = svd.singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(s)
}
