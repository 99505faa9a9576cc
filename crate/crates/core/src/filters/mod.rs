//! SLOCC filtering: single- and multi-term separable maps, overlap with the
//! maximally entangled state, and the seesaw estimate of the entanglement
//! fraction `E_d`.

mod seesaw;

use std::slice;

use nalgebra::SVD;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::states::{ginibre, phi_projector, phi_vector};
use crate::tensor::io::MatrixFile;
use crate::tensor::{ComplexMatrix, DensityOperator, HilbertFactorization};

pub use seesaw::{e_d_seesaw, e_d_seesaw_with_starts, SeesawConfig, SeesawResult};

/// Output traces below this fraction of the input trace count as annihilation.
pub const ANNIHILATION_TOL: f64 = 1e-14;

/// Local filters `A: H_A -> C^d`, `B: H_B -> C^d` forming the single-term
/// map `rho -> (A (x) B) rho (A (x) B)^dagger`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalFilterPair {
    a: ComplexMatrix,
    b: ComplexMatrix,
    d: usize,
}

impl LocalFilterPair {
    pub fn new(a: ComplexMatrix, b: ComplexMatrix) -> Result<Self> {
        if a.rows() != b.rows() {
            return Err(Error::arg(format!(
                "filters must share an output dimension ({} vs {})",
                a.rows(),
                b.rows()
            )));
        }
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::arg("filter has non-finite entries"));
        }
        if a.max_abs() == 0.0 && b.max_abs() == 0.0 {
            return Err(Error::arg("both filters are zero"));
        }
        let d = a.rows();
        Ok(Self { a, b, d })
    }

    /// Identity filters on `C^d (x) C^d`.
    pub fn identity(d: usize) -> Self {
        Self::new(ComplexMatrix::identity(d), ComplexMatrix::identity(d))
            .expect("identity is valid")
    }

    /// Complex-Gaussian filters rescaled to unit operator norm.
    pub fn random_contraction(d: usize, da: usize, db: usize, rng: &mut impl Rng) -> Self {
        let a = ginibre(d, da, rng);
        let b = ginibre(d, db, rng);
        Self::new(to_unit_operator_norm(&a), to_unit_operator_norm(&b))
            .expect("Gaussian filters are nonzero")
    }

    pub fn a(&self) -> &ComplexMatrix {
        &self.a
    }

    pub fn b(&self) -> &ComplexMatrix {
        &self.b
    }

    /// Output dimension on each side.
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn input_dims(&self) -> (usize, usize) {
        (self.a.cols(), self.b.cols())
    }

    /// `A (x) B`.
    pub fn kraus(&self) -> ComplexMatrix {
        self.a.kron(&self.b)
    }

    /// Both filters rescaled to unit operator norm (physically realizable
    /// with maximal success probability).
    pub fn to_contraction(&self) -> Self {
        Self {
            a: to_unit_operator_norm(&self.a),
            b: to_unit_operator_norm(&self.b),
            d: self.d,
        }
    }
}

/// Largest singular value.
pub fn operator_norm(m: &ComplexMatrix) -> f64 {
    let svd = SVD::new(m.to_nalgebra(), false, false);
    svd.singular_values.iter().copied().fold(0.0, f64::max)
}

fn to_unit_operator_norm(m: &ComplexMatrix) -> ComplexMatrix {
    let n = operator_norm(m);
    if n > 0.0 {
        m.scale(1.0 / n)
    } else {
        m.clone()
    }
}

#[derive(Serialize, Deserialize)]
struct FilterPairFile {
    d: usize,
    a: MatrixFile,
    b: MatrixFile,
}

impl Serialize for LocalFilterPair {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FilterPairFile {
            d: self.d,
            a: MatrixFile::from_matrix(&self.a, None),
            b: MatrixFile::from_matrix(&self.b, None),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LocalFilterPair {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let f = FilterPairFile::deserialize(de)?;
        let a = f.a.to_matrix().map_err(D::Error::custom)?;
        let b = f.b.to_matrix().map_err(D::Error::custom)?;
        let pair = LocalFilterPair::new(a, b).map_err(D::Error::custom)?;
        if pair.d != f.d {
            return Err(D::Error::custom(
                "declared d does not match the filter shapes",
            ));
        }
        Ok(pair)
    }
}

/// `Omega(rho) = sum_k (A_k (x) B_k) rho (A_k (x) B_k)^dagger`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparableMapSpec {
    terms: Vec<LocalFilterPair>,
}

impl SeparableMapSpec {
    pub fn new(terms: Vec<LocalFilterPair>) -> Result<Self> {
        let first = terms
            .first()
            .ok_or_else(|| Error::arg("separable map needs at least one term"))?;
        let shape = (first.d, first.input_dims());
        if terms.iter().any(|t| (t.d, t.input_dims()) != shape) {
            return Err(Error::arg("separable map terms have inconsistent shapes"));
        }
        Ok(Self { terms })
    }

    pub fn terms(&self) -> &[LocalFilterPair] {
        &self.terms
    }

    /// Applies the map to an arbitrary square matrix on `H_A (x) H_B`
    /// (A-major ordering).
    pub fn apply_to_matrix(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        apply_terms(&self.terms, m)
    }
}

/// Anything that acts as a separable map.
pub trait SeparableMap {
    fn terms(&self) -> &[LocalFilterPair];
}

impl SeparableMap for LocalFilterPair {
    fn terms(&self) -> &[LocalFilterPair] {
        slice::from_ref(self)
    }
}

impl SeparableMap for SeparableMapSpec {
    fn terms(&self) -> &[LocalFilterPair] {
        &self.terms
    }
}

fn apply_terms(terms: &[LocalFilterPair], m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let first = terms
        .first()
        .ok_or_else(|| Error::arg("separable map needs at least one term"))?;
    let (da, db) = first.input_dims();
    if m.rows() != da * db || !m.is_square() {
        return Err(Error::arg(format!(
            "filters act on {da}x{db} = {} dimensions but the operator is {}x{}",
            da * db,
            m.rows(),
            m.cols()
        )));
    }
    let d = first.d;
    let mut out = ComplexMatrix::zeros(d * d, d * d);
    for t in terms {
        if t.input_dims() != (da, db) || t.d != d {
            return Err(Error::arg("separable map terms have inconsistent shapes"));
        }
        out = &out + &m.conjugate_by(&t.kraus());
    }
    Ok(out)
}

/// Applies a separable map to an arbitrary square operator on
/// `H_A (x) H_B` (A-major ordering), with no positivity requirement.
pub fn apply_map_to_matrix(map: &impl SeparableMap, m: &ComplexMatrix) -> Result<ComplexMatrix> {
    apply_terms(map.terms(), m)
}

/// Matrix of `rho` with Alice's factors first (each party in original
/// order), plus the two party dimensions.
pub fn bipartite_matrix(rho: &DensityOperator) -> Result<(ComplexMatrix, usize, usize)> {
    let space = rho.space();
    let (a, b) = space.party_order()?;
    if a.is_empty() || b.is_empty() {
        return Err(Error::arg(format!(
            "state on {space} lacks an A or a B factor"
        )));
    }
    let dims = space.dims();
    let da: usize = a.iter().map(|&p| dims[p]).product();
    let db: usize = b.iter().map(|&p| dims[p]).product();
    let is_grouped = a.iter().chain(&b).enumerate().all(|(k, &p)| k == p);
    if is_grouped {
        return Ok((rho.matrix().clone(), da, db));
    }
    let labels = space.labels();
    let order: Vec<&str> = a.iter().chain(&b).map(|&p| labels[p]).collect();
    Ok((rho.permute(&order)?.matrix().clone(), da, db))
}

/// Unnormalized filter output and its trace `tr[Omega(rho)]`.
#[derive(Debug, Clone)]
pub struct FilterOutput {
    pub state: DensityOperator,
    pub trace: f64,
}

impl FilterOutput {
    pub fn normalized(&self) -> DensityOperator {
        self.state.normalize()
    }

    /// `tr[Omega(rho)] / tr[rho]`.
    pub fn success_probability(&self, input_trace: f64) -> f64 {
        self.trace / input_trace
    }
}

/// Applies a separable map. The output lives on `A (x) B = C^d (x) C^d`.
pub fn apply_filter(rho: &DensityOperator, map: &impl SeparableMap) -> Result<FilterOutput> {
    let (m, _, _) = bipartite_matrix(rho)?;
    let terms = map.terms();
    let out = apply_terms(terms, &m)?;
    let out = out.hermitian_part();
    let trace = out.trace().re;
    if !(trace > ANNIHILATION_TOL * rho.trace()) {
        return Err(Error::FilterAnnihilation { trace });
    }
    let d = terms[0].d;
    Ok(FilterOutput {
        state: DensityOperator::new_unchecked(out, HilbertFactorization::bipartite(d, d)),
        trace,
    })
}

/// `tr[rho phi_d] / tr[rho]` for `rho` on `C^d (x) C^d`.
pub fn fidelity_with_phid(rho: &DensityOperator, d: usize) -> Result<f64> {
    if d < 2 || rho.dim() != d * d {
        return Err(Error::arg(format!(
            "fidelity with phi_{d} needs an operator on C^{d} (x) C^{d}, got {}",
            rho.space()
        )));
    }
    let phi = phi_vector(d);
    Ok(rho.matrix().quadratic_form(&phi).re / rho.trace())
}

/// Optimal conclusive-teleportation fidelity `(1 + d e) / (1 + d)`.
pub fn f_d_from_e(e: f64, d: usize) -> Result<f64> {
    if d < 2 {
        return Err(Error::arg("d must be at least 2"));
    }
    let lo = 1.0 / d as f64;
    if !(e >= lo - 1e-9 && e <= 1.0 + 1e-9) {
        return Err(Error::arg(format!(
            "entanglement fraction {e} outside [1/{d}, 1]"
        )));
    }
    Ok((1.0 + d as f64 * e) / (1.0 + d as f64))
}

/// Whether the best single term of `spec` does at least as well as the
/// whole map (up to `1e-10`). Terms that annihilate `rho` are skipped.
pub fn single_term_dominance_check(
    rho: &DensityOperator,
    spec: &SeparableMapSpec,
    d: usize,
) -> Result<bool> {
    let whole = fidelity_with_phid(&apply_filter(rho, spec)?.state, d)?;
    let mut best = f64::NEG_INFINITY;
    for t in spec.terms() {
        match apply_filter(rho, t) {
            Ok(out) => best = best.max(fidelity_with_phid(&out.state, d)?),
            Err(Error::FilterAnnihilation { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(best >= whole - 1e-10)
}

/// `phi_d` projector re-exported for callers assembling objectives.
pub fn phid(d: usize) -> ComplexMatrix {
    phi_projector(d)
}
