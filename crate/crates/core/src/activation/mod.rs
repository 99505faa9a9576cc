//! Activation of the entanglement fraction: the filter pair
//! `<phi_{A1A2}| (x) I_{A3}`, `<phi_{B1B2}| (x) I_{B3}`, the contraction
//! identity it satisfies, the sufficient condition
//! `tr[rho (sigma^T (x) (lambda I - phi_d))] < 0`, the associated witness,
//! and experiment runners.
//!
//! Label conventions: `sigma` lives on `A1 (x) B1`; `rho` on
//! `A2 (x) A3 (x) B2 (x) B3` with `A2 ~ A1`, `B2 ~ B1` and `A3 = B3 = C^d`.
//! Joint states are ordered `A1 A2 A3 B1 B2 B3`. `sigma^T` is the full
//! transpose in the computational basis.

mod certificate;
mod family;
mod probes;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filters::{apply_filter, LocalFilterPair};
use crate::states::{phi_projector, phi_vector};
use crate::tensor::{
    ComplexMatrix, DensityOperator, HilbertFactorization, Operator, TensorProduct, ZERO,
};

pub use certificate::{certify_e_bound, CertificateKind, CertifiedRho, EBoundCertificate};
pub use family::{
    bound_entangled_demo, demo_instance, run_activation_experiment, ActivationInstance,
    ActivationOutcome, ActivationSetup, Budget, NotFoundReport, RhoFamily,
};
pub use probes::{
    random_probe_map, trace_gap_probe, trace_gap_suite, werner_mu_monotonicity_probe,
    werner_mu_suite, MuProbe, MuSuite, TraceGapProbe, TraceGapSuite,
};

/// Largest joint dimension the activation module will assemble.
pub const JOINT_MAX_DIM: usize = 1024;

/// Order of `rho`'s factors used throughout this module.
pub const RHO_LABELS: [&str; 4] = ["A2", "A3", "B2", "B3"];
/// Order of `sigma`'s factors.
pub const SIGMA_LABELS: [&str; 2] = ["A1", "B1"];
/// Order of the joint state `sigma (x) rho`.
pub const JOINT_LABELS: [&str; 6] = ["A1", "A2", "A3", "B1", "B2", "B3"];

/// Local dimensions of an activation problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActivationDims {
    /// `dim A1 = dim A2`.
    pub na: usize,
    /// `dim B1 = dim B2`.
    pub nb: usize,
    /// `dim A3 = dim B3`.
    pub d: usize,
}

impl ActivationDims {
    pub fn new(na: usize, nb: usize, d: usize) -> Result<Self> {
        if na == 0 || nb == 0 {
            return Err(Error::arg("local dimensions must be positive"));
        }
        if d < 2 {
            return Err(Error::arg("target dimension d must be at least 2"));
        }
        Ok(Self { na, nb, d })
    }

    pub fn rho_space(&self) -> HilbertFactorization {
        HilbertFactorization::from_pairs(&[
            ("A2", self.na),
            ("A3", self.d),
            ("B2", self.nb),
            ("B3", self.d),
        ])
        .expect("labels are distinct")
    }

    pub fn sigma_space(&self) -> HilbertFactorization {
        HilbertFactorization::from_pairs(&[("A1", self.na), ("B1", self.nb)])
            .expect("labels are distinct")
    }

    pub fn joint_dim(&self) -> usize {
        (self.na * self.nb * self.d).pow(2)
    }
}

/// `sigma` re-expressed on `A1 (x) B1`, grouping all of its A-labelled
/// factors into `A1` and its B-labelled factors into `B1`.
pub fn sigma_on_a1b1(sigma: &DensityOperator) -> Result<DensityOperator> {
    let (m, da, db) = crate::filters::bipartite_matrix(sigma)?;
    let space = HilbertFactorization::from_pairs(&[("A1", da), ("B1", db)])?;
    Ok(DensityOperator::new_unchecked(m, space))
}

/// `rho` re-expressed on `A2 A3 B2 B3`. States already carrying those labels
/// are permuted into place; otherwise the A side is read as `A2 (x) A3` and
/// the B side as `B2 (x) B3`.
pub fn rho_on_23(rho: &DensityOperator, dims: ActivationDims) -> Result<DensityOperator> {
    let space = rho.space();
    let has_labels = space.len() == 4 && RHO_LABELS.iter().all(|l| space.position(l).is_some());
    let rho = if has_labels {
        rho.permute(&RHO_LABELS)?
    } else {
        let (m, da, db) = crate::filters::bipartite_matrix(rho)?;
        if da != dims.na * dims.d || db != dims.nb * dims.d {
            return Err(Error::arg(format!(
                "rho has party dimensions {da}x{db}, expected {}x{}",
                dims.na * dims.d,
                dims.nb * dims.d
            )));
        }
        DensityOperator::new_unchecked(m, dims.rho_space())
    };
    if rho.space() != &dims.rho_space() {
        return Err(Error::arg(format!(
            "rho lives on {} but the problem needs {}",
            rho.space(),
            dims.rho_space()
        )));
    }
    Ok(rho)
}

/// Infers the problem dimensions from `sigma` and `d`.
pub fn dims_from_sigma(sigma: &DensityOperator, d: usize) -> Result<ActivationDims> {
    let (_, na, nb) = crate::filters::bipartite_matrix(sigma)?;
    ActivationDims::new(na, nb, d)
}

/// Activation filter pair: `A = <phi_{A1A2}| (x) I_{A3}` and
/// `B = <phi_{B1B2}| (x) I_{B3}` with normalized `phi`.
pub fn activation_filter(na: usize, nb: usize, d: usize) -> Result<LocalFilterPair> {
    let dims = ActivationDims::new(na, nb, d)?;
    LocalFilterPair::new(phi_contraction(dims.na, d), phi_contraction(dims.nb, d))
}

/// `d x (n n d)` matrix `<phi_n| (x) I_d` on `X1 X2 X3`.
fn phi_contraction(n: usize, d: usize) -> ComplexMatrix {
    let amp = Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
    let mut m = ComplexMatrix::zeros(d, n * n * d);
    for i in 0..n {
        for k in 0..d {
            m[(k, (i * n + i) * d + k)] = amp;
        }
    }
    m
}

/// `sigma (x) rho` on `A1 A2 A3 B1 B2 B3`.
pub fn joint_state(
    rho: &DensityOperator,
    sigma: &DensityOperator,
    d: usize,
) -> Result<DensityOperator> {
    let dims = dims_from_sigma(sigma, d)?;
    let sigma = sigma_on_a1b1(sigma)?;
    let rho = rho_on_23(rho, dims)?;
    sigma
        .tensor_with_cap(&rho, JOINT_MAX_DIM)?
        .permute(&JOINT_LABELS)
}

/// `M = tr_2[rho (sigma^T_2 (x) I_3)]` on `A3 (x) B3`, where `2 = A2 B2`.
fn sigma_contraction(
    rho: &DensityOperator,
    sigma: &DensityOperator,
    dims: ActivationDims,
) -> ComplexMatrix {
    let r = rho
        .permute(&["A2", "B2", "A3", "B3"])
        .expect("rho has canonical labels");
    let r = r.matrix();
    let s = sigma.matrix();
    let n2 = dims.na * dims.nb;
    let n3 = dims.d * dims.d;
    let mut m = ComplexMatrix::zeros(n3, n3);
    for x in 0..n2 {
        for y in 0..n2 {
            let sxy = s[(x, y)];
            if sxy == ZERO {
                continue;
            }
            for p in 0..n3 {
                for q in 0..n3 {
                    m[(p, q)] += r[(x * n3 + p, y * n3 + q)] * sxy;
                }
            }
        }
    }
    m
}

/// Residual of the contraction identity
/// `(A (x) B)(sigma (x) rho)(A (x) B)^dagger = z tr_2[rho sigma^T_2]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContractionIdentityCheck {
    /// `max |LHS - z RHS|` entrywise.
    pub max_residual: f64,
    /// `max |LHS|`, the scale of the residual bound.
    pub lhs_scale: f64,
    /// `1 / (dim A1 dim B1)` for normalized `phi`.
    pub z: f64,
}

impl ContractionIdentityCheck {
    pub fn holds(&self) -> bool {
        self.max_residual <= 1e-10 * self.lhs_scale.max(f64::MIN_POSITIVE)
    }
}

/// Evaluates both sides of the contraction identity densely.
pub fn contraction_identity_check(
    rho: &DensityOperator,
    sigma: &DensityOperator,
    d: usize,
) -> Result<ContractionIdentityCheck> {
    let dims = dims_from_sigma(sigma, d)?;
    let sigma = sigma_on_a1b1(sigma)?;
    let rho = rho_on_23(rho, dims)?;
    let joint = sigma
        .tensor_with_cap(&rho, JOINT_MAX_DIM)?
        .permute(&JOINT_LABELS)?;
    let filter = activation_filter(dims.na, dims.nb, d)?;
    let lhs = apply_filter(&joint, &filter)?.state;
    let rhs = sigma_contraction(&rho, &sigma, dims);
    let z = 1.0 / (dims.na * dims.nb) as f64;
    Ok(ContractionIdentityCheck {
        max_residual: lhs.matrix().max_abs_diff(&rhs.scale(z)),
        lhs_scale: lhs.matrix().max_abs(),
        z,
    })
}

/// `lambda I - phi_d` on `C^d (x) C^d`.
pub fn threshold_operator(lambda: f64, d: usize) -> ComplexMatrix {
    &ComplexMatrix::identity(d * d).scale(lambda) - &phi_projector(d)
}

/// `tr[rho (sigma^T (x) (lambda I - phi_d))]`. Negative values imply
/// `E_d(rho (x) sigma) > lambda` whenever `E_d(rho) <= lambda`.
pub fn activation_condition(
    rho: &DensityOperator,
    sigma: &DensityOperator,
    lambda: f64,
    d: usize,
) -> Result<f64> {
    if !lambda.is_finite() {
        return Err(Error::arg("lambda must be finite"));
    }
    let dims = dims_from_sigma(sigma, d)?;
    let sigma = sigma_on_a1b1(sigma)?;
    let rho = rho_on_23(rho, dims)?;
    let m = sigma_contraction(&rho, &sigma, dims);
    Ok(condition_from_contraction(&m, lambda, d))
}

fn condition_from_contraction(m: &ComplexMatrix, lambda: f64, d: usize) -> f64 {
    lambda * m.trace().re - m.quadratic_form(&phi_vector(d)).re
}

/// `Y = sigma^T_{A2B2} (x) (lambda I - phi_d)_{A3B3}` in `A2 A3 B2 B3`
/// order, so that the activation condition equals `tr[rho Y]`.
pub(crate) fn condition_operator(
    sigma: &DensityOperator,
    lambda: f64,
    dims: ActivationDims,
) -> ComplexMatrix {
    let m = sigma
        .matrix()
        .transpose()
        .kron(&threshold_operator(lambda, dims.d));
    let space = HilbertFactorization::from_pairs(&[
        ("A2", dims.na),
        ("B2", dims.nb),
        ("A3", dims.d),
        ("B3", dims.d),
    ])
    .expect("labels are distinct");
    Operator::new_unchecked(m, space)
        .permute(&RHO_LABELS)
        .expect("labels are present")
        .into_matrix()
}

/// Witness `W = tr_3[rho (I (x) (lambda I - phi_d))_3]` on `A1 (x) B1`.
///
/// Its detection value on `sigma` is `tr[W sigma^T]`, which equals the
/// activation condition. Products are mapped to products by the transpose,
/// so `W` and `W^T` are both nonnegative on separable states.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WitnessOperator {
    pub w: crate::tensor::io::MatrixFile,
    pub lambda: f64,
    pub d: usize,
    pub provenance: WitnessProvenance,
    #[serde(skip)]
    matrix: Option<ComplexMatrix>,
}

/// What the witness was built from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessProvenance {
    /// SHA-256 of `rho`'s entries (little-endian `re, im` pairs, row-major).
    pub rho_sha256: String,
    pub rho_space: HilbertFactorization,
    pub certificate: EBoundCertificate,
}

impl WitnessOperator {
    pub fn matrix(&self) -> ComplexMatrix {
        match &self.matrix {
            Some(m) => m.clone(),
            None => self.w.to_matrix().expect("witness file is well formed"),
        }
    }

    /// `tr[W sigma^T]`; negative means `sigma` is detected as entangled.
    pub fn detect(&self, sigma: &DensityOperator) -> Result<f64> {
        let sigma = sigma_on_a1b1(sigma)?;
        let w = self.matrix();
        if sigma.dim() != w.rows() {
            return Err(Error::arg(format!(
                "witness acts on dimension {} but sigma has dimension {}",
                w.rows(),
                sigma.dim()
            )));
        }
        let s = sigma.matrix();
        let v: Complex64 = w
            .as_slice()
            .iter()
            .zip(s.as_slice())
            .map(|(a, b)| a * b)
            .sum();
        Ok(v.re)
    }

    /// Minimum of `<a b| W |a b>` over `samples` Haar product states.
    pub fn min_over_products(&self, samples: usize, seed: u64) -> f64 {
        use crate::states::{haar_random_pure, stream_rng};
        use rayon::prelude::*;
        const CHUNK: usize = 1024;
        let w = self.matrix();
        let na = self.w.factors.first().map_or(0, |f| f.dim);
        let nb = w.rows() / na.max(1);
        let chunks = samples.div_ceil(CHUNK);
        (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut rng = stream_rng(seed, c as u64);
                let n = CHUNK.min(samples - c * CHUNK);
                let mut lo = f64::INFINITY;
                for _ in 0..n {
                    let a = haar_random_pure(na, &mut rng);
                    let b = haar_random_pure(nb, &mut rng);
                    let v: Vec<Complex64> = a
                        .iter()
                        .flat_map(|x| b.iter().map(move |y| x * y))
                        .collect();
                    lo = lo.min(w.quadratic_form(&v).re);
                }
                lo
            })
            .collect::<Vec<_>>()
            .into_iter()
            .fold(f64::INFINITY, f64::min)
    }
}

/// Builds the witness for a certified `rho`; fails with a precondition error
/// if no certificate with `E_d(rho) <= lambda` is available.
pub fn witness_from_rho(
    rho: &DensityOperator,
    lambda: f64,
    d: usize,
    na: usize,
) -> Result<WitnessOperator> {
    let certified = CertifiedRho::certify(rho.clone(), d)?;
    witness_from_certified(&certified, lambda, na)
}

/// Witness for an already certified `rho` whose A side is `A2 (x) A3` with
/// `dim A2 = na`.
pub fn witness_from_certified(
    certified: &CertifiedRho,
    lambda: f64,
    na: usize,
) -> Result<WitnessOperator> {
    let d = certified.d();
    check_lambda(lambda, d)?;
    let cert = certified.certificate();
    if cert.value > lambda + 1e-12 {
        return Err(Error::Precondition(format!(
            "certified bound E_d(rho) <= {} does not reach lambda = {lambda}",
            cert.value
        )));
    }
    let rho = certified.rho();
    let (_, da, db) = crate::filters::bipartite_matrix(rho)?;
    if na == 0 || da != na * d || db % d != 0 {
        return Err(Error::arg(format!(
            "rho with party dimensions {da}x{db} cannot be split as (A2 = {na}) x (A3 = {d})"
        )));
    }
    let dims = ActivationDims::new(na, db / d, d)?;
    let rho = rho_on_23(rho, dims)?;
    let r = rho.permute(&["A2", "B2", "A3", "B3"])?;
    let r = r.matrix();
    let x = threshold_operator(lambda, d);
    let n2 = dims.na * dims.nb;
    let n3 = d * d;
    let mut w = ComplexMatrix::zeros(n2, n2);
    for p in 0..n2 {
        for q in 0..n2 {
            let mut acc = ZERO;
            for s in 0..n3 {
                for t in 0..n3 {
                    acc += r[(p * n3 + s, q * n3 + t)] * x[(t, s)];
                }
            }
            w[(p, q)] = acc;
        }
    }
    let w = w.hermitian_part();
    Ok(WitnessOperator {
        w: crate::tensor::io::MatrixFile::from_matrix(&w, Some(&dims.sigma_space())),
        lambda,
        d,
        provenance: WitnessProvenance {
            rho_sha256: matrix_sha256(rho.matrix()),
            rho_space: rho.space().clone(),
            certificate: cert.clone(),
        },
        matrix: Some(w),
    })
}

pub(crate) fn check_lambda(lambda: f64, d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::arg("target dimension d must be at least 2"));
    }
    let lo = 1.0 / d as f64;
    if !(lambda >= lo - 1e-12 && lambda < 1.0) {
        return Err(Error::arg(format!("lambda = {lambda} outside [1/{d}, 1)")));
    }
    Ok(())
}

/// Hex SHA-256 of a matrix's entries.
pub fn matrix_sha256(m: &ComplexMatrix) -> String {
    use sha2::{Digest, Sha256};
    let mut h = Sha256::new();
    h.update((m.rows() as u64).to_le_bytes());
    h.update((m.cols() as u64).to_le_bytes());
    for z in m.as_slice() {
        h.update(z.re.to_le_bytes());
        h.update(z.im.to_le_bytes());
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filters::operator_norm;
    use crate::states::{
        max_entangled, maximally_mixed, random_density, stream_rng, werner, WernerParam,
    };

    fn random_pair(seed: u64) -> (DensityOperator, DensityOperator) {
        let mut rng = stream_rng(seed, 0);
        let dims = ActivationDims::new(2, 2, 2).unwrap();
        let rho = random_density(dims.rho_space(), 3, &mut rng);
        let sigma = random_density(dims.sigma_space(), 2, &mut rng);
        (rho, sigma)
    }

    #[test]
    fn activation_filter_shape_and_rank() {
        let f = activation_filter(2, 2, 2).unwrap();
        assert_eq!((f.a().rows(), f.a().cols()), (2, 8));
        let aat = f.a().matmul(&f.a().adjoint());
        assert!(aat.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
        assert!((operator_norm(f.b()) - 1.0).abs() < 1e-12);
        assert!(activation_filter(2, 2, 1).is_err());
    }

    #[test]
    fn contraction_identity_on_random_pairs() {
        let mut zs = Vec::new();
        for seed in 0..10 {
            let (rho, sigma) = random_pair(seed);
            let c = contraction_identity_check(&rho, &sigma, 2).unwrap();
            assert!(c.holds(), "{c:?}");
            zs.push(c.z);
        }
        assert!(zs.iter().all(|&z| z == zs[0] && z > 0.0));
    }

    #[test]
    fn maximally_mixed_sigma_gives_marginal() {
        let (rho, _) = random_pair(3);
        let sigma = maximally_mixed(2);
        let c = contraction_identity_check(&rho, &sigma, 2).unwrap();
        assert!(c.holds());
    }

    #[test]
    fn witness_matches_condition_and_closed_form() {
        // rho = eta (x) I/d^2 is a product across A|B only if eta is; use a
        // product eta so the separable-floor certificate applies.
        let d = 2;
        let eta = crate::states::product_basis(2, 0, 1).unwrap();
        let eta2 = eta.relabel(&[("A", "A2"), ("B", "B2")]).unwrap();
        let noise = maximally_mixed(d)
            .relabel(&[("A", "A3"), ("B", "B3")])
            .unwrap();
        let rho = eta2.tensor(&noise).unwrap().permute(&RHO_LABELS).unwrap();
        let lambda = 0.6;
        let w = witness_from_rho(&rho, lambda, d, 2).unwrap();
        let expected = eta.matrix().scale(lambda - 1.0 / 4.0);
        assert!(w.matrix().max_abs_diff(&expected) < 1e-12);
        let sigma = werner(&WernerParam::new(0.9, 2).unwrap());
        let c = activation_condition(&rho, &sigma, lambda, d).unwrap();
        assert!((w.detect(&sigma).unwrap() - c).abs() < 1e-12);
        assert!(c >= 0.0);
        assert!(w.min_over_products(2000, 1) >= -1e-9);
    }

    #[test]
    fn witness_requires_certificate() {
        let (phi4, _) = max_entangled(4).unwrap();
        let err = witness_from_rho(&phi4, 0.6, 2, 2).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)), "{err}");
    }

    #[test]
    fn condition_operator_matches_contraction() {
        let (rho, sigma) = random_pair(9);
        let dims = ActivationDims::new(2, 2, 2).unwrap();
        let y = condition_operator(&sigma, 0.7, dims);
        let direct = rho.expectation(&y);
        let c = activation_condition(&rho, &sigma, 0.7, 2).unwrap();
        assert!((direct - c).abs() < 1e-12);
    }
}
