//! Certified families of partner states `rho` and the experiment runner
//! that searches a family for a `rho` activated by `sigma`.

use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::certificate::{CertifiedRho, EBoundCertificate};
use super::{
    activation_condition, activation_filter, check_lambda, condition_operator,
    contraction_identity_check, dims_from_sigma, joint_state, sigma_on_a1b1,
    witness_from_certified, ActivationDims, WitnessOperator, JOINT_MAX_DIM, RHO_LABELS,
};
use crate::error::{Error, Result};
use crate::filters::{
    apply_filter, e_d_seesaw_with_starts, fidelity_with_phid, LocalFilterPair, SeesawConfig,
    SeesawResult,
};
use crate::states::{
    antisymmetric_projector, ginibre, haar_random_pure, horodecki_alpha, phi_projector, stream_rng,
    symmetric_projector, werner, WernerParam,
};
use crate::tensor::{
    eigensystem_unchecked, rayleigh_max_unchecked, ComplexMatrix, DensityOperator,
    HilbertFactorization, Operator, ONE,
};

/// Seesaw success requires `e_joint > lambda + SUCCESS_MARGIN`.
pub const SUCCESS_MARGIN: f64 = 1e-9;

/// Generator streams for family searches start here, away from the seesaw's.
const SEARCH_STREAM: u64 = 1 << 32;

/// Family searched for the partner state `rho`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RhoFamily {
    /// Pure product states; `E_d(rho) = 1/d`.
    SeparableFloor,
    /// Pure states of Schmidt rank at most `k`; `E_d(rho) <= min(k, d)/d`.
    SchmidtRank { k: usize },
    /// PPT states `sum c_ij P_i (x) Q_j` with `P_i` the (anti)symmetric
    /// projectors on `A2 B2` and `Q_j` in `{phi_d, I - phi_d}` on `A3 B3`;
    /// `E_d(rho) = 1/d`.
    PptTwirled,
}

impl RhoFamily {
    /// Upper bound on `E_d` for members of the family.
    pub fn bound(&self, d: usize) -> f64 {
        match self {
            RhoFamily::SchmidtRank { k } => (*k).min(d) as f64 / d as f64,
            _ => 1.0 / d as f64,
        }
    }
}

impl fmt::Display for RhoFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RhoFamily::SeparableFloor => write!(f, "separable"),
            RhoFamily::SchmidtRank { k } => write!(f, "schmidt:{k}"),
            RhoFamily::PptTwirled => write!(f, "ppt-twirled"),
        }
    }
}

impl FromStr for RhoFamily {
    type Err = Error;

    /// `separable`, `schmidt:K` or `ppt-twirled`.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "separable" | "separable-floor" => Ok(RhoFamily::SeparableFloor),
            "ppt" | "ppt-twirled" => Ok(RhoFamily::PptTwirled),
            other => {
                let k = other
                    .strip_prefix("schmidt:")
                    .or_else(|| other.strip_prefix("schmidt-rank:"))
                    .ok_or_else(|| Error::arg(format!("unknown rho family '{other}'")))?;
                let k: usize = k
                    .parse()
                    .map_err(|_| Error::arg(format!("bad Schmidt rank '{k}'")))?;
                if k == 0 {
                    return Err(Error::arg("Schmidt rank must be positive"));
                }
                Ok(RhoFamily::SchmidtRank { k })
            }
        }
    }
}

/// Search effort for [`run_activation_experiment`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Budget {
    /// Independent starts of the family search.
    pub candidates: usize,
    /// Alternating-minimization sweeps per start.
    pub search_iterations: usize,
    /// Joint seesaw configuration; its seed also drives the family search.
    pub seesaw: SeesawConfig,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            candidates: 8,
            search_iterations: 200,
            seesaw: SeesawConfig {
                restarts: 8,
                max_iterations: 300,
                ..SeesawConfig::default()
            },
        }
    }
}

impl Budget {
    pub fn with_seed(seed: u64) -> Self {
        let mut b = Self::default();
        b.seesaw.seed = seed;
        b
    }
}

/// Inputs of an activation experiment.
#[derive(Debug, Clone)]
pub struct ActivationSetup {
    pub sigma: DensityOperator,
    pub lambda: f64,
    pub d: usize,
    pub family: RhoFamily,
}

/// Two-qubit Werner `sigma` with `mu = 0.8`, `lambda = 0.6`, `d = 2`, searched
/// over the PPT-twirled family.
pub fn demo_instance() -> ActivationSetup {
    ActivationSetup {
        sigma: werner(&WernerParam::new(0.8, 2).expect("valid Werner parameter")),
        lambda: 0.6,
        d: 2,
        family: RhoFamily::PptTwirled,
    }
}

/// PPT entangled `3 (x) 3` state (`alpha = 3.8`) activated at `d = 3`,
/// `lambda = 2/3`, with `rho` of Schmidt rank 2.
pub fn bound_entangled_demo() -> ActivationSetup {
    ActivationSetup {
        sigma: horodecki_alpha(3.8).expect("alpha in range"),
        lambda: 2.0 / 3.0,
        d: 3,
        family: RhoFamily::SchmidtRank { k: 2 },
    }
}

/// A certified `rho` and the joint seesaw bound it reaches with `sigma`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ActivationInstance {
    /// On `A2 A3 B2 B3`.
    pub rho: DensityOperator,
    /// On `A1 B1`.
    pub sigma: DensityOperator,
    pub lambda: f64,
    pub d: usize,
    pub family: RhoFamily,
    pub e_rho_bound: EBoundCertificate,
    pub activation_condition: f64,
    /// Constant of the contraction identity for these dimensions.
    pub z: f64,
    /// Fidelity with `phi_d` after the activation filter, if it does not
    /// annihilate the joint state.
    pub activation_filter_fidelity: Option<f64>,
    pub e_joint_lower: SeesawResult,
    /// `e_joint_lower` recomputed from its stored filter.
    pub reverified_e_joint: f64,
}

impl ActivationInstance {
    /// Re-applies the stored joint filter to `sigma (x) rho` from scratch.
    pub fn reverify(&self) -> Result<f64> {
        let joint = joint_state(&self.rho, &self.sigma, self.d)?;
        self.e_joint_lower.reverify(&joint)
    }

    /// Witness built from this instance's `rho`.
    pub fn witness(&self) -> Result<WitnessOperator> {
        let na = self
            .rho
            .space()
            .dim_of("A2")
            .expect("rho has canonical labels");
        let certified = CertifiedRho::certify(self.rho.clone(), self.d)?;
        witness_from_certified(&certified, self.lambda, na)
    }
}

/// Outcome when no member of the family was shown to be activated. This is
/// inconclusive about `sigma`: the family and budget are finite.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NotFoundReport {
    pub family: RhoFamily,
    pub lambda: f64,
    pub d: usize,
    pub candidates_tried: usize,
    pub min_activation_condition: f64,
    pub best_e_joint_lower: f64,
    pub note: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum ActivationOutcome {
    Found(Box<ActivationInstance>),
    NotFound(NotFoundReport),
}

impl ActivationOutcome {
    pub fn is_found(&self) -> bool {
        matches!(self, ActivationOutcome::Found(_))
    }

    pub fn found(&self) -> Option<&ActivationInstance> {
        match self {
            ActivationOutcome::Found(i) => Some(i),
            ActivationOutcome::NotFound(_) => None,
        }
    }
}

/// Searches `family` for the `rho` minimizing the activation condition, then
/// bounds `E_d(rho (x) sigma)` from below by a seesaw warm-started from the
/// activation filter. Success means the certified `E_d(rho) <= lambda` and
/// the verified joint bound exceeds `lambda`.
pub fn run_activation_experiment(
    sigma: &DensityOperator,
    lambda: f64,
    d: usize,
    family: RhoFamily,
    budget: &Budget,
) -> Result<ActivationOutcome> {
    check_lambda(lambda, d)?;
    if budget.candidates == 0 || budget.search_iterations == 0 {
        return Err(Error::arg(
            "budget must allow at least one candidate and one iteration",
        ));
    }
    let dims = dims_from_sigma(sigma, d)?;
    if dims.joint_dim() > JOINT_MAX_DIM {
        return Err(Error::Capacity {
            dim: dims.joint_dim(),
            max: JOINT_MAX_DIM,
        });
    }
    if family.bound(d) > lambda + 1e-12 {
        return Err(Error::arg(format!(
            "family {family} only certifies E_d <= {}, above lambda = {lambda}",
            family.bound(d)
        )));
    }
    let sigma = sigma_on_a1b1(sigma)?;
    let y = condition_operator(&sigma, lambda, dims);
    let seed = budget.seesaw.seed;

    let candidates: Vec<ComplexMatrix> = match family {
        RhoFamily::SeparableFloor => (0..budget.candidates)
            .into_par_iter()
            .map(|c| product_search(&y, dims, budget.search_iterations, seed, c as u64))
            .collect(),
        RhoFamily::SchmidtRank { k } => (0..budget.candidates)
            .into_par_iter()
            .map(|c| schmidt_search(&y, dims, k, budget.search_iterations, seed, c as u64))
            .collect::<Result<_>>()?,
        RhoFamily::PptTwirled => vec![ppt_twirled_search(&sigma, lambda, dims)?],
    };
    let candidates_tried = candidates.len();

    let mut best: Option<(f64, ComplexMatrix)> = None;
    for m in candidates {
        let value = Operator::new_unchecked(m.clone(), dims.rho_space()).expectation(&y);
        if best.as_ref().is_none_or(|(b, _)| value < *b) {
            best = Some((value, m));
        }
    }
    let (_, m) = best.expect("at least one candidate");
    let rho = DensityOperator::new(m, dims.rho_space())?;
    let certified = CertifiedRho::certify(rho, d)?;
    let cert = certified.certificate().clone();
    if cert.value > lambda + 1e-12 {
        return Err(Error::Numerical(format!(
            "search produced a state certified only at E_d <= {}",
            cert.value
        )));
    }
    let rho = certified.rho().clone();
    let condition = activation_condition(&rho, &sigma, lambda, d)?;
    let z = contraction_identity_check(&rho, &sigma, d)
        .map(|c| c.z)
        .unwrap_or(0.0);

    let joint = joint_state(&rho, &sigma, d)?;
    let filter = activation_filter(dims.na, dims.nb, d)?;
    let activation_filter_fidelity = match apply_filter(&joint, &filter) {
        Ok(out) => Some(fidelity_with_phid(&out.state, d)?),
        Err(Error::FilterAnnihilation { .. }) => None,
        Err(e) => return Err(e),
    };
    let mut warm = vec![filter];
    if dims.na == d && dims.nb == d {
        warm.push(sigma_only_filter(dims));
    }
    let e_joint = e_d_seesaw_with_starts(&joint, d, &budget.seesaw, &warm)?;
    let reverified = e_joint.reverify(&joint)?;
    if (reverified - e_joint.e_lower).abs() > 1e-8 {
        return Err(Error::Numerical(format!(
            "joint filter re-verification gave {reverified}, seesaw reported {}",
            e_joint.e_lower
        )));
    }

    if e_joint.e_lower > lambda + SUCCESS_MARGIN {
        Ok(ActivationOutcome::Found(Box::new(ActivationInstance {
            rho,
            sigma,
            lambda,
            d,
            family,
            e_rho_bound: cert,
            activation_condition: condition,
            z,
            activation_filter_fidelity,
            e_joint_lower: e_joint,
            reverified_e_joint: reverified,
        })))
    } else {
        Ok(ActivationOutcome::NotFound(NotFoundReport {
            family,
            lambda,
            d,
            candidates_tried,
            min_activation_condition: condition,
            best_e_joint_lower: e_joint.e_lower,
            note: "inconclusive: no member of the searched family was activated within the budget"
                .into(),
        }))
    }
}

/// `A = I_{A1} (x) <0|_{A2 A3}` (and likewise for B): keeps `sigma`, discards `rho`.
fn sigma_only_filter(dims: ActivationDims) -> LocalFilterPair {
    let side = |n: usize| {
        let mut m = ComplexMatrix::zeros(dims.d, n * n * dims.d);
        for k in 0..dims.d {
            m[(k, k * n * dims.d)] = ONE;
        }
        m
    };
    LocalFilterPair::new(side(dims.na), side(dims.nb)).expect("nonzero filters")
}

/// `Y_b[i,k] = sum_{j,l} conj(b_j) Y[(i,j),(k,l)] b_l`.
fn contract_b(y: &ComplexMatrix, b: &[Complex64], na: usize) -> ComplexMatrix {
    let nb = b.len();
    ComplexMatrix::from_fn(na, na, |i, k| {
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..nb {
            for l in 0..nb {
                acc += b[j].conj() * y[(i * nb + j, k * nb + l)] * b[l];
            }
        }
        acc
    })
}

/// `Y_a[j,l] = sum_{i,k} conj(a_i) Y[(i,j),(k,l)] a_k`.
fn contract_a(y: &ComplexMatrix, a: &[Complex64], nb: usize) -> ComplexMatrix {
    let na = a.len();
    ComplexMatrix::from_fn(nb, nb, |j, l| {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..na {
            for k in 0..na {
                acc += a[i].conj() * y[(i * nb + j, k * nb + l)] * a[k];
            }
        }
        acc
    })
}

fn bottom_eigenvector(m: &ComplexMatrix) -> (f64, Vec<Complex64>) {
    let eig = eigensystem_unchecked(&m.hermitian_part());
    let last = eig.values.len() - 1;
    (eig.values[last], eig.vector(last))
}

/// Alternating minimization of `<a b| Y |a b>` over product vectors.
fn product_search(
    y: &ComplexMatrix,
    dims: ActivationDims,
    iters: usize,
    seed: u64,
    c: u64,
) -> ComplexMatrix {
    let na = dims.na * dims.d;
    let nb = dims.nb * dims.d;
    let mut rng = stream_rng(seed, SEARCH_STREAM + c);
    let mut b = haar_random_pure(nb, &mut rng);
    let mut a = haar_random_pure(na, &mut rng);
    let mut last = f64::INFINITY;
    for _ in 0..iters {
        a = bottom_eigenvector(&contract_b(y, &b, na)).1;
        let (value, nb_vec) = bottom_eigenvector(&contract_a(y, &a, nb));
        b = nb_vec;
        if (last - value).abs() < 1e-14 {
            break;
        }
        last = value;
    }
    let v: Vec<Complex64> = a
        .iter()
        .flat_map(|x| b.iter().map(move |z| x * z))
        .collect();
    ComplexMatrix::projector(&v)
}

/// Alternating minimization of `<psi| Y |psi> / <psi|psi>` over
/// `psi = vec(X Z^T)` with `X: na x k`, `Z: nb x k`.
fn schmidt_search(
    y: &ComplexMatrix,
    dims: ActivationDims,
    k: usize,
    iters: usize,
    seed: u64,
    c: u64,
) -> Result<ComplexMatrix> {
    let na = dims.na * dims.d;
    let nb = dims.nb * dims.d;
    let k = k.min(na).min(nb);
    let mut rng = stream_rng(seed, SEARCH_STREAM + c);
    let mut z = ginibre(nb, k, &mut rng);
    let neg_y = y.scale(-1.0);
    let mut best: Option<(f64, Vec<Complex64>)> = None;
    let mut last = f64::INFINITY;
    for _ in 0..iters {
        // X-step: psi[(a,b)] = sum_r X[a,r] Z[b,r]
        let l = ComplexMatrix::from_fn(na * nb, na * k, |row, col| {
            let (a, b) = (row / nb, row % nb);
            let (a2, r) = (col / k, col % k);
            if a == a2 {
                z[(b, r)]
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let sol = rayleigh_step(&neg_y, &l)?;
        let x = ComplexMatrix::from_fn(na, k, |a, r| sol[a * k + r]);
        let l = ComplexMatrix::from_fn(na * nb, nb * k, |row, col| {
            let (a, b) = (row / nb, row % nb);
            let (b2, r) = (col / k, col % k);
            if b == b2 {
                x[(a, r)]
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let sol = rayleigh_step(&neg_y, &l)?;
        z = ComplexMatrix::from_fn(nb, k, |b, r| sol[b * k + r]);

        let psi = schmidt_vector(&x, &z);
        let value = y.quadratic_form(&psi).re;
        if best.as_ref().is_none_or(|(bv, _)| value < *bv) {
            best = Some((value, psi));
        }
        if (last - value).abs() < 1e-14 {
            break;
        }
        last = value;
    }
    let (_, psi) = best.ok_or_else(|| Error::Numerical("empty Schmidt search".into()))?;
    Ok(ComplexMatrix::projector(&psi))
}

fn rayleigh_step(n: &ComplexMatrix, l: &ComplexMatrix) -> Result<Vec<Complex64>> {
    let lt = l.adjoint();
    let num = lt.matmul(n).matmul(l).hermitian_part();
    let den = lt.matmul(l).hermitian_part();
    Ok(rayleigh_max_unchecked(&num, &den, None)?.vector)
}

fn schmidt_vector(x: &ComplexMatrix, z: &ComplexMatrix) -> Vec<Complex64> {
    let m = x.matmul(&z.transpose());
    let norm = m.frobenius_norm();
    m.as_slice().iter().map(|v| v / norm).collect()
}

/// Exact minimization of the activation condition over the PPT-twirled
/// family: a 4-variable linear program solved by vertex enumeration.
///
/// With `rho = sum c_ij P_i (x) Q_j`, every `P_i^Gamma (x) Q_j^Gamma` is
/// diagonal in `{phi_n, 1 - phi_n} (x) {Pi_s, Pi_a}`, so PPT is four linear
/// inequalities; positivity is `c >= 0`; and `tr rho = 1` is one equality.
fn ppt_twirled_search(
    sigma: &DensityOperator,
    lambda: f64,
    dims: ActivationDims,
) -> Result<ComplexMatrix> {
    if dims.na != dims.nb || dims.na < 2 {
        return Err(Error::arg(
            "the PPT-twirled family needs sigma on n x n with n >= 2",
        ));
    }
    let n = dims.na;
    let d = dims.d;
    let nf = n as f64;
    let df = d as f64;
    let pa = antisymmetric_projector(n);
    let ps = symmetric_projector(n);
    // variables: (a, phi), (a, perp), (s, phi), (s, perp)
    let tp = [sigma.expectation(&pa), sigma.expectation(&ps)];
    let t = [lambda - 1.0, lambda * (df * df - 1.0)];
    let alpha = [[(1.0 - nf) / 2.0, 0.5], [(1.0 + nf) / 2.0, 0.5]];
    let beta = [[1.0 / df, -1.0 / df], [1.0 - 1.0 / df, 1.0 + 1.0 / df]];
    let tr_p = [nf * (nf - 1.0) / 2.0, nf * (nf + 1.0) / 2.0];
    let tr_q = [1.0, df * df - 1.0];
    let idx = |i: usize, j: usize| 2 * i + j;

    let objective = Vector4::from_fn(|v, _| tp[v / 2] * t[v % 2]);
    let trace_row = Vector4::from_fn(|v, _| tr_p[v / 2] * tr_q[v % 2]);
    let mut rows: Vec<Vector4<f64>> = (0..4)
        .map(|v| Vector4::from_fn(|u, _| if u == v { 1.0 } else { 0.0 }))
        .collect();
    for x in 0..2 {
        for y in 0..2 {
            let mut g = Vector4::zeros();
            for (i, a) in alpha.iter().enumerate() {
                for (j, b) in beta.iter().enumerate() {
                    g[idx(i, j)] = a[x] * b[y];
                }
            }
            rows.push(g);
        }
    }

    let mut best: Option<(f64, Vector4<f64>)> = None;
    for p in 0..rows.len() {
        for q in p + 1..rows.len() {
            for r in q + 1..rows.len() {
                let m = Matrix4::from_rows(&[
                    rows[p].transpose(),
                    rows[q].transpose(),
                    rows[r].transpose(),
                    trace_row.transpose(),
                ]);
                let Some(inv) = m.try_inverse() else { continue };
                let c = inv * Vector4::new(0.0, 0.0, 0.0, 1.0);
                if !c.iter().all(|v| v.is_finite()) || rows.iter().any(|g| g.dot(&c) < -1e-12) {
                    continue;
                }
                let value = objective.dot(&c);
                if best.as_ref().is_none_or(|(b, _)| value < *b - 1e-15) {
                    best = Some((value, c));
                }
            }
        }
    }
    let (_, c) =
        best.ok_or_else(|| Error::Numerical("PPT-twirled program has no feasible vertex".into()))?;

    let phi = phi_projector(d);
    let perp = &ComplexMatrix::identity(d * d) - &phi;
    let p_ops = [&pa, &ps];
    let q_ops = [&phi, &perp];
    let mut m = ComplexMatrix::zeros(n * n * d * d, n * n * d * d);
    for i in 0..2 {
        for j in 0..2 {
            let w = c[idx(i, j)].max(0.0);
            if w > 0.0 {
                m = &m + &p_ops[i].kron(q_ops[j]).scale(w);
            }
        }
    }
    let tr = m.trace().re;
    let space = HilbertFactorization::from_pairs(&[("A2", n), ("B2", n), ("A3", d), ("B3", d)])?;
    Ok(Operator::new_unchecked(m.scale(1.0 / tr), space)
        .permute(&RHO_LABELS)?
        .into_matrix())
}
