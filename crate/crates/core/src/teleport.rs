//! Standard and conclusive teleportation through a bipartite resource.
//!
//! The generalized Bell basis is `|Phi_jk> = (I (x) W_jk)|phi_d>` with Weyl
//! operators `W_jk = X^j Z^k`. Outcome `jk` leaves Bob with
//! `conj(W_jk)|psi>` for the ideal resource, undone by `W_jk^T`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filters::{
    apply_filter, bipartite_matrix, e_d_seesaw, f_d_from_e, fidelity_with_phid, LocalFilterPair,
    SeesawConfig,
};
use crate::states::{haar_random_pure, phi_vector, stream_rng};
use crate::tensor::{ComplexMatrix, DensityOperator, HilbertFactorization, ZERO};

/// Samples per deterministic Monte Carlo chunk.
pub const MC_CHUNK: usize = 1024;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum TeleportMode {
    Standard,
    /// The resource is filtered (and renormalized) before the standard
    /// protocol; the filter's success probability is reported separately.
    Conclusive {
        filter: LocalFilterPair,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TeleportConfig {
    pub d: usize,
    pub n_samples: usize,
    pub seed: u64,
    #[serde(flatten)]
    pub mode: TeleportMode,
}

impl TeleportConfig {
    pub fn standard(d: usize, n_samples: usize, seed: u64) -> Self {
        Self {
            d,
            n_samples,
            seed,
            mode: TeleportMode::Standard,
        }
    }

    pub fn conclusive(d: usize, n_samples: usize, seed: u64, filter: LocalFilterPair) -> Self {
        Self {
            d,
            n_samples,
            seed,
            mode: TeleportMode::Conclusive { filter },
        }
    }
}

impl Default for TeleportConfig {
    fn default() -> Self {
        Self::standard(2, 20_000, 0)
    }
}

/// `X^j Z^k` with `X|s> = |s+1>`, `Z|s> = w^s |s>`.
pub fn weyl(d: usize, j: usize, k: usize) -> ComplexMatrix {
    let w = 2.0 * std::f64::consts::PI / d as f64;
    let mut m = ComplexMatrix::zeros(d, d);
    for s in 0..d {
        m[((s + j) % d, s)] = Complex64::from_polar(1.0, w * ((k * s) % d) as f64);
    }
    m
}

/// Bob's output for input operator `x` (linear in `x`), resource matrix `r`
/// on `A (x) B` with A first.
fn teleport_operator(r: &ComplexMatrix, x: &ComplexMatrix, d: usize) -> ComplexMatrix {
    let phi = phi_vector(d);
    let mut out = ComplexMatrix::zeros(d, d);
    for j in 0..d {
        for k in 0..d {
            let w = weyl(d, j, k);
            // V[c, a] = amplitude of |Phi_jk> on |c>|a>
            let v = ComplexMatrix::from_fn(d, d, |c, a| w[(a, c)] * phi[c * d + c]);
            // G = V^dagger x V; Bob gets tr_A[(G^T (x) I) r]
            let g = v.adjoint().matmul(x).matmul(&v);
            let mut bob = ComplexMatrix::zeros(d, d);
            for a in 0..d {
                for a2 in 0..d {
                    let gaa = g[(a, a2)];
                    if gaa == ZERO {
                        continue;
                    }
                    for b in 0..d {
                        for b2 in 0..d {
                            bob[(b, b2)] += gaa * r[(a * d + b, a2 * d + b2)];
                        }
                    }
                }
            }
            let u = w.transpose();
            out = &out + &bob.conjugate_by(&u);
        }
    }
    out
}

fn resource_matrix(resource: &DensityOperator, d: usize) -> Result<ComplexMatrix> {
    let (m, da, db) = bipartite_matrix(resource)?;
    if da != d || db != d {
        return Err(Error::arg(format!(
            "resource must live on C^{d} (x) C^{d}, got {da} x {db}"
        )));
    }
    Ok(m.scale(1.0 / m.trace().re))
}

/// Standard protocol: Bell measurement on input and Alice's half, Weyl
/// correction on Bob. The resource is used normalized.
pub fn standard_teleport(
    resource: &DensityOperator,
    psi_in: &[Complex64],
) -> Result<DensityOperator> {
    let d = psi_in.len();
    if d < 2 {
        return Err(Error::arg("input dimension must be at least 2"));
    }
    let r = resource_matrix(resource, d)?;
    let out = teleport_operator(&r, &ComplexMatrix::projector(psi_in), d).hermitian_part();
    DensityOperator::new(out, HilbertFactorization::single("B", d))
}

/// The protocol as a linear map, precomputed on the basis `|i><j|`.
#[derive(Debug, Clone)]
pub struct TeleportChannel {
    d: usize,
    /// `images[i * d + j]` is the output for input `|i><j|`.
    images: Vec<ComplexMatrix>,
}

impl TeleportChannel {
    pub fn new(resource: &DensityOperator, d: usize) -> Result<Self> {
        let r = resource_matrix(resource, d)?;
        let images = (0..d * d)
            .map(|ij| {
                let mut e = ComplexMatrix::zeros(d, d);
                e[(ij / d, ij % d)] = Complex64::new(1.0, 0.0);
                teleport_operator(&r, &e, d)
            })
            .collect();
        Ok(Self { d, images })
    }

    pub fn apply(&self, psi: &[Complex64]) -> ComplexMatrix {
        let d = self.d;
        let mut out = ComplexMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                out = &out + &self.images[i * d + j].scale_complex(psi[i] * psi[j].conj());
            }
        }
        out
    }

    /// `<psi| Lambda(psi) |psi>`.
    pub fn fidelity(&self, psi: &[Complex64]) -> f64 {
        self.apply(psi).quadratic_form(psi).re
    }
}

/// Monte Carlo estimate of the average fidelity over Haar inputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    pub standard_error: f64,
    pub n_samples: usize,
    /// Filter success probability in conclusive mode.
    pub success_probability: Option<f64>,
}

/// Average fidelity of the protocol selected by `cfg`. Samples run in chunks
/// of [`MC_CHUNK`]; chunk `c` draws from stream `c` of the seed, and chunks
/// are merged in index order, so results are independent of thread count.
pub fn average_fidelity_mc(resource: &DensityOperator, cfg: &TeleportConfig) -> Result<McEstimate> {
    if cfg.n_samples == 0 {
        return Err(Error::arg("n_samples must be at least 1"));
    }
    let d = cfg.d;
    let (effective, success_probability) = match &cfg.mode {
        TeleportMode::Standard => (resource.clone(), None),
        TeleportMode::Conclusive { filter } => {
            if filter.d() != d {
                return Err(Error::arg("filter output dimension differs from d"));
            }
            let out = apply_filter(resource, filter)?;
            (
                out.normalized(),
                Some(out.success_probability(resource.trace())),
            )
        }
    };
    let channel = TeleportChannel::new(&effective, d)?;
    let chunks = cfg.n_samples.div_ceil(MC_CHUNK);
    let partial: Vec<(usize, f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream_rng(cfg.seed, c as u64);
            let n = MC_CHUNK.min(cfg.n_samples - c * MC_CHUNK);
            // Welford within the chunk
            let (mut mean, mut m2) = (0.0, 0.0);
            for i in 0..n {
                let psi = haar_random_pure(d, &mut rng);
                let f = channel.fidelity(&psi);
                let delta = f - mean;
                mean += delta / (i + 1) as f64;
                m2 += delta * (f - mean);
            }
            (n, mean, m2)
        })
        .collect();
    // Chan et al. pairwise merge, in chunk order
    let (mut n, mut mean, mut m2) = (0usize, 0.0, 0.0);
    for (nb, mb, m2b) in partial {
        let total = n + nb;
        let delta = mb - mean;
        mean += delta * nb as f64 / total as f64;
        m2 += m2b + delta * delta * (n as f64) * (nb as f64) / total as f64;
        n = total;
    }
    let var = if n > 1 {
        (m2 / (n - 1) as f64).max(0.0)
    } else {
        0.0
    };
    Ok(McEstimate {
        mean,
        standard_error: (var / n as f64).sqrt(),
        n_samples: n,
        success_probability,
    })
}

/// Closed form of the standard protocol's average fidelity:
/// `(d f + 1) / (d + 1)` with `f = <phi_d| rho |phi_d>`.
pub fn standard_fidelity_closed_form(resource: &DensityOperator, d: usize) -> Result<f64> {
    let f = fidelity_with_phid(
        &DensityOperator::new_unchecked(
            resource_matrix(resource, d)?,
            HilbertFactorization::bipartite(d, d),
        ),
        d,
    )?;
    Ok((d as f64 * f + 1.0) / (d as f64 + 1.0))
}

/// End-to-end check of the conclusive-teleportation fidelity relation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConclusiveFidelityReport {
    pub d: usize,
    pub e_lower: f64,
    /// `(1 + d e_lower) / (1 + d)`.
    pub predicted: f64,
    /// Fidelity with `phi_d` reached by the stored filter.
    pub filter_fidelity: f64,
    /// `(1 + d filter_fidelity) / (1 + d)`.
    pub predicted_from_filter: f64,
    pub success_probability: f64,
    pub mc: McEstimate,
    /// `mc` within `3 SE + 1e-9` of `predicted_from_filter`, at least
    /// `predicted - 3 SE - 1e-3`, and at most 1.
    pub consistent: bool,
}

/// Seesaw for `E_d`, then teleportation through the filtered resource.
pub fn verify_conclusive_fidelity(
    rho: &DensityOperator,
    d: usize,
    seesaw: &SeesawConfig,
    mc: &TeleportConfig,
) -> Result<ConclusiveFidelityReport> {
    if mc.d != d {
        return Err(Error::arg("Monte Carlo dimension differs from d"));
    }
    let res = e_d_seesaw(rho, d, seesaw)?;
    let filter_fidelity = res.reverify(rho)?;
    let cfg = TeleportConfig::conclusive(d, mc.n_samples, mc.seed, res.best_filter.clone());
    let est = average_fidelity_mc(rho, &cfg)?;
    let predicted = f_d_from_e(res.e_lower, d)?;
    let predicted_from_filter = (1.0 + d as f64 * filter_fidelity) / (1.0 + d as f64);
    let tol = 3.0 * est.standard_error + 1e-9;
    let consistent = (est.mean - predicted_from_filter).abs() <= tol
        && est.mean >= predicted - 3.0 * est.standard_error - 1e-3
        && est.mean <= 1.0 + 1e-12;
    Ok(ConclusiveFidelityReport {
        d,
        e_lower: res.e_lower,
        predicted,
        filter_fidelity,
        predicted_from_filter,
        success_probability: res.success_probability,
        mc: est,
        consistent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{max_entangled, maximally_mixed, werner, WernerParam};

    #[test]
    fn weyl_operators_are_unitary() {
        for (j, k) in [(0, 0), (1, 2), (2, 1)] {
            let w = weyl(3, j, k);
            assert!(
                w.matmul(&w.adjoint())
                    .max_abs_diff(&ComplexMatrix::identity(3))
                    < 1e-14
            );
        }
    }

    #[test]
    fn perfect_resource_teleports_exactly() {
        for d in [2, 3] {
            let (phi, _) = max_entangled(d).unwrap();
            let mut rng = stream_rng(2, 0);
            for _ in 0..10 {
                let psi = haar_random_pure(d, &mut rng);
                let out = standard_teleport(&phi, &psi).unwrap();
                assert!(out.matrix().max_abs_diff(&ComplexMatrix::projector(&psi)) < 1e-10);
                assert!((out.trace() - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn noise_resource_depolarizes() {
        let mut rng = stream_rng(3, 0);
        let psi = haar_random_pure(2, &mut rng);
        let out = standard_teleport(&maximally_mixed(2), &psi).unwrap();
        assert!(
            out.matrix()
                .max_abs_diff(&ComplexMatrix::identity(2).scale(0.5))
                < 1e-12
        );
    }

    #[test]
    fn mc_matches_closed_form_for_werner() {
        let w = werner(&WernerParam::new(0.9, 2).unwrap());
        let est = average_fidelity_mc(&w, &TeleportConfig::standard(2, 20_000, 1)).unwrap();
        let exact = standard_fidelity_closed_form(&w, 2).unwrap();
        assert!(
            (est.mean - exact).abs() <= 3.0 * est.standard_error,
            "{est:?} vs {exact}"
        );
    }

    #[test]
    fn mc_is_deterministic_and_exact_for_phi() {
        let (phi, _) = max_entangled(2).unwrap();
        let cfg = TeleportConfig::standard(2, 3000, 9);
        let a = average_fidelity_mc(&phi, &cfg).unwrap();
        let b = average_fidelity_mc(&phi, &cfg).unwrap();
        assert_eq!(a, b);
        assert!((a.mean - 1.0).abs() < 1e-12 && a.standard_error < 1e-12);
    }
}
