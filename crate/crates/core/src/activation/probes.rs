//! Numerical probes of two structural facts about separable maps `$`:
//! `(lambda I - phi_d) - $(lambda I - phi_d) >= 0` forces a zero trace gap,
//! and the Werner weight `mu` of a filtered Werner state never grows.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_lambda, threshold_operator};
use crate::error::{Error, Result};
use crate::filters::{apply_filter, apply_map_to_matrix, LocalFilterPair, SeparableMap};
use crate::states::{haar_random_unitary, stream_rng, werner, werner_weight, WernerParam};
use crate::tensor::{eigensystem_unchecked, PSD_TOL};

/// Outcome of one probe of `Y = X - $(X)`, `X = lambda I - phi_d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceGapProbe {
    /// `min eig(Y) >= -1e-9`.
    pub psd_holds: bool,
    /// `tr Y`.
    pub trace_gap: f64,
    pub min_eigenvalue: f64,
}

impl TraceGapProbe {
    /// `psd_holds` with a trace gap above `1e-6 d^2`.
    pub fn is_counterexample(&self, d: usize) -> bool {
        self.psd_holds && self.trace_gap.abs() > 1e-6 * (d * d) as f64
    }
}

/// Evaluates `Y = X - $(X)` for a separable map on `C^d (x) C^d`.
pub fn trace_gap_probe(map: &impl SeparableMap, lambda: f64, d: usize) -> Result<TraceGapProbe> {
    check_lambda(lambda, d)?;
    let terms = map.terms();
    if terms.iter().any(|t| t.d() != d || t.input_dims() != (d, d)) {
        return Err(Error::arg(format!(
            "map must act on C^{d} (x) C^{d} -> C^{d} (x) C^{d}"
        )));
    }
    let x = threshold_operator(lambda, d);
    let y = (&x - &apply_map_to_matrix(map, &x)?).hermitian_part();
    let eig = eigensystem_unchecked(&y);
    let min_eigenvalue = eig.min();
    Ok(TraceGapProbe {
        psd_holds: min_eigenvalue >= -PSD_TOL,
        trace_gap: y.trace().re,
        min_eigenvalue,
    })
}

/// Probe distribution: with probability 1/4 a symmetry `U (x) conj(U)`,
/// otherwise complex-Gaussian filters rescaled to contractions.
pub fn random_probe_map(d: usize, rng: &mut impl Rng) -> LocalFilterPair {
    if rng.gen_bool(0.25) {
        let u = haar_random_unitary(d, rng);
        LocalFilterPair::new(u.clone(), u.conj()).expect("unitaries are nonzero")
    } else {
        LocalFilterPair::random_contraction(d, d, d, rng)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceGapSuite {
    pub d: usize,
    pub lambda: f64,
    pub trials: usize,
    pub seed: u64,
    pub psd_cases: usize,
    pub counterexamples: usize,
    /// Largest `|trace_gap|` among PSD cases (0 if none).
    pub max_abs_gap_when_psd: f64,
}

/// Runs `trials` probes; trial `t` draws its map from stream `t` of `seed`.
pub fn trace_gap_suite(d: usize, lambda: f64, trials: usize, seed: u64) -> Result<TraceGapSuite> {
    check_lambda(lambda, d)?;
    let probes: Vec<TraceGapProbe> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = stream_rng(seed, t as u64);
            trace_gap_probe(&random_probe_map(d, &mut rng), lambda, d)
        })
        .collect::<Result<_>>()?;
    let psd: Vec<&TraceGapProbe> = probes.iter().filter(|p| p.psd_holds).collect();
    Ok(TraceGapSuite {
        d,
        lambda,
        trials,
        seed,
        psd_cases: psd.len(),
        counterexamples: probes.iter().filter(|p| p.is_counterexample(d)).count(),
        max_abs_gap_when_psd: psd.iter().map(|p| p.trace_gap.abs()).fold(0.0, f64::max),
    })
}

/// Werner weight after filtering.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MuProbe {
    /// `tr[P_a $(omega)] / tr[$(omega)]`.
    pub mu_prime: f64,
    /// `mu_prime <= mu + 1e-9`.
    pub flag: bool,
}

/// Filters the Werner state `omega(mu)` and reads off its new Werner weight.
pub fn werner_mu_monotonicity_probe(mu: f64, d: usize, map: &impl SeparableMap) -> Result<MuProbe> {
    let omega = werner(&WernerParam::new(mu, d)?);
    let terms = map.terms();
    if terms.iter().any(|t| t.d() != d) {
        return Err(Error::arg(format!("map must output C^{d} (x) C^{d}")));
    }
    let out = apply_filter(&omega, map)?;
    let mu_prime = werner_weight(&out.state)?;
    Ok(MuProbe {
        mu_prime,
        flag: mu_prime <= mu + 1e-9,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MuSuite {
    pub mu: f64,
    pub d: usize,
    pub trials: usize,
    pub seed: u64,
    pub violations: usize,
    pub max_mu_prime: f64,
}

/// `trials` random contraction filters applied to `omega(mu)`.
pub fn werner_mu_suite(mu: f64, d: usize, trials: usize, seed: u64) -> Result<MuSuite> {
    let probes: Vec<MuProbe> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = stream_rng(seed, t as u64);
            let f = LocalFilterPair::random_contraction(d, d, d, &mut rng);
            werner_mu_monotonicity_probe(mu, d, &f)
        })
        .collect::<Result<_>>()?;
    Ok(MuSuite {
        mu,
        d,
        trials,
        seed,
        violations: probes.iter().filter(|p| !p.flag).count(),
        max_mu_prime: probes
            .iter()
            .map(|p| p.mu_prime)
            .fold(f64::NEG_INFINITY, f64::max),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::ComplexMatrix;

    #[test]
    fn identity_map_has_zero_gap() {
        let p = trace_gap_probe(&LocalFilterPair::identity(2), 0.6, 2).unwrap();
        assert!(p.psd_holds);
        assert!(p.trace_gap.abs() < 1e-15);
    }

    #[test]
    fn zero_map_is_not_psd() {
        let zero =
            LocalFilterPair::new(ComplexMatrix::zeros(2, 2), ComplexMatrix::identity(2)).unwrap();
        let p = trace_gap_probe(&zero, 0.6, 2).unwrap();
        assert!(!p.psd_holds);
    }

    #[test]
    fn small_suite_has_no_counterexamples() {
        let s = trace_gap_suite(2, 0.6, 500, 3).unwrap();
        assert_eq!(s.counterexamples, 0);
        assert!(s.psd_cases > 0);
    }

    #[test]
    fn mu_probe_identity_and_suite() {
        let p = werner_mu_monotonicity_probe(0.7, 3, &LocalFilterPair::identity(3)).unwrap();
        assert!((p.mu_prime - 0.7).abs() < 1e-12 && p.flag);
        let p = werner_mu_monotonicity_probe(0.0, 2, &LocalFilterPair::identity(2)).unwrap();
        assert!(p.mu_prime.abs() < 1e-12);
        let s = werner_mu_suite(0.8, 2, 200, 5).unwrap();
        assert_eq!(s.violations, 0);
    }
}
