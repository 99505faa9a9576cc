//! Random probes: separable maps with (lambda I - phi_d) - $(lambda I - phi_d)
//! positive semidefinite have zero trace gap, and filtering never raises the
//! Werner weight mu.
//!
//! cargo run --example lemma_probes

use entangle::activation::{trace_gap_suite, werner_mu_suite};

fn main() -> entangle::Result<()> {
    for lambda in [0.5, 0.6, 0.9] {
        let s = trace_gap_suite(2, lambda, 10_000, 3)?;
        println!(
            "lambda = {lambda}: {} trials, {} PSD cases, max |gap| {:.2e}, counterexamples {}",
            s.trials, s.psd_cases, s.max_abs_gap_when_psd, s.counterexamples
        );
    }
    for d in [2, 3] {
        for mu in [0.6, 0.8, 1.0] {
            let s = werner_mu_suite(mu, d, 1000, 5)?;
            println!(
                "d = {d}, mu = {mu}: max mu' = {:.6}, violations {}",
                s.max_mu_prime, s.violations
            );
        }
    }
    Ok(())
}
