//! The Procrustean filter diag(tan(theta), 1) turns cos(theta)|00> +
//! sin(theta)|11> into phi_2; the seesaw finds an equivalent filter.
//!
//! cargo run --example procrustean_filter

use entangle::filters::{
    apply_filter, e_d_seesaw, fidelity_with_phid, LocalFilterPair, SeesawConfig,
};
use entangle::states::pure_cos_sin;
use entangle::tensor::ComplexMatrix;

fn main() -> entangle::Result<()> {
    for theta in [
        std::f64::consts::PI / 12.0,
        std::f64::consts::PI / 6.0,
        std::f64::consts::PI / 4.0,
    ] {
        let (rho, _) = pure_cos_sin(theta);
        let a = ComplexMatrix::diagonal(&[theta.tan(), 1.0]);
        let filter = LocalFilterPair::new(a, ComplexMatrix::identity(2))?;
        let out = apply_filter(&rho, &filter)?;
        let seesaw = e_d_seesaw(&rho, 2, &SeesawConfig::with_seed(1))?;
        println!(
            "theta = {theta:.4}: explicit filter fidelity {:.9} (p = {:.4}), seesaw {:.9} (p = {:.4})",
            fidelity_with_phid(&out.state, 2)?,
            out.success_probability(rho.trace()),
            seesaw.e_lower,
            seesaw.success_probability
        );
    }
    Ok(())
}
