//! Seesaw lower bounds on the entanglement fraction E_d and the resulting
//! conclusive-teleportation fidelity.
//!
//! cargo run --example edist_seesaw

use entangle::filters::{e_d_seesaw, f_d_from_e, SeesawConfig};
use entangle::states::StateSpec;

fn main() -> entangle::Result<()> {
    let cfg = SeesawConfig {
        restarts: 16,
        ..SeesawConfig::with_seed(7)
    };
    for (spec, d) in [
        ("kind=max_entangled,d=2", 2),
        ("kind=product,d=3,i=1,j=1", 3),
        ("kind=pure,theta=pi/6", 2),
        ("kind=werner,d=2,mu=0.9", 2),
        ("kind=isotropic,d=3,f=0.5", 3),
    ] {
        let rho = spec.parse::<StateSpec>()?.build()?;
        let r = e_d_seesaw(&rho, d, &cfg)?;
        println!(
            "{spec:<28} E_{d} >= {:.6}  F_{d} >= {:.6}  p_success = {:.4}",
            r.e_lower,
            f_d_from_e(r.e_lower, d)?,
            r.success_probability
        );
    }
    Ok(())
}
