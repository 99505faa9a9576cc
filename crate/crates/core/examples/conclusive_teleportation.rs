//! Monte Carlo teleportation: the standard protocol against its closed
//! form, and conclusive teleportation through the best seesaw filter.
//!
//! cargo run --example conclusive_teleportation

use entangle::filters::SeesawConfig;
use entangle::states::StateSpec;
use entangle::teleport::{
    average_fidelity_mc, standard_fidelity_closed_form, verify_conclusive_fidelity, TeleportConfig,
};

fn main() -> entangle::Result<()> {
    let mc = TeleportConfig::standard(2, 20_000, 11);
    let seesaw = SeesawConfig {
        restarts: 16,
        ..SeesawConfig::with_seed(11)
    };
    for spec in [
        "kind=max_entangled,d=2",
        "kind=werner,d=2,mu=0.9",
        "kind=pure,theta=pi/6",
        "kind=product,d=2",
    ] {
        let rho = spec.parse::<StateSpec>()?.build()?;
        let std = average_fidelity_mc(&rho, &mc)?;
        let exact = standard_fidelity_closed_form(&rho, 2)?;
        let r = verify_conclusive_fidelity(&rho, 2, &seesaw, &mc)?;
        println!(
            "{spec:<24} standard {:.4} +- {:.4} (exact {:.4}) | conclusive {:.4} +- {:.4}, predicted {:.4}, p = {:.3}, consistent = {}",
            std.mean, std.standard_error, exact, r.mc.mean, r.mc.standard_error, r.predicted_from_filter,
            r.success_probability, r.consistent
        );
    }
    Ok(())
}
