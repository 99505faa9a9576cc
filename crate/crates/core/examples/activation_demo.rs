//! The two-qubit activation demo: a PPT partner state rho (so E_2(rho) = 1/2
//! <= lambda) whose entanglement fraction with a Werner state exceeds lambda.
//!
//! cargo run --example activation_demo

use entangle::activation::{
    contraction_identity_check, demo_instance, run_activation_experiment, Budget,
};

fn main() -> entangle::Result<()> {
    let setup = demo_instance();
    let outcome = run_activation_experiment(
        &setup.sigma,
        setup.lambda,
        setup.d,
        setup.family,
        &Budget::with_seed(0),
    )?;
    let inst = outcome.found().expect("the demo activates");
    let id = contraction_identity_check(&inst.rho, &inst.sigma, inst.d)?;
    println!("lambda = {}, d = {}", inst.lambda, inst.d);
    println!(
        "certificate: {:?} ({}) E_d(rho) <= {}",
        inst.e_rho_bound.kind, inst.e_rho_bound.family, inst.e_rho_bound.value
    );
    println!("activation condition = {:.6}", inst.activation_condition);
    println!(
        "contraction identity residual = {:.2e}, z = {}",
        id.max_residual, id.z
    );
    println!(
        "fidelity after activation filter = {:?}",
        inst.activation_filter_fidelity
    );
    println!(
        "E_d(rho (x) sigma) >= {:.6} (re-verified {:.6}, success probability {:.4})",
        inst.e_joint_lower.e_lower,
        inst.reverify()?,
        inst.e_joint_lower.success_probability
    );
    Ok(())
}
