//! A PPT entangled 3x3 state (alpha = 3.8) activates a Schmidt-rank-2 pure
//! state at d = 3 and lambda = 2/3, even though it has no distillable
//! entanglement itself.
//!
//! cargo run --release --example bound_entangled_activation

use entangle::activation::{bound_entangled_demo, run_activation_experiment, Budget};
use entangle::states::ppt_check;

fn main() -> entangle::Result<()> {
    let setup = bound_entangled_demo();
    let ppt = ppt_check(&setup.sigma, &["B"])?;
    println!(
        "sigma is PPT: {} (min eig of sigma^Gamma {:.2e})",
        ppt.is_ppt, ppt.min_eigenvalue
    );
    let mut budget = Budget::with_seed(0);
    budget.seesaw.restarts = 2;
    budget.seesaw.max_iterations = 60;
    let outcome =
        run_activation_experiment(&setup.sigma, setup.lambda, setup.d, setup.family, &budget)?;
    match outcome.found() {
        Some(inst) => {
            println!(
                "certificate: {} with E_3(rho) <= {:.6}",
                inst.e_rho_bound.family, inst.e_rho_bound.value
            );
            println!("activation condition = {:.6}", inst.activation_condition);
            println!(
                "E_3(rho (x) sigma) >= {:.6} > lambda = {:.6}",
                inst.e_joint_lower.e_lower, inst.lambda
            );
        }
        None => println!("not found within the budget"),
    }
    Ok(())
}
