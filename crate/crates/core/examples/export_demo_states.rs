//! Writes the demo states as matrix JSON files for use with the CLI.
//!
//! cargo run --example export_demo_states -- [output-dir]

use std::path::PathBuf;

use entangle::activation::{demo_instance, run_activation_experiment, Budget};
use entangle::states::{horodecki_alpha, werner, WernerParam};
use entangle::tensor::io::write_density;

fn main() -> entangle::Result<()> {
    let dir = PathBuf::from(
        std::env::args()
            .nth(1)
            .unwrap_or_else(|| "examples/data".into()),
    );
    std::fs::create_dir_all(&dir)?;

    let sigma_be = horodecki_alpha(3.8)?;
    write_density(dir.join("horodecki_alpha_3.8.json"), &sigma_be)?;

    let sigma_w = werner(&WernerParam::new(0.8, 2)?);
    write_density(dir.join("werner_mu_0.8.json"), &sigma_w)?;

    let setup = demo_instance();
    let outcome = run_activation_experiment(
        &setup.sigma,
        setup.lambda,
        setup.d,
        setup.family,
        &Budget::default(),
    )?;
    let inst = outcome.found().expect("the demo instance activates");
    write_density(dir.join("demo_rho.json"), &inst.rho)?;

    println!("wrote demo states to {}", dir.display());
    Ok(())
}
