//! The witness built from the demo partner state: nonnegative on sampled
//! product states, negative on the Werner state it was built to detect.
//!
//! cargo run --example witness

use entangle::activation::{demo_instance, run_activation_experiment, Budget};
use entangle::states::random_separable;
use entangle::states::stream_rng;

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
    let w = inst.witness()?;
    println!("W = {:?}", w.matrix());
    println!(
        "min over 10^4 product states: {:.6}",
        w.min_over_products(10_000, 1)
    );
    println!("tr[W sigma^T] = {:.6}", w.detect(&inst.sigma)?);
    let mut rng = stream_rng(2, 0);
    let lo = (0..100)
        .map(|_| w.detect(&random_separable(2, 2, 4, &mut rng)))
        .collect::<entangle::Result<Vec<_>>>()?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    println!("min over 100 random separable states: {lo:.6}");
    Ok(())
}
