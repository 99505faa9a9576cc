//! Tensor-factored linear algebra: products, partial trace and transpose,
//! Hermitian spectra, Schmidt ranks and the matrix file format.
//!
//! cargo run --example tensor_ops

use entangle::states::{max_entangled, pure_cos_sin};
use entangle::tensor::io::MatrixFile;
use entangle::tensor::{hermitian_eigensystem, schmidt_rank, TensorProduct};

fn main() -> entangle::Result<()> {
    let (phi, v) = max_entangled(2)?;
    println!(
        "phi_2 on {} with amplitudes {:?}",
        phi.space(),
        v.iter().map(|z| z.re).collect::<Vec<_>>()
    );

    let marginal = phi.partial_trace(&["A"])?;
    println!("tr_B phi_2 = {:?}", marginal.matrix());

    let gamma = phi.partial_transpose(&["B"])?;
    let spec = hermitian_eigensystem(gamma.matrix())?;
    println!("spectrum of phi_2^Gamma: {:?}", spec.values);

    let pair = phi
        .relabel(&[("A", "A1"), ("B", "B1")])?
        .tensor(&phi.relabel(&[("A", "A2"), ("B", "B2")])?)?;
    let spec = hermitian_eigensystem(pair.matrix())?;
    let rank = spec.values.iter().filter(|&&x| x > 1e-9).count();
    println!(
        "phi_2 (x) phi_2 lives on {} and has rank {rank}",
        pair.space()
    );

    let (_, psi) = pure_cos_sin(std::f64::consts::PI / 6.0);
    let space = entangle::tensor::HilbertFactorization::bipartite(2, 2);
    println!(
        "Schmidt rank of cos(pi/6)|00> + sin(pi/6)|11>: {}",
        schmidt_rank(&psi, &space, &["A"])?
    );

    let file = MatrixFile::from_density(&marginal);
    println!("matrix file: {}", serde_json::to_string(&file)?);
    Ok(())
}
