//! Werner states, the two twirls in closed form, and the PPT boundary.
//!
//! cargo run --example werner_twirl_ppt

use entangle::states::{
    max_entangled, ppt_check, twirl_isotropic, twirl_werner, werner, werner_weight, WernerParam,
};

fn main() -> entangle::Result<()> {
    println!("{:>5} {:>8} {:>14}", "mu", "is_ppt", "min eig(w^G)");
    for k in 0..=20 {
        let mu = k as f64 * 0.05;
        let w = werner(&WernerParam::new(mu, 2)?);
        let r = ppt_check(&w, &["B"])?;
        println!("{mu:>5.2} {:>8} {:>14.6}", r.is_ppt, r.min_eigenvalue);
    }

    let (phi, _) = max_entangled(3)?;
    let tw = twirl_werner(&phi)?;
    println!(
        "Werner twirl of phi_3 has mu = {:.3} (the symmetric state)",
        werner_weight(&tw)?
    );
    let ti = twirl_isotropic(&phi)?;
    println!(
        "isotropic twirl fixes phi_3: {}",
        ti.matrix().max_abs_diff(phi.matrix()) < 1e-12
    );
    Ok(())
}
