use entangle::filters::SeesawConfig;
use entangle::states::{
    haar_random_pure, isotropic, max_entangled, maximally_mixed, product_basis, pure_cos_sin,
    stream_rng, werner, WernerParam,
};
use entangle::teleport::{
    average_fidelity_mc, standard_fidelity_closed_form, standard_teleport,
    verify_conclusive_fidelity, weyl, TeleportChannel, TeleportConfig,
};
use entangle::tensor::ComplexMatrix;

#[test]
fn weyl_operators_are_unitary_and_orthogonal() {
    for d in [2usize, 3] {
        for j in 0..d {
            for k in 0..d {
                let w = weyl(d, j, k);
                assert!(
                    w.matmul(&w.adjoint())
                        .max_abs_diff(&ComplexMatrix::identity(d))
                        <= 1e-12
                );
                for jj in 0..d {
                    for kk in 0..d {
                        let ip = w.adjoint().matmul(&weyl(d, jj, kk)).trace().norm();
                        let target = if (j, k) == (jj, kk) { d as f64 } else { 0.0 };
                        assert!((ip - target).abs() <= 1e-12);
                    }
                }
            }
        }
    }
}

#[test]
fn teleportation_output_is_a_normalized_state() {
    let mut rng = stream_rng(41, 0);
    let resources = [
        werner(&WernerParam::new(0.7, 2).unwrap()),
        maximally_mixed(2),
        pure_cos_sin(0.4).0,
    ];
    for resource in &resources {
        let channel = TeleportChannel::new(resource, 2).unwrap();
        for _ in 0..100 {
            let psi = haar_random_pure(2, &mut rng);
            let out = standard_teleport(resource, &psi).unwrap();
            assert!((out.trace() - 1.0).abs() <= 1e-12);
            assert!(out.min_eigenvalue() >= -1e-12);
            assert!(channel.apply(&psi).max_abs_diff(out.matrix()) <= 1e-12);
        }
    }
}

#[test]
fn maximally_entangled_resource_teleports_perfectly() {
    for d in [2usize, 3] {
        let (phi, _) = max_entangled(d).unwrap();
        let mc = average_fidelity_mc(&phi, &TeleportConfig::standard(d, 2000, 42)).unwrap();
        assert!((mc.mean - 1.0).abs() <= 1e-12);
    }
}

#[test]
fn maximally_mixed_resource_gives_one_half() {
    let cfg = TeleportConfig::standard(2, 20_000, 43);
    let mc = average_fidelity_mc(&maximally_mixed(2), &cfg).unwrap();
    assert!(
        (mc.mean - 0.5).abs() <= 3.0 * mc.standard_error + 1e-12,
        "{mc:?}"
    );
}

#[test]
fn product_resource_gives_classical_limit() {
    let rho = product_basis(2, 0, 0).unwrap();
    let cfg = TeleportConfig::standard(2, 20_000, 44);
    let mc = average_fidelity_mc(&rho, &cfg).unwrap();
    assert!(
        (mc.mean - 2.0 / 3.0).abs() <= 3.0 * mc.standard_error,
        "{mc:?}"
    );
    assert!((standard_fidelity_closed_form(&rho, 2).unwrap() - 2.0 / 3.0).abs() <= 1e-12);
}

#[test]
fn mc_agrees_with_closed_form_for_isotropic_resources() {
    for (f, d) in [(0.3, 2usize), (0.8, 2), (0.6, 3)] {
        let rho = isotropic(f, d).unwrap();
        let closed = standard_fidelity_closed_form(&rho, d).unwrap();
        assert!((closed - (d as f64 * f + 1.0) / (d as f64 + 1.0)).abs() <= 1e-12);
        let mc = average_fidelity_mc(&rho, &TeleportConfig::standard(d, 20_000, 45)).unwrap();
        assert!(
            (mc.mean - closed).abs() <= 3.0 * mc.standard_error + 1e-12,
            "f={f}, d={d}: {mc:?}"
        );
    }
}

#[test]
fn standard_error_shrinks_with_sample_size() {
    let rho = werner(&WernerParam::new(0.3, 2).unwrap());
    let small = average_fidelity_mc(&rho, &TeleportConfig::standard(2, 10_000, 46)).unwrap();
    let large = average_fidelity_mc(&rho, &TeleportConfig::standard(2, 20_000, 46)).unwrap();
    let ratio = large.standard_error / small.standard_error;
    let expected = std::f64::consts::FRAC_1_SQRT_2;
    assert!((ratio - expected).abs() <= 0.2 * expected, "ratio {ratio}");
}

#[test]
fn mc_is_reproducible_for_a_seed() {
    let rho = werner(&WernerParam::new(0.9, 2).unwrap());
    let cfg = TeleportConfig::standard(2, 5000, 47);
    let a = average_fidelity_mc(&rho, &cfg).unwrap();
    let b = average_fidelity_mc(&rho, &cfg).unwrap();
    assert_eq!(a.mean.to_bits(), b.mean.to_bits());
    assert_eq!(a.standard_error.to_bits(), b.standard_error.to_bits());
}

#[test]
fn conclusive_teleportation_reaches_the_predicted_fidelity() {
    let seesaw = SeesawConfig::with_seed(48);
    for rho in [
        pure_cos_sin(0.3).0,
        werner(&WernerParam::new(0.9, 2).unwrap()),
    ] {
        let r =
            verify_conclusive_fidelity(&rho, 2, &seesaw, &TeleportConfig::standard(2, 20_000, 48))
                .unwrap();
        assert!(r.consistent, "{r:?}");
        assert!((r.predicted - r.predicted_from_filter).abs() <= 1e-8);
        assert!(r.success_probability > 0.0 && r.success_probability <= 1.0 + 1e-12);
    }
}
