use entangle::activation::{
    activation_condition, bound_entangled_demo, certify_e_bound, contraction_identity_check,
    demo_instance, run_activation_experiment, witness_from_certified, witness_from_rho,
    ActivationDims, Budget, CertificateKind, CertifiedRho, RhoFamily,
};
use entangle::filters::SeesawConfig;
use entangle::states::{ppt_check, product_basis, random_density, random_separable, stream_rng};
use entangle::tensor::{DensityOperator, HilbertFactorization, TensorProduct};

fn demo_rho() -> (DensityOperator, f64) {
    let s = demo_instance();
    let out = run_activation_experiment(&s.sigma, s.lambda, s.d, s.family, &Budget::with_seed(31))
        .unwrap();
    (out.found().expect("demo activates").rho.clone(), s.lambda)
}

#[test]
fn contraction_identity_holds_with_consistent_z() {
    for (na, nb, d) in [(2usize, 2usize, 2usize), (2, 3, 2), (3, 3, 3)] {
        let dims = ActivationDims::new(na, nb, d).unwrap();
        let mut z = None;
        for k in 0..50u64 {
            let mut rng = stream_rng(3100 + k, na as u64 * 10 + nb as u64);
            let rho = random_density(dims.rho_space(), 1 + k as usize % 3, &mut rng);
            let sigma = random_density(dims.sigma_space(), 1 + k as usize % 2, &mut rng);
            let c = contraction_identity_check(&rho, &sigma, d).unwrap();
            assert!(c.holds(), "({na},{nb},{d}) instance {k}: {c:?}");
            assert!((c.z - 1.0 / (na * nb) as f64).abs() <= 1e-15);
            assert!(z.is_none_or(|z0| z0 == c.z));
            z = Some(c.z);
        }
    }
}

#[test]
fn separable_sigma_never_activates_certified_rho() {
    let (ppt_rho, lambda) = demo_rho();
    assert!(certify_e_bound(&ppt_rho, 2).unwrap().unwrap().value <= lambda);
    let dims = ActivationDims::new(2, 2, 2).unwrap();
    let product = product_basis(2, 0, 1)
        .unwrap()
        .relabel(&[("A", "A2"), ("B", "B2")])
        .unwrap()
        .tensor(
            &product_basis(2, 1, 0)
                .unwrap()
                .relabel(&[("A", "A3"), ("B", "B3")])
                .unwrap(),
        )
        .unwrap();
    assert_eq!(product.dim(), dims.rho_space().total_dim());
    let mut rng = stream_rng(32, 0);
    for k in 0..500 {
        let sigma = random_separable(2, 2, 1 + k % 4, &mut rng);
        for rho in [&ppt_rho, &product] {
            let c = activation_condition(rho, &sigma, lambda, 2).unwrap();
            assert!(c >= -1e-10, "sample {k}: condition {c}");
        }
    }
}

#[test]
fn separable_sigma_never_activates_bound_entangled_demo_rho() {
    let s = bound_entangled_demo();
    let budget = Budget {
        candidates: 2,
        search_iterations: 60,
        seesaw: SeesawConfig {
            restarts: 2,
            max_iterations: 60,
            ..SeesawConfig::with_seed(33)
        },
    };
    let out = run_activation_experiment(&s.sigma, s.lambda, s.d, s.family, &budget).unwrap();
    let inst = out.found().expect("bound-entangled demo activates");
    assert!(inst.activation_condition < 0.0);
    assert!(inst.e_joint_lower.e_lower > s.lambda);
    assert!((inst.reverify().unwrap() - inst.reverified_e_joint).abs() <= 1e-8);
    assert!(ppt_check(&s.sigma, &["B"]).unwrap().is_ppt);
    assert_eq!(s.family, RhoFamily::SchmidtRank { k: 2 });
    let mut rng = stream_rng(34, 0);
    for _ in 0..50 {
        let sigma = random_separable(3, 3, 3, &mut rng);
        assert!(activation_condition(&inst.rho, &sigma, s.lambda, 3).unwrap() >= -1e-10);
    }
}

#[test]
fn witness_is_nonnegative_on_products_and_detects_sigma() {
    let s = demo_instance();
    let out = run_activation_experiment(&s.sigma, s.lambda, s.d, s.family, &Budget::with_seed(35))
        .unwrap();
    let inst = out.found().unwrap();
    let w = inst.witness().unwrap();
    assert!(w.min_over_products(10_000, 35) >= -1e-9);
    let detected = w.detect(&s.sigma).unwrap();
    assert!(detected < 0.0);
    assert!((detected - inst.activation_condition).abs() <= 1e-10);
}

fn separable_rho(rng: &mut impl rand::Rng, terms: usize) -> DensityOperator {
    let parts: Vec<DensityOperator> = (0..terms)
        .map(|_| {
            let a = random_separable(2, 2, 2, rng)
                .relabel(&[("A", "A2"), ("B", "B2")])
                .unwrap();
            let b = random_separable(2, 2, 2, rng)
                .relabel(&[("A", "A3"), ("B", "B3")])
                .unwrap();
            a.tensor(&b)
                .unwrap()
                .permute(&["A2", "A3", "B2", "B3"])
                .unwrap()
        })
        .collect();
    let w = 1.0 / terms as f64;
    let weighted: Vec<(f64, &DensityOperator)> = parts.iter().map(|p| (w, p)).collect();
    DensityOperator::mixture(&weighted).unwrap()
}

#[test]
fn condition_equals_witness_detection() {
    let dims = ActivationDims::new(2, 2, 2).unwrap();
    let mut rng = stream_rng(36, 0);
    for k in 0..200 {
        let rho = separable_rho(&mut rng, 1 + k % 3);
        let lambda = 0.5 + 0.4 * (k % 5) as f64 / 4.0;
        let w = witness_from_rho(&rho, lambda, 2, 2).unwrap();
        let sigma = random_density(dims.sigma_space(), 1 + k % 3, &mut rng);
        let c = activation_condition(&rho, &sigma, lambda, 2).unwrap();
        assert!((w.detect(&sigma).unwrap() - c).abs() <= 1e-10, "sample {k}");
    }
    let (rho, lambda) = demo_rho();
    let certified = CertifiedRho::certify(rho.clone(), 2).unwrap();
    let w = witness_from_certified(&certified, lambda, 2).unwrap();
    let sigma = random_density(dims.sigma_space(), 2, &mut rng);
    let c = activation_condition(&rho, &sigma, lambda, 2).unwrap();
    assert!((w.detect(&sigma).unwrap() - c).abs() <= 1e-10);
}

#[test]
fn condition_on_a_product_rho_has_closed_form() {
    // rho = eta (x) I/4 gives tr[eta sigma^T](lambda - 1/4).
    let mut rng = stream_rng(37, 0);
    let eta = random_density(HilbertFactorization::bipartite(2, 2), 2, &mut rng)
        .relabel(&[("A", "A2"), ("B", "B2")])
        .unwrap();
    let mixed = DensityOperator::new(
        entangle::tensor::ComplexMatrix::identity(4).scale(0.25),
        HilbertFactorization::from_pairs(&[("A3", 2), ("B3", 2)]).unwrap(),
    )
    .unwrap();
    let rho = eta.tensor(&mixed).unwrap();
    let sigma = random_density(HilbertFactorization::bipartite(2, 2), 3, &mut rng);
    let lambda = 0.7;
    let overlap = eta.matrix().trace_product(&sigma.matrix().transpose()).re;
    let c = activation_condition(&rho, &sigma, lambda, 2).unwrap();
    assert!((c - overlap * (lambda - 0.25)).abs() <= 1e-12);
}

#[test]
fn certificates_cover_the_documented_families() {
    let product = product_basis(3, 0, 2).unwrap();
    assert_eq!(
        certify_e_bound(&product, 3).unwrap().unwrap().kind,
        CertificateKind::SeparableFloor
    );
    let (rho, _) = demo_rho();
    let cert = certify_e_bound(&rho, 2).unwrap().unwrap();
    assert!((cert.value - 0.5).abs() <= 1e-15);
    let (phi, _) = entangle::states::max_entangled(2).unwrap();
    assert!(
        CertifiedRho::certify(phi, 2)
            .map(|c| c.certificate().value)
            .unwrap_or(1.0)
            >= 1.0 - 1e-12
    );
}

#[test]
fn uncertified_lambda_is_rejected() {
    let s = demo_instance();
    assert!(run_activation_experiment(&s.sigma, 0.4, 2, s.family, &Budget::with_seed(1)).is_err());
    assert!(run_activation_experiment(
        &s.sigma,
        0.6,
        2,
        RhoFamily::SchmidtRank { k: 2 },
        &Budget::with_seed(1)
    )
    .is_err());
}
