use entangle::states::{
    haar_random_pure, haar_random_unitary, isotropic, max_entangled, phi_projector, ppt_check,
    random_density, stream_rng, twirl_isotropic, twirl_werner, werner, werner_weight, WernerParam,
};
use entangle::tensor::{ComplexMatrix, DensityOperator, HilbertFactorization};
use num_complex::Complex64;

fn conjugated(rho: &DensityOperator, u: &ComplexMatrix) -> DensityOperator {
    DensityOperator::new(
        rho.matrix().conjugate_by(u).hermitian_part(),
        rho.space().clone(),
    )
    .unwrap()
}

#[test]
fn werner_twirl_commutes_with_local_unitaries() {
    for d in [2usize, 3] {
        let mut rng = stream_rng(11, d as u64);
        let rho = random_density(HilbertFactorization::bipartite(d, d), 3, &mut rng);
        let t = twirl_werner(&rho).unwrap();
        for _ in 0..50 {
            let u = haar_random_unitary(d, &mut rng);
            let uu = u.kron(&u);
            let rotated_out = conjugated(&t, &uu);
            assert!(rotated_out.matrix().max_abs_diff(t.matrix()) <= 1e-8);
            let rotated_in = twirl_werner(&conjugated(&rho, &uu)).unwrap();
            assert!(rotated_in.matrix().max_abs_diff(t.matrix()) <= 1e-8);
        }
    }
}

#[test]
fn isotropic_twirl_commutes_with_conjugate_pairs() {
    let d = 3;
    let mut rng = stream_rng(12, 0);
    let rho = random_density(HilbertFactorization::bipartite(d, d), 2, &mut rng);
    let t = twirl_isotropic(&rho).unwrap();
    for _ in 0..50 {
        let u = haar_random_unitary(d, &mut rng);
        let uu = u.kron(&u.conj());
        assert!(conjugated(&t, &uu).matrix().max_abs_diff(t.matrix()) <= 1e-8);
    }
    assert!((t.expectation(&phi_projector(d)) - rho.expectation(&phi_projector(d))).abs() <= 1e-12);
}

#[test]
fn twirls_are_idempotent_and_trace_preserving() {
    for d in [2usize, 3, 4] {
        let mut rng = stream_rng(13, d as u64);
        for rank in 1..4 {
            let rho = random_density(HilbertFactorization::bipartite(d, d), rank, &mut rng);
            for twirl in [twirl_werner, twirl_isotropic] {
                let once = twirl(&rho).unwrap();
                let twice = twirl(&once).unwrap();
                assert!(twice.matrix().max_abs_diff(once.matrix()) <= 1e-10);
                assert!((once.trace() - 1.0).abs() <= 1e-12);
                assert!(once.min_eigenvalue() >= -1e-12);
            }
        }
    }
}

#[test]
fn werner_states_are_twirl_fixed_points() {
    for d in [2usize, 3] {
        for mu in [0.0, 0.3, 0.7, 1.0] {
            let w = werner(&WernerParam::new(mu, d).unwrap());
            let t = twirl_werner(&w).unwrap();
            assert!(t.matrix().max_abs_diff(w.matrix()) <= 1e-12);
            assert!((werner_weight(&w).unwrap() - mu).abs() <= 1e-12);
        }
    }
}

#[test]
fn isotropic_states_are_twirl_fixed_points() {
    for f in [0.0, 0.25, 0.6, 1.0] {
        let s = isotropic(f, 2).unwrap();
        assert!(
            twirl_isotropic(&s)
                .unwrap()
                .matrix()
                .max_abs_diff(s.matrix())
                <= 1e-12
        );
    }
    let (phi, _) = max_entangled(2).unwrap();
    assert!(
        twirl_isotropic(&phi)
            .unwrap()
            .matrix()
            .max_abs_diff(phi.matrix())
            <= 1e-12
    );
}

#[test]
fn werner_states_are_invariant_under_local_unitaries() {
    let w = werner(&WernerParam::new(0.8, 3).unwrap());
    let mut rng = stream_rng(14, 0);
    for _ in 0..20 {
        let u = haar_random_unitary(3, &mut rng);
        assert!(
            conjugated(&w, &u.kron(&u))
                .matrix()
                .max_abs_diff(w.matrix())
                <= 1e-10
        );
    }
}

#[test]
fn werner_ppt_boundary_sits_at_one_half() {
    for d in [2usize, 3, 4] {
        for k in 0..=20 {
            let mu = k as f64 * 0.05;
            let w = werner(&WernerParam::new(mu, d).unwrap());
            let r = ppt_check(&w, &["B"]).unwrap();
            assert_eq!(r.is_ppt, k <= 10, "d={d} mu={mu} min={}", r.min_eigenvalue);
            assert_eq!(WernerParam::new(mu, d).unwrap().is_entangled(), k > 10);
        }
    }
}

#[test]
fn singlet_has_zero_overlap_with_phi() {
    let w = werner(&WernerParam::new(1.0, 2).unwrap());
    assert!(w.expectation(&phi_projector(2)).abs() <= 1e-14);
}

#[test]
fn haar_states_are_unit_and_average_to_identity() {
    let d = 2;
    let mut rng = stream_rng(15, 0);
    let mut acc = ComplexMatrix::zeros(d, d);
    let n = 100_000;
    for _ in 0..n {
        let v = haar_random_pure(d, &mut rng);
        let norm: f64 = v.iter().map(Complex64::norm_sqr).sum();
        assert!((norm - 1.0).abs() <= 1e-12);
        acc = &acc + &ComplexMatrix::projector(&v);
    }
    let mean = acc.scale(1.0 / n as f64);
    assert!(mean.max_abs_diff(&ComplexMatrix::identity(d).scale(0.5)) <= 5e-3);
}

#[test]
fn haar_unitaries_are_unitary_and_reproducible() {
    for d in [2usize, 3, 5] {
        let mut a = stream_rng(16, d as u64);
        let mut b = stream_rng(16, d as u64);
        for _ in 0..20 {
            let u = haar_random_unitary(d, &mut a);
            assert!(
                u.matmul(&u.adjoint())
                    .max_abs_diff(&ComplexMatrix::identity(d))
                    <= 1e-12
            );
            assert_eq!(u, haar_random_unitary(d, &mut b));
        }
    }
}

#[test]
fn werner_twirl_matches_sampled_average() {
    let d = 2;
    let mut rng = stream_rng(17, 0);
    let rho = random_density(HilbertFactorization::bipartite(d, d), 2, &mut rng);
    let n = 20_000;
    let mut acc = ComplexMatrix::zeros(d * d, d * d);
    for _ in 0..n {
        let u = haar_random_unitary(d, &mut rng);
        acc = &acc + &rho.matrix().conjugate_by(&u.kron(&u));
    }
    let mean = acc.scale(1.0 / n as f64);
    assert!(mean.max_abs_diff(twirl_werner(&rho).unwrap().matrix()) <= 2e-2);
}
