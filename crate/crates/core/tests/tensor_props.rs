use entangle::states::{ginibre, haar_random_pure, random_density, stream_rng};
use entangle::tensor::{
    hermitian_eigensystem, rayleigh_max, schmidt_rank, ComplexMatrix, DensityOperator,
    HilbertFactorization, Operator, TensorProduct,
};
use num_complex::Complex64;
use proptest::prelude::*;

fn random_psd(n: usize, seed: u64) -> ComplexMatrix {
    let mut rng = stream_rng(seed, 0);
    let g = ginibre(n, n, &mut rng);
    g.matmul(&g.adjoint()).hermitian_part()
}

fn random_indefinite(n: usize, seed: u64) -> ComplexMatrix {
    let mut rng = stream_rng(seed, 1);
    ginibre(n, n, &mut rng).hermitian_part()
}

fn tripartite() -> HilbertFactorization {
    HilbertFactorization::from_pairs(&[("A", 2), ("B", 3), ("C", 2)]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn partial_trace_preserves_trace(seed in any::<u64>(), rank in 1usize..6) {
        let mut rng = stream_rng(seed, 0);
        let rho = random_density(tripartite(), rank, &mut rng);
        for keep in [&["A"][..], &["B"], &["A", "C"], &["B", "C"], &[]] {
            let r = rho.partial_trace(keep).unwrap();
            prop_assert!((r.trace() - rho.trace()).abs() <= 1e-12);
        }
    }

    #[test]
    fn partial_transpose_is_trace_preserving_involution(seed in any::<u64>(), rank in 1usize..6) {
        let mut rng = stream_rng(seed, 0);
        let rho = random_density(tripartite(), rank, &mut rng);
        for labels in [&["A"][..], &["B"], &["A", "C"]] {
            let once = rho.partial_transpose(labels).unwrap();
            prop_assert!((once.trace() - rho.trace()).abs() <= 1e-12);
            let twice = once.partial_transpose(labels).unwrap();
            prop_assert!(twice.matrix().max_abs_diff(rho.matrix()) <= 1e-14);
        }
    }

    #[test]
    fn tensor_product_is_associative(seed in any::<u64>()) {
        let mut rng = stream_rng(seed, 0);
        let a = random_density(HilbertFactorization::single("A", 2), 2, &mut rng);
        let b = random_density(HilbertFactorization::single("B", 3), 2, &mut rng);
        let c = random_density(HilbertFactorization::single("C", 2), 1, &mut rng);
        let left = a.tensor(&b).unwrap().tensor(&c).unwrap();
        let right = a.tensor(&b.tensor(&c).unwrap()).unwrap();
        prop_assert_eq!(left.space(), right.space());
        prop_assert!(left.matrix().max_abs_diff(right.matrix()) <= 1e-15);
        prop_assert!((left.trace() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn partial_trace_of_product_recovers_factor(seed in any::<u64>()) {
        let mut rng = stream_rng(seed, 0);
        let a = random_density(HilbertFactorization::single("A", 3), 2, &mut rng);
        let b = random_density(HilbertFactorization::single("B", 2), 2, &mut rng);
        let ab = a.tensor(&b).unwrap();
        prop_assert!(ab.partial_trace(&["A"]).unwrap().matrix().max_abs_diff(a.matrix()) <= 1e-14);
        prop_assert!(ab.partial_trace(&["B"]).unwrap().matrix().max_abs_diff(b.matrix()) <= 1e-14);
    }

    #[test]
    fn rayleigh_value_is_monotone_in_eps(seed in any::<u64>()) {
        let n = random_indefinite(4, seed);
        let d = random_psd(4, seed);
        let mut prev = f64::INFINITY;
        for eps in [1e-9, 1e-6, 1e-3, 1e-1, 1.0] {
            let r = rayleigh_max(&n, &d, Some(eps)).unwrap();
            // Value decreases as eps grows whenever it is positive.
            if r.value > 0.0 && prev.is_finite() && prev > 0.0 {
                prop_assert!(r.value <= prev + 1e-9 * prev.abs().max(1.0));
            }
            prev = r.value;
        }
    }
}

#[test]
fn eigen_reconstruction_residual_is_small() {
    for n in [2usize, 4, 8, 16] {
        for k in 0..100u64 {
            let m = random_indefinite(n, 1000 * n as u64 + k);
            let es = hermitian_eigensystem(&m).unwrap();
            let scale = m.max_abs().max(1.0);
            assert!(
                es.reconstruct().max_abs_diff(&m) <= 1e-8 * scale,
                "n={n} k={k}"
            );
            for w in es.values.windows(2) {
                assert!(w[0] >= w[1], "eigenvalues must be descending");
            }
            for i in 0..n {
                let vi = es.vector(i);
                for j in 0..n {
                    let vj = es.vector(j);
                    let ip: Complex64 = vi.iter().zip(&vj).map(|(a, b)| a.conj() * b).sum();
                    let target = if i == j { 1.0 } else { 0.0 };
                    assert!((ip - target).norm() <= 1e-10, "orthonormality n={n}");
                }
            }
        }
    }
}

#[test]
fn rayleigh_matches_grid_search_on_qubits() {
    for k in 0..10u64 {
        let n = random_indefinite(2, 50 + k);
        let n = n.scale(1.0 / n.max_abs());
        let g = random_psd(2, 50 + k);
        let tr = g.trace().re;
        let d = ComplexMatrix::from_fn(2, 2, |i, j| {
            g.row(i)[j] / tr + if i == j { 1.0 } else { 0.0 }
        });
        let r = rayleigh_max(&n, &d, Some(1e-14)).unwrap();
        let mut best = f64::NEG_INFINITY;
        for a in 0..50 {
            let t = std::f64::consts::FRAC_PI_2 * a as f64 / 49.0;
            for b in 0..200 {
                let phi = 2.0 * std::f64::consts::PI * b as f64 / 200.0;
                let x = [
                    Complex64::new(t.cos(), 0.0),
                    Complex64::from_polar(t.sin(), phi),
                ];
                let v = n.quadratic_form(&x).re / d.quadratic_form(&x).re;
                best = best.max(v);
            }
        }
        assert!(
            r.value >= best - 1e-9,
            "solver {} below grid {best}",
            r.value
        );
        assert!(r.value - best <= 1e-3, "solver {} vs grid {best}", r.value);
        let at = n.quadratic_form(&r.vector).re / d.quadratic_form(&r.vector).re;
        assert!((at - r.value).abs() <= 1e-9 * r.value.abs().max(1.0));
    }
}

#[test]
fn rayleigh_rejects_indefinite_denominator() {
    let n = ComplexMatrix::identity(2);
    let d = ComplexMatrix::diagonal(&[1.0, -1.0]);
    assert!(rayleigh_max(&n, &d, None).is_err());
}

#[test]
fn schmidt_rank_examples() {
    let space = HilbertFactorization::bipartite(3, 3);
    let mut product = vec![Complex64::new(0.0, 0.0); 9];
    product[4] = 1.0.into();
    assert_eq!(schmidt_rank(&product, &space, &["A"]).unwrap(), 1);
    let phi = entangle::states::phi_vector(3);
    assert_eq!(schmidt_rank(&phi, &space, &["A"]).unwrap(), 3);
    let mut rng = stream_rng(3, 0);
    let generic = haar_random_pure(9, &mut rng);
    assert_eq!(schmidt_rank(&generic, &space, &["A"]).unwrap(), 3);
}

#[test]
fn non_hermitian_operator_is_rejected() {
    let m = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
    assert!(Operator::new(m.clone(), HilbertFactorization::single("A", 2)).is_err());
    assert!(DensityOperator::new(m, HilbertFactorization::single("A", 2)).is_err());
}
