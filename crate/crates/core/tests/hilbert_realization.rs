use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use twoproduct_core::algebra::{check_all, Sampler};
use twoproduct_core::hilbert::*;
use twoproduct_core::phasepoly::HBar;
use twoproduct_core::poly::Poly;
use twoproduct_core::scalars::int;

#[test]
fn hermitian_matrices_pass_the_full_suite() {
    for dim in [4, 6] {
        for hbar in [HBar::from_ratio(1, 2).unwrap(), HBar::default()] {
            let c = MatrixCarrier::new(dim, hbar);
            let s = HermitianSampler { dim, scale: 1.0 };
            for r in check_all(&c, &s, 60, 3) {
                assert!(r.passed(), "dim {dim}: {r:?}");
                assert!(r.max_residual <= 1e-12, "dim {dim}: {r:?}");
            }
        }
    }
}

#[test]
fn minus_beta_is_the_matrix_product() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for dim in [4, 6] {
        for hbar in [0.5, 2.0, 3.0] {
            for _ in 0..50 {
                let a = random_hermitian(&mut rng, dim, 1.0);
                let b = random_hermitian(&mut rng, dim, 1.0);
                let diff = &op_beta(&a, &b, hbar, -1).unwrap() - &a.matmul(&b);
                assert!(diff.max_abs() <= 1e-14, "{}", diff.max_abs());
                let plus = &op_beta(&a, &b, hbar, 1).unwrap() - &b.matmul(&a);
                assert!(plus.max_abs() <= 1e-14, "{}", plus.max_abs());
            }
        }
    }
}

/// Largest singular value by power iteration on `T†T`, independent of the
/// Jacobi eigensolver.
fn power_norm(t: &OperatorMatrix, rng: &mut ChaCha8Rng) -> f64 {
    let tt = t.adjoint().matmul(t);
    let mut v: Vec<Complex64> = (0..t.cols())
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let mut lambda = 0.0;
    for _ in 0..2000 {
        let w = tt.apply(&v);
        let n = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v = w.iter().map(|z| z / n).collect();
        if (n - lambda).abs() <= 1e-15 * n {
            lambda = n;
            break;
        }
        lambda = n;
    }
    lambda.sqrt()
}

#[test]
fn cstar_identity_on_random_operators() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..500 {
        let t = random_complex(&mut rng, 8, 8);
        let v = cstar_check(&t, 1e-10).unwrap();
        assert!(v.pass, "{v:?}");
        let oracle = power_norm(&t, &mut rng);
        assert!((oracle - v.norm).abs() <= 1e-8 * oracle, "{oracle} vs {}", v.norm);
    }
}

#[test]
fn kronecker_products_obey_the_bipartite_relations() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let hbar = 2.0;
    for _ in 0..40 {
        let (a1, a2) = (random_hermitian(&mut rng, 2, 1.0), random_hermitian(&mut rng, 2, 1.0));
        let (b1, b2) = (random_hermitian(&mut rng, 3, 1.0), random_hermitian(&mut rng, 3, 1.0));
        let (x, y) = (a1.kron(&b1), a2.kron(&b2));
        let (sa, aa) = (op_sigma(&a1, &a2).unwrap(), op_alpha(&a1, &a2, hbar).unwrap());
        let (sb, ab) = (op_sigma(&b1, &b2).unwrap(), op_alpha(&b1, &b2, hbar).unwrap());
        let alpha12 = &aa.kron(&sb) + &sa.kron(&ab);
        let sigma12 = &sa.kron(&sb) - &aa.kron(&ab).scale(&Complex64::new(hbar * hbar / 4.0, 0.0));
        assert!((&op_alpha(&x, &y, hbar).unwrap() - &alpha12).max_abs() <= 1e-12);
        assert!((&op_sigma(&x, &y).unwrap() - &sigma12).max_abs() <= 1e-12);
    }
}

#[test]
fn kahler_structure_is_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in 1..=5 {
        let t = build_kahler(n);
        let v = t.validate();
        assert!(v.all(), "n = {n}: {v:?}");
        for _ in 0..200 {
            let x: Vec<i64> = (0..2 * n).map(|_| rng.gen_range(-9..=9)).collect();
            let y: Vec<i64> = (0..2 * n).map(|_| rng.gen_range(-9..=9)).collect();
            assert!(hermitean_property_check(&t, &x, &y).unwrap());
            let xx = inner_product(&t, &x, &x).unwrap();
            assert_eq!(xx.re, x.iter().map(|v| v * v).sum::<i64>());
            assert_eq!(xx.im, 0);
            // Conjugate symmetry: ⟨Y, X⟩ = ⟨X, Y⟩*.
            assert_eq!(
                inner_product(&t, &y, &x).unwrap(),
                inner_product(&t, &x, &y).unwrap().conj()
            );
        }
    }
    assert!(hermitean_property_check(&build_kahler(2), &[1, 2], &[3, 4, 5, 6]).is_err());
}

fn linear_field(rng: &mut ChaCha8Rng, m: usize) -> VectorField {
    (0..m)
        .map(|_| {
            let mut f = Poly::constant(m, int(rng.gen_range(-3..=3)));
            for k in 0..m {
                f = f.add_ref(&Poly::var(m, k).scale(&int(rng.gen_range(-3..=3))));
            }
            f
        })
        .collect()
}

#[test]
fn constant_j_has_vanishing_nijenhuis_tensor() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for k in 0..50 {
        let n = 1 + k % 3;
        let t = build_kahler(n);
        let (r, s) = (linear_field(&mut rng, 2 * n), linear_field(&mut rng, 2 * n));
        assert!(nijenhuis_constant_j(&t, &r, &s).iter().all(|c| c.is_zero()));
    }
}

#[test]
fn lie_bracket_of_coordinate_fields() {
    // [∂_q, q ∂_p] = ∂_p.
    let m = 2;
    let r: VectorField = vec![Poly::one(m), Poly::zero(m)];
    let s: VectorField = vec![Poly::zero(m), Poly::var(m, 0)];
    assert_eq!(lie_bracket(&r, &s), vec![Poly::zero(m), Poly::one(m)]);
}

#[test]
fn j_commuting_symplectic_maps_preserve_normalization() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for k in 0..100 {
        let n = 1 + k % 5;
        let t = build_kahler(n);
        let w = sample_j_commuting_symplectic(&mut rng, n, 0.8);
        let raw: Vec<f64> = (0..2 * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let len = raw.iter().map(|v| v * v).sum::<f64>().sqrt();
        let x: Vec<f64> = raw.iter().map(|v| v / len).collect();
        let drift = normalization_constraint_check(&t, &x, &w, 1e-10).unwrap();
        assert!(drift <= 1e-10, "n = {n}: {drift}");
    }
}

#[test]
fn sampler_output_is_hermitian() {
    let s = HermitianSampler { dim: 5, scale: 2.0 };
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    assert!(s.sample(&mut rng).is_hermitian(0.0));
}
