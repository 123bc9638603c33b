use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use twoproduct_core::envariance::*;
use twoproduct_core::hilbert::{hermitian_eigen, OperatorMatrix};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn dims(r: &mut ChaCha8Rng) -> (usize, usize) {
    (r.gen_range(1..=4), r.gen_range(1..=4))
}

#[test]
fn schmidt_reconstructs_and_matches_right_spectrum() {
    let mut r = rng(1);
    for _ in 0..50 {
        let psi = PureState::random(&mut r, vec![4, 5]);
        let s = schmidt(&psi).unwrap();
        assert!(s.reconstruct().distance(&psi).unwrap() <= 1e-12);
        let (norm, ortho) = s.defects();
        assert!(norm <= 1e-12 && ortho <= 1e-12);
        assert!(s.coefficients.windows(2).all(|w| w[0] >= w[1]));
        // Oracle: singular values from the other Gram matrix, MᵀM̄.
        let m = OperatorMatrix::from_fn(4, 5, |i, j| psi.amps()[i * 5 + j]);
        let e = hermitian_eigen(&m.adjoint().matmul(&m)).unwrap();
        let mut sv: Vec<f64> = e.values.iter().rev().take(4).map(|v| v.max(0.0).sqrt()).collect();
        sv.truncate(4);
        for (a, b) in s.coefficients.iter().zip(&sv) {
            assert!((a - b).abs() < 1e-10);
        }
    }
}

#[test]
fn reflexivity_with_random_windings() {
    let mut r = rng(2);
    for _ in 0..100 {
        let (dp, dn) = dims(&mut r);
        let psi = PureState::random(&mut r, vec![dp, dn]);
        let s = schmidt(&psi).unwrap();
        let u_p = random_schmidt_diagonal(&mut r, &s);
        let w: Vec<i64> = (0..dp.min(dn)).map(|_| r.gen_range(0..=2)).collect();
        assert!(verify_reflexivity(&psi, &u_p, &w).unwrap() <= 1e-12);
    }
}

#[test]
fn product_states_restore_on_null_sectors() {
    let mut r = rng(3);
    for _ in 0..20 {
        let a = PureState::random(&mut r, vec![3]);
        let b = PureState::random(&mut r, vec![2]);
        let psi = a.kron(&b);
        let s = schmidt(&psi).unwrap();
        assert_eq!(s.rank(), 1);
        let u_p = random_schmidt_diagonal(&mut r, &s);
        assert!(verify_reflexivity(&psi, &u_p, &[0]).unwrap() <= 1e-12);
    }
}

#[test]
fn windings_do_not_change_the_counter_unitary() {
    let mut r = rng(4);
    for _ in 0..50 {
        let psi = PureState::random(&mut r, vec![3, 3]);
        let s = schmidt(&psi).unwrap();
        let u_p = random_schmidt_diagonal(&mut r, &s);
        let base = counter_unitary(&s, &u_p, &[0, 0, 0]).unwrap();
        for w in [[1, 2, 0], [7, -3, 100], [i64::MAX, i64::MIN, 1]] {
            assert_eq!(counter_unitary(&s, &u_p, &w).unwrap(), base);
        }
    }
}

#[test]
fn symmetry_construction_and_negative_control() {
    let mut r = rng(5);
    let mut control_failures = 0;
    for _ in 0..100 {
        let (dp, dn) = dims(&mut r);
        let dxi = r.gen_range(1..=2);
        let eq = Equivalence::random(&mut r, dp, dn, dxi).unwrap();
        let v_ps: Vec<_> = (0..3).map(|_| random_schmidt_diagonal(&mut r, &eq.schmidt)).collect();
        let v = verify_symmetry(&eq, &v_ps, InverseRule::Adjoint).unwrap();
        assert!(v.pass, "{v:?}");
        if dn > 1 {
            control_failures += !verify_symmetry(&eq, &v_ps, InverseRule::EntrywiseConjugate)
                .unwrap()
                .pass as usize;
        }
    }
    assert!(control_failures > 50, "{control_failures}");
}

#[test]
fn symmetry_with_identity_is_trivial() {
    let mut r = rng(6);
    let right = PureState::random(&mut r, vec![2, 2]);
    let eq = Equivalence::new(right, OperatorMatrix::identity(2), PureState::basis(1, 0), vec![0, 0]).unwrap();
    let id = OperatorMatrix::identity(2);
    let resp = eq.respond(&id).unwrap();
    assert!((&resp.u_n - &id).max_abs() < 1e-14);
    assert!(verify_symmetry(&eq, &[id], InverseRule::Adjoint).unwrap().pass);
}

#[test]
fn transitivity_on_random_chains() {
    let mut r = rng(7);
    let (mut full, mut literal_failures) = (0, 0);
    for _ in 0..100 {
        let (dp, dn) = (r.gen_range(1..=2), r.gen_range(1..=2));
        let (first, second) = random_chain(&mut r, dp, dn, 2, 2).unwrap();
        let w_ps: Vec<_> = (0..3).map(|_| random_chain_unitary(&mut r, &first)).collect();
        let v = verify_transitivity(&first, &second, &w_ps, DEFAULT_DIMENSION_CAP).unwrap();
        assert!(v.pass && v.total_dim <= 256, "{v:?}");
        if (dp, dn) == (2, 2) {
            full += 1;
            literal_failures += (v.max_literal_residual > 1e-12) as usize;
        }
    }
    // Position by position the display pairs a with W_p e; that needs the swap.
    assert!(full > 0 && literal_failures == full, "{literal_failures}/{full}");
}

#[test]
fn transitivity_trivial_and_bell_chain() {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let z = Complex64::new(0.0, 0.0);
    let bell = PureState::new(vec![2, 2], vec![Complex64::new(h, 0.0), z, z, Complex64::new(h, 0.0)]).unwrap();
    let one = PureState::basis(1, 0);
    let id = OperatorMatrix::identity(2);

    let first = Equivalence::new(bell.clone(), id.clone(), one.clone(), vec![0, 0]).unwrap();
    let second = Equivalence::new(bell.clone(), id.clone(), one.clone(), vec![0, 0]).unwrap();
    let v = verify_transitivity(&first, &second, std::slice::from_ref(&id), DEFAULT_DIMENSION_CAP).unwrap();
    assert!(v.pass && v.max_residual == 0.0);

    let mut r = rng(8);
    let s = schmidt(&bell).unwrap();
    let w_ps: Vec<_> = (0..10).map(|_| random_schmidt_diagonal(&mut r, &s)).collect();
    let v = verify_transitivity(&first, &second, &w_ps, DEFAULT_DIMENSION_CAP).unwrap();
    assert!(v.pass, "{v:?}");
}
