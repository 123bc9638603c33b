use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use twoproduct_core::scalars::*;

fn sample(r: &mut ChaCha8Rng) -> SplitComplex {
    let den = r.gen_range(1..=5);
    SplitComplex::new(rat(r.gen_range(-30..=30), den), rat(r.gen_range(-30..=30), den))
}

#[test]
fn polarization_and_parallelogram_on_ten_thousand_pairs() {
    let mut r = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..10_000 {
        let (x, y) = (sample(&mut r), sample(&mut r));
        let v = check_polarization_parallelogram(&x, &y);
        assert!(v.polarization && v.parallelogram, "{x} {y}");
    }
}

#[test]
fn reversed_triangle_on_same_quadrant_samples() {
    let mut r = ChaCha8Rng::seed_from_u64(2);
    let (mut admissible, mut rejected) = (0, 0);
    for _ in 0..10_000 {
        let (z, w) = (sample(&mut r), sample(&mut r));
        match check_reversed_triangle(&z, &w) {
            Ok(holds) => {
                admissible += 1;
                assert!(holds, "{z} {w}");
                // Float oracle, loose enough to ignore rounding at equality.
                let n = |s: &SplitComplex| rat_to_f64(&s.quadratic_norm()).abs().sqrt();
                assert!(n(&z.add_ref(&w)) >= n(&z) + n(&w) - 1e-9);
            }
            Err(ScalarError::PreconditionViolated(_)) => rejected += 1,
        }
    }
    assert!(admissible > 1000 && rejected > 1000, "{admissible} {rejected}");
}

#[test]
fn para_cauchy_schwarz_on_ten_thousand_admissible_pairs() {
    let mut r = ChaCha8Rng::seed_from_u64(3);
    let mut admissible = 0;
    while admissible < 10_000 {
        let (x, y) = (sample(&mut r), sample(&mut r));
        if let Some(holds) = check_para_cauchy_schwarz(&x, &y) {
            assert!(holds, "{x} {y}");
            admissible += 1;
        }
    }
}

#[test]
fn polar_form_reconstructs_in_every_branch() {
    let mut r = ChaCha8Rng::seed_from_u64(4);
    let mut seen = std::collections::BTreeSet::new();
    for _ in 0..2000 {
        let z = sample(&mut r);
        let p = hyperbolic_polar(&z);
        seen.insert(format!("{:?}", p.branch));
        if p.branch == Branch::NullCone {
            continue;
        }
        let (x, y) = p.reconstruct();
        let (x0, y0) = (rat_to_f64(&z.re), rat_to_f64(&z.im));
        let scale = x0.abs().max(y0.abs());
        assert!(
            (x - x0).abs() <= 1e-9 * scale && (y - y0).abs() <= 1e-9 * scale,
            "{z}: {x} {y}"
        );
    }
    assert_eq!(seen.len(), 5);
}

#[test]
fn minimizer_witness_against_lattice_and_euclidean_contrast() {
    let w = minimizer_nonuniqueness_witness();
    for steps in [8, 64, 360] {
        let v = w.validate(steps);
        assert!(v.valid, "{v:?}");
        assert_eq!(v.distance_sq_y, int(4));
        assert_eq!(v.separation, int(0));
    }
    // The same segment in ℂ² under the Euclidean norm has a unique minimizer.
    let steps = 360;
    let d2 = |k: i64| {
        let t = rat(k, steps);
        let a = ComplexRational::from_ints(2, 0);
        let b = ComplexRational::from_ints(1, 1).scale(&t);
        a.quadratic_norm() + b.quadratic_norm()
    };
    let min = (0..=steps).map(d2).min().unwrap();
    let best: Vec<i64> = (0..=steps).filter(|&k| d2(k) == min).collect();
    assert_eq!(best, vec![0]);
}
