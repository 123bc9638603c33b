use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use twoproduct_core::algebra::*;
use twoproduct_core::phasepoly::{alpha, hbar_zero_limit, p, poisson, q, HBar};
use twoproduct_core::scalars::{int, rat, Class, Rational};

fn tensors(deg: u32) -> TensorSampler<PolySampler, PolySampler> {
    TensorSampler {
        left: PolySampler::new(1, deg),
        right: PolySampler::new(1, deg),
        max_terms: 2,
    }
}

#[test]
fn composed_carriers_pass_the_full_suite() {
    for class in Class::ALL {
        let c = PhaseCarrier::new(1, class, HBar::default());
        let bi = compose_bipartite(c.clone(), c).unwrap();
        for r in check_all(&bi, &tensors(2), 60, 21) {
            assert!(r.passed() && r.max_residual == 0.0, "{class}: {r:?}");
        }
    }
}

#[test]
fn monoid_laws_exact() {
    for class in Class::ALL {
        let c = PhaseCarrier::new(1, class, HBar::from_ratio(1, 2).unwrap());
        let s = PolySampler::new(1, 2);
        let r = check_monoid(&c, &c, &c, &s, &s, &s, 100, 5).unwrap();
        assert!(r.passed() && r.samples >= 100, "{class}: {r:?}");
    }
}

#[test]
fn extra_alpha_alpha_term_breaks_leibniz() {
    let c = PhaseCarrier::new(1, Class::Elliptic, HBar::default());
    for a in [int(1), int(-1), rat(1, 2)] {
        let r = falsify_nonzero_a(c.clone(), c.clone(), a.clone(), &tensors(3), 50, 9).unwrap();
        assert!(!r.failures.is_empty(), "a = {a}");
    }
    let bi = compose_bipartite(c.clone(), c).unwrap();
    assert!(check_identity(&bi, Identity::LeibnizAlpha, &tensors(3), 50, 9).passed());
}

#[test]
fn hbar_zero_limit_is_poisson() {
    let s = PolySampler::new(2, 4);
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..200 {
        let (f, g) = (s.sample(&mut rng), s.sample(&mut rng));
        assert_eq!(hbar_zero_limit(&f, &g).unwrap(), poisson(&f, &g).unwrap());
    }
}

#[test]
fn canonical_relations() {
    for n in 1..=3 {
        for i in 0..n {
            for j in 0..n {
                let want = if i == j {
                    Rational::from_integer(1.into())
                } else {
                    Rational::from_integer(0.into())
                };
                let pb = poisson(&q::<Rational>(n, i), &p::<Rational>(n, j)).unwrap();
                assert_eq!(pb.coeff(&vec![0; 2 * n]), want);
                assert_eq!(pb.len(), usize::from(i == j));
                // Linear arguments see only the first-order term at any ħ.
                let a = alpha(
                    &q::<Rational>(n, i),
                    &p::<Rational>(n, j),
                    Class::Hyperbolic,
                    &HBar::default(),
                )
                .unwrap();
                assert_eq!(a, pb);
                assert!(poisson(&q::<Rational>(n, i), &q::<Rational>(n, j)).unwrap().is_zero());
            }
        }
    }
}
