//! The suite catalog. Each suite sweeps one family of checks and condenses it
//! into an [`Outcome`]; expected-witness suites pass by producing a witness.

use std::collections::BTreeMap;
use std::fmt::Display;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use twoproduct_core::algebra::{
    check_all, check_identity, check_monoid, compose_bipartite, falsify_nonzero_a, mix_seed, Identity, IdentityReport,
    PhaseCarrier, PolySampler, Sampler, TensorSampler, Witness,
};
use twoproduct_core::berezin::{
    berezin_quantize, berezin_quantize_real, correspondence_check, cstar_on_quantized, identity_defect,
    ladder_position_momentum, positivity_preservation, trusted, QuadratureGrid,
};
use twoproduct_core::envariance::{
    counter_unitary, random_chain, random_chain_unitary, random_schmidt_diagonal, schmidt, verify_reflexivity,
    verify_symmetry, verify_transitivity, Equivalence, InverseRule, PureState, DEFAULT_DIMENSION_CAP,
};
use twoproduct_core::hilbert::{
    build_kahler, cstar_check, hermitean_property_check, inner_product, nijenhuis_constant_j,
    normalization_constraint_check, op_beta, random_complex, random_hermitian, sample_j_commuting_symplectic,
    HermitianSampler, MatrixCarrier, VectorField,
};
use twoproduct_core::moyalpos::{fock_wigner, ghost_search, lattice, lattice_minimum};
use twoproduct_core::phasepoly::{hbar_zero_limit, p, poisson, q};
use twoproduct_core::poly::Poly;
use twoproduct_core::quantion::{
    dalembertian_factorization, dirac_current_check, norms_commute, probe_set, random_exact_quantion, random_quantion,
    rep_discovery, Quantion, SpacetimePoly,
};
use twoproduct_core::scalars::{
    check_para_cauchy_schwarz, check_polarization_parallelogram, check_reversed_triangle, int,
    minimizer_nonuniqueness_witness, rat, Class, ComplexRational, Rational, SplitComplex,
};

use crate::config::SuiteConfig;

const MAX_LISTED: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Expected {
    /// Every check holds.
    Pass,
    /// Every check holds and at least one counterexample is produced.
    Witness,
}

impl Display for Expected {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Expected::Pass => "pass",
            Expected::Witness => "witness",
        })
    }
}

pub struct Suite {
    pub name: &'static str,
    pub anchor: &'static str,
    pub expected: Expected,
    run: fn(&SuiteConfig, u64) -> Outcome,
}

impl Suite {
    pub fn run(&self, cfg: &SuiteConfig) -> Outcome {
        let index = CATALOG
            .iter()
            .position(|s| s.name == self.name)
            .expect("catalog member") as u64;
        (self.run)(cfg, mix_seed(cfg.seed, index))
    }
}

/// Condensed result of one suite. Exact checks contribute residual 0 when they
/// hold and 1 when they do not.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub samples: usize,
    pub failure_count: usize,
    pub failures: Vec<Witness>,
    pub witnesses: Vec<Witness>,
    pub max_residual: f64,
    pub notes: BTreeMap<String, String>,
}

impl Outcome {
    pub fn passed(&self, expected: Expected) -> bool {
        self.failure_count == 0 && (expected == Expected::Pass || !self.witnesses.is_empty())
    }

    fn check(&mut self, ok: bool, residual: f64, inputs: impl FnOnce() -> Vec<String>) {
        self.samples += 1;
        self.max_residual = self.max_residual.max(residual);
        if !ok {
            self.fail(Witness {
                inputs: inputs(),
                residual,
            });
        }
    }

    fn exact(&mut self, ok: bool, inputs: impl FnOnce() -> Vec<String>) {
        self.check(ok, if ok { 0.0 } else { 1.0 }, inputs);
    }

    fn fail(&mut self, w: Witness) {
        self.failure_count += 1;
        if self.failures.len() < MAX_LISTED {
            self.failures.push(w);
        }
    }

    fn error(&mut self, context: impl Display, err: impl Display) {
        self.samples += 1;
        self.fail(Witness {
            inputs: vec![context.to_string(), err.to_string()],
            residual: 1.0,
        });
    }

    fn witness(&mut self, inputs: Vec<String>, residual: f64) {
        if self.witnesses.len() < MAX_LISTED {
            self.witnesses.push(Witness { inputs, residual });
        }
    }

    fn absorb(&mut self, label: &str, r: IdentityReport) {
        self.samples += r.samples;
        self.max_residual = self.max_residual.max(r.max_residual);
        self.failure_count += r.failure_count;
        for mut w in r.failures {
            if self.failures.len() < MAX_LISTED {
                w.inputs.insert(0, format!("{label} {}", r.identity));
                self.failures.push(w);
            }
        }
    }

    fn note(&mut self, key: &str, value: impl Display) {
        self.notes.insert(key.to_string(), value.to_string());
    }
}

pub const CATALOG: &[Suite] = &[
    Suite {
        name: "identities-elliptic-phase",
        anchor: "nine two-product identities, sine/cosine brackets",
        expected: Expected::Pass,
        run: |c, s| identities(c, s, Class::Elliptic),
    },
    Suite {
        name: "identities-parabolic-phase",
        anchor: "nine two-product identities, Poisson bracket and pointwise product",
        expected: Expected::Pass,
        run: |c, s| identities(c, s, Class::Parabolic),
    },
    Suite {
        name: "identities-hyperbolic-phase",
        anchor: "nine two-product identities, sinh/cosh brackets",
        expected: Expected::Pass,
        run: |c, s| identities(c, s, Class::Hyperbolic),
    },
    Suite {
        name: "composition-bipartite",
        anchor: "bipartite composition closes and forms a commutative monoid",
        expected: Expected::Pass,
        run: composition,
    },
    Suite {
        name: "composition-nonzero-a",
        anchor: "an extra α₁α₂ term in α₁₂ breaks the Leibniz rule",
        expected: Expected::Witness,
        run: nonzero_a,
    },
    Suite {
        name: "deformation-limit",
        anchor: "ħ → 0 limit of the Lie product and canonical relations",
        expected: Expected::Pass,
        run: deformation_limit,
    },
    Suite {
        name: "hilbert-realization",
        anchor: "Hermitian matrices with commutator and Jordan products; C* identity",
        expected: Expected::Pass,
        run: hilbert,
    },
    Suite {
        name: "kahler-structure",
        anchor: "Kähler triple, Nijenhuis tensor and normalization-preserving maps",
        expected: Expected::Pass,
        run: kahler,
    },
    Suite {
        name: "positivity-elliptic",
        anchor: "expectation of g*⋆g is nonnegative in oscillator states",
        expected: Expected::Pass,
        run: positivity_elliptic,
    },
    Suite {
        name: "ghost-hyperbolic",
        anchor: "split-complex star product admits negative expectations",
        expected: Expected::Witness,
        run: ghost_hyperbolic,
    },
    Suite {
        name: "split-complex-seminorm",
        anchor: "para-seminorm polarization, reversed triangle and Cauchy-Schwarz",
        expected: Expected::Pass,
        run: split_complex,
    },
    Suite {
        name: "minimizer-nonuniqueness",
        anchor: "closest point to a convex set is not unique under the para-seminorm",
        expected: Expected::Witness,
        run: minimizer,
    },
    Suite {
        name: "berezin-quantization",
        anchor: "coherent-state quantization: unit, ladder operators, positivity",
        expected: Expected::Pass,
        run: berezin,
    },
    Suite {
        name: "berezin-correspondence",
        anchor: "(i/ħ)[Q(q), Q(p)] equals the identity on trusted levels",
        expected: Expected::Pass,
        run: berezin_correspondence,
    },
    Suite {
        name: "quantion-norms",
        anchor: "algebraic and metric norms of quantions commute",
        expected: Expected::Pass,
        run: quantion_norms,
    },
    Suite {
        name: "quantion-dirac-current",
        anchor: "quantion four-current equals the Dirac current",
        expected: Expected::Pass,
        run: quantion_current,
    },
    Suite {
        name: "quantion-dalembertian",
        anchor: "first-order quantion operator squares to the d'Alembertian",
        expected: Expected::Pass,
        run: quantion_dalembertian,
    },
    Suite {
        name: "envariance-reflexivity",
        anchor: "Schmidt-diagonal unitaries are undone on the environment",
        expected: Expected::Pass,
        run: envariance_reflexivity,
    },
    Suite {
        name: "envariance-symmetry",
        anchor: "envariant equivalence is symmetric",
        expected: Expected::Pass,
        run: envariance_symmetry,
    },
    Suite {
        name: "envariance-transitivity",
        anchor: "envariant equivalence is transitive",
        expected: Expected::Pass,
        run: envariance_transitivity,
    },
];

pub fn find(name: &str) -> Option<&'static Suite> {
    CATALOG.iter().find(|s| s.name == name)
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------------------
// Algebra

fn identities(cfg: &SuiteConfig, seed: u64, class: Class) -> Outcome {
    let mut o = Outcome::default();
    for hbar in &cfg.hbar {
        for dof in [1, 2] {
            let c = PhaseCarrier::new(dof, class, hbar.clone());
            for r in check_all(&c, &PolySampler::new(dof, cfg.max_degree), cfg.samples, seed) {
                o.absorb(&format!("ħ={hbar} dof={dof}"), r);
            }
        }
    }
    o
}

fn tensors(deg: u32) -> TensorSampler<PolySampler, PolySampler> {
    TensorSampler {
        left: PolySampler::new(1, deg),
        right: PolySampler::new(1, deg),
        max_terms: 2,
    }
}

fn composition(cfg: &SuiteConfig, seed: u64) -> Outcome {
    let mut o = Outcome::default();
    let hbar = &cfg.hbar[0];
    for class in Class::ALL {
        let c = PhaseCarrier::new(1, class, hbar.clone());
        match compose_bipartite(c.clone(), c.clone()) {
            Ok(bi) => {
                for r in check_all(&bi, &tensors(2), 60, seed) {
                    o.absorb(&format!("{class} bipartite"), r);
                }
            }
            Err(e) => o.error(class, e),
        }
        let s = PolySampler::new(1, 2);
        match check_monoid(&c, &c, &c, &s, &s, &s, 100, seed) {
            Ok(r) => o.absorb(&class.to_string(), r),
            Err(e) => o.error(class, e),
        }
    }
    o
}

fn nonzero_a(cfg: &SuiteConfig, seed: u64) -> Outcome {
    let mut o = Outcome::default();
    let c = PhaseCarrier::new(1, Class::Elliptic, cfg.hbar[0].clone());
    for a in [int(1), int(-1), rat(1, 2)] {
        match falsify_nonzero_a(c.clone(), c.clone(), a.clone(), &tensors(3), 50, seed) {
            Ok(r) => {
                o.samples += r.samples;
                match r.failures.first() {
                    Some(w) => {
                        let mut inputs = vec![format!("a = {a}")];
                        inputs.extend(w.inputs.iter().cloned());
                        o.witness(inputs, w.residual);
                    }
                    None => o.error(format!("a = {a}"), "no Leibniz counterexample found"),
                }
            }
            Err(e) => o.error(format!("a = {a}"), e),
        }
    }
    // Control: the consistent composition obeys the same rule.
    match compose_bipartite(c.clone(), c) {
        Ok(bi) => o.absorb(
            "a = 0",
            check_identity(&bi, Identity::LeibnizAlpha, &tensors(3), 50, seed),
        ),
        Err(e) => o.error("a = 0", e),
    }
    o
}

fn deformation_limit(cfg: &SuiteConfig, seed: u64) -> Outcome {
    let mut o = Outcome::default();
    let s = PolySampler::new(2, cfg.max_degree);
    let mut r = rng(seed);
    for _ in 0..200 {
        let (f, g) = (s.sample(&mut r), s.sample(&mut r));
        match (hbar_zero_limit(&f, &g), poisson(&f, &g)) {
            (Ok(l), Ok(pb)) => o.exact(l == pb, || vec![f.to_string(), g.to_string()]),
            (Err(e), _) | (_, Err(e)) => o.error(format!("{f}, {g}"), e),
        }
    }
    for n in 1..=3 {
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { Poly::one(2 * n) } else { Poly::zero(2 * n) };
                let got = poisson(&q::<Rational>(n, i), &p::<Rational>(n, j));
                o.exact(got.as_ref() == Ok(&want), || vec![format!("{{q{i}, p{j}}}, n = {n}")]);
                let qq = poisson(&q::<Rational>(n, i), &q::<Rational>(n, j));
                o.exact(qq.is_ok_and(|v| v.is_zero()), || {
                    vec![format!("{{q{i}, q{j}}}, n = {n}")]
                });
            }
        }
    }
    o
}

// ---------------------------------------------------------------------------
// Hilbert space and Kähler

fn hilbert(cfg: &SuiteConfig, seed: u64) -> Outcome {
    let mut o = Outcome::default();
    let tol = &cfg.tolerances;
    let mut r = rng(seed);
    for dim in [4, 6].into_iter().filter(|d| *d <= cfg.max_dim) {
        for hbar in &cfg.hbar {
            let mut c = MatrixCarrier::new(dim, hbar.clone());
            c.tolerance = tol.matrix_identities;
            for rep in check_all(&c, &HermitianSampler { dim, scale: 1.0 }, 60, seed) {
                o.absorb(&format!("dim {dim} ħ={hbar}"), rep);
            }
        }
        for _ in 0..50 {
            let (a, b) = (random_hermitian(&mut r, dim, 1.0), random_hermitian(&mut r, dim, 1.0));
            match op_beta(&a, &b, 1.0, -1) {
                Ok(beta) => {
                    let d = (&beta - &a.matmul(&b)).max_abs();
                    o.check(d <= tol.matrix_product, d, || vec![format!("β₋ vs AB, dim {dim}")]);
                }
                Err(e) => o.error("β₋", e),
            }
        }
    }
    let n = cfg.max_dim.min(8);
    for _ in 0..500 {
        let t = random_complex(&mut r, n, n);
        match cstar_check(&t, tol.cstar) {
            Ok(v) => o.check(v.pass, v.relative_residual, || {
                vec![format!("‖T†T‖ = {}, ‖T‖ = {}", v.norm_of_square, v.norm)]
            }),
            Err(e) => o.error("C* identity", e),
        }
    }
    o
}

fn linear_field(r: &mut ChaCha8Rng, m: usize) -> VectorField {
    (0..m)
        .map(|_| {
            (0..m).fold(Poly::constant(m, int(r.gen_range(-3..=3))), |f, k| {
                f.add_ref(&Poly::var(m, k).scale(&int(r.gen_range(-3..=3))))
            })
        })
        .collect()
}

fn kahler(cfg: &SuiteConfig, seed: u64) -> Outcome {
    let mut o = Outcome::default();
    let mut r = rng(seed);
    for n in 1..=5 {
        let t = build_kahler(n);
        let v = t.validate();
        o.exact(v.all(), || vec![format!("n = {n}: {v:?}")]);
        for _ in 0..50 {
            let x: Vec<i64> = (0..2 * n).map(|_| r.gen_range(-9..=9)).collect();
            let y: Vec<i64> = (0..2 * n).map(|_| r.gen_range(-9..=9)).collect();
            let herm = hermitean_property_check(&t, &x, &y).unwrap_or(false);
            let xx = inner_product(&t, &x, &x).ok();
            let gx: i64 = x.iter().map(|v| v * v).sum();
            let ok = herm && xx.is_some_and(|z| z.re == gx && z.im == 0);
            o.exact(ok, || vec![format!("x = {x:?}"), format!("y = {y:?}")]);
        }
    }
    for k in 0..50 {
        let n = 1 + k % 3;
        let t = build_kahler(n);
        let (f, g) = (linear_field(&mut r, 2 * n), linear_field(&mut r, 2 * n));
        let nij = nijenhuis_constant_j(&t, &f, &g);
        o.exact(nij.iter().all(|c| c.is_zero()), || vec![format!("N(R, S) for n = {n}")]);
    }
    for k in 0..100 {
        let n = 1 + k % 5;
        let t = build_kahler(n);
        let w = sample_j_commuting_symplectic(&mut r, n, 0.8);
        let raw: Vec<f64> = (0..2 * n).map(|_| r.gen_range(-1.0..1.0)).collect();
        let len = raw.iter().map(|v| v * v).sum::<f64>().sqrt();
        let x: Vec<f64> = raw.iter().map(|v| v / len).collect();
        match normalization_constraint_check(&t, &x, &w, cfg.tolerances.normalization) {
            Ok(d) => o.check(d <= cfg.tolerances.normalization, d, || {
                vec![format!("n = {n}, x = {x:?}")]
            }),
            Err(e) => o.error(format!("n = {n}"), e),
        }
    }
    o
}

// ---------------------------------------------------------------------------
// Positivity

fn positivity_elliptic(cfg: &SuiteConfig, _seed: u64) -> Outcome {
    let mut o = Outcome::default();
    for hbar in &cfg.hbar {
        for m in 0..=1 {
            let run = fock_wigner(m, hbar).and_then(|f| lattice_minimum::<-1>(&f, cfg.ghost_bound, hbar));
            match run {
                Ok((min, negatives)) => {
                    o.samples += lattice(cfg.ghost_bound).len();
                    o.note(&format!("min ħ={hbar} level {m}"), &min);
                    if negatives > 0 {
                        o.fail(Witness {
                            inputs: vec![format!("ħ={hbar} level {m}: {negatives} negative values, min {min}")],
                            residual: 1.0,
                        });
                    }
                }
                Err(e) => o.error(format!("ħ={hbar} level {m}"), e),
            }
        }
    }
    o
}

fn ghost_hyperbolic(cfg: &SuiteConfig, _seed: u64) -> Outcome {
    let mut o = Outcome::default();
    for hbar in &cfg.hbar {
        o.samples += 1;
        match ghost_search::<1>(cfg.ghost_bound, hbar) {
            Ok(w) => {
                o.note(&format!("value ħ={hbar}"), &w.value);
                o.witness(
                    vec![
                        format!("ħ={hbar}"),
                        format!("g = {}", w.function),
                        format!("⟨g*⋆g⟩ = {}", w.value),
                    ],
                    w.value_f64,
                );
            }
            Err(e) => o.error(format!("ħ={hbar}"), e),
        }
    }
    o
}

// ---------------------------------------------------------------------------
// Split-complex numbers

fn split_sample(r: &mut ChaCha8Rng) -> SplitComplex {
    let den = r.gen_range(1..=5);
    SplitComplex::new(rat(r.gen_range(-30..=30), den), rat(r.gen_range(-30..=30), den))
}

fn split_complex(_cfg: &SuiteConfig, seed: u64) -> Outcome {
    let mut o = Outcome::default();
    let mut r = rng(seed);
    for _ in 0..10_000 {
        let (x, y) = (split_sample(&mut r), split_sample(&mut r));
        let v = check_polarization_parallelogram(&x, &y);
        o.exact(v.polarization && v.parallelogram, || {
            vec![format!("polarization {x}, {y}")]
        });
    }
    let mut admissible = 0;
    for _ in 0..10_000 {
        let (z, w) = (split_sample(&mut r), split_sample(&mut r));
        if let Ok(holds) = check_reversed_triangle(&z, &w) {
            admissible += 1;
            o.exact(holds, || vec![format!("reversed triangle {z}, {w}")]);
        }
    }
    o.note("reversed triangle admissible", admissible);
    let mut admissible = 0;
    while admissible < 10_000 {
        let (x, y) = (split_sample(&mut r), split_sample(&mut r));
        if let Some(holds) = check_para_cauchy_schwarz(&x, &y) {
            admissible += 1;
            o.exact(holds, || vec![format!("Cauchy-Schwarz {x}, {y}")]);
        }
    }
    o
}

fn minimizer(_cfg: &SuiteConfig, _seed: u64) -> Outcome {
    let mut o = Outcome::default();
    let w = minimizer_nonuniqueness_witness();
    let v = w.validate(360);
    o.samples += 361;
    let show = |m: &[SplitComplex; 2]| format!("({}, {})", m[0], m[1]);
    if v.valid {
        o.witness(
            vec![
                format!("x = {}", show(&w.x)),
                format!("y = {}", show(&w.y)),
                format!("y0 = {}", show(&w.y0)),
                format!("distance² = {}", v.distance_sq_y),
            ],
            0.0,
        );
    } else {
        o.error("minimizer witness", format!("{v:?}"));
    }
    o
}

// ---------------------------------------------------------------------------
// Berezin quantization

fn grid(cfg: &SuiteConfig) -> QuadratureGrid {
    let b = &cfg.berezin;
    let auto = QuadratureGrid::for_levels(b.hbar, b.levels, 2);
    match b.cutoff {
        Some(r) => QuadratureGrid::new(b.hbar, auto.axis_nodes, r),
        None => auto,
    }
}

fn berezin(cfg: &SuiteConfig, _seed: u64) -> Outcome {
    let mut o = Outcome::default();
    let (hbar, n, tol) = (cfg.berezin.hbar, cfg.berezin.levels, cfg.tolerances.berezin);
    let g = grid(cfg);
    let k = trusted(n);
    match identity_defect(hbar, n, &g) {
        Ok(d) => o.check(d <= tol, d, || vec!["‖Q(1) − I‖ on trusted levels".into()]),
        Err(e) => o.error("Q(1)", e),
    }
    let (x, pm) = ladder_position_momentum(n, hbar);
    let qx = q::<Rational>(1, 0);
    let px = p::<Rational>(1, 0);
    for (label, f, oracle) in [("Q(q)", &qx, &x), ("Q(p)", &px, &pm)] {
        match berezin_quantize_real(f, hbar, n, &g) {
            Ok(m) => {
                let d = (&m.leading_block(k) - &oracle.leading_block(k)).max_abs();
                o.check(d <= tol, d, || vec![format!("{label} vs ladder oracle")]);
            }
            Err(e) => o.error(label, e),
        }
    }
    let q2 = &qx * &qx;
    let osc = &q2 + &(&px * &px);
    for (label, f) in [("q²", &q2), ("q² + p²", &osc)] {
        match berezin_quantize_real(f, hbar, n, &g)
            .map_err(|e| e.to_string())
            .and_then(|m| positivity_preservation(&m).map_err(|e| e.to_string()))
        {
            Ok(v) => {
                o.note(
                    &format!("min eigenvalue Q({label})"),
                    format!("{:.9}", v.min_eigenvalue),
                );
                o.check(v.pass, (-v.min_eigenvalue).max(0.0), || {
                    vec![format!("Q({label}) min eigenvalue {}", v.min_eigenvalue)]
                });
            }
            Err(e) => o.error(format!("Q({label})"), e),
        }
    }
    let a = &q::<ComplexRational>(1, 0) + &p::<ComplexRational>(1, 0).scale_by(&ComplexRational::from_ints(0, 1));
    match berezin_quantize(&a, hbar, n, &g)
        .map_err(|e| e.to_string())
        .and_then(|m| cstar_on_quantized(&m).map_err(|e| e.to_string()))
    {
        Ok(v) => o.check(v.pass, v.relative_residual, || vec!["C* identity on Q(q + ip)".into()]),
        Err(e) => o.error("Q(q + ip)", e),
    }
    o
}

fn berezin_correspondence(cfg: &SuiteConfig, _seed: u64) -> Outcome {
    let mut o = Outcome::default();
    let (hbar, n) = (cfg.berezin.hbar, cfg.berezin.levels);
    match correspondence_check(hbar, n, &grid(cfg), cfg.tolerances.correspondence) {
        Ok(r) => {
            o.note("observed diagonal", format!("{:.9}", r.observed_diagonal));
            o.note("residual with (-i/ħ)", format!("{:.3e}", r.residual_conjugate_unit));
            o.check(r.pass, r.residual, || {
                vec![format!(
                    "(i/ħ)[Q(q), Q(p)] has diagonal {:.6} on trusted levels",
                    r.observed_diagonal
                )]
            });
        }
        Err(e) => o.error("correspondence", e),
    }
    o
}

// ---------------------------------------------------------------------------
// Quantions

fn quantion_norms(cfg: &SuiteConfig, seed: u64) -> Outcome {
    let mut o = Outcome::default();
    let mut r = rng(seed);
    for _ in 0..1000 {
        let x = random_exact_quantion(&mut r, 6);
        let n = norms_commute(&x);
        let ok = n.am == n.ma && n.am == Quantion::scalar(n.abs_det_sq.clone());
        o.exact(ok, || vec![format!("{:?}", x.rows())]);
    }
    for _ in 0..1000 {
        let x = random_quantion(&mut r);
        let (d, e) = norms_commute(&x).residuals();
        o.check(d.max(e) <= cfg.tolerances.quantion, d.max(e), || {
            vec![format!("{:?}", x.rows())]
        });
        let v = x.anorm();
        o.exact(v.is_future_oriented(), || vec![format!("A(Q) = {v:?}")]);
    }
    o
}

fn quantion_current(_cfg: &SuiteConfig, seed: u64) -> Outcome {
    let mut o = Outcome::default();
    let mut r = rng(seed);
    let found = match rep_discovery(&probe_set(&mut r, 20)) {
        Ok(d) => d,
        Err(e) => {
            o.error("representation discovery", e);
            return o;
        }
    };
    o.note("representation", found.winner.label());
    o.note("passing candidates", found.passing.join(", "));
    o.note("candidates tried", found.candidates_tried);
    let mut wrong = found.winner.clone();
    wrong.gammas.swap(1, 2);
    let mut control_failures = 0;
    for _ in 0..1000 {
        let x = random_quantion(&mut r);
        match dirac_current_check(&x, &found.winner) {
            Ok(v) => o.check(v.pass, v.residual, || vec![format!("{:?}", x.rows())]),
            Err(e) => o.error("current", e),
        }
        control_failures += dirac_current_check(&x, &wrong).map_or(true, |v| !v.pass) as usize;
    }
    o.note("negative control failures", control_failures);
    if control_failures < 990 {
        o.error(
            "negative control (γ¹ ↔ γ²)",
            format!("only {control_failures}/1000 samples failed"),
        );
    }
    o
}

fn spacetime_poly(r: &mut ChaCha8Rng) -> SpacetimePoly {
    let terms: Vec<_> = (0..r.gen_range(1..=6))
        .map(|_| {
            let mut e = vec![0u32; 4];
            for _ in 0..r.gen_range(0..=4) {
                e[r.gen_range(0..4)] += 1;
            }
            let c = ComplexRational::new(
                rat(r.gen_range(-5..=5), r.gen_range(1..=3)),
                rat(r.gen_range(-5..=5), 1),
            );
            (e, c)
        })
        .collect();
    SpacetimePoly::from_terms(4, terms)
}

fn quantion_dalembertian(_cfg: &SuiteConfig, seed: u64) -> Outcome {
    let mut o = Outcome::default();
    let mut r = rng(seed);
    for _ in 0..100 {
        let f = spacetime_poly(&mut r);
        match dalembertian_factorization(&f) {
            Ok(v) => o.exact(v.pass, || vec![f.to_string()]),
            Err(e) => o.error(&f, e),
        }
    }
    o
}

// ---------------------------------------------------------------------------
// Envariance

fn envariance_reflexivity(cfg: &SuiteConfig, seed: u64) -> Outcome {
    let mut o = Outcome::default();
    let tol = cfg.tolerances.envariance;
    let mut r = rng(seed);
    for _ in 0..100 {
        let (dp, dn) = (r.gen_range(1..=4), r.gen_range(1..=4));
        let psi = PureState::random(&mut r, vec![dp, dn]);
        let s = match schmidt(&psi) {
            Ok(s) => s,
            Err(e) => {
                o.error(format!("{dp}×{dn}"), e);
                continue;
            }
        };
        let u_p = random_schmidt_diagonal(&mut r, &s);
        let w: Vec<i64> = (0..dp.min(dn)).map(|_| r.gen_range(0..=2)).collect();
        match verify_reflexivity(&psi, &u_p, &w) {
            Ok(d) => o.check(d <= tol, d, || vec![format!("{dp}×{dn} windings {w:?}")]),
            Err(e) => o.error(format!("{dp}×{dn}"), e),
        }
        let zero = vec![0; w.len()];
        let same = counter_unitary(&s, &u_p, &zero).ok() == counter_unitary(&s, &u_p, &w).ok();
        o.exact(same, || vec![format!("winding dependence {dp}×{dn} {w:?}")]);
    }
    o
}

fn envariance_symmetry(cfg: &SuiteConfig, seed: u64) -> Outcome {
    let mut o = Outcome::default();
    let tol = cfg.tolerances.envariance;
    let mut r = rng(seed);
    let (mut controls, mut control_failures) = (0, 0);
    for _ in 0..100 {
        let (dp, dn) = (r.gen_range(1..=4), r.gen_range(1..=4));
        let dxi = r.gen_range(1..=2);
        let eq = match Equivalence::random(&mut r, dp, dn, dxi) {
            Ok(eq) => eq,
            Err(e) => {
                o.error(format!("{dp}×{dn}"), e);
                continue;
            }
        };
        let v_ps: Vec<_> = (0..3).map(|_| random_schmidt_diagonal(&mut r, &eq.schmidt)).collect();
        match verify_symmetry(&eq, &v_ps, InverseRule::Adjoint) {
            Ok(v) => o.check(v.max_residual <= tol, v.max_residual, || {
                vec![format!("{dp}×{dn}×{dxi}")]
            }),
            Err(e) => o.error(format!("{dp}×{dn}"), e),
        }
        if dn > 1 {
            controls += 1;
            control_failures +=
                verify_symmetry(&eq, &v_ps, InverseRule::EntrywiseConjugate).map_or(true, |v| !v.pass) as usize;
        }
    }
    o.note("negative control failures", format!("{control_failures}/{controls}"));
    if control_failures * 2 <= controls {
        o.error(
            "negative control (conjugate for inverse)",
            format!("{control_failures}/{controls} failed"),
        );
    }
    o
}

fn envariance_transitivity(cfg: &SuiteConfig, seed: u64) -> Outcome {
    let mut o = Outcome::default();
    let tol = cfg.tolerances.envariance;
    let mut r = rng(seed);
    let mut literal: f64 = 0.0;
    for _ in 0..100 {
        let (dp, dn) = (r.gen_range(1..=2), r.gen_range(1..=2));
        let run = random_chain(&mut r, dp, dn, 2, 2).and_then(|(first, second)| {
            let w_ps: Vec<_> = (0..3).map(|_| random_chain_unitary(&mut r, &first)).collect();
            verify_transitivity(&first, &second, &w_ps, DEFAULT_DIMENSION_CAP)
        });
        match run {
            Ok(v) => {
                literal = literal.max(v.max_literal_residual);
                o.check(v.max_residual <= tol, v.max_residual, || {
                    vec![format!("{dp}×{dn}, total dim {}", v.total_dim)]
                });
            }
            Err(e) => o.error(format!("{dp}×{dn}"), e),
        }
    }
    o.note("max residual without factor swap", format!("{literal:.3e}"));
    o
}
