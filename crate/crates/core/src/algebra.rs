//! Two-product algebra harness.
//!
//! A carrier supplies a Jordan product `σ`, a Lie product `α`, a unit and a
//! coordinate map into a canonical basis. Identities are checked by summing
//! the terms of each equation and testing the coordinates of the sum.
//!
//! Bipartite composition builds a carrier on formal tensor sums from two
//! carriers of the same class and ħ, using
//!
//! ```text
//! α₁₂ = α₁σ₂ + σ₁α₂ (+ a·α₁α₂)
//! σ₁₂ = σ₁σ₂ + (J²ħ²/4)·α₁α₂
//! ```

use std::collections::BTreeMap;
use std::fmt::{self, Debug};
use std::marker::PhantomData;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::phasepoly::{self, extend, signed_star, HBar, PhasePoly};
use crate::poly::Poly;
use crate::scalars::{int, rat, Class, ExtRational, Rational, Scalar};

/// Witnesses kept per report.
pub const MAX_WITNESSES: usize = 3;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AlgebraError {
    #[error("carriers belong to different classes: {0} vs {1}")]
    ClassMismatch(Class, Class),
    #[error("carriers use different ħ: {0} vs {1}")]
    HBarMismatch(String, String),
    #[error("the extra α₁α₂ coefficient must be nonzero")]
    ZeroCoefficient,
    #[error("no counterexample found for a = {a} in {samples} samples; widen the sampler")]
    UnexpectedPass {
        a: String,
        samples: usize,
        report: Box<IdentityReport>,
    },
}

/// A real vector space with products `σ` and `α`.
pub trait TwoProductCarrier: Send + Sync {
    type Elem: Clone + Debug + Send + Sync;
    type Key: Ord + Clone + Debug + Send + Sync;
    type Coef: Scalar;

    fn class(&self) -> Class;
    fn hbar(&self) -> &HBar;
    fn zero(&self) -> Self::Elem;
    fn unit(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn scale(&self, a: &Self::Elem, r: &Rational) -> Self::Elem;
    fn sigma(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn alpha(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// Coordinates in a canonical basis. Zero coordinates may be omitted.
    fn coords(&self, a: &Self::Elem) -> BTreeMap<Self::Key, Self::Coef>;
    fn describe(&self, a: &Self::Elem) -> String;

    /// Relative residual allowed by equality; 0 means exact.
    fn tolerance(&self) -> f64 {
        if Self::Coef::EXACT {
            0.0
        } else {
            1e-12
        }
    }

    fn is_zero(&self, a: &Self::Elem) -> bool {
        self.coords(a).values().all(|c| c.is_zero())
    }

    /// `J²ħ²/4`, the compatibility and bipartite coupling coefficient.
    fn coupling(&self) -> Rational {
        let h = self.hbar().value();
        int(self.class().j_squared() as i64) * h * h / int(4)
    }
}

/// Produces random carrier elements from a seeded generator.
pub trait Sampler<E>: Sync {
    fn sample(&self, rng: &mut ChaCha8Rng) -> E;
}

impl<E, F: Fn(&mut ChaCha8Rng) -> E + Sync> Sampler<E> for F {
    fn sample(&self, rng: &mut ChaCha8Rng) -> E {
        self(rng)
    }
}

/// One step of the SplitMix64 sequence; derives independent stream seeds.
pub fn mix_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed
        .wrapping_add(stream.wrapping_mul(0x9e37_79b9_7f4a_7c15))
        .wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Identity {
    LeibnizSigma,
    LeibnizAlpha,
    Jacobi,
    Jordan,
    Compatibility,
    SkewAlpha,
    SymSigma,
    Unitality,
    Relationality,
}

impl Identity {
    pub const ALL: [Identity; 9] = [
        Identity::LeibnizSigma,
        Identity::LeibnizAlpha,
        Identity::Jacobi,
        Identity::Jordan,
        Identity::Compatibility,
        Identity::SkewAlpha,
        Identity::SymSigma,
        Identity::Unitality,
        Identity::Relationality,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Identity::LeibnizSigma => "leibniz-sigma",
            Identity::LeibnizAlpha => "leibniz-alpha",
            Identity::Jacobi => "jacobi",
            Identity::Jordan => "jordan",
            Identity::Compatibility => "compatibility",
            Identity::SkewAlpha => "skew-alpha",
            Identity::SymSigma => "sym-sigma",
            Identity::Unitality => "unitality",
            Identity::Relationality => "relationality",
        }
    }

    fn arity(self) -> usize {
        match self {
            Identity::LeibnizSigma | Identity::LeibnizAlpha | Identity::Jacobi | Identity::Compatibility => 3,
            Identity::Jordan | Identity::SkewAlpha | Identity::SymSigma => 2,
            Identity::Unitality | Identity::Relationality => 1,
        }
    }
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub inputs: Vec<String>,
    pub residual: f64,
}

/// Outcome of one identity sweep. `failures` holds the first few witnesses;
/// `failure_count` counts all of them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub identity: String,
    pub class: Class,
    pub samples: usize,
    pub failure_count: usize,
    pub failures: Vec<Witness>,
    pub max_residual: f64,
}

impl IdentityReport {
    pub fn new(identity: impl Into<String>, class: Class) -> Self {
        IdentityReport {
            identity: identity.into(),
            class,
            samples: 0,
            failure_count: 0,
            failures: Vec::new(),
            max_residual: 0.0,
        }
    }

    pub fn passed(&self) -> bool {
        self.failure_count == 0
    }

    /// Records one evaluated sample.
    pub fn record(&mut self, outcome: Option<Witness>, residual: f64) {
        self.samples += 1;
        if residual > self.max_residual {
            self.max_residual = residual;
        }
        if let Some(w) = outcome {
            self.failure_count += 1;
            if self.failures.len() < MAX_WITNESSES {
                self.failures.push(w);
            }
        }
    }

    /// Folds another report for the same class into this one.
    pub fn merge(&mut self, other: IdentityReport) {
        self.samples += other.samples;
        self.failure_count += other.failure_count;
        self.max_residual = self.max_residual.max(other.max_residual);
        for w in other.failures {
            if self.failures.len() < MAX_WITNESSES {
                self.failures.push(w);
            }
        }
    }
}

/// Euclidean norm of a coordinate map.
fn coord_norm<K, S: Scalar>(c: &BTreeMap<K, S>) -> f64 {
    c.values().map(|v| v.magnitude().powi(2)).sum::<f64>().sqrt()
}

/// Residual of an equation `Σ terms = 0`: zero iff exactly zero for exact
/// carriers; relative to the largest term (floor 1) for float carriers.
fn equation_residual<C: TwoProductCarrier>(c: &C, terms: &[C::Elem]) -> (bool, f64) {
    let mut sum = c.zero();
    let mut scale: f64 = 1.0;
    for t in terms {
        if !C::Coef::EXACT {
            scale = scale.max(coord_norm(&c.coords(t)));
        }
        sum = c.add(&sum, t);
    }
    let coords = c.coords(&sum);
    if C::Coef::EXACT {
        let zero = coords.values().all(|v| v.is_zero());
        (zero, if zero { 0.0 } else { coord_norm(&coords) })
    } else {
        let r = coord_norm(&coords) / scale;
        (r <= c.tolerance(), r)
    }
}

fn neg<C: TwoProductCarrier>(c: &C, a: &C::Elem) -> C::Elem {
    c.scale(a, &-Rational::one())
}

/// Associator `(x∘y)∘z − x∘(y∘z)`.
fn associator<C: TwoProductCarrier>(
    c: &C,
    op: impl Fn(&C::Elem, &C::Elem) -> C::Elem,
    x: &C::Elem,
    y: &C::Elem,
    z: &C::Elem,
) -> C::Elem {
    c.add(&op(&op(x, y), z), &neg(c, &op(x, &op(y, z))))
}

/// The equations of one identity on one tuple, each as terms summing to 0.
fn equations<C: TwoProductCarrier>(c: &C, id: Identity, t: &[C::Elem]) -> Vec<Vec<C::Elem>> {
    let a = |x: &C::Elem, y: &C::Elem| c.alpha(x, y);
    let s = |x: &C::Elem, y: &C::Elem| c.sigma(x, y);
    match id {
        Identity::LeibnizSigma => {
            let (f, g, h) = (&t[0], &t[1], &t[2]);
            vec![vec![a(f, &s(g, h)), neg(c, &s(&a(f, g), h)), neg(c, &s(g, &a(f, h)))]]
        }
        Identity::LeibnizAlpha => {
            let (f, g, h) = (&t[0], &t[1], &t[2]);
            vec![vec![a(f, &a(g, h)), neg(c, &a(&a(f, g), h)), neg(c, &a(g, &a(f, h)))]]
        }
        Identity::Jacobi => {
            let (f, g, h) = (&t[0], &t[1], &t[2]);
            vec![vec![a(f, &a(g, h)), a(g, &a(h, f)), a(h, &a(f, g))]]
        }
        Identity::Jordan => {
            let (f, g) = (&t[0], &t[1]);
            let ff = s(f, f);
            vec![vec![s(&s(f, g), &ff), neg(c, &s(f, &s(g, &ff)))]]
        }
        Identity::Compatibility => {
            let (f, g, h) = (&t[0], &t[1], &t[2]);
            vec![vec![
                associator(c, s, f, g, h),
                c.scale(&associator(c, a, f, g, h), &c.coupling()),
            ]]
        }
        Identity::SkewAlpha => {
            let (f, g) = (&t[0], &t[1]);
            vec![vec![a(f, g), a(g, f)]]
        }
        Identity::SymSigma => {
            let (f, g) = (&t[0], &t[1]);
            vec![vec![s(f, g), neg(c, &s(g, f))]]
        }
        Identity::Unitality => {
            let (f, one) = (&t[0], c.unit());
            vec![vec![s(&one, f), neg(c, f)], vec![s(f, &one), neg(c, f)]]
        }
        Identity::Relationality => {
            let (f, one) = (&t[0], c.unit());
            vec![vec![a(&one, f)], vec![a(f, &one)], vec![a(&one, &one)]]
        }
    }
}

/// Evaluates pre-drawn tuples in parallel and folds the outcomes in order.
fn evaluate_tuples<C: TwoProductCarrier>(
    c: &C,
    id: Identity,
    label: &str,
    tuples: Vec<Vec<C::Elem>>,
) -> IdentityReport {
    let outcomes: Vec<(Option<Witness>, f64)> = tuples
        .par_iter()
        .map(|t| {
            let mut worst: f64 = 0.0;
            let mut ok = true;
            for eq in equations(c, id, t) {
                let (pass, r) = equation_residual(c, &eq);
                ok &= pass;
                worst = worst.max(r);
            }
            let witness = (!ok).then(|| Witness {
                inputs: t.iter().map(|e| c.describe(e)).collect(),
                residual: worst,
            });
            (witness, worst)
        })
        .collect();
    let mut report = IdentityReport::new(label, c.class());
    for (w, r) in outcomes {
        report.record(w, r);
    }
    report
}

/// Checks `id` on `count` random tuples drawn from `sampler`.
pub fn check_identity<C: TwoProductCarrier>(
    c: &C,
    id: Identity,
    sampler: &impl Sampler<C::Elem>,
    count: usize,
    seed: u64,
) -> IdentityReport {
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, id as u64));
    let tuples: Vec<Vec<C::Elem>> = (0..count)
        .map(|_| (0..id.arity()).map(|_| sampler.sample(&mut rng)).collect())
        .collect();
    evaluate_tuples(c, id, id.name(), tuples)
}

/// Checks `id` on explicitly supplied tuples.
pub fn check_identity_on<C: TwoProductCarrier>(c: &C, id: Identity, tuples: Vec<Vec<C::Elem>>) -> IdentityReport {
    evaluate_tuples(c, id, id.name(), tuples)
}

/// Runs all nine identities, one report each.
pub fn check_all<C: TwoProductCarrier>(
    c: &C,
    sampler: &impl Sampler<C::Elem>,
    count: usize,
    seed: u64,
) -> Vec<IdentityReport> {
    Identity::ALL
        .iter()
        .map(|&id| check_identity(c, id, sampler, count, seed))
        .collect()
}

// ---------------------------------------------------------------------------
// Phase space carrier

/// Real polynomials on a flat phase space with the class's bracket family.
#[derive(Clone, Debug)]
pub struct PhaseCarrier {
    pub dof: usize,
    pub class: Class,
    pub hbar: HBar,
}

impl PhaseCarrier {
    pub fn new(dof: usize, class: Class, hbar: HBar) -> Self {
        PhaseCarrier { dof, class, hbar }
    }
}

impl TwoProductCarrier for PhaseCarrier {
    type Elem = PhasePoly<Rational>;
    type Key = Vec<u32>;
    type Coef = Rational;

    fn class(&self) -> Class {
        self.class
    }
    fn hbar(&self) -> &HBar {
        &self.hbar
    }
    fn zero(&self) -> Self::Elem {
        Poly::zero(2 * self.dof)
    }
    fn unit(&self) -> Self::Elem {
        Poly::one(2 * self.dof)
    }
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        a.add_ref(b)
    }
    fn scale(&self, a: &Self::Elem, r: &Rational) -> Self::Elem {
        a.scale(r)
    }
    fn sigma(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        phasepoly::sigma(a, b, self.class, &self.hbar).expect("carrier elements share dof")
    }
    fn alpha(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        phasepoly::alpha(a, b, self.class, &self.hbar).expect("carrier elements share dof")
    }
    fn coords(&self, a: &Self::Elem) -> BTreeMap<Vec<u32>, Rational> {
        a.terms().clone()
    }
    fn describe(&self, a: &Self::Elem) -> String {
        a.to_string()
    }
    fn is_zero(&self, a: &Self::Elem) -> bool {
        a.is_zero()
    }
}

/// Random sparse polynomials: 1..=`max_terms` monomials of total degree
/// `≤ max_degree`, coefficients `n/d` with `|n/d| ≤ coef_bound`, `d ≤ max_den`.
#[derive(Clone, Debug)]
pub struct PolySampler {
    pub nvars: usize,
    pub max_degree: u32,
    pub max_terms: usize,
    pub coef_bound: i64,
    pub max_den: i64,
}

impl PolySampler {
    pub fn new(dof: usize, max_degree: u32) -> Self {
        PolySampler {
            nvars: 2 * dof,
            max_degree,
            max_terms: 4,
            coef_bound: 5,
            max_den: 4,
        }
    }

    pub fn coefficient(&self, rng: &mut ChaCha8Rng) -> Rational {
        loop {
            let d = rng.gen_range(1..=self.max_den);
            let n = rng.gen_range(-self.coef_bound * d..=self.coef_bound * d);
            if n != 0 {
                return rat(n, d);
            }
        }
    }

    pub fn exponents(&self, rng: &mut ChaCha8Rng) -> Vec<u32> {
        let mut e = vec![0u32; self.nvars];
        if self.nvars == 0 {
            return e;
        }
        let deg = rng.gen_range(0..=self.max_degree);
        for _ in 0..deg {
            e[rng.gen_range(0..self.nvars)] += 1;
        }
        e
    }
}

impl Sampler<PhasePoly<Rational>> for PolySampler {
    fn sample(&self, rng: &mut ChaCha8Rng) -> PhasePoly<Rational> {
        let terms = rng.gen_range(1..=self.max_terms);
        let mut out = Poly::zero(self.nvars);
        for _ in 0..terms {
            let e = self.exponents(rng);
            let c = self.coefficient(rng);
            out = out.add_ref(&Poly::monomial(self.nvars, e, c));
        }
        out
    }
}

// ---------------------------------------------------------------------------
// The real line, ℝ as a trivial carrier

/// `ℝ` with `σ` = multiplication and `α` = 0: the unit object of
/// composition. Elements are stored in the coefficient ring `S` so that it
/// composes with any carrier over `S`.
#[derive(Clone, Debug)]
pub struct RealLine<S> {
    pub class: Class,
    pub hbar: HBar,
    _coef: PhantomData<S>,
}

impl<S> RealLine<S> {
    pub fn new(class: Class, hbar: HBar) -> Self {
        RealLine {
            class,
            hbar,
            _coef: PhantomData,
        }
    }
}

impl<S: Scalar> TwoProductCarrier for RealLine<S> {
    type Elem = S;
    type Key = ();
    type Coef = S;

    fn class(&self) -> Class {
        self.class
    }
    fn hbar(&self) -> &HBar {
        &self.hbar
    }
    fn zero(&self) -> S {
        S::zero()
    }
    fn unit(&self) -> S {
        S::one()
    }
    fn add(&self, a: &S, b: &S) -> S {
        a.add_ref(b)
    }
    fn scale(&self, a: &S, r: &Rational) -> S {
        a.scale(r)
    }
    fn sigma(&self, a: &S, b: &S) -> S {
        a.mul_ref(b)
    }
    fn alpha(&self, _: &S, _: &S) -> S {
        S::zero()
    }
    fn coords(&self, a: &S) -> BTreeMap<(), S> {
        BTreeMap::from([((), a.clone())])
    }
    fn describe(&self, a: &S) -> String {
        a.to_string()
    }
}

// ---------------------------------------------------------------------------
// Bipartite composition

/// Formal sum `Σ wᵢ · lᵢ ⊗ rᵢ`.
#[derive(Clone, Debug)]
pub struct TensorElement<L, R> {
    pub terms: Vec<(L, R, Rational)>,
}

impl<L, R> TensorElement<L, R> {
    pub fn zero() -> Self {
        TensorElement { terms: Vec::new() }
    }

    pub fn pure(l: L, r: R) -> Self {
        TensorElement {
            terms: vec![(l, r, Rational::one())],
        }
    }
}

/// Carrier on `A ⊗ B` built by [`compose_bipartite`].
#[derive(Clone, Debug)]
pub struct Bipartite<A, B> {
    pub left: A,
    pub right: B,
    /// Coefficient of the extra `α₁α₂` term in `α₁₂`; zero for the
    /// consistent composition.
    pub extra_alpha: Rational,
    /// Whether `σ₁₂` is present. Without it only the `α₁α₂` ansatz remains.
    pub with_sigma: bool,
}

/// Composes two carriers of one class and one ħ.
pub fn compose_bipartite<A: TwoProductCarrier, B: TwoProductCarrier>(
    left: A,
    right: B,
) -> Result<Bipartite<A, B>, AlgebraError> {
    if left.class() != right.class() {
        return Err(AlgebraError::ClassMismatch(left.class(), right.class()));
    }
    if left.hbar() != right.hbar() {
        return Err(AlgebraError::HBarMismatch(
            left.hbar().to_string(),
            right.hbar().to_string(),
        ));
    }
    Ok(Bipartite {
        left,
        right,
        extra_alpha: Rational::zero(),
        with_sigma: true,
    })
}

impl<A: TwoProductCarrier, B: TwoProductCarrier> Bipartite<A, B> {
    fn push(&self, out: &mut TensorElement<A::Elem, B::Elem>, l: A::Elem, r: B::Elem, w: Rational) {
        if w.is_zero() || self.left.is_zero(&l) || self.right.is_zero(&r) {
            return;
        }
        out.terms.push((l, r, w));
    }

    fn product(
        &self,
        x: &TensorElement<A::Elem, B::Elem>,
        y: &TensorElement<A::Elem, B::Elem>,
        lie: bool,
    ) -> TensorElement<A::Elem, B::Elem> {
        let (ca, cb) = (&self.left, &self.right);
        let coupling = ca.coupling();
        let mut out = TensorElement::zero();
        for (f1, f2, wf) in &x.terms {
            for (g1, g2, wg) in &y.terms {
                let w = wf * wg;
                let (a1, a2) = (ca.alpha(f1, g1), cb.alpha(f2, g2));
                if !self.with_sigma {
                    // Without σ, the only bilinear ansatz left is a·α₁α₂.
                    if lie {
                        self.push(&mut out, a1, a2, &w * &self.extra_alpha);
                    }
                    continue;
                }
                let (s1, s2) = (ca.sigma(f1, g1), cb.sigma(f2, g2));
                if lie {
                    self.push(&mut out, a1.clone(), s2, w.clone());
                    self.push(&mut out, s1, a2.clone(), w.clone());
                    if !self.extra_alpha.is_zero() {
                        self.push(&mut out, a1, a2, &w * &self.extra_alpha);
                    }
                } else {
                    self.push(&mut out, s1, s2, w.clone());
                    if !coupling.is_zero() {
                        self.push(&mut out, a1, a2, &w * &coupling);
                    }
                }
            }
        }
        out
    }
}

impl<A, B> TwoProductCarrier for Bipartite<A, B>
where
    A: TwoProductCarrier,
    B: TwoProductCarrier<Coef = A::Coef>,
{
    type Elem = TensorElement<A::Elem, B::Elem>;
    type Key = (A::Key, B::Key);
    type Coef = A::Coef;

    fn class(&self) -> Class {
        self.left.class()
    }
    fn hbar(&self) -> &HBar {
        self.left.hbar()
    }
    fn zero(&self) -> Self::Elem {
        TensorElement::zero()
    }
    fn unit(&self) -> Self::Elem {
        TensorElement::pure(self.left.unit(), self.right.unit())
    }
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let mut terms = a.terms.clone();
        terms.extend(b.terms.iter().cloned());
        TensorElement { terms }
    }
    fn scale(&self, a: &Self::Elem, r: &Rational) -> Self::Elem {
        if r.is_zero() {
            return TensorElement::zero();
        }
        TensorElement {
            terms: a
                .terms
                .iter()
                .map(|(l, rr, w)| (l.clone(), rr.clone(), w * r))
                .collect(),
        }
    }
    fn sigma(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.product(a, b, false)
    }
    fn alpha(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.product(a, b, true)
    }
    fn coords(&self, a: &Self::Elem) -> BTreeMap<Self::Key, Self::Coef> {
        let mut out: BTreeMap<Self::Key, Self::Coef> = BTreeMap::new();
        for (l, r, w) in &a.terms {
            let (cl, cr) = (self.left.coords(l), self.right.coords(r));
            for (kl, vl) in &cl {
                let vlw = vl.scale(w);
                for (kr, vr) in &cr {
                    let v = vlw.mul_ref(vr);
                    let e = out
                        .entry((kl.clone(), kr.clone()))
                        .or_insert_with(<A::Coef as Zero>::zero);
                    *e = e.add_ref(&v);
                }
            }
        }
        out.retain(|_, v| !v.is_zero());
        out
    }
    fn describe(&self, a: &Self::Elem) -> String {
        if a.terms.is_empty() {
            return "0".into();
        }
        a.terms
            .iter()
            .map(|(l, r, w)| format!("{w}·({})⊗({})", self.left.describe(l), self.right.describe(r)))
            .collect::<Vec<_>>()
            .join(" + ")
    }
    fn tolerance(&self) -> f64 {
        self.left.tolerance().max(self.right.tolerance())
    }
}

/// Random sums of one or two pure tensors with random rational weights.
pub struct TensorSampler<SL, SR> {
    pub left: SL,
    pub right: SR,
    pub max_terms: usize,
}

impl<L, R, SL: Sampler<L>, SR: Sampler<R>> Sampler<TensorElement<L, R>> for TensorSampler<SL, SR> {
    fn sample(&self, rng: &mut ChaCha8Rng) -> TensorElement<L, R> {
        let n = rng.gen_range(1..=self.max_terms.max(1));
        let mut terms = Vec::with_capacity(n);
        for i in 0..n {
            let w = if i == 0 {
                Rational::one()
            } else {
                rat(
                    rng.gen_range(1..=3) * if rng.gen_bool(0.5) { 1 } else { -1 },
                    rng.gen_range(1..=2),
                )
            };
            terms.push((self.left.sample(rng), self.right.sample(rng), w));
        }
        TensorElement { terms }
    }
}

// ---------------------------------------------------------------------------
// Commutative monoid of compositions

fn diff_residual<K: Ord + Clone, S: Scalar>(a: &BTreeMap<K, S>, b: &BTreeMap<K, S>, tol: f64) -> (bool, f64) {
    let mut d: BTreeMap<K, S> = a.clone();
    for (k, v) in b {
        let e = d.entry(k.clone()).or_insert_with(S::zero);
        *e = e.sub_ref(v);
    }
    let n = coord_norm(&d);
    if S::EXACT {
        let zero = d.values().all(|v| v.is_zero());
        (zero, if zero { 0.0 } else { n })
    } else {
        let scale = coord_norm(a).max(coord_norm(b)).max(1.0);
        (n / scale <= tol, n / scale)
    }
}

/// Checks `σ₁₂ = σ₂₁`, `α₁₂ = α₂₁` (under the swap `A⊗B ≅ B⊗A`),
/// associativity `(12)3 = 1(23)` for both products, and unit absorption
/// `A⊗ℝ ≅ A`, on `count` random tuples.
#[allow(clippy::too_many_arguments)]
pub fn check_monoid<A, B, C>(
    a: &A,
    b: &B,
    c: &C,
    sa: &impl Sampler<A::Elem>,
    sb: &impl Sampler<B::Elem>,
    sc: &impl Sampler<C::Elem>,
    count: usize,
    seed: u64,
) -> Result<IdentityReport, AlgebraError>
where
    A: TwoProductCarrier + Clone,
    B: TwoProductCarrier<Coef = A::Coef> + Clone,
    C: TwoProductCarrier<Coef = A::Coef> + Clone,
{
    let ab = compose_bipartite(a.clone(), b.clone())?;
    let ba = compose_bipartite(b.clone(), a.clone())?;
    let ab_c = compose_bipartite(ab.clone(), c.clone())?;
    let a_bc = compose_bipartite(a.clone(), compose_bipartite(b.clone(), c.clone())?)?;
    let a_r = compose_bipartite(a.clone(), RealLine::<A::Coef>::new(a.class(), a.hbar().clone()))?;
    let tol = a.tolerance();

    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, 0x6d6f6e6f));
    type Tuple<A, B, C> = (
        [<A as TwoProductCarrier>::Elem; 2],
        [<B as TwoProductCarrier>::Elem; 2],
        [<C as TwoProductCarrier>::Elem; 2],
    );
    let tuples: Vec<Tuple<A, B, C>> = (0..count)
        .map(|_| {
            (
                [sa.sample(&mut rng), sa.sample(&mut rng)],
                [sb.sample(&mut rng), sb.sample(&mut rng)],
                [sc.sample(&mut rng), sc.sample(&mut rng)],
            )
        })
        .collect();

    let outcomes: Vec<(Option<Witness>, f64)> = tuples
        .par_iter()
        .map(|(fa, fb, fc)| {
            let mut ok = true;
            let mut worst: f64 = 0.0;
            let mut note = |r: (bool, f64)| {
                ok &= r.0;
                worst = worst.max(r.1);
            };

            let x = TensorElement::pure(fa[0].clone(), fb[0].clone());
            let y = TensorElement::pure(fa[1].clone(), fb[1].clone());
            let xs = TensorElement::pure(fb[0].clone(), fa[0].clone());
            let ys = TensorElement::pure(fb[1].clone(), fa[1].clone());
            let swap = |m: BTreeMap<(B::Key, A::Key), A::Coef>| -> BTreeMap<(A::Key, B::Key), A::Coef> {
                m.into_iter().map(|((kb, ka), v)| ((ka, kb), v)).collect()
            };
            note(diff_residual(
                &ab.coords(&ab.sigma(&x, &y)),
                &swap(ba.coords(&ba.sigma(&xs, &ys))),
                tol,
            ));
            note(diff_residual(
                &ab.coords(&ab.alpha(&x, &y)),
                &swap(ba.coords(&ba.alpha(&xs, &ys))),
                tol,
            ));

            let u = TensorElement::pure(TensorElement::pure(fa[0].clone(), fb[0].clone()), fc[0].clone());
            let v = TensorElement::pure(TensorElement::pure(fa[1].clone(), fb[1].clone()), fc[1].clone());
            let u2 = TensorElement::pure(fa[0].clone(), TensorElement::pure(fb[0].clone(), fc[0].clone()));
            let v2 = TensorElement::pure(fa[1].clone(), TensorElement::pure(fb[1].clone(), fc[1].clone()));
            type K3<A, B, C> = (
                <A as TwoProductCarrier>::Key,
                (<B as TwoProductCarrier>::Key, <C as TwoProductCarrier>::Key),
            );
            let reassoc = |m: BTreeMap<((A::Key, B::Key), C::Key), A::Coef>| -> BTreeMap<K3<A, B, C>, A::Coef> {
                m.into_iter().map(|(((k1, k2), k3), v)| ((k1, (k2, k3)), v)).collect()
            };
            note(diff_residual(
                &reassoc(ab_c.coords(&ab_c.sigma(&u, &v))),
                &a_bc.coords(&a_bc.sigma(&u2, &v2)),
                tol,
            ));
            note(diff_residual(
                &reassoc(ab_c.coords(&ab_c.alpha(&u, &v))),
                &a_bc.coords(&a_bc.alpha(&u2, &v2)),
                tol,
            ));

            let p = TensorElement::pure(fa[0].clone(), <A::Coef as One>::one());
            let q = TensorElement::pure(fa[1].clone(), <A::Coef as One>::one());
            let drop_unit = |m: BTreeMap<(A::Key, ()), A::Coef>| -> BTreeMap<A::Key, A::Coef> {
                m.into_iter().map(|((k, ()), v)| (k, v)).collect()
            };
            note(diff_residual(
                &drop_unit(a_r.coords(&a_r.sigma(&p, &q))),
                &a.coords(&a.sigma(&fa[0], &fa[1])),
                tol,
            ));
            note(diff_residual(
                &drop_unit(a_r.coords(&a_r.alpha(&p, &q))),
                &a.coords(&a.alpha(&fa[0], &fa[1])),
                tol,
            ));

            let witness = (!ok).then(|| Witness {
                inputs: vec![
                    a.describe(&fa[0]),
                    a.describe(&fa[1]),
                    b.describe(&fb[0]),
                    b.describe(&fb[1]),
                    c.describe(&fc[0]),
                    c.describe(&fc[1]),
                ],
                residual: worst,
            });
            (witness, worst)
        })
        .collect();

    let mut report = IdentityReport::new("monoid", a.class());
    for (w, r) in outcomes {
        report.record(w, r);
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Derivation steps

/// Composes with an extra `a·α₁α₂` term and checks the bipartite Leibniz
/// rule. A consistent composition needs `a = 0`, so the returned report must
/// contain a counterexample; a clean sweep is an error.
pub fn falsify_nonzero_a<A, B>(
    left: A,
    right: B,
    a: Rational,
    sampler: &impl Sampler<TensorElement<A::Elem, B::Elem>>,
    count: usize,
    seed: u64,
) -> Result<IdentityReport, AlgebraError>
where
    A: TwoProductCarrier,
    B: TwoProductCarrier<Coef = A::Coef>,
{
    if a.is_zero() {
        return Err(AlgebraError::ZeroCoefficient);
    }
    let mut bi = compose_bipartite(left, right)?;
    bi.extra_alpha = a.clone();
    let report = check_identity(&bi, Identity::LeibnizAlpha, sampler, count, seed);
    if report.passed() {
        return Err(AlgebraError::UnexpectedPass {
            a: a.to_string(),
            samples: report.samples,
            report: Box::new(report),
        });
    }
    Ok(report)
}

/// Result of the single-product ansatz check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingleProductReport {
    /// Sweep of `(f⊗1) α₁₂ (g⊗1)` under the ansatz `α₁₂ = a·α₁α₂`; every
    /// sample must vanish.
    pub report: IdentityReport,
    /// Whether the control with `σ` restored gives `(q α p) ⊗ 1 ≠ 0`.
    pub control_nonzero: bool,
}

impl SingleProductReport {
    pub fn degenerate(&self) -> bool {
        self.report.passed() && self.control_nonzero
    }
}

/// Shows that without `σ` the only composition ansatz is identically zero on
/// `(f⊗1, g⊗1)` because `1 α 1 = 0`.
pub fn single_product_triviality(
    dof: usize,
    class: Class,
    hbar: HBar,
    sampler: &impl Sampler<PhasePoly<Rational>>,
    count: usize,
    seed: u64,
) -> SingleProductReport {
    let base = PhaseCarrier::new(dof, class, hbar);
    let mut ansatz = compose_bipartite(base.clone(), base.clone()).expect("same carrier");
    ansatz.with_sigma = false;
    ansatz.extra_alpha = Rational::one();

    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, 0x7472_6976));
    let pairs: Vec<_> = (0..count)
        .map(|_| (sampler.sample(&mut rng), sampler.sample(&mut rng)))
        .collect();
    let one = base.unit();
    let mut report = IdentityReport::new("single-product-triviality", class);
    for (f, g) in &pairs {
        let x = TensorElement::pure(f.clone(), one.clone());
        let y = TensorElement::pure(g.clone(), one.clone());
        let out = ansatz.alpha(&x, &y);
        let zero = ansatz.is_zero(&out);
        let r = if zero { 0.0 } else { coord_norm(&ansatz.coords(&out)) };
        let w = (!zero).then(|| Witness {
            inputs: vec![f.to_string(), g.to_string()],
            residual: r,
        });
        report.record(w, r);
    }

    let full = compose_bipartite(base.clone(), base).expect("same carrier");
    let (qq, pp) = (phasepoly::q(dof.max(1), 0), phasepoly::p(dof.max(1), 0));
    let control_nonzero =
        dof > 0 && !full.is_zero(&full.alpha(&TensorElement::pure(qq, one.clone()), &TensorElement::pure(pp, one)));
    SingleProductReport {
        report,
        control_nonzero,
    }
}

/// Checks associativity and unitality of `β = σ ± (Jħ/2)α` on the phase
/// carrier over `ℚ[J]`, where `J2` fixes the class.
pub fn beta_associativity<const J2: i8>(
    dof: usize,
    hbar: &HBar,
    sign: i8,
    sampler: &impl Sampler<PhasePoly<Rational>>,
    count: usize,
    seed: u64,
) -> IdentityReport {
    let class = ExtRational::<J2>::class();
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, 0x6265_7461 + (J2 + 1) as u64));
    let triples: Vec<[PhasePoly<ExtRational<J2>>; 3]> = (0..count)
        .map(|_| {
            [
                extend::<J2>(&sampler.sample(&mut rng)),
                extend::<J2>(&sampler.sample(&mut rng)),
                extend::<J2>(&sampler.sample(&mut rng)),
            ]
        })
        .collect();
    let one = Poly::one(2 * dof);
    let outcomes: Vec<(Option<Witness>, f64)> = triples
        .par_iter()
        .map(|[f, g, h]| {
            let b = |x: &PhasePoly<ExtRational<J2>>, y: &PhasePoly<ExtRational<J2>>| {
                signed_star(x, y, hbar, sign).expect("shared dof")
            };
            let assoc = b(&b(f, g), h).sub_ref(&b(f, &b(g, h)));
            let unit = b(&one, f).sub_ref(f).add_ref(&b(f, &one).sub_ref(f));
            let ok = assoc.is_zero() && unit.is_zero();
            let r = if ok {
                0.0
            } else {
                assoc
                    .terms()
                    .values()
                    .chain(unit.terms().values())
                    .map(|c| c.magnitude())
                    .fold(0.0, f64::max)
            };
            let w = (!ok).then(|| Witness {
                inputs: vec![f.to_string(), g.to_string(), h.to_string()],
                residual: r,
            });
            (w, r)
        })
        .collect();
    let mut report = IdentityReport::new(if sign >= 0 { "beta-plus" } else { "beta-minus" }, class);
    for (w, r) in outcomes {
        report.record(w, r);
    }
    report
}

/// The involution `J → −J` as a statement about `β`: on real inputs,
/// conjugating `β₊(f, g)` gives `β₋(f, g)`, the symmetric part of `β` is `σ`
/// and the antisymmetric part is `±(Jħ/2)α`.
pub fn beta_involution_check<const J2: i8>(
    hbar: &HBar,
    sampler: &impl Sampler<PhasePoly<Rational>>,
    count: usize,
    seed: u64,
) -> IdentityReport {
    let class = ExtRational::<J2>::class();
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, 0x696e_766f));
    let mut report = IdentityReport::new("beta-involution", class);
    let half = rat(1, 2);
    let jh = ExtRational::<J2>::unit().scale(&(hbar.value() / int(2)));
    for _ in 0..count {
        let (f, g) = (sampler.sample(&mut rng), sampler.sample(&mut rng));
        let (fe, ge) = (extend::<J2>(&f), extend::<J2>(&g));
        let plus = signed_star(&fe, &ge, hbar, 1).expect("shared dof");
        let plus_rev = signed_star(&ge, &fe, hbar, 1).expect("shared dof");
        let minus = signed_star(&fe, &ge, hbar, -1).expect("shared dof");
        let sig = extend::<J2>(&phasepoly::sigma(&f, &g, class, hbar).expect("shared dof"));
        let alp = extend::<J2>(&phasepoly::alpha(&f, &g, class, hbar).expect("shared dof"));
        let ok = plus.conj() == minus
            && plus.add_ref(&plus_rev).scale(&half) == sig
            && plus.sub_ref(&plus_rev).scale(&half) == alp.scale_by(&jh);
        let w = (!ok).then(|| Witness {
            inputs: vec![f.to_string(), g.to_string()],
            residual: f64::NAN,
        });
        report.record(w, if ok { 0.0 } else { 1.0 });
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phasepoly::{p, q};

    fn carrier(class: Class) -> PhaseCarrier {
        PhaseCarrier::new(1, class, HBar::default())
    }

    #[test]
    fn bipartite_canonical_relations() {
        let c = carrier(Class::Elliptic);
        let bi = compose_bipartite(c.clone(), c.clone()).unwrap();
        let one = c.unit();
        let (qq, pp) = (q::<Rational>(1, 0), p::<Rational>(1, 0));
        let x = TensorElement::pure(qq.clone(), one.clone());
        let y = TensorElement::pure(one.clone(), qq.clone());
        assert!(bi.is_zero(&bi.alpha(&x, &y)));
        let z = TensorElement::pure(pp.clone(), one.clone());
        let got = bi.coords(&bi.alpha(&x, &z));
        assert_eq!(got, bi.coords(&bi.unit()));
        let f = TensorElement::pure(&qq * &pp, &pp * &pp);
        assert_eq!(bi.coords(&bi.sigma(&bi.unit(), &f)), bi.coords(&f));
    }

    #[test]
    fn composition_rejects_mismatch() {
        let e = carrier(Class::Elliptic);
        let h = carrier(Class::Hyperbolic);
        assert!(matches!(
            compose_bipartite(e.clone(), h),
            Err(AlgebraError::ClassMismatch(..))
        ));
        let e2 = PhaseCarrier::new(1, Class::Elliptic, HBar::from_ratio(1, 2).unwrap());
        assert!(matches!(compose_bipartite(e, e2), Err(AlgebraError::HBarMismatch(..))));
    }

    #[test]
    fn relationality_on_unit() {
        for class in Class::ALL {
            let c = carrier(class);
            let r = check_identity_on(&c, Identity::Relationality, vec![vec![c.unit()]]);
            assert!(r.passed());
        }
    }

    #[test]
    fn jacobi_small_sweep() {
        let c = carrier(Class::Elliptic);
        let r = check_identity(&c, Identity::Jacobi, &PolySampler::new(1, 3), 20, 1);
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.max_residual, 0.0);
    }

    #[test]
    fn broken_product_is_caught() {
        // σ with the wrong compatibility coefficient: hyperbolic σ, elliptic coupling.
        struct Wrong(PhaseCarrier);
        impl TwoProductCarrier for Wrong {
            type Elem = PhasePoly<Rational>;
            type Key = Vec<u32>;
            type Coef = Rational;
            fn class(&self) -> Class {
                Class::Elliptic
            }
            fn hbar(&self) -> &HBar {
                &self.0.hbar
            }
            fn zero(&self) -> Self::Elem {
                self.0.zero()
            }
            fn unit(&self) -> Self::Elem {
                self.0.unit()
            }
            fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
                self.0.add(a, b)
            }
            fn scale(&self, a: &Self::Elem, r: &Rational) -> Self::Elem {
                self.0.scale(a, r)
            }
            fn sigma(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
                self.0.sigma(a, b)
            }
            fn alpha(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
                self.0.alpha(a, b)
            }
            fn coords(&self, a: &Self::Elem) -> BTreeMap<Vec<u32>, Rational> {
                self.0.coords(a)
            }
            fn describe(&self, a: &Self::Elem) -> String {
                self.0.describe(a)
            }
        }
        let w = Wrong(carrier(Class::Hyperbolic));
        let r = check_identity(&w, Identity::Compatibility, &PolySampler::new(1, 4), 40, 3);
        assert!(!r.passed());
        assert!(!r.failures.is_empty() && r.failures.len() <= MAX_WITNESSES);
    }

    #[test]
    fn falsify_needs_nonzero_a() {
        let c = carrier(Class::Elliptic);
        let s = TensorSampler {
            left: PolySampler::new(1, 3),
            right: PolySampler::new(1, 3),
            max_terms: 1,
        };
        assert_eq!(
            falsify_nonzero_a(c.clone(), c.clone(), Rational::zero(), &s, 5, 0).unwrap_err(),
            AlgebraError::ZeroCoefficient
        );
        let r = falsify_nonzero_a(c.clone(), c, int(1), &s, 30, 0).unwrap();
        assert!(!r.passed());
    }

    #[test]
    fn single_product_is_trivial() {
        for class in [Class::Elliptic, Class::Hyperbolic] {
            let r = single_product_triviality(1, class, HBar::default(), &PolySampler::new(1, 3), 20, 4);
            assert!(r.degenerate(), "{r:?}");
        }
    }

    #[test]
    fn beta_small_sweeps() {
        let h = HBar::from_ratio(3, 1).unwrap();
        let s = PolySampler::new(1, 3);
        assert!(beta_associativity::<-1>(1, &h, 1, &s, 10, 0).passed());
        assert!(beta_associativity::<0>(1, &h, -1, &s, 10, 0).passed());
        assert!(beta_associativity::<1>(1, &h, 1, &s, 10, 0).passed());
        assert!(beta_involution_check::<-1>(&h, &s, 10, 0).passed());
        assert!(beta_involution_check::<1>(&h, &s, 10, 0).passed());
    }

    #[test]
    fn seed_mixing_separates_streams() {
        assert_ne!(mix_seed(0, 0), mix_seed(0, 1));
        assert_ne!(mix_seed(0, 1), mix_seed(1, 0));
        assert_eq!(mix_seed(42, 7), mix_seed(42, 7));
    }
}
