//! Flat phase space brackets and star products.
//!
//! Coordinates of an `n`-degree-of-freedom phase space are ordered
//! `q1..qn, p1..pn`. Every product family is generated by powers of the
//! bidifferential operator
//!
//! ```text
//! f ∇ g = Σᵢ (∂f/∂qᵢ ∂g/∂pᵢ − ∂f/∂pᵢ ∂g/∂qᵢ)
//! ```
//!
//! with the class's `J²` selecting sine/cosine (elliptic), sinh/cosh
//! (hyperbolic) or the classical limit (parabolic). On polynomials each
//! series stops at `k = min(deg f, deg g)`.

use std::ops::Neg;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::poly::Poly;
use crate::scalars::{int, Class, ExtRational, Rational, Scalar};

/// Polynomial on phase space. `nvars = 2 · dof`.
pub type PhasePoly<S = Rational> = Poly<S>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PolyError {
    #[error("degree-of-freedom mismatch: {left} vs {right}")]
    DofMismatch { left: usize, right: usize },
    #[error("ħ must be positive, got {0}")]
    NonPositiveHBar(String),
    #[error("ħ → 0 limit of the bracket differs from the Poisson bracket: {limit} vs {poisson}")]
    LimitMismatch { limit: String, poisson: String },
}

/// Planck's constant as an exact positive rational.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct HBar(Rational);

impl HBar {
    pub fn new(value: Rational) -> Result<Self, PolyError> {
        if value > Rational::zero() {
            Ok(HBar(value))
        } else {
            Err(PolyError::NonPositiveHBar(value.to_string()))
        }
    }

    pub fn from_ratio(num: i64, den: i64) -> Result<Self, PolyError> {
        Self::new(crate::scalars::rat(num, den))
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }
}

impl Default for HBar {
    fn default() -> Self {
        HBar(int(2))
    }
}

impl std::fmt::Display for HBar {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::str::FromStr for HBar {
    type Err = PolyError;
    fn from_str(s: &str) -> Result<Self, PolyError> {
        let r: Rational = s
            .trim()
            .parse()
            .map_err(|_| PolyError::NonPositiveHBar(s.to_string()))?;
        HBar::new(r)
    }
}

impl TryFrom<String> for HBar {
    type Error = PolyError;
    fn try_from(s: String) -> Result<Self, PolyError> {
        s.parse()
    }
}

impl From<HBar> for String {
    fn from(h: HBar) -> String {
        h.to_string()
    }
}

/// Degrees of freedom of a phase space polynomial.
pub fn dof<S: Scalar>(f: &PhasePoly<S>) -> usize {
    f.nvars() / 2
}

/// `q_i` on an `n`-dof phase space (0-based `i`).
pub fn q<S: Scalar>(n: usize, i: usize) -> PhasePoly<S> {
    Poly::var(2 * n, i)
}

/// `p_i` on an `n`-dof phase space (0-based `i`).
pub fn p<S: Scalar>(n: usize, i: usize) -> PhasePoly<S> {
    Poly::var(2 * n, n + i)
}

fn check_dof<S: Scalar>(f: &PhasePoly<S>, g: &PhasePoly<S>) -> Result<(), PolyError> {
    if f.nvars() != g.nvars() {
        return Err(PolyError::DofMismatch {
            left: dof(f),
            right: dof(g),
        });
    }
    Ok(())
}

pub(crate) fn factorial(k: u32) -> Rational {
    (1..=k as i64).fold(Rational::one(), |acc, i| acc * int(i))
}

/// Calls `visit(parts, total)` for every composition of `total` into
/// `parts.len()` non-negative parts.
fn for_each_composition(parts: &mut [u32], idx: usize, remaining: u32, visit: &mut impl FnMut(&[u32])) {
    if idx + 1 == parts.len() {
        parts[idx] = remaining;
        visit(parts);
        return;
    }
    for v in 0..=remaining {
        parts[idx] = v;
        for_each_composition(parts, idx + 1, remaining - v, visit);
    }
}

/// `f ∇ᵏ g`, expanded by the multinomial theorem.
pub fn nabla_power<S: Scalar>(f: &PhasePoly<S>, g: &PhasePoly<S>, k: u32) -> Result<PhasePoly<S>, PolyError> {
    check_dof(f, g)?;
    Ok(nabla_power_unchecked(f, g, k))
}

fn nabla_power_unchecked<S: Scalar>(f: &PhasePoly<S>, g: &PhasePoly<S>, k: u32) -> PhasePoly<S> {
    let nv = f.nvars();
    let n = nv / 2;
    if k == 0 {
        return f.mul_ref(g);
    }
    if n == 0 || f.is_zero() || g.is_zero() {
        return Poly::zero(nv);
    }
    let (df, dg) = (f.degree().unwrap_or(0), g.degree().unwrap_or(0));
    if k > df || k > dg {
        return Poly::zero(nv);
    }
    let mut out = Poly::zero(nv);
    for_each_nabla_term(n, k, |left, right, c| {
        let fl = f.derivative(left);
        if fl.is_zero() {
            return;
        }
        let gr = g.derivative(right);
        if gr.is_zero() {
            return;
        }
        out = out.add_ref(&fl.mul_ref(&gr).scale(c));
    });
    out
}

/// Visits the terms of `∇ᵏ` on an `n`-dof phase space as
/// `(left derivative order, right derivative order, coefficient)`.
///
/// Writing `∇ = Σᵢ (Aᵢ − Bᵢ)` with `Aᵢ = ∂qᵢ ⊗ ∂pᵢ` and `Bᵢ = ∂pᵢ ⊗ ∂qᵢ`, the
/// commuting terms give `Σ k!/Π(mᵢ! nᵢ!) · (−1)^Σnᵢ · Π Aᵢ^mᵢ Bᵢ^nᵢ`.
pub fn for_each_nabla_term(n: usize, k: u32, mut visit: impl FnMut(&[u32], &[u32], &Rational)) {
    if n == 0 {
        if k == 0 {
            visit(&[], &[], &Rational::one());
        }
        return;
    }
    let nv = 2 * n;
    let kfact = factorial(k);
    // parts[0..n] are the mᵢ, parts[n..2n] the nᵢ.
    let mut parts = vec![0u32; 2 * n];
    for_each_composition(&mut parts, 0, k, &mut |parts: &[u32]| {
        let (m, nn) = parts.split_at(n);
        let mut left = vec![0u32; nv];
        let mut right = vec![0u32; nv];
        let mut denom = Rational::one();
        for i in 0..n {
            left[i] = m[i];
            left[n + i] = nn[i];
            right[n + i] = m[i];
            right[i] = nn[i];
            denom *= factorial(m[i]) * factorial(nn[i]);
        }
        let mut c = &kfact / &denom;
        if nn.iter().sum::<u32>() % 2 == 1 {
            c = -c;
        }
        visit(&left, &right, &c);
    });
}

/// Poisson bracket `{f, g} = f ∇ g`.
pub fn poisson<S: Scalar>(f: &PhasePoly<S>, g: &PhasePoly<S>) -> Result<PhasePoly<S>, PolyError> {
    nabla_power(f, g, 1)
}

fn max_order<S: Scalar>(f: &PhasePoly<S>, g: &PhasePoly<S>) -> u32 {
    match (f.degree(), g.degree()) {
        (Some(a), Some(b)) => a.min(b),
        _ => 0,
    }
}

/// `(J²)^e` for an integer exponent `e ≥ 0`.
fn j2_pow(j2: i8, e: u32) -> Rational {
    match (j2, e) {
        (_, 0) => Rational::one(),
        (0, _) => Rational::zero(),
        (1, _) => Rational::one(),
        _ if e.is_multiple_of(2) => Rational::one(),
        _ => -Rational::one(),
    }
}

fn series<S: Scalar>(f: &PhasePoly<S>, g: &PhasePoly<S>, class: Class, hbar: &HBar, odd: bool) -> PhasePoly<S> {
    let j2 = class.j_squared();
    let half = hbar.value() / int(2);
    let top = max_order(f, g);
    let mut out = Poly::zero(f.nvars());
    let mut k = if odd { 1 } else { 0 };
    while k <= top {
        let sign = j2_pow(j2, k / 2);
        if !sign.is_zero() {
            let mut c = sign * num_traits::pow(half.clone(), k as usize) / factorial(k);
            if odd {
                c = c * int(2) / hbar.value();
            }
            out = out.add_ref(&nabla_power_unchecked(f, g, k).scale(&c));
        }
        k += 2;
    }
    out
}

fn alpha_unchecked<S: Scalar>(f: &PhasePoly<S>, g: &PhasePoly<S>, class: Class, hbar: &HBar) -> PhasePoly<S> {
    series(f, g, class, hbar, true)
}

fn sigma_unchecked<S: Scalar>(f: &PhasePoly<S>, g: &PhasePoly<S>, class: Class, hbar: &HBar) -> PhasePoly<S> {
    series(f, g, class, hbar, false)
}

/// The Lie product: `(2/ħ) Σ_{k odd} (J²)^((k−1)/2) (ħ/2)ᵏ/k! f ∇ᵏ g`.
///
/// Moyal sine bracket for elliptic, sinh bracket for hyperbolic, Poisson
/// bracket for parabolic.
pub fn alpha<S: Scalar>(
    f: &PhasePoly<S>,
    g: &PhasePoly<S>,
    class: Class,
    hbar: &HBar,
) -> Result<PhasePoly<S>, PolyError> {
    check_dof(f, g)?;
    let out = alpha_unchecked(f, g, class, hbar);
    debug_assert!(
        !S::EXACT || out == alpha_unchecked(g, f, class, hbar).neg(),
        "alpha lost skew-symmetry"
    );
    Ok(out)
}

/// The Jordan product: `Σ_{k even} (J²)^(k/2) (ħ/2)ᵏ/k! f ∇ᵏ g`.
///
/// Cosine bracket for elliptic, cosh bracket for hyperbolic, pointwise
/// product for parabolic.
pub fn sigma<S: Scalar>(
    f: &PhasePoly<S>,
    g: &PhasePoly<S>,
    class: Class,
    hbar: &HBar,
) -> Result<PhasePoly<S>, PolyError> {
    check_dof(f, g)?;
    let out = sigma_unchecked(f, g, class, hbar);
    debug_assert!(
        !S::EXACT || out == sigma_unchecked(g, f, class, hbar),
        "sigma lost symmetry"
    );
    Ok(out)
}

/// Embeds a real polynomial into the class's extended coefficient ring.
pub fn extend<const J2: i8>(f: &PhasePoly<Rational>) -> PhasePoly<ExtRational<J2>> {
    f.map(|c| ExtRational::real(c.clone()))
}

/// Star product `σ + (Jħ/2)α` over `ℚ[J]`, where the class is fixed by `J2`.
///
/// Associative in every class; in the parabolic class it is the first-order
/// truncation `fg + ε(ħ/2){f, g}` with `ε² = 0`.
pub fn star<const J2: i8>(
    f: &PhasePoly<ExtRational<J2>>,
    g: &PhasePoly<ExtRational<J2>>,
    hbar: &HBar,
) -> Result<PhasePoly<ExtRational<J2>>, PolyError> {
    signed_star(f, g, hbar, 1)
}

/// `σ + sign·(Jħ/2)α`; `sign = −1` is the product used by operator realizations.
pub fn signed_star<const J2: i8>(
    f: &PhasePoly<ExtRational<J2>>,
    g: &PhasePoly<ExtRational<J2>>,
    hbar: &HBar,
    sign: i8,
) -> Result<PhasePoly<ExtRational<J2>>, PolyError> {
    check_dof(f, g)?;
    let class = ExtRational::<J2>::class();
    let s = sigma_unchecked(f, g, class, hbar);
    let a = alpha_unchecked(f, g, class, hbar);
    let jh = ExtRational::<J2>::unit().scale(&(hbar.value() * int(sign as i64) / int(2)));
    Ok(s.add_ref(&a.scale_by(&jh)))
}

/// Coefficients `c_m` with `α = Σ_m c_m ħ^m`, read off symbolically from the
/// series; only even `m` can be nonzero.
pub fn alpha_hbar_expansion<S: Scalar>(
    f: &PhasePoly<S>,
    g: &PhasePoly<S>,
    class: Class,
) -> Result<Vec<PhasePoly<S>>, PolyError> {
    check_dof(f, g)?;
    let j2 = class.j_squared();
    let top = max_order(f, g);
    let mut coeffs = Vec::new();
    for m in 0..top.max(1) {
        let k = m + 1;
        let c = if k % 2 == 1 {
            j2_pow(j2, (k - 1) / 2) / (num_traits::pow(int(2), m as usize) * factorial(k))
        } else {
            Rational::zero()
        };
        coeffs.push(if c.is_zero() {
            Poly::zero(f.nvars())
        } else {
            nabla_power_unchecked(f, g, k).scale(&c)
        });
    }
    Ok(coeffs)
}

/// Evaluates an ħ expansion at a given ħ (which may be zero).
pub fn eval_hbar_expansion<S: Scalar>(coeffs: &[PhasePoly<S>], nvars: usize, hbar: &Rational) -> PhasePoly<S> {
    let mut out = Poly::zero(nvars);
    let mut h = Rational::one();
    for c in coeffs {
        out = out.add_ref(&c.scale(&h));
        h *= hbar;
    }
    out
}

/// The elliptic α with ħ set to zero in its symbolic expansion. Returns the
/// limit when it equals the Poisson bracket.
pub fn hbar_zero_limit<S: Scalar>(f: &PhasePoly<S>, g: &PhasePoly<S>) -> Result<PhasePoly<S>, PolyError> {
    let coeffs = alpha_hbar_expansion(f, g, Class::Elliptic)?;
    let limit = eval_hbar_expansion(&coeffs, f.nvars(), &Rational::zero());
    let pb = poisson(f, g)?;
    if limit != pb {
        return Err(PolyError::LimitMismatch {
            limit: limit.to_string(),
            poisson: pb.to_string(),
        });
    }
    Ok(limit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::{rat, ComplexRational, DualNumber, SplitComplex};

    type P = PhasePoly<Rational>;

    fn qq() -> P {
        q(1, 0)
    }
    fn pp() -> P {
        p(1, 0)
    }
    fn c(v: i64) -> P {
        P::constant(2, int(v))
    }
    fn pow(f: &P, k: u32) -> P {
        (0..k).fold(P::one(f.nvars()), |acc, _| acc.mul_ref(f))
    }

    /// Reference `f ∇ᵏ g` for one degree of freedom, applying the operator one
    /// factor at a time on the tensor product `f ⊗ g` kept as a list of pairs.
    fn nabla_oracle(f: &P, g: &P, k: u32) -> P {
        let mut pairs = vec![(f.clone(), g.clone(), int(1))];
        for _ in 0..k {
            let mut next = Vec::new();
            for (a, b, w) in pairs {
                next.push((a.partial(0), b.partial(1), w.clone()));
                next.push((a.partial(1), b.partial(0), -w));
            }
            pairs = next;
        }
        pairs
            .into_iter()
            .fold(P::zero(2), |acc, (a, b, w)| acc.add_ref(&a.mul_ref(&b).scale(&w)))
    }

    #[test]
    fn nabla_examples() {
        let h = nabla_power(&qq(), &pp(), 1).unwrap();
        assert_eq!(h, c(1));
        assert!(nabla_power(&qq(), &pp(), 2).unwrap().is_zero());
        // q² ∇² p² = ∂q²(q²)·∂p²(p²) = 4
        assert_eq!(nabla_power(&pow(&qq(), 2), &pow(&pp(), 2), 2).unwrap(), c(4));
        assert_eq!(nabla_power(&qq(), &pp(), 0).unwrap(), qq().mul_ref(&pp()));
    }

    #[test]
    fn nabla_matches_iterated_oracle() {
        let f = &(&pow(&qq(), 3) * &pp()) + &pow(&pp(), 2).scale(&rat(1, 3));
        let g = &(&pow(&pp(), 2) * &qq()) - &(&pow(&qq(), 2) * &pow(&pp(), 2));
        for k in 0..5 {
            assert_eq!(nabla_power(&f, &g, k).unwrap(), nabla_oracle(&f, &g, k), "k = {k}");
        }
    }

    #[test]
    fn poisson_examples() {
        assert_eq!(poisson(&qq(), &pp()).unwrap(), c(1));
        assert!(poisson(&qq(), &qq()).unwrap().is_zero());
        assert_eq!(poisson(&pow(&qq(), 2), &pp()).unwrap(), qq().scale(&int(2)));
    }

    #[test]
    fn dof_mismatch() {
        let a: P = q(1, 0);
        let b: P = q(2, 0);
        assert!(matches!(
            poisson(&a, &b),
            Err(PolyError::DofMismatch { left: 1, right: 2 })
        ));
    }

    #[test]
    fn alpha_sigma_examples() {
        let h = HBar::default();
        assert_eq!(alpha(&qq(), &pp(), Class::Elliptic, &h).unwrap(), c(1));
        for class in Class::ALL {
            assert!(alpha(&pow(&qq(), 3), &c(1), class, &h).unwrap().is_zero());
            let f = &pow(&qq(), 2) * &pp();
            assert_eq!(sigma(&c(1), &f, class, &h).unwrap(), f);
        }
        assert_eq!(sigma(&qq(), &pp(), Class::Elliptic, &h).unwrap(), qq().mul_ref(&pp()));
    }

    #[test]
    fn alpha_cubic_differs_by_third_order_term() {
        // ħ = 2: the k = 3 term is (2/ħ)(−1)(ħ/2)³/3! ∇³ = −(1/6)·∇³; q³ ∇³ p³ = 36.
        let h = HBar::default();
        let (f, g) = (pow(&qq(), 3), pow(&pp(), 3));
        let a = alpha(&f, &g, Class::Elliptic, &h).unwrap();
        let pb = poisson(&f, &g).unwrap();
        let k3 = nabla_oracle(&f, &g, 3).scale(&rat(-1, 6));
        assert_eq!(a.sub_ref(&pb), k3);
        assert_eq!(k3, c(-6));
    }

    #[test]
    fn sigma_quadratic_correction() {
        // ħ = 2: k = 2 term is (−1)(1)²/2! ∇² = −(1/2)·4 = −2.
        let h = HBar::default();
        let s = sigma(&pow(&qq(), 2), &pow(&pp(), 2), Class::Elliptic, &h).unwrap();
        assert_eq!(s, &(&pow(&qq(), 2) * &pow(&pp(), 2)) - &c(2));
        let s = sigma(&pow(&qq(), 2), &pow(&pp(), 2), Class::Hyperbolic, &h).unwrap();
        assert_eq!(s, &(&pow(&qq(), 2) * &pow(&pp(), 2)) + &c(2));
    }

    #[test]
    fn star_commutators() {
        let h = HBar::from_ratio(3, 1).unwrap();
        fn check<const J2: i8>(h: &HBar) {
            let (a, b) = (extend::<J2>(&q(1, 0)), extend::<J2>(&p(1, 0)));
            let comm = star(&a, &b, h).unwrap().sub_ref(&star(&b, &a, h).unwrap());
            let expect = Poly::constant(2, ExtRational::<J2>::unit().scale(h.value()));
            assert_eq!(comm, expect);
        }
        check::<-1>(&h);
        check::<0>(&h);
        check::<1>(&h);
    }

    #[test]
    fn star_is_associative_on_cubics() {
        let h = HBar::from_ratio(1, 2).unwrap();
        let f = &(&pow(&qq(), 2) * &pp()) + &qq();
        let g = &pow(&pp(), 3) - &(&qq() * &pp());
        let k = &pow(&qq(), 3) + &pow(&pp(), 2).scale(&rat(2, 3));
        fn assoc<const J2: i8>(f: &P, g: &P, k: &P, h: &HBar) {
            let (f, g, k) = (extend::<J2>(f), extend::<J2>(g), extend::<J2>(k));
            let l = star(&star(&f, &g, h).unwrap(), &k, h).unwrap();
            let r = star(&f, &star(&g, &k, h).unwrap(), h).unwrap();
            assert_eq!(l, r, "J² = {J2}");
        }
        assoc::<-1>(&f, &g, &k, &h);
        assoc::<0>(&f, &g, &k, &h);
        assoc::<1>(&f, &g, &k, &h);
        let one: PhasePoly<ComplexRational> = Poly::one(2);
        let fe = extend::<-1>(&f);
        assert_eq!(star(&one, &fe, &h).unwrap(), fe);
        let _: PhasePoly<DualNumber> = extend::<0>(&f);
        let _: PhasePoly<SplitComplex> = extend::<1>(&f);
    }

    #[test]
    fn hbar_limit() {
        let (f, g) = (pow(&qq(), 3), pow(&pp(), 3));
        assert_eq!(hbar_zero_limit(&f, &g).unwrap(), poisson(&f, &g).unwrap());
        assert_eq!(hbar_zero_limit(&qq(), &pp()).unwrap(), c(1));
    }

    #[test]
    fn hbar_expansion_resums_to_alpha() {
        let f = &(&pow(&qq(), 3) * &pp()) + &pow(&pp(), 2);
        let g = &(&pow(&pp(), 3) * &pow(&qq(), 2)) - &qq();
        for class in Class::ALL {
            let coeffs = alpha_hbar_expansion(&f, &g, class).unwrap();
            for h in [rat(1, 2), int(2), int(3)] {
                let direct = alpha(&f, &g, class, &HBar::new(h.clone()).unwrap()).unwrap();
                assert_eq!(eval_hbar_expansion(&coeffs, 2, &h), direct);
            }
        }
    }

    #[test]
    fn zero_dof_brackets_vanish() {
        let a = P::constant(0, int(3));
        let b = P::constant(0, int(5));
        assert!(poisson(&a, &b).unwrap().is_zero());
        assert!(alpha(&a, &b, Class::Hyperbolic, &HBar::default()).unwrap().is_zero());
        assert_eq!(
            sigma(&a, &b, Class::Elliptic, &HBar::default()).unwrap(),
            P::constant(0, int(15))
        );
    }

    #[test]
    fn hamilton_equations_as_brackets() {
        let h = &pow(&qq(), 2).scale(&rat(1, 2)) + &pow(&pp(), 2).scale(&rat(1, 2));
        assert_eq!(poisson(&qq(), &h).unwrap(), pp());
        assert_eq!(poisson(&pp(), &h).unwrap(), qq().neg());
    }

    #[test]
    fn hbar_rejects_non_positive() {
        assert!(HBar::new(int(0)).is_err());
        assert!("-1/2".parse::<HBar>().is_err());
        assert_eq!("3/4".parse::<HBar>().unwrap().value(), &rat(3, 4));
    }
}
