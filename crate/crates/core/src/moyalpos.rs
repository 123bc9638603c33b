//! Exact phase-space positivity checks on Gaussian-polynomial functions.
//!
//! A [`GaussPoly`] is `π^k · P(q, p) · exp(−Σ(qᵢ² + pᵢ²)/s)`. Derivatives,
//! products and integrals stay in this class, and all Gaussian moments are
//! rational multiples of powers of `π`, so the functional `⟨g* ⋆ g⟩` is an
//! exact number.

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::phasepoly::{factorial, for_each_nabla_term, HBar, PhasePoly};
use crate::poly::Poly;
use crate::scalars::{int, rat, Class, ExtRational, Rational, Scalar};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MoyalError {
    #[error("Wigner function of level {0} is not available; levels 0, 1 and 2 are")]
    UnsupportedLevel(u32),
    #[error("state integrates to {0}, not 1")]
    NonNormalized(String),
    #[error("no negative functional value on the lattice |c| ≤ {bound}; widen the lattice")]
    ExhaustedWithoutWitness { bound: i64 },
    #[error("degree-of-freedom mismatch: {0} vs {1}")]
    DofMismatch(usize, usize),
}

/// A number `value · π^pi_power`.
#[derive(Clone, Debug, PartialEq)]
pub struct PiMultiple<S> {
    pub value: S,
    pub pi_power: i32,
}

impl<S: Scalar> PiMultiple<S> {
    /// The value as an element of `S` when no `π` is left over.
    pub fn rational(&self) -> Option<&S> {
        (self.pi_power == 0 || self.value.is_zero()).then_some(&self.value)
    }
}

/// `π^pi_power · P(q, p) · exp(−Σ(qᵢ² + pᵢ²)/width)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussPoly<S> {
    pub width: Rational,
    pub pi_power: i32,
    pub poly: PhasePoly<S>,
}

impl<S: Scalar> GaussPoly<S> {
    pub fn new(poly: PhasePoly<S>, width: Rational, pi_power: i32) -> Self {
        assert!(width > Rational::zero(), "envelope width must be positive");
        assert!(poly.nvars().is_multiple_of(2), "phase space has even dimension");
        GaussPoly { width, pi_power, poly }
    }

    pub fn dof(&self) -> usize {
        self.poly.nvars() / 2
    }

    /// `∂/∂xᵢ`: `(∂ᵢP − (2xᵢ/s)P)·envelope`.
    pub fn partial(&self, i: usize) -> Self {
        let nv = self.poly.nvars();
        let x = Poly::var(nv, i).scale(&(int(2) / &self.width));
        GaussPoly {
            width: self.width.clone(),
            pi_power: self.pi_power,
            poly: self.poly.partial(i).sub_ref(&x.mul_ref(&self.poly)),
        }
    }

    /// Mixed derivative, `order[i]` derivatives in `xᵢ`.
    pub fn derivative(&self, order: &[u32]) -> Self {
        let mut out = self.clone();
        for (i, &k) in order.iter().enumerate() {
            for _ in 0..k {
                out = out.partial(i);
            }
        }
        out
    }

    pub fn mul_poly(&self, g: &PhasePoly<S>) -> Self {
        GaussPoly {
            width: self.width.clone(),
            pi_power: self.pi_power,
            poly: self.poly.mul_ref(g),
        }
    }

    /// Product of two Gaussian-polynomials; `1/s = 1/s₁ + 1/s₂`.
    pub fn mul(&self, o: &Self) -> Self {
        let inv = Rational::one() / &self.width + Rational::one() / &o.width;
        GaussPoly {
            width: Rational::one() / inv,
            pi_power: self.pi_power + o.pi_power,
            poly: self.poly.mul_ref(&o.poly),
        }
    }

    pub fn conj(&self) -> Self {
        GaussPoly {
            width: self.width.clone(),
            pi_power: self.pi_power,
            poly: self.poly.conj(),
        }
    }

    pub fn scale(&self, r: &Rational) -> Self {
        GaussPoly {
            width: self.width.clone(),
            pi_power: self.pi_power,
            poly: self.poly.scale(r),
        }
    }

    /// `∫ d²ⁿx`, using `∫ x^a e^{−x²/s} dx = (a−1)!! (s/2)^{a/2} √(πs)` for
    /// even `a`. The `2n` square roots pair up into `(πs)ⁿ`.
    pub fn integrate(&self) -> PiMultiple<S> {
        let n = self.dof();
        let half = &self.width / int(2);
        let mut total = S::zero();
        for (e, c) in self.poly.terms() {
            if e.iter().any(|a| a % 2 == 1) {
                continue;
            }
            let mut m = Rational::one();
            for &a in e {
                m *= double_factorial_odd(a) * num_traits::pow(half.clone(), (a / 2) as usize);
            }
            total = total.add_ref(&c.scale(&m));
        }
        let total = total.scale(&num_traits::pow(self.width.clone(), n));
        PiMultiple {
            value: total,
            pi_power: self.pi_power + n as i32,
        }
    }

    /// `P(x)`: the value with the envelope and the power of `π` stripped.
    pub fn prefactor_at(&self, point: &[S]) -> S {
        self.poly.eval(point)
    }
}

/// `(a − 1)!!` for even `a`, with `(−1)!! = 1`.
fn double_factorial_odd(a: u32) -> Rational {
    let mut r = Rational::one();
    let mut k = a as i64 - 1;
    while k > 1 {
        r *= int(k);
        k -= 2;
    }
    r
}

/// Laguerre polynomial `L_m(x)` as exact coefficients, `m ≤ 2`.
fn laguerre(m: u32) -> Vec<Rational> {
    match m {
        0 => vec![int(1)],
        1 => vec![int(1), int(-1)],
        _ => vec![int(1), int(-2), rat(1, 2)],
    }
}

/// Wigner function of the `m`-th oscillator eigenstate, one degree of
/// freedom: `((−1)^m/(πħ)) L_m(2(q²+p²)/ħ) e^{−(q²+p²)/ħ}`.
pub fn fock_wigner(m: u32, hbar: &HBar) -> Result<GaussPoly<Rational>, MoyalError> {
    if m > 2 {
        return Err(MoyalError::UnsupportedLevel(m));
    }
    let h = hbar.value();
    let (q, p) = (Poly::<Rational>::var(2, 0), Poly::<Rational>::var(2, 1));
    let x = q.mul_ref(&q).add_ref(&p.mul_ref(&p)).scale(&(int(2) / h));
    let mut lag = Poly::zero(2);
    let mut xk = Poly::one(2);
    for c in laguerre(m) {
        lag = lag.add_ref(&xk.scale(&c));
        xk = xk.mul_ref(&x);
    }
    let sign = if m.is_multiple_of(2) { int(1) } else { int(-1) };
    Ok(GaussPoly::new(lag.scale(&(sign / h)), h.clone(), -1))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// `F ⋆ g`
    Left,
    /// `g ⋆ F`
    Right,
}

/// `Jᵏ` in `ℚ[J]`.
fn unit_power<const J2: i8>(k: u32) -> ExtRational<J2> {
    let mut out = ExtRational::<J2>::one();
    let u = ExtRational::<J2>::unit();
    for _ in 0..k {
        out = out.mul_ref(&u);
    }
    out
}

/// `F ⋆ g` or `g ⋆ F` as the finite series `Σ_k (Jħ/2)ᵏ/k! ∇ᵏ`; the class is
/// fixed by `J2`.
pub fn star_gp<const J2: i8>(
    f: &GaussPoly<ExtRational<J2>>,
    g: &PhasePoly<ExtRational<J2>>,
    side: Side,
    hbar: &HBar,
) -> Result<GaussPoly<ExtRational<J2>>, MoyalError> {
    if f.poly.nvars() != g.nvars() {
        return Err(MoyalError::DofMismatch(f.dof(), g.nvars() / 2));
    }
    let n = f.dof();
    let half = hbar.value() / int(2);
    let top = g.degree().unwrap_or(0);
    let mut acc = Poly::zero(f.poly.nvars());
    for k in 0..=top {
        let coef = unit_power::<J2>(k).scale(&(num_traits::pow(half.clone(), k as usize) / factorial(k)));
        if coef.is_zero() {
            continue;
        }
        let mut term = Poly::zero(f.poly.nvars());
        for_each_nabla_term(n, k, |left, right, c| {
            let (fo, go) = match side {
                Side::Left => (left, right),
                Side::Right => (right, left),
            };
            let gd = g.derivative(go);
            if gd.is_zero() {
                return;
            }
            let fd = f.derivative(fo);
            term = term.add_ref(&fd.poly.mul_ref(&gd).scale(c));
        });
        acc = acc.add_ref(&term.scale_by(&coef));
    }
    Ok(GaussPoly {
        width: f.width.clone(),
        pi_power: f.pi_power,
        poly: acc,
    })
}

/// Star product of two polynomials, any class.
fn star_poly<const J2: i8>(
    f: &PhasePoly<ExtRational<J2>>,
    g: &PhasePoly<ExtRational<J2>>,
    hbar: &HBar,
) -> PhasePoly<ExtRational<J2>> {
    crate::phasepoly::star(f, g, hbar).expect("shared dof")
}

fn embed<const J2: i8>(f: &GaussPoly<Rational>) -> GaussPoly<ExtRational<J2>> {
    GaussPoly {
        width: f.width.clone(),
        pi_power: f.pi_power,
        poly: crate::phasepoly::extend::<J2>(&f.poly),
    }
}

fn check_normalized<S: Scalar>(f: &GaussPoly<S>) -> Result<(), MoyalError> {
    let total = f.integrate();
    if total.pi_power != 0 || total.value != S::one() {
        return Err(MoyalError::NonNormalized(format!(
            "{}·π^{}",
            total.value, total.pi_power
        )));
    }
    Ok(())
}

/// `⟨g* ⋆ g⟩ = ∫ (g* ⋆ g) F`, exact. Real states make this a rational number.
pub fn positivity_functional<const J2: i8>(
    f: &GaussPoly<Rational>,
    g: &PhasePoly<ExtRational<J2>>,
    hbar: &HBar,
) -> Result<ExtRational<J2>, MoyalError> {
    check_normalized(f)?;
    if f.poly.nvars() != g.nvars() {
        return Err(MoyalError::DofMismatch(f.dof(), g.nvars() / 2));
    }
    let gg = star_poly(&g.conj(), g, hbar);
    let total = embed::<J2>(f).mul_poly(&gg).integrate();
    debug_assert_eq!(total.pi_power, 0);
    Ok(total.value)
}

/// Both ends of the positivity chain:
/// `lhs = ∫ (g*⋆g) F` and `rhs = (2πħ) ∫ (g⋆F)* (g⋆F)`.
///
/// They agree when `F` is a pure state, `F = 2πħ F⋆F`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainValues<S> {
    pub lhs: S,
    pub rhs: S,
}

pub fn positivity_chain<const J2: i8>(
    f: &GaussPoly<Rational>,
    g: &PhasePoly<ExtRational<J2>>,
    hbar: &HBar,
) -> Result<ChainValues<ExtRational<J2>>, MoyalError> {
    let lhs = positivity_functional(f, g, hbar)?;
    let gf = star_gp(&embed::<J2>(f), g, Side::Right, hbar)?;
    let sq = gf.conj().mul(&gf).integrate();
    // (2πħ)·value·π^pi_power; the extra π cancels one negative power.
    let rhs = sq.value.scale(&(int(2) * hbar.value()));
    debug_assert_eq!(sq.pi_power + 1, 0);
    Ok(ChainValues { lhs, rhs })
}

/// Test function `c₀ + c₁q + c₂p + J(c₃q + c₄p)` on one degree of freedom.
pub fn lattice_function<const J2: i8>(c: &[i64; 5]) -> PhasePoly<ExtRational<J2>> {
    let e = |re: i64, im: i64| ExtRational::<J2>::from_ints(re, im);
    Poly::from_terms(
        2,
        [
            (vec![0, 0], e(c[0], 0)),
            (vec![1, 0], e(c[1], c[3])),
            (vec![0, 1], e(c[2], c[4])),
        ],
    )
}

/// All coefficient vectors in `{−bound..bound}⁵`, lexicographic.
pub fn lattice(bound: i64) -> Vec<[i64; 5]> {
    let side = (2 * bound + 1) as usize;
    let total = side.pow(5);
    (0..total)
        .map(|mut idx| {
            let mut c = [0i64; 5];
            for k in (0..5).rev() {
                c[k] = (idx % side) as i64 - bound;
                idx /= side;
            }
            c
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GhostWitness {
    /// `[c₀, c₁, c₂, c₃, c₄]` of `c₀ + c₁q + c₂p + J(c₃q + c₄p)`.
    pub coefficients: [i64; 5],
    pub function: String,
    /// Exact functional value as a reduced fraction.
    pub value: String,
    pub value_f64: f64,
}

/// Returns the lexicographically first lattice function whose functional
/// against the ground state is negative.
pub fn ghost_search<const J2: i8>(bound: i64, hbar: &HBar) -> Result<GhostWitness, MoyalError> {
    let f = fock_wigner(0, hbar)?;
    let found = lattice(bound).into_par_iter().find_map_first(|c| {
        let g = lattice_function::<J2>(&c);
        let v = positivity_functional(&f, &g, hbar).expect("ground state is normalized");
        debug_assert!(v.im.is_zero(), "functional of g*⋆g is self-conjugate");
        (v.re < Rational::zero()).then(|| GhostWitness {
            coefficients: c,
            function: g.to_string(),
            value: v.re.to_string(),
            value_f64: crate::scalars::rat_to_f64(&v.re),
        })
    });
    found.ok_or(MoyalError::ExhaustedWithoutWitness { bound })
}

/// Smallest functional value over the lattice for a given state, with its
/// count of negative entries.
pub fn lattice_minimum<const J2: i8>(
    f: &GaussPoly<Rational>,
    bound: i64,
    hbar: &HBar,
) -> Result<(Rational, usize), MoyalError> {
    check_normalized(f)?;
    let values: Vec<Rational> = lattice(bound)
        .into_par_iter()
        .map(|c| {
            let v = positivity_functional(f, &lattice_function::<J2>(&c), hbar).expect("normalized");
            v.re
        })
        .collect();
    let negatives = values.iter().filter(|v| **v < Rational::zero()).count();
    let min = values.into_iter().min().unwrap_or_else(Rational::zero);
    Ok((min, negatives))
}

/// Class tag for the `J2` parameter.
pub fn class_of<const J2: i8>() -> Class {
    ExtRational::<J2>::class()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::{ComplexRational, SplitComplex};

    fn h2() -> HBar {
        HBar::default()
    }

    #[test]
    fn wigner_normalization() {
        for hbar in [h2(), HBar::from_ratio(1, 3).unwrap()] {
            for m in 0..=2 {
                let f = fock_wigner(m, &hbar).unwrap();
                let i = f.integrate();
                assert_eq!((i.value, i.pi_power), (int(1), 0), "m = {m}");
            }
        }
        assert_eq!(fock_wigner(3, &h2()), Err(MoyalError::UnsupportedLevel(3)));
    }

    #[test]
    fn wigner_sign_at_origin() {
        let f0 = fock_wigner(0, &h2()).unwrap();
        let f1 = fock_wigner(1, &h2()).unwrap();
        let origin = [int(0), int(0)];
        assert_eq!(f0.prefactor_at(&origin), rat(1, 2));
        assert!(f1.prefactor_at(&origin) < int(0));
    }

    #[test]
    fn moments_against_hand_values() {
        // ∫ q² e^{−(q²+p²)/s} = (s/2)·πs
        let q2 = GaussPoly::new(Poly::<Rational>::monomial(2, vec![2, 0], int(1)), int(3), 0);
        let i = q2.integrate();
        assert_eq!((i.value, i.pi_power), (rat(9, 2), 1));
        let q4p2 = GaussPoly::new(Poly::<Rational>::monomial(2, vec![4, 2], int(1)), int(2), 0);
        // 3·1·2 moments: (3)(1)^2 · (1)(1) · (2π)
        assert_eq!(q4p2.integrate().value, int(6));
    }

    #[test]
    fn bopp_shift_for_linear_arguments() {
        // Ground state: F ⋆ q = (q + (iħ/2)∂p)F = (q + ip)F for any ħ.
        let hbar = HBar::from_ratio(3, 2).unwrap();
        let f = embed::<-1>(&fock_wigner(0, &hbar).unwrap());
        let q = crate::phasepoly::q::<ComplexRational>(1, 0);
        let got = star_gp(&f, &q, Side::Left, &hbar).unwrap();
        let shifted = Poly::from_terms(
            2,
            [
                (vec![1, 0], ComplexRational::from_ints(1, 0)),
                (vec![0, 1], ComplexRational::from_ints(0, 1)),
            ],
        );
        assert_eq!(got, f.mul_poly(&shifted));
        let one = Poly::one(2);
        assert_eq!(star_gp(&f, &one, Side::Right, &hbar).unwrap(), f);
    }

    #[test]
    fn vacuum_position_variance() {
        let hbar = HBar::from_ratio(3, 1).unwrap();
        let f = fock_wigner(0, &hbar).unwrap();
        let q = crate::phasepoly::q::<ComplexRational>(1, 0);
        assert_eq!(
            positivity_functional(&f, &q, &hbar).unwrap(),
            ComplexRational::real(rat(3, 2))
        );
        let one = Poly::<SplitComplex>::one(2);
        assert_eq!(
            positivity_functional(&f, &one, &hbar).unwrap(),
            SplitComplex::from_ints(1, 0)
        );
    }

    #[test]
    fn annihilator_has_zero_functional() {
        let hbar = h2();
        let f = fock_wigner(0, &hbar).unwrap();
        let a = lattice_function::<-1>(&[0, 1, 0, 0, 1]); // q + ip
        let chain = positivity_chain(&f, &a, &hbar).unwrap();
        assert!(chain.lhs.is_zero() && chain.rhs.is_zero());
    }

    #[test]
    fn unnormalized_state_rejected() {
        let f = fock_wigner(0, &h2()).unwrap().scale(&int(2));
        let g = Poly::<ComplexRational>::one(2);
        assert!(matches!(
            positivity_functional(&f, &g, &h2()),
            Err(MoyalError::NonNormalized(_))
        ));
    }

    #[test]
    fn lattice_order() {
        let l = lattice(1);
        assert_eq!(l.len(), 243);
        assert_eq!(l[0], [-1; 5]);
        assert_eq!(l[1], [-1, -1, -1, -1, 0]);
        assert_eq!(l[242], [1; 5]);
    }
}
