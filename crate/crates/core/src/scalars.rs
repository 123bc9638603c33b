//! Scalar rings with involutions.
//!
//! Exact rings are built on arbitrary precision rationals. The three
//! quadratic extensions of the rationals by a unit `J` with `J² ∈ {-1, 0, +1}`
//! share one implementation, [`ExtRational`], parametrized by the square of
//! the adjoined unit:
//!
//! * [`ComplexRational`]: `i² = -1` (elliptic class)
//! * [`DualNumber`]: `ε² = 0` (parabolic class)
//! * [`SplitComplex`]: `j² = +1` (hyperbolic class)
//!
//! `Complex64` also implements [`Scalar`] so that float carriers and exact
//! carriers can share generic code.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Arbitrary precision rational, always stored in lowest terms with a
/// positive denominator.
pub type Rational = BigRational;

/// Shorthand for `num / den` as a [`Rational`]. Panics on a zero denominator.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Integer as a [`Rational`].
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Closest `f64` to a rational. Saturates to ±inf on overflow.
pub fn rat_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Ring element usable as a polynomial or matrix coefficient.
///
/// All rings here are associative and unital, and `conj` is an involutive
/// anti-automorphism (an automorphism, since every ring here is commutative).
pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Zero
    + One
{
    /// Whether equality on this ring is exact.
    const EXACT: bool;

    fn from_rational(r: &Rational) -> Self;
    fn conj(&self) -> Self;

    fn add_ref(&self, other: &Self) -> Self;
    fn sub_ref(&self, other: &Self) -> Self;
    fn mul_ref(&self, other: &Self) -> Self;

    fn scale(&self, r: &Rational) -> Self {
        self.mul_ref(&Self::from_rational(r))
    }

    /// Size used when reporting residuals. Exactly zero only for zero.
    fn magnitude(&self) -> f64;
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn conj(&self) -> Self {
        self.clone()
    }
    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }
    fn sub_ref(&self, other: &Self) -> Self {
        self - other
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn scale(&self, r: &Rational) -> Self {
        self * r
    }
    fn magnitude(&self) -> f64 {
        if self.is_zero() {
            0.0
        } else {
            rat_to_f64(&self.abs()).max(f64::MIN_POSITIVE)
        }
    }
}

impl Scalar for Complex64 {
    const EXACT: bool = false;

    fn from_rational(r: &Rational) -> Self {
        Complex64::new(rat_to_f64(r), 0.0)
    }
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }
    fn sub_ref(&self, other: &Self) -> Self {
        self - other
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// Composability class, identified by the square of the unit `J`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Class {
    /// `J² = -1`
    Elliptic,
    /// `J² = 0`
    Parabolic,
    /// `J² = +1`
    Hyperbolic,
}

impl Class {
    pub const ALL: [Class; 3] = [Class::Elliptic, Class::Parabolic, Class::Hyperbolic];

    pub fn j_squared(self) -> i8 {
        match self {
            Class::Elliptic => -1,
            Class::Parabolic => 0,
            Class::Hyperbolic => 1,
        }
    }

    pub fn from_j_squared(j2: i8) -> Option<Class> {
        match j2 {
            -1 => Some(Class::Elliptic),
            0 => Some(Class::Parabolic),
            1 => Some(Class::Hyperbolic),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Class::Elliptic => "elliptic",
            Class::Parabolic => "parabolic",
            Class::Hyperbolic => "hyperbolic",
        }
    }
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `re + J·im` with `J² = J2`, exact rational components.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ExtRational<const J2: i8> {
    pub re: Rational,
    pub im: Rational,
}

/// Gaussian rationals, `i² = -1`.
pub type ComplexRational = ExtRational<-1>;
/// Dual numbers over the rationals, `ε² = 0`. The `im` field is the `ε` part.
pub type DualNumber = ExtRational<0>;
/// Split-complex (hyperbolic) rationals, `j² = +1`.
pub type SplitComplex = ExtRational<1>;

impl<const J2: i8> ExtRational<J2> {
    pub fn new(re: Rational, im: Rational) -> Self {
        ExtRational { re, im }
    }

    pub fn from_ints(re: i64, im: i64) -> Self {
        ExtRational::new(int(re), int(im))
    }

    pub fn real(re: Rational) -> Self {
        ExtRational::new(re, Rational::zero())
    }

    /// The adjoined unit `J`.
    pub fn unit() -> Self {
        ExtRational::new(Rational::zero(), Rational::one())
    }

    pub fn class() -> Class {
        Class::from_j_squared(J2).expect("J² must be -1, 0 or +1")
    }

    /// `z* z = re² - J²·im²`, always a rational.
    pub fn quadratic_norm(&self) -> Rational {
        let sq = &self.re * &self.re;
        match J2 {
            0 => sq,
            j => sq - int(j as i64) * &self.im * &self.im,
        }
    }

    /// Multiplicative inverse when `z* z` is nonzero.
    pub fn inverse(&self) -> Option<Self> {
        let n = self.quadratic_norm();
        if n.is_zero() {
            return None;
        }
        let c = Scalar::conj(self);
        Some(ExtRational::new(&c.re / &n, &c.im / &n))
    }

    pub fn unit_symbol() -> &'static str {
        match J2 {
            -1 => "i",
            0 => "e",
            _ => "j",
        }
    }
}

impl<const J2: i8> Add for ExtRational<J2> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        ExtRational::new(self.re + o.re, self.im + o.im)
    }
}

impl<const J2: i8> Sub for ExtRational<J2> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        ExtRational::new(self.re - o.re, self.im - o.im)
    }
}

impl<const J2: i8> Neg for ExtRational<J2> {
    type Output = Self;
    fn neg(self) -> Self {
        ExtRational::new(-self.re, -self.im)
    }
}

impl<const J2: i8> Mul for ExtRational<J2> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        self.mul_ref(&o)
    }
}

impl<const J2: i8> Zero for ExtRational<J2> {
    fn zero() -> Self {
        ExtRational::new(Rational::zero(), Rational::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl<const J2: i8> One for ExtRational<J2> {
    fn one() -> Self {
        ExtRational::new(Rational::one(), Rational::zero())
    }
}

impl<const J2: i8> Scalar for ExtRational<J2> {
    const EXACT: bool = true;

    fn from_rational(r: &Rational) -> Self {
        ExtRational::real(r.clone())
    }
    fn conj(&self) -> Self {
        ExtRational::new(self.re.clone(), -&self.im)
    }
    fn add_ref(&self, o: &Self) -> Self {
        ExtRational::new(&self.re + &o.re, &self.im + &o.im)
    }
    fn sub_ref(&self, o: &Self) -> Self {
        ExtRational::new(&self.re - &o.re, &self.im - &o.im)
    }
    fn mul_ref(&self, o: &Self) -> Self {
        let mut re = &self.re * &o.re;
        match J2 {
            0 => {}
            1 => re += &self.im * &o.im,
            _ => re -= &self.im * &o.im,
        }
        let im = &self.re * &o.im + &self.im * &o.re;
        ExtRational::new(re, im)
    }
    fn scale(&self, r: &Rational) -> Self {
        ExtRational::new(&self.re * r, &self.im * r)
    }
    fn magnitude(&self) -> f64 {
        self.re.magnitude().max(self.im.magnitude())
    }
}

impl<const J2: i8> fmt::Display for ExtRational<J2> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.re.is_zero() {
            write!(f, "({}{})", self.im, Self::unit_symbol())
        } else if self.im.is_negative() {
            write!(f, "({}-{}{})", self.re, -&self.im, Self::unit_symbol())
        } else {
            write!(f, "({}+{}{})", self.re, self.im, Self::unit_symbol())
        }
    }
}

/// Complex-like scalars whose real and imaginary parts can be read back.
pub trait ComplexLike: Scalar {
    type Real: Clone + PartialEq + fmt::Debug;
    fn re_part(&self) -> Self::Real;
    fn im_part(&self) -> Self::Real;
    fn from_parts(re: Self::Real, im: Self::Real) -> Self;
    fn to_c64(&self) -> Complex64;
}

impl ComplexLike for ComplexRational {
    type Real = Rational;
    fn re_part(&self) -> Rational {
        self.re.clone()
    }
    fn im_part(&self) -> Rational {
        self.im.clone()
    }
    fn from_parts(re: Rational, im: Rational) -> Self {
        ExtRational::new(re, im)
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::new(rat_to_f64(&self.re), rat_to_f64(&self.im))
    }
}

impl ComplexLike for Complex64 {
    type Real = f64;
    fn re_part(&self) -> f64 {
        self.re
    }
    fn im_part(&self) -> f64 {
        self.im
    }
    fn from_parts(re: f64, im: f64) -> Self {
        Complex64::new(re, im)
    }
    fn to_c64(&self) -> Complex64 {
        *self
    }
}

// ---------------------------------------------------------------------------
// Split-complex para-geometry

/// `sign · √radicand`, kept exact so that sums of para-seminorms can be
/// compared without rounding.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedSqrt {
    pub sign: i8,
    pub radicand: Rational,
}

impl SignedSqrt {
    pub fn to_f64(&self) -> f64 {
        self.sign as f64 * rat_to_f64(&self.radicand).sqrt()
    }

    /// `|value|²`
    pub fn abs_squared(&self) -> &Rational {
        &self.radicand
    }
}

/// Product of two split-complex numbers.
pub fn split_mul(z: &SplitComplex, w: &SplitComplex) -> SplitComplex {
    z.mul_ref(w)
}

/// Indefinite para-seminorm `sign(z*z)·√|z*z|`, with `sign(0) = 0`.
pub fn para_seminorm(z: &SplitComplex) -> SignedSqrt {
    let n = z.quadratic_norm();
    let sign = if n.is_zero() {
        0
    } else if n.is_positive() {
        1
    } else {
        -1
    };
    SignedSqrt {
        sign,
        radicand: n.abs(),
    }
}

/// Whether `√a ≥ √b + √c` for non-negative rationals, decided exactly.
pub fn sqrt_sum_le(b: &Rational, c: &Rational, a: &Rational) -> bool {
    let d = a - b - c;
    if d.is_negative() {
        return false;
    }
    &d * &d >= int(4) * b * c
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    /// `x > 0, |x| > |y|`: `z = ρ(cosh θ + j sinh θ)`
    PosReal,
    /// `y > 0, |y| > |x|`: `z = ρ(sinh θ + j cosh θ)`
    PosImag,
    /// `x < 0, |x| > |y|`: `z = -ρ(cosh θ + j sinh θ)`
    NegReal,
    /// `y < 0, |y| > |x|`: `z = -ρ(sinh θ + j cosh θ)`
    NegImag,
    /// `|x| = |y|`
    NullCone,
}

/// Hyperbolic polar form of a split-complex number.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolarBranch {
    pub branch: Branch,
    pub rho: f64,
    pub theta: f64,
}

impl PolarBranch {
    /// `(x, y)` rebuilt from `(branch, ρ, θ)`.
    pub fn reconstruct(&self) -> (f64, f64) {
        let (c, s) = (self.theta.cosh(), self.theta.sinh());
        match self.branch {
            Branch::PosReal => (self.rho * c, self.rho * s),
            Branch::PosImag => (self.rho * s, self.rho * c),
            Branch::NegReal => (-self.rho * c, -self.rho * s),
            Branch::NegImag => (-self.rho * s, -self.rho * c),
            Branch::NullCone => (0.0, 0.0),
        }
    }
}

/// Branch of an exact split-complex number; exact quadrant test.
pub fn branch_of(z: &SplitComplex) -> Branch {
    let (ax, ay) = (z.re.abs(), z.im.abs());
    if ax == ay {
        Branch::NullCone
    } else if ax > ay {
        if z.re.is_positive() {
            Branch::PosReal
        } else {
            Branch::NegReal
        }
    } else if z.im.is_positive() {
        Branch::PosImag
    } else {
        Branch::NegImag
    }
}

/// Polar decomposition of an exact split-complex number. The quadrant is
/// decided exactly; `ρ` and `θ` are floats.
pub fn hyperbolic_polar(z: &SplitComplex) -> PolarBranch {
    let branch = branch_of(z);
    polar_in_branch(branch, rat_to_f64(&z.re), rat_to_f64(&z.im))
}

/// Polar decomposition of a float split-complex number `x + j y`.
pub fn hyperbolic_polar_f64(x: f64, y: f64) -> PolarBranch {
    let branch = if x.abs() == y.abs() {
        Branch::NullCone
    } else if x.abs() > y.abs() {
        if x > 0.0 {
            Branch::PosReal
        } else {
            Branch::NegReal
        }
    } else if y > 0.0 {
        Branch::PosImag
    } else {
        Branch::NegImag
    };
    polar_in_branch(branch, x, y)
}

fn polar_in_branch(branch: Branch, x: f64, y: f64) -> PolarBranch {
    match branch {
        Branch::NullCone => PolarBranch {
            branch,
            rho: 0.0,
            theta: 0.0,
        },
        Branch::PosReal | Branch::NegReal => PolarBranch {
            branch,
            rho: ((x - y) * (x + y)).sqrt(),
            theta: (y / x).atanh(),
        },
        Branch::PosImag | Branch::NegImag => PolarBranch {
            branch,
            rho: ((y - x) * (y + x)).sqrt(),
            theta: (x / y).atanh(),
        },
    }
}

/// Verdicts of the two algebraic identities relating the split-complex
/// inner product to its quadratic form.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PolarizationVerdict {
    pub polarization: bool,
    pub parallelogram: bool,
}

fn star_square(z: &SplitComplex) -> SplitComplex {
    z.conj().mul_ref(z)
}

/// Checks polarization and the parallelogram law exactly.
pub fn check_polarization_parallelogram(x: &SplitComplex, y: &SplitComplex) -> PolarizationVerdict {
    let j = SplitComplex::unit();
    let jy = j.mul_ref(y);
    let quarter = rat(1, 4);

    let real_part = star_square(&x.add_ref(y))
        .sub_ref(&star_square(&x.sub_ref(y)))
        .scale(&quarter);
    let j_part = j
        .mul_ref(&star_square(&x.add_ref(&jy)).sub_ref(&star_square(&x.sub_ref(&jy))))
        .scale(&quarter);
    let polarization = real_part.add_ref(&j_part) == x.conj().mul_ref(y);

    let lhs = star_square(&x.add_ref(y)).add_ref(&star_square(&x.sub_ref(y)));
    let rhs = star_square(x).add_ref(&star_square(y)).scale(&int(2));
    PolarizationVerdict {
        polarization,
        parallelogram: lhs == rhs,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScalarError {
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
}

/// Reversed triangle inequality `| ‖z+w‖ | ≥ | ‖z‖ | + | ‖w‖ |`, decided
/// exactly. Inputs must lie strictly inside one quadrant together with their
/// sum.
pub fn check_reversed_triangle(z: &SplitComplex, w: &SplitComplex) -> Result<bool, ScalarError> {
    let s = z.add_ref(w);
    let (bz, bw, bs) = (branch_of(z), branch_of(w), branch_of(&s));
    if bz == Branch::NullCone || bw == Branch::NullCone || bs == Branch::NullCone {
        return Err(ScalarError::PreconditionViolated(format!(
            "{z}, {w} or their sum lies on the null cone"
        )));
    }
    if bz != bw || bz != bs {
        return Err(ScalarError::PreconditionViolated(format!(
            "{z} ({bz:?}), {w} ({bw:?}) and their sum ({bs:?}) are not in one quadrant"
        )));
    }
    let (nz, nw, ns) = (para_seminorm(z), para_seminorm(w), para_seminorm(&s));
    Ok(sqrt_sum_le(&nz.radicand, &nw.radicand, &ns.radicand))
}

/// Para-Cauchy–Schwarz `|⟨x,y⟩| ≥ ‖x‖‖y‖` on 𝔻, where `|·|` is the modulus of
/// the para-seminorm and `⟨x,y⟩ = x* y`. Returns `None` when the hypothesis
/// `‖x‖·‖y‖ ≥ 0` fails.
pub fn check_para_cauchy_schwarz(x: &SplitComplex, y: &SplitComplex) -> Option<bool> {
    let (nx, ny) = (para_seminorm(x), para_seminorm(y));
    let sign = nx.sign * ny.sign;
    if sign < 0 {
        return None;
    }
    if sign == 0 {
        return Some(true);
    }
    let inner = para_seminorm(&x.conj().mul_ref(y));
    Some(inner.radicand >= &nx.radicand * &ny.radicand)
}

/// Vector in 𝔻² with the indefinite quadratic form `v*v = Σ zᵢ* zᵢ`.
pub type SplitVec2 = [SplitComplex; 2];

fn vec_sub(a: &SplitVec2, b: &SplitVec2) -> SplitVec2 {
    [a[0].sub_ref(&b[0]), a[1].sub_ref(&b[1])]
}

fn vec_lerp(a: &SplitVec2, b: &SplitVec2, t: &Rational) -> SplitVec2 {
    let one_minus = Rational::one() - t;
    [
        a[0].scale(&one_minus).add_ref(&b[0].scale(t)),
        a[1].scale(&one_minus).add_ref(&b[1].scale(t)),
    ]
}

/// `v* v` for a 𝔻² vector.
pub fn quadratic_form2(v: &SplitVec2) -> Rational {
    v[0].quadratic_norm() + v[1].quadratic_norm()
}

/// A concrete instance showing that closest points to a convex set need not
/// be unique under an indefinite norm.
///
/// The convex set is the segment `{(1-t)·m0 + t·m1 : t ∈ [0,1]}` in 𝔻².
#[derive(Clone, Debug)]
pub struct MinimizerWitness {
    pub x: SplitVec2,
    pub m0: SplitVec2,
    pub m1: SplitVec2,
    pub y: SplitVec2,
    pub y0: SplitVec2,
}

/// Result of revalidating a [`MinimizerWitness`] by lattice brute force.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessValidation {
    /// `‖x - y‖² sign` at `y` and `y0`, which must agree.
    pub distance_sq_y: Rational,
    pub distance_sq_y0: Rational,
    /// Smallest `‖x - m‖² sign` over the lattice on the segment.
    pub lattice_min: Rational,
    /// `‖y - y0‖² sign(‖y - y0‖)`, which must be `≤ 0`.
    pub separation: Rational,
    pub valid: bool,
}

impl MinimizerWitness {
    /// Validates against brute-force minimization over `steps + 1` evenly
    /// spaced lattice points of the segment.
    pub fn validate(&self, steps: u32) -> WitnessValidation {
        let dist = |m: &SplitVec2| quadratic_form2(&vec_sub(&self.x, m));
        let lattice_min = (0..=steps)
            .map(|k| dist(&vec_lerp(&self.m0, &self.m1, &rat(k as i64, steps as i64))))
            .min()
            .expect("lattice is non-empty");
        let distance_sq_y = dist(&self.y);
        let distance_sq_y0 = dist(&self.y0);
        let separation = quadratic_form2(&vec_sub(&self.y, &self.y0));
        let on_segment =
            |v: &SplitVec2| (0..=steps).any(|k| vec_lerp(&self.m0, &self.m1, &rat(k as i64, steps as i64)) == *v);
        let valid = self.y != self.y0
            && distance_sq_y == distance_sq_y0
            && distance_sq_y == lattice_min
            && !separation.is_positive()
            && on_segment(&self.y)
            && on_segment(&self.y0);
        WitnessValidation {
            distance_sq_y,
            distance_sq_y0,
            lattice_min,
            separation,
            valid,
        }
    }
}

/// The precomputed no-go witness: the segment runs along a null direction of
/// the second coordinate, so the indefinite distance to `x` is constant on it.
pub fn minimizer_nonuniqueness_witness() -> MinimizerWitness {
    let zero = SplitComplex::from_ints(0, 0);
    let m0 = [SplitComplex::from_ints(2, 0), zero.clone()];
    let m1 = [SplitComplex::from_ints(2, 0), SplitComplex::from_ints(1, 1)];
    MinimizerWitness {
        x: [zero.clone(), zero],
        y: m0.clone(),
        y0: m1.clone(),
        m0,
        m1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sc(re: i64, im: i64) -> SplitComplex {
        SplitComplex::from_ints(re, im)
    }

    #[test]
    fn split_products() {
        let j = SplitComplex::unit();
        assert_eq!(split_mul(&j, &j), sc(1, 0));
        assert_eq!(split_mul(&sc(1, 1), &sc(1, -1)), sc(0, 0));
        assert_eq!(split_mul(&sc(2, 1), &sc(3, 2)), sc(8, 7));
    }

    #[test]
    fn dual_and_complex_units() {
        let e = DualNumber::unit();
        assert!(e.mul_ref(&e).is_zero());
        let a = DualNumber::from_ints(3, 5);
        assert_eq!(a.mul_ref(&a.conj()), DualNumber::from_ints(9, 0));
        let i = ComplexRational::unit();
        assert_eq!(i.mul_ref(&i), ComplexRational::from_ints(-1, 0));
        assert_eq!(ComplexRational::from_ints(3, -4).quadratic_norm(), int(25));
    }

    #[test]
    fn seminorm_examples() {
        assert_eq!(para_seminorm(&sc(1, 0)).to_f64(), 1.0);
        assert_eq!(para_seminorm(&sc(1, 1)).sign, 0);
        let n = para_seminorm(&sc(2, 1));
        assert_eq!((n.sign, n.radicand.clone()), (1, int(3)));
        assert_eq!(para_seminorm(&sc(1, 2)).sign, -1);
    }

    #[test]
    fn polar_examples() {
        let p = hyperbolic_polar(&sc(2, 0));
        assert_eq!((p.branch, p.rho, p.theta), (Branch::PosReal, 2.0, 0.0));
        let p = hyperbolic_polar(&sc(0, 1));
        assert_eq!((p.branch, p.rho, p.theta), (Branch::PosImag, 1.0, 0.0));
        let p = hyperbolic_polar_f64(1f64.cosh(), 1f64.sinh());
        assert_eq!(p.branch, Branch::PosReal);
        assert!((p.rho - 1.0).abs() < 1e-12 && (p.theta - 1.0).abs() < 1e-12);
        let p = hyperbolic_polar(&sc(-3, 3));
        assert_eq!((p.branch, p.rho), (Branch::NullCone, 0.0));
    }

    #[test]
    fn polar_reconstructs_in_every_quadrant() {
        for (x, y) in [(5, 3), (3, 5), (-5, 3), (3, -5), (-5, -3), (-3, -5), (7, 0), (0, -2)] {
            let p = hyperbolic_polar(&sc(x, y));
            let (rx, ry) = p.reconstruct();
            assert!(
                (rx - x as f64).abs() < 1e-12 && (ry - y as f64).abs() < 1e-12,
                "{x} {y} {p:?}"
            );
        }
    }

    #[test]
    fn polarization_examples() {
        let v = check_polarization_parallelogram(&sc(1, 0), &SplitComplex::unit());
        assert!(v.polarization && v.parallelogram);
        let x = ExtRational::new(rat(3, 2), rat(-7, 3));
        let v = check_polarization_parallelogram(&x, &x);
        assert!(v.polarization && v.parallelogram);
    }

    #[test]
    fn reversed_triangle_examples() {
        assert_eq!(check_reversed_triangle(&sc(2, 0), &sc(3, 0)), Ok(true));
        // √21 ≈ 4.5826 against √3 + √8 ≈ 4.5605
        assert_eq!(check_reversed_triangle(&sc(2, 1), &sc(3, 1)), Ok(true));
        assert!(check_reversed_triangle(&sc(2, 1), &sc(-3, 1)).is_err());
        assert!(check_reversed_triangle(&sc(1, 1), &sc(3, 1)).is_err());
    }

    #[test]
    fn sqrt_sum_comparison_matches_floats() {
        for (a, b, c) in [(21, 3, 8), (25, 9, 4), (24, 9, 4), (0, 0, 0), (1, 0, 1)] {
            let exact = sqrt_sum_le(&int(b), &int(c), &int(a));
            let float = (a as f64).sqrt() >= (b as f64).sqrt() + (c as f64).sqrt() - 1e-15;
            assert_eq!(exact, float, "{a} {b} {c}");
        }
    }

    #[test]
    fn minimizer_witness_validates() {
        let w = minimizer_nonuniqueness_witness();
        let v = w.validate(64);
        assert!(v.valid, "{v:?}");
        assert_eq!(v.distance_sq_y, int(4));
    }

    #[test]
    fn perturbing_off_null_direction_changes_distance() {
        let w = minimizer_nonuniqueness_witness();
        let mut y = w.y0.clone();
        y[1] = y[1].add_ref(&SplitComplex::real(rat(1, 10)));
        assert_ne!(quadratic_form2(&vec_sub(&w.x, &y)), int(4));
    }
}
