//! Quantions: complex 2×2 matrices `q = [[a, c], [b, d]]` standing in for the
//! block-diagonal 4×4 `Q = diag(q, q)`.
//!
//! Two involutions act on them: `Q†` (conjugate transpose) and `Q♯`
//! (adjugate). Each gives a norm: `A(Q) = Q†Q`, a future-oriented
//! four-vector, and `M(Q) = Q♯Q = det q · I`. Metric signature is
//! `(+, −, −, −)` throughout.

use std::ops::Mul;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::hilbert::OperatorMatrix;
use crate::poly::Poly;
use crate::scalars::{rat, ComplexLike, ComplexRational, Scalar};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QuantionError {
    #[error("gamma matrices {rep} violate the Clifford relations at (μ, ν) = ({mu}, {nu})")]
    CliffordViolation { rep: String, mu: usize, nu: usize },
    #[error("no candidate gamma representation reproduces the quantion current")]
    NoRepFound,
    #[error("several gamma families reproduce the quantion current: {0:?}")]
    AmbiguousRep(Vec<String>),
    #[error("expected a polynomial in 4 variables x0..x3, got {0}")]
    NotSpacetime(usize),
    #[error("polynomial degree {0} exceeds 6")]
    DegreeTooHigh(u32),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Quantion<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
}

impl<T: Scalar> Quantion<T> {
    pub fn new(a: T, b: T, c: T, d: T) -> Self {
        Quantion { a, b, c, d }
    }

    pub fn identity() -> Self {
        Quantion::new(T::one(), T::zero(), T::zero(), T::one())
    }

    pub fn zero() -> Self {
        Quantion::new(T::zero(), T::zero(), T::zero(), T::zero())
    }

    /// `λ I`.
    pub fn scalar(l: T) -> Self {
        Quantion::new(l.clone(), T::zero(), T::zero(), l)
    }

    /// Reduced matrix, row-major: `[[a, c], [b, d]]`.
    pub fn rows(&self) -> [[T; 2]; 2] {
        [[self.a.clone(), self.c.clone()], [self.b.clone(), self.d.clone()]]
    }

    pub fn from_rows(m: [[T; 2]; 2]) -> Self {
        let [[a, c], [b, d]] = m;
        Quantion { a, b, c, d }
    }

    pub fn q_mul(&self, o: &Self) -> Self {
        let x = self.rows();
        let y = o.rows();
        let e = |i: usize, j: usize| x[i][0].mul_ref(&y[0][j]).add_ref(&x[i][1].mul_ref(&y[1][j]));
        Quantion::from_rows([[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]])
    }

    pub fn add(&self, o: &Self) -> Self {
        Quantion::new(
            self.a.add_ref(&o.a),
            self.b.add_ref(&o.b),
            self.c.add_ref(&o.c),
            self.d.add_ref(&o.d),
        )
    }

    pub fn sub(&self, o: &Self) -> Self {
        Quantion::new(
            self.a.sub_ref(&o.a),
            self.b.sub_ref(&o.b),
            self.c.sub_ref(&o.c),
            self.d.sub_ref(&o.d),
        )
    }

    pub fn scale_by(&self, s: &T) -> Self {
        Quantion::new(
            s.mul_ref(&self.a),
            s.mul_ref(&self.b),
            s.mul_ref(&self.c),
            s.mul_ref(&self.d),
        )
    }

    /// Conjugate transpose.
    pub fn q_dagger(&self) -> Self {
        Quantion::new(self.a.conj(), self.c.conj(), self.b.conj(), self.d.conj())
    }

    /// Adjugate `[[d, −c], [−b, a]]`.
    pub fn q_sharp(&self) -> Self {
        Quantion::new(self.d.clone(), -self.b.clone(), -self.c.clone(), self.a.clone())
    }

    pub fn det(&self) -> T {
        self.a.mul_ref(&self.d).sub_ref(&self.b.mul_ref(&self.c))
    }

    /// `A(Q) = Q†Q`.
    pub fn algebraic_norm(&self) -> Self {
        self.q_dagger().q_mul(self)
    }

    /// `M(Q) = Q♯Q`; equals `det q · I`.
    pub fn metric_norm(&self) -> Self {
        self.q_sharp().q_mul(self)
    }

    /// Metric norm as its scalar `det q`.
    pub fn mnorm(&self) -> T {
        self.det()
    }

    /// `Q = diag(q, q)` as a 4×4 array.
    pub fn to_block(&self) -> [[T; 4]; 4] {
        let r = self.rows();
        std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                if i / 2 == j / 2 {
                    r[i % 2][j % 2].clone()
                } else {
                    T::zero()
                }
            })
        })
    }

    /// Inverse of [`Quantion::to_block`]; `None` unless the input is
    /// block-diagonal with equal blocks.
    pub fn from_block(m: &[[T; 4]; 4]) -> Option<Self> {
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i / 2 == j / 2 {
                    m[i % 2][j % 2].clone()
                } else {
                    T::zero()
                };
                if m[i][j] != expect {
                    return None;
                }
            }
        }
        Some(Quantion::new(
            m[0][0].clone(),
            m[1][0].clone(),
            m[0][1].clone(),
            m[1][1].clone(),
        ))
    }

    pub fn is_hermitian(&self) -> bool {
        self.q_dagger() == *self
    }
}

impl<T: Scalar> Mul for &Quantion<T> {
    type Output = Quantion<T>;
    fn mul(self, o: &Quantion<T>) -> Quantion<T> {
        self.q_mul(o)
    }
}

/// Contravariant four-vector, components `(t, x, y, z)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourVector<R> {
    pub t: R,
    pub x: R,
    pub y: R,
    pub z: R,
}

impl FourVector<f64> {
    pub fn components(&self) -> [f64; 4] {
        [self.t, self.x, self.y, self.z]
    }

    /// `t ≥ √(x² + y² + z²) − 1e-12`.
    pub fn is_future_oriented(&self) -> bool {
        self.t >= (self.x * self.x + self.y * self.y + self.z * self.z).sqrt() - 1e-12
    }
}

impl<T: ComplexLike> Quantion<T> {
    /// Coefficients of a Hermitian `h` in `{I, σx, σy, σz}`:
    /// `t = (h₁₁ + h₂₂)/2`, `z = (h₁₁ − h₂₂)/2`, `x = Re h₁₂`, `y = −Im h₁₂`.
    /// Imaginary parts of the diagonal are discarded.
    pub fn pauli_coordinates(&self) -> FourVector<T::Real> {
        let half = rat(1, 2);
        FourVector {
            t: self.a.add_ref(&self.d).scale(&half).re_part(),
            x: self.c.re_part(),
            y: (-self.c.clone()).im_part(),
            z: self.a.sub_ref(&self.d).scale(&half).re_part(),
        }
    }

    /// `A(Q)` read as a four-vector.
    pub fn anorm(&self) -> FourVector<T::Real> {
        self.algebraic_norm().pauli_coordinates()
    }

    /// Inverse of [`Quantion::pauli_coordinates`].
    pub fn from_pauli(v: &FourVector<T::Real>) -> Self {
        let t = T::from_parts(v.t.clone(), T::zero().re_part());
        let z = T::from_parts(v.z.clone(), T::zero().re_part());
        let c = T::from_parts(
            v.x.clone(),
            (-T::from_parts(v.y.clone(), T::zero().re_part())).re_part(),
        );
        Quantion::new(t.add_ref(&z), c.conj(), c, t.sub_ref(&z))
    }

    pub fn to_c64(&self) -> Quantion<Complex64> {
        Quantion::new(self.a.to_c64(), self.b.to_c64(), self.c.to_c64(), self.d.to_c64())
    }
}

/// Float view of a four-vector over any complex-like ring.
pub fn four_vector_f64<T: ComplexLike>(v: &FourVector<T::Real>) -> FourVector<f64> {
    let f = |r: &T::Real| T::from_parts(r.clone(), T::zero().re_part()).to_c64().re;
    FourVector {
        t: f(&v.t),
        x: f(&v.x),
        y: f(&v.y),
        z: f(&v.z),
    }
}

/// Result of comparing `A(M(Q))` with `M(A(Q))`.
#[derive(Clone, Debug, PartialEq)]
pub struct NormCommutation<T> {
    pub am: Quantion<T>,
    pub ma: Quantion<T>,
    /// `|det q|²`; both compositions should equal this times `I`.
    pub abs_det_sq: T,
}

pub fn norms_commute<T: Scalar>(q: &Quantion<T>) -> NormCommutation<T> {
    let d = q.det();
    NormCommutation {
        am: q.metric_norm().algebraic_norm(),
        ma: q.algebraic_norm().metric_norm(),
        abs_det_sq: d.conj().mul_ref(&d),
    }
}

impl<T: Scalar> NormCommutation<T> {
    /// Largest entry magnitude of `AM − MA` and of `AM − |det|² I`.
    pub fn residuals(&self) -> (f64, f64) {
        let m = |q: &Quantion<T>| {
            [&q.a, &q.b, &q.c, &q.d]
                .iter()
                .map(|z| z.magnitude())
                .fold(0.0, f64::max)
        };
        (
            m(&self.am.sub(&self.ma)),
            m(&self.am.sub(&Quantion::scalar(self.abs_det_sq.clone()))),
        )
    }
}

/// `[[1, 0], [0, 0]]·[[0, 0], [0, 1]] = 0`.
pub fn zero_divisor_witness<T: Scalar>() -> (Quantion<T>, Quantion<T>) {
    (
        Quantion::new(T::one(), T::zero(), T::zero(), T::zero()),
        Quantion::new(T::zero(), T::zero(), T::zero(), T::one()),
    )
}

// ---------------------------------------------------------------------------
// Spinors and currents

/// `Ψ = (1/√2)(c, −a, b*, d*)`.
pub fn to_spinor(q: &Quantion<Complex64>) -> [Complex64; 4] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    [q.c * s, -q.a * s, q.b.conj() * s, q.d.conj() * s]
}

pub fn from_spinor(psi: &[Complex64; 4]) -> Quantion<Complex64> {
    let r = std::f64::consts::SQRT_2;
    Quantion::new(-psi[1] * r, psi[2].conj() * r, psi[0] * r, psi[3].conj() * r)
}

/// Named candidate for `γ⁰..γ³`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaRep {
    pub family: String,
    pub time_sign: i8,
    pub space_sign: i8,
    /// Which base spatial matrix is used as `γ¹, γ², γ³`.
    pub space_order: [usize; 3],
    #[serde(skip)]
    pub gammas: Vec<OperatorMatrix>,
}

impl GammaRep {
    pub fn label(&self) -> String {
        format!(
            "{}[γ⁰ sign {:+}, γᵏ sign {:+}, order {:?}]",
            self.family, self.time_sign, self.space_sign, self.space_order
        )
    }

    pub fn is_canonical(&self) -> bool {
        self.time_sign == 1 && self.space_sign == 1 && self.space_order == [0, 1, 2]
    }

    /// `{γ^μ, γ^ν} = 2η^{μν} I`, checked exactly (entries are units).
    pub fn validate_clifford(&self) -> Result<(), QuantionError> {
        let eta = [1.0, -1.0, -1.0, -1.0];
        for mu in 0..4 {
            for nu in 0..4 {
                let g = &self.gammas;
                let ac = &g[mu].matmul(&g[nu]) + &g[nu].matmul(&g[mu]);
                let want = if mu == nu { 2.0 * eta[mu] } else { 0.0 };
                let target = OperatorMatrix::identity(4).scale(&Complex64::new(want, 0.0));
                if (&ac - &target).max_abs() != 0.0 {
                    return Err(QuantionError::CliffordViolation {
                        rep: self.label(),
                        mu,
                        nu,
                    });
                }
            }
        }
        Ok(())
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn pauli() -> [OperatorMatrix; 3] {
    let z = c(0.0, 0.0);
    let o = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    [
        OperatorMatrix::from_rows(vec![vec![z, o], vec![o, z]]),
        OperatorMatrix::from_rows(vec![vec![z, -i], vec![i, z]]),
        OperatorMatrix::from_rows(vec![vec![o, z], vec![z, -o]]),
    ]
}

fn block(tl: &OperatorMatrix, tr: &OperatorMatrix, bl: &OperatorMatrix, br: &OperatorMatrix) -> OperatorMatrix {
    OperatorMatrix::from_fn(4, 4, |i, j| {
        let m = match (i < 2, j < 2) {
            (true, true) => tl,
            (true, false) => tr,
            (false, true) => bl,
            (false, false) => br,
        };
        m[(i % 2, j % 2)]
    })
}

/// Base matrices `(γ⁰, [γ¹, γ², γ³])` of the Dirac, Weyl and Majorana families.
fn base_families() -> Vec<(&'static str, OperatorMatrix, [OperatorMatrix; 3])> {
    let i2 = OperatorMatrix::identity(2);
    let z2 = OperatorMatrix::zeros(2, 2);
    let s = pauli();
    let neg = |m: &OperatorMatrix| -m;
    let spatial = |k: usize| block(&z2, &s[k], &neg(&s[k]), &z2);
    let std_space = [spatial(0), spatial(1), spatial(2)];
    let iu = Complex64::new(0.0, 1.0);
    let majorana_space = [
        block(&s[2].scale(&iu), &z2, &z2, &s[2].scale(&iu)),
        block(&z2, &neg(&s[1]), &s[1], &z2),
        block(&s[0].scale(&-iu), &z2, &z2, &s[0].scale(&-iu)),
    ];
    vec![
        ("dirac", block(&i2, &z2, &z2, &neg(&i2)), std_space.clone()),
        ("weyl", block(&z2, &i2, &i2, &z2), std_space),
        ("majorana", block(&z2, &s[1], &s[1], &z2), majorana_space),
    ]
}

/// Every family with both overall signs and all orderings of the spatial
/// matrices.
pub fn gamma_candidates() -> Vec<GammaRep> {
    const ORDERS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut out = Vec::new();
    for (family, g0, gk) in base_families() {
        for time_sign in [1i8, -1] {
            for space_sign in [1i8, -1] {
                for order in ORDERS {
                    let ts = Complex64::new(time_sign as f64, 0.0);
                    let ss = Complex64::new(space_sign as f64, 0.0);
                    let mut gammas = vec![g0.scale(&ts)];
                    gammas.extend(order.iter().map(|&k| gk[k].scale(&ss)));
                    out.push(GammaRep {
                        family: family.to_string(),
                        time_sign,
                        space_sign,
                        space_order: order,
                        gammas,
                    });
                }
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurrentVerdict {
    pub quantion_current: [f64; 4],
    pub dirac_current: [f64; 4],
    pub residual: f64,
    pub pass: bool,
}

/// `j^μ = Ψ†γ⁰γ^μΨ`.
pub fn dirac_current(psi: &[Complex64; 4], rep: &GammaRep) -> [f64; 4] {
    let g0 = &rep.gammas[0];
    std::array::from_fn(|mu| {
        let m = g0.matmul(&rep.gammas[mu]);
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..4 {
            for j in 0..4 {
                acc += psi[i].conj() * m[(i, j)] * psi[j];
            }
        }
        acc.re
    })
}

/// Compares `A(Q)` with the Dirac current of `Ψ(Q)`; tolerance 1e-12
/// relative to `max(1, t)`.
pub fn dirac_current_check(q: &Quantion<Complex64>, rep: &GammaRep) -> Result<CurrentVerdict, QuantionError> {
    rep.validate_clifford()?;
    let a = q.anorm().components();
    let j = dirac_current(&to_spinor(q), rep);
    let residual = a.iter().zip(&j).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max) / a[0].abs().max(1.0);
    Ok(CurrentVerdict {
        quantion_current: a,
        dirac_current: j,
        residual,
        pass: residual <= 1e-12,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepDiscovery {
    pub winner: GammaRep,
    /// Labels of every candidate that passed on all probes.
    pub passing: Vec<String>,
    pub families_passing: Vec<String>,
    pub candidates_tried: usize,
}

/// Fixed probe quantions with entries in `[−1, 1] + i[−1, 1]`.
pub fn probe_set(rng: &mut ChaCha8Rng, count: usize) -> Vec<Quantion<Complex64>> {
    (0..count).map(|_| random_quantion(rng)).collect()
}

pub fn random_quantion(rng: &mut ChaCha8Rng) -> Quantion<Complex64> {
    let mut z = || c(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0));
    Quantion::new(z(), z(), z(), z())
}

/// Quantion with entries `(n + im)/den`, `|n|, |m| ≤ bound`, `den ∈ 1..=4`.
pub fn random_exact_quantion(rng: &mut ChaCha8Rng, bound: i64) -> Quantion<ComplexRational> {
    let mut z = || {
        let den = rng.gen_range(1..=4);
        ComplexRational::new(
            rat(rng.gen_range(-bound..=bound), den),
            rat(rng.gen_range(-bound..=bound), den),
        )
    };
    Quantion::new(z(), z(), z(), z())
}

/// Tries every candidate on every probe. The winner is the first passing
/// candidate with canonical signs and ordering if one exists.
pub fn rep_discovery(probes: &[Quantion<Complex64>]) -> Result<RepDiscovery, QuantionError> {
    let candidates = gamma_candidates();
    let mut passing = Vec::new();
    for rep in &candidates {
        let mut ok = true;
        for q in probes {
            if !dirac_current_check(q, rep)?.pass {
                ok = false;
                break;
            }
        }
        if ok {
            passing.push(rep.clone());
        }
    }
    let mut families: Vec<String> = passing.iter().map(|r| r.family.clone()).collect();
    families.dedup();
    match families.len() {
        0 => Err(QuantionError::NoRepFound),
        1 => {
            let winner = passing.iter().find(|r| r.is_canonical()).unwrap_or(&passing[0]).clone();
            Ok(RepDiscovery {
                winner,
                passing: passing.iter().map(GammaRep::label).collect(),
                families_passing: families,
                candidates_tried: candidates.len(),
            })
        }
        _ => Err(QuantionError::AmbiguousRep(families)),
    }
}

// ---------------------------------------------------------------------------
// d'Alembertian

pub type SpacetimePoly = Poly<ComplexRational>;

#[derive(Clone, Debug, PartialEq)]
pub struct FactorizationVerdict {
    pub box_p: SpacetimePoly,
    /// `𝒟♯𝒟` applied to `(P, P)`.
    pub factorized: [SpacetimePoly; 2],
    pub pass: bool,
}

/// `□ = ∂₀² − ∂₁² − ∂₂² − ∂₃²`.
pub fn dalembertian(p: &SpacetimePoly) -> SpacetimePoly {
    let d2 = |i: usize| p.partial(i).partial(i);
    &(&(&d2(0) - &d2(1)) - &d2(2)) - &d2(3)
}

/// Applies `𝒟 = [[D, δ], [δ*, Δ]]` and then its adjugate `[[Δ, −δ], [−δ*, D]]`
/// to `(P, P)`, with `D = ∂₀ + ∂₃`, `δ = ∂₁ + i∂₂`, `δ* = ∂₁ − i∂₂`,
/// `Δ = ∂₀ − ∂₃`, and compares each slot with `□P` exactly.
pub fn dalembertian_factorization(p: &SpacetimePoly) -> Result<FactorizationVerdict, QuantionError> {
    if p.nvars() != 4 {
        return Err(QuantionError::NotSpacetime(p.nvars()));
    }
    let deg = p.degree().unwrap_or(0);
    if deg > 6 {
        return Err(QuantionError::DegreeTooHigh(deg));
    }
    let i = ComplexRational::from_ints(0, 1);
    let nd = |f: &SpacetimePoly| &f.partial(0) + &f.partial(3);
    let nl = |f: &SpacetimePoly| &f.partial(0) - &f.partial(3);
    let nm = |f: &SpacetimePoly| &f.partial(1) + &f.partial(2).scale_by(&i);
    let nm_bar = |f: &SpacetimePoly| &f.partial(1) - &f.partial(2).scale_by(&i);

    let v0 = &nd(p) + &nm(p);
    let v1 = &nm_bar(p) + &nl(p);
    let w0 = &nl(&v0) - &nm(&v1);
    let w1 = &nd(&v1) - &nm_bar(&v0);
    let box_p = dalembertian(p);
    let pass = w0 == box_p && w1 == box_p;
    Ok(FactorizationVerdict {
        box_p,
        factorized: [w0, w1],
        pass,
    })
}

// ---------------------------------------------------------------------------
// C, P, T fixed points

/// Subalgebras fixed by charge (`q† = q`), parity (`q♯ = q`) and time
/// reversal (`(q♯)† = q`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CptClass {
    pub charge: bool,
    pub parity: bool,
    pub time: bool,
}

pub fn cpt_fixed_points<T: Scalar>(q: &Quantion<T>) -> CptClass {
    CptClass {
        charge: q.q_dagger() == *q,
        parity: q.q_sharp() == *q,
        time: q.q_sharp().q_dagger() == *q,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Symmetry {
    Charge,
    Parity,
    Time,
}

/// Random exact member of a fixed-point set.
/// Charge: Hermitian (Minkowski). Parity: `λI`. Time: `[[a, −b*], [b, a*]]`.
pub fn sample_fixed(kind: Symmetry, rng: &mut ChaCha8Rng) -> Quantion<ComplexRational> {
    let mut z = || ComplexRational::from_ints(rng.gen_range(-4..=4), rng.gen_range(-4..=4));
    let (u, v) = (z(), z());
    match kind {
        Symmetry::Charge => {
            let re = |x: &ComplexRational| ComplexRational::real(x.re.clone());
            Quantion::new(re(&u), v.conj(), v, re(&z()))
        }
        Symmetry::Parity => Quantion::scalar(u),
        Symmetry::Time => Quantion::new(u.clone(), v.clone(), -v.conj(), u.conj()),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosureReport {
    pub kind: Symmetry,
    pub pairs: usize,
    /// Products that stayed in the set.
    pub product_closed: usize,
    /// Real combinations `x + r·y` that stayed in the set.
    pub linear_closed: usize,
}

/// Parity and time sets are closed under multiplication; the charge set is
/// only a real vector space.
pub fn cpt_closure(kind: Symmetry, rng: &mut ChaCha8Rng, pairs: usize) -> ClosureReport {
    let member = |q: &Quantion<ComplexRational>| {
        let c = cpt_fixed_points(q);
        match kind {
            Symmetry::Charge => c.charge,
            Symmetry::Parity => c.parity,
            Symmetry::Time => c.time,
        }
    };
    let (mut product_closed, mut linear_closed) = (0, 0);
    for _ in 0..pairs {
        let x = sample_fixed(kind, rng);
        let y = sample_fixed(kind, rng);
        let r = ComplexRational::real(rat(rng.gen_range(-5..=5), rng.gen_range(1..=3)));
        product_closed += member(&x.q_mul(&y)) as usize;
        linear_closed += member(&x.add(&y.scale_by(&r))) as usize;
    }
    ClosureReport {
        kind,
        pairs,
        product_closed,
        linear_closed,
    }
}
