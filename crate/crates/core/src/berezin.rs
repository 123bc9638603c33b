//! Coherent-state (Berezin) quantization on `ℝ²` in a truncated Fock basis.
//!
//! Coherent states are expanded in oscillator eigenfunctions by 1D
//! Gauss–Hermite quadrature of the explicit wavefunction
//!
//! ```text
//! Φ(x) = (πħ)^{-1/4} e^{−ipq/2ħ} e^{ipx/ħ} e^{−(x−q)²/2ħ}
//! ```
//!
//! and `Q(f) = ∫ dp dq/(2πħ) f(p, q) |Φ⟩⟨Φ|` is evaluated with a product
//! Gauss–Hermite rule in `u = q/√(2ħ)`, `v = p/√(2ħ)`. Matrix elements of
//! `Q(f)` are Gaussian-weighted polynomials in `(u, v)`, so the rule is exact
//! up to rounding once it has enough nodes per axis.
//!
//! Only the first `N/2` levels (the trusted zone) are compared against
//! oracles; truncation effects collect in the upper half.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::hilbert::{cstar_check, hermitian_eigen, CStarVerdict, HilbertError, OperatorMatrix};
use crate::phasepoly::PhasePoly;
use crate::scalars::{ComplexLike, ComplexRational, Rational};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BerezinError {
    #[error("{nodes} quadrature nodes cannot resolve {levels} Fock levels; need at least {needed}")]
    QuadratureDivergence { nodes: usize, levels: usize, needed: usize },
    #[error("symbol of degree {degree} exceeds the grid's exact degree {max}")]
    DegreeExceedsGrid { degree: u32, max: u32 },
    #[error("at least {min} Fock levels are required, got {got}")]
    TooFewLevels { min: usize, got: usize },
    #[error("grid was built for ħ = {grid}, not {requested}")]
    HBarMismatch { grid: f64, requested: f64 },
    #[error(transparent)]
    Hilbert(#[from] HilbertError),
}

/// Gauss–Hermite rule for `∫ f(x) e^{−x²} dx`.
#[derive(Clone, Debug)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussHermite {
    /// Nodes by Newton iteration on the orthonormal Hermite recurrence.
    pub fn new(m: usize) -> Self {
        assert!(m >= 1, "at least one node");
        let mut x = vec![0.0; m];
        let mut w = vec![0.0; m];
        let pim4 = PI.powf(-0.25);
        let mf = m as f64;
        let mut z = 0.0f64;
        for i in 0..m.div_ceil(2) {
            z = match i {
                0 => (2.0 * mf + 1.0).sqrt() - 1.85575 * (2.0 * mf + 1.0).powf(-1.0 / 6.0),
                1 => z - 1.14 * mf.powf(0.426) / z,
                2 => 1.86 * z - 0.86 * x[0],
                3 => 1.91 * z - 0.91 * x[1],
                _ => 2.0 * z - x[i - 2],
            };
            let mut pp = 0.0;
            for _ in 0..100 {
                let (mut p1, mut p2) = (pim4, 0.0);
                for j in 1..=m {
                    let p3 = p2;
                    p2 = p1;
                    let jf = j as f64;
                    p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
                }
                pp = (2.0 * mf).sqrt() * p2;
                let z1 = z;
                z = z1 - p1 / pp;
                if (z - z1).abs() <= 3e-14 {
                    break;
                }
            }
            x[i] = z;
            x[m - 1 - i] = -z;
            w[i] = 2.0 / (pp * pp);
            w[m - 1 - i] = w[i];
        }
        GaussHermite { nodes: x, weights: w }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Truncated Fock expansion of a coherent state.
#[derive(Clone, Debug)]
pub struct CoherentState {
    pub q: f64,
    pub p: f64,
    pub hbar: f64,
    pub coeffs: Vec<Complex64>,
}

impl CoherentState {
    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `⟨self|other⟩` over the shared truncation.
    pub fn overlap(&self, other: &CoherentState) -> Complex64 {
        self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.conj() * b).sum()
    }
}

/// Minimum Fock truncation accepted.
pub const MIN_LEVELS: usize = 4;
/// Default 1D rule size for coherent-state coefficients.
pub const DEFAULT_COHERENT_NODES: usize = 160;

fn check_levels(n: usize) -> Result<(), BerezinError> {
    if n < MIN_LEVELS {
        return Err(BerezinError::TooFewLevels {
            min: MIN_LEVELS,
            got: n,
        });
    }
    Ok(())
}

/// `⟨n|Φ⟩` for `n < levels`, by quadrature of the explicit wavefunction
/// against oscillator eigenfunctions.
///
/// With `x = √ħ ξ` the integrand is `e^{−ξ²}` times `hₙ(ξ)·e^{ξξ_q − ξ_q²/2}`
/// times phases, where `hₙ` is the polynomial part of the normalized
/// Hermite function and `ξ_q = q/√ħ`.
pub fn coherent_coeffs_with(
    rule: &GaussHermite,
    p: f64,
    q: f64,
    hbar: f64,
    levels: usize,
) -> Result<CoherentState, BerezinError> {
    check_levels(levels)?;
    if rule.len() < 2 * levels {
        return Err(BerezinError::QuadratureDivergence {
            nodes: rule.len(),
            levels,
            needed: 2 * levels,
        });
    }
    let sh = hbar.sqrt();
    let xq = q / sh;
    let pim4 = PI.powf(-0.25);
    let global = Complex64::from_polar(pim4 * hbar.powf(-0.25) * sh * hbar.powf(-0.25), -p * q / (2.0 * hbar));
    let mut coeffs = vec![Complex64::new(0.0, 0.0); levels];
    let mut h = vec![0.0; levels];
    for (&xi, &w) in rule.nodes.iter().zip(&rule.weights) {
        h[0] = pim4;
        if levels > 1 {
            h[1] = 2f64.sqrt() * xi * h[0];
        }
        for n in 1..levels - 1 {
            let nf = n as f64;
            h[n + 1] = (2.0 / (nf + 1.0)).sqrt() * xi * h[n] - (nf / (nf + 1.0)).sqrt() * h[n - 1];
        }
        let env = (xi * xq - xq * xq / 2.0).exp();
        let phase = Complex64::from_polar(w * env, p * xi / sh);
        for n in 0..levels {
            coeffs[n] += phase * h[n];
        }
    }
    for c in &mut coeffs {
        *c *= global;
    }
    Ok(CoherentState { q, p, hbar, coeffs })
}

/// [`coherent_coeffs_with`] on the default 160-node rule.
pub fn coherent_coeffs(p: f64, q: f64, hbar: f64, levels: usize) -> Result<CoherentState, BerezinError> {
    coherent_coeffs_with(&GaussHermite::new(DEFAULT_COHERENT_NODES), p, q, hbar, levels)
}

/// Closed form `e^{−|α|²/2} αⁿ/√n!` with `α = (q + ip)/√(2ħ)`.
pub fn coherent_closed_form(p: f64, q: f64, hbar: f64, levels: usize) -> Vec<Complex64> {
    let a = Complex64::new(q, p) / (2.0 * hbar).sqrt();
    let mut out = Vec::with_capacity(levels);
    let mut c = Complex64::new((-a.norm_sqr() / 2.0).exp(), 0.0);
    for n in 0..levels {
        out.push(c);
        c = c * a / ((n + 1) as f64).sqrt();
    }
    out
}

/// Norm lost by truncating at `levels`: `e^{−|α|²} Σ_{n≥levels} |α|²ⁿ/n!`.
pub fn truncation_bound(p: f64, q: f64, hbar: f64, levels: usize) -> f64 {
    let x = (q * q + p * p) / (2.0 * hbar);
    let mut term = (-x).exp();
    for n in 1..=levels {
        term *= x / n as f64;
    }
    let mut tail = 0.0f64;
    let mut n = levels;
    while n < levels + 2000 {
        tail += term;
        n += 1;
        term *= x / n as f64;
        if term <= tail * 1e-18 {
            break;
        }
    }
    tail
}

/// Product rule over phase space for `Q(f)` matrix elements.
#[derive(Clone, Debug)]
pub struct QuadratureGrid {
    pub hbar: f64,
    pub axis_nodes: usize,
    pub cutoff: f64,
    /// `(q, p, weight)`. Weights carry the `1/π` of the measure and undo the
    /// Gaussian `e^{−u²−v²}` already present in `|⟨n|Φ⟩|²`.
    pub nodes: Vec<(f64, f64, f64)>,
}

impl QuadratureGrid {
    /// Per-axis node count `levels + max_degree + 8` and radial cutoff
    /// `1.5·√(2ħ(levels + max_degree))`.
    pub fn for_levels(hbar: f64, levels: usize, max_degree: u32) -> Self {
        let m = levels + max_degree as usize + 8;
        let cutoff = 1.5 * (2.0 * hbar * (levels + max_degree as usize) as f64).sqrt();
        Self::new(hbar, m, cutoff)
    }

    pub fn new(hbar: f64, axis_nodes: usize, cutoff: f64) -> Self {
        let rule = GaussHermite::new(axis_nodes);
        let s = (2.0 * hbar).sqrt();
        let mut nodes = Vec::with_capacity(axis_nodes * axis_nodes);
        for (&u, &wu) in rule.nodes.iter().zip(&rule.weights) {
            for (&v, &wv) in rule.nodes.iter().zip(&rule.weights) {
                let (q, p) = (s * u, s * v);
                if (q * q + p * p).sqrt() <= cutoff {
                    nodes.push((q, p, wu * wv * (u * u + v * v).exp() / PI));
                }
            }
        }
        QuadratureGrid {
            hbar,
            axis_nodes,
            cutoff,
            nodes,
        }
    }

    /// Largest symbol degree integrated exactly with `levels` Fock levels:
    /// per axis, `deg f + 2(levels − 1) ≤ 2·axis_nodes − 1`.
    pub fn exact_degree(&self, levels: usize) -> u32 {
        (2 * self.axis_nodes as i64 - 1 - 2 * (levels as i64 - 1)).max(0) as u32
    }
}

/// `Q(f)` on the first `levels` Fock states.
pub fn berezin_quantize(
    f: &PhasePoly<ComplexRational>,
    hbar: f64,
    levels: usize,
    grid: &QuadratureGrid,
) -> Result<OperatorMatrix, BerezinError> {
    check_levels(levels)?;
    if (grid.hbar - hbar).abs() > 1e-15 * hbar.max(1.0) {
        return Err(BerezinError::HBarMismatch {
            grid: grid.hbar,
            requested: hbar,
        });
    }
    let degree = f.degree().unwrap_or(0);
    let max = grid.exact_degree(levels);
    if degree > max {
        return Err(BerezinError::DegreeExceedsGrid { degree, max });
    }
    let rule = GaussHermite::new(DEFAULT_COHERENT_NODES.max(2 * levels));
    let fc = f.map(|c| c.to_c64());
    let contributions: Vec<OperatorMatrix> = grid
        .nodes
        .par_iter()
        .map(|&(q, p, w)| {
            let val = fc.eval(&[Complex64::new(q, 0.0), Complex64::new(p, 0.0)]) * w;
            let c = coherent_coeffs_with(&rule, p, q, hbar, levels)
                .expect("levels and rule size were checked")
                .coeffs;
            OperatorMatrix::from_fn(levels, levels, |m, n| val * c[m] * c[n].conj())
        })
        .collect();
    Ok(pairwise_sum(&contributions).unwrap_or_else(|| OperatorMatrix::zeros(levels, levels)))
}

/// `Q(f)` for a real symbol.
pub fn berezin_quantize_real(
    f: &PhasePoly<Rational>,
    hbar: f64,
    levels: usize,
    grid: &QuadratureGrid,
) -> Result<OperatorMatrix, BerezinError> {
    berezin_quantize(&f.map(|c| ComplexRational::real(c.clone())), hbar, levels, grid)
}

/// Deterministic pairwise summation.
fn pairwise_sum(ms: &[OperatorMatrix]) -> Option<OperatorMatrix> {
    match ms.len() {
        0 => None,
        1 => Some(ms[0].clone()),
        n => {
            let (a, b) = ms.split_at(n / 2);
            Some(&pairwise_sum(a)? + &pairwise_sum(b)?)
        }
    }
}

/// Ladder-operator position and momentum on `levels` Fock states:
/// `√(ħ/2)(a + a†)` and `−i√(ħ/2)(a − a†)`.
pub fn ladder_position_momentum(levels: usize, hbar: f64) -> (OperatorMatrix, OperatorMatrix) {
    let s = (hbar / 2.0).sqrt();
    let mut a = OperatorMatrix::zeros(levels, levels);
    for n in 1..levels {
        a[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    let ad = a.adjoint();
    let x = (&a + &ad).scale(&Complex64::new(s, 0.0));
    let p = (&a - &ad).scale(&Complex64::new(0.0, -s));
    (x, p)
}

/// Number of trusted levels for a truncation.
pub fn trusted(levels: usize) -> usize {
    levels / 2
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PositivityVerdict {
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    pub pass: bool,
}

/// Smallest eigenvalue of `Q` on the trusted levels must be `≥ −1e-9`.
/// The caller vouches that the symbol is a sum of squares.
pub fn positivity_preservation(q: &OperatorMatrix) -> Result<PositivityVerdict, BerezinError> {
    let k = trusted(q.dim());
    let e = hermitian_eigen(&q.leading_block(k))?;
    let min = e.values.first().copied().unwrap_or(0.0);
    let max = e.values.last().copied().unwrap_or(0.0);
    Ok(PositivityVerdict {
        min_eigenvalue: min,
        max_eigenvalue: max,
        pass: min >= -1e-9,
    })
}

/// C*-identity on the trusted block of a quantized symbol, relative 1e-8.
pub fn cstar_on_quantized(q: &OperatorMatrix) -> Result<CStarVerdict, BerezinError> {
    Ok(cstar_check(&q.leading_block(trusted(q.dim())), 1e-8)?)
}

/// Outcome of the commutator correspondence on trusted levels.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrespondenceReport {
    /// `max |(i/ħ)[Q(q), Q(p)] − Q({q, p})|` on the trusted block.
    pub residual: f64,
    /// The same with the unit conjugated, `(−i/ħ)[Q(q), Q(p)]`.
    pub residual_conjugate_unit: f64,
    /// Trusted-block value of `(i/ħ)[Q(q), Q(p)]₀₀`.
    pub observed_diagonal: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Compares `(i/ħ)[Q(q), Q(p)]` with `Q({q, p}) = Q(1)` on the trusted levels.
pub fn correspondence_check(
    hbar: f64,
    levels: usize,
    grid: &QuadratureGrid,
    tol: f64,
) -> Result<CorrespondenceReport, BerezinError> {
    let q = crate::phasepoly::q::<Rational>(1, 0);
    let p = crate::phasepoly::p::<Rational>(1, 0);
    let qq = berezin_quantize_real(&q, hbar, levels, grid)?;
    let qp = berezin_quantize_real(&p, hbar, levels, grid)?;
    let pb = crate::phasepoly::poisson(&q, &p).expect("same dof");
    let target = berezin_quantize_real(&pb, hbar, levels, grid)?;
    let comm = &qq.matmul(&qp) - &qp.matmul(&qq);
    let k = trusted(levels);
    let lit = comm.scale(&Complex64::new(0.0, 1.0 / hbar)).leading_block(k);
    let conj = comm.scale(&Complex64::new(0.0, -1.0 / hbar)).leading_block(k);
    let t = target.leading_block(k);
    let residual = (&lit - &t).max_abs();
    let residual_conjugate_unit = (&conj - &t).max_abs();
    Ok(CorrespondenceReport {
        residual,
        residual_conjugate_unit,
        observed_diagonal: lit[(0, 0)].re,
        tolerance: tol,
        pass: residual <= tol,
    })
}

/// `‖Q(1)|trusted − I‖_max`.
pub fn identity_defect(hbar: f64, levels: usize, grid: &QuadratureGrid) -> Result<f64, BerezinError> {
    let one = PhasePoly::<Rational>::one(2);
    let q1 = berezin_quantize_real(&one, hbar, levels, grid)?;
    let k = trusted(levels);
    Ok((&q1.leading_block(k) - &OperatorMatrix::identity(k)).max_abs())
}
