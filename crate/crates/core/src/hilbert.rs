//! Finite-dimensional operator realization and flat-space Kähler structure.
//!
//! On complex matrices the two products are
//!
//! ```text
//! A α B = (i/ħ)(AB − BA)        A σ B = (AB + BA)/2
//! ```
//!
//! and `σ − (iħ/2)α` is the ordinary matrix product.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::{Complex, Complex64};
use num_traits::{Num, One, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{Sampler, TwoProductCarrier};
use crate::phasepoly::HBar;
use crate::poly::Poly;
use crate::scalars::{rat_to_f64, Class, Rational, Scalar};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HilbertError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),
    #[error("Hermitian eigensolver did not converge in {sweeps} sweeps (off-diagonal {off:e})")]
    EigenFailure { sweeps: usize, off: f64 },
    #[error("sampled map is not symplectic: ‖WᵀΩW − Ω‖ = {0:e}")]
    NonSymplecticW(f64),
    #[error("sampled map does not commute with J: ‖WJ − JW‖ = {0:e}")]
    NotJCommuting(f64),
    #[error("state is not normalized: XᵀgX = {0}")]
    NotNormalized(f64),
}

/// Dense row-major matrix.
#[derive(Clone, PartialEq, Debug)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

/// Complex operator on `ℂⁿ`.
pub type OperatorMatrix = Matrix<Complex64>;

impl<T: Num + Clone> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Side length of a square matrix.
    pub fn dim(&self) -> usize {
        debug_assert_eq!(self.rows, self.cols);
        self.rows
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn matmul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows, "inner dimensions");
        let mut out = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)].clone();
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let v = out[(i, j)].clone() + a.clone() * o[(k, j)].clone();
                    out[(i, j)] = v;
                }
            }
        }
        out
    }

    pub fn map(&self, f: impl Fn(&T) -> T) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn scale(&self, s: &T) -> Self {
        self.map(|v| v.clone() * s.clone())
    }

    fn zip(&self, o: &Self, f: impl Fn(&T, &T) -> T) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols), "shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| f(a, b)).collect(),
        }
    }

    /// Kronecker product `self ⊗ o`.
    pub fn kron(&self, o: &Self) -> Self {
        Self::from_fn(self.rows * o.rows, self.cols * o.cols, |i, j| {
            self[(i / o.rows, j / o.cols)].clone() * o[(i % o.rows, j % o.cols)].clone()
        })
    }

    /// `Av` for a column vector.
    pub fn apply(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.cols, "vector length");
        (0..self.rows)
            .map(|i| (0..self.cols).fold(T::zero(), |acc, j| acc + self[(i, j)].clone() * v[j].clone()))
            .collect()
    }
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Num + Clone> Add for &Matrix<T> {
    type Output = Matrix<T>;
    fn add(self, o: &Matrix<T>) -> Matrix<T> {
        self.zip(o, |a, b| a.clone() + b.clone())
    }
}

impl<T: Num + Clone> Sub for &Matrix<T> {
    type Output = Matrix<T>;
    fn sub(self, o: &Matrix<T>) -> Matrix<T> {
        self.zip(o, |a, b| a.clone() - b.clone())
    }
}

impl<T: Num + Clone> Mul for &Matrix<T> {
    type Output = Matrix<T>;
    fn mul(self, o: &Matrix<T>) -> Matrix<T> {
        self.matmul(o)
    }
}

impl<T: Num + Clone + Neg<Output = T>> Neg for &Matrix<T> {
    type Output = Matrix<T>;
    fn neg(self) -> Matrix<T> {
        self.map(|v| -v.clone())
    }
}

impl OperatorMatrix {
    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Self {
        self.map(|v| v.conj())
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.rows == self.cols && (self - &self.adjoint()).max_abs() <= tol
    }

    /// Leading `k × k` block.
    pub fn leading_block(&self, k: usize) -> Self {
        Self::from_fn(k, k, |i, j| self[(i, j)])
    }

    pub fn real(m: &Matrix<f64>) -> Self {
        m.map_into(|v| Complex64::new(*v, 0.0))
    }

    /// Row-major `[re, im]` pairs, for reports.
    pub fn to_pairs(&self) -> Vec<Vec<[f64; 2]>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| [self[(i, j)].re, self[(i, j)].im]).collect())
            .collect()
    }
}

impl<T> Matrix<T> {
    pub fn map_into<U>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }
}

impl Matrix<f64> {
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    /// `exp(A)` by scaling and squaring with a Taylor core.
    pub fn expm(&self) -> Self {
        let n = self.dim();
        let norm: f64 = self.data.iter().map(|v| v.abs()).sum();
        let squarings = if norm > 0.5 {
            (norm / 0.5).log2().ceil() as u32
        } else {
            0
        };
        let a = self.scale(&(0.5f64).powi(squarings as i32));
        let mut term = Matrix::identity(n);
        let mut sum = Matrix::identity(n);
        for k in 1..=20 {
            term = term.matmul(&a).scale(&(1.0 / k as f64));
            sum = &sum + &term;
        }
        for _ in 0..squarings {
            sum = sum.matmul(&sum);
        }
        sum
    }
}

impl fmt::Display for OperatorMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                let v = self[(i, j)];
                write!(f, "{:.6}{:+.6}i", v.re, v.im)?;
            }
        }
        write!(f, "]")
    }
}

fn check_dims(a: &OperatorMatrix, b: &OperatorMatrix) -> Result<(), HilbertError> {
    if a.rows != b.rows || a.cols != b.cols || a.rows != a.cols {
        return Err(HilbertError::DimMismatch(a.rows, b.rows));
    }
    Ok(())
}

/// `(i/ħ)(AB − BA)`.
pub fn op_alpha(a: &OperatorMatrix, b: &OperatorMatrix, hbar: f64) -> Result<OperatorMatrix, HilbertError> {
    check_dims(a, b)?;
    let comm = &a.matmul(b) - &b.matmul(a);
    Ok(comm.scale(&Complex64::new(0.0, 1.0 / hbar)))
}

/// `(AB + BA)/2`.
pub fn op_sigma(a: &OperatorMatrix, b: &OperatorMatrix) -> Result<OperatorMatrix, HilbertError> {
    check_dims(a, b)?;
    let anti = &a.matmul(b) + &b.matmul(a);
    Ok(anti.scale(&Complex64::new(0.5, 0.0)))
}

/// `σ ± (iħ/2)α`; the `−` sign reproduces `AB`.
pub fn op_beta(a: &OperatorMatrix, b: &OperatorMatrix, hbar: f64, sign: i8) -> Result<OperatorMatrix, HilbertError> {
    let s = op_sigma(a, b)?;
    let al = op_alpha(a, b, hbar)?;
    Ok(&s + &al.scale(&Complex64::new(0.0, sign as f64 * hbar / 2.0)))
}

/// Spectral decomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct Eigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector of `values[k]`, phase fixed so its first
    /// non-negligible entry is real and positive.
    pub vectors: OperatorMatrix,
}

impl Eigen {
    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        (0..self.vectors.rows).map(|i| self.vectors[(i, k)]).collect()
    }
}

const MAX_SWEEPS: usize = 100;

/// Cyclic complex Jacobi eigensolver for Hermitian matrices.
///
/// Each rotation first rephases column `q` so that `a_pq` is real, then
/// applies the real symmetric Jacobi rotation on `(p, q)`.
pub fn hermitian_eigen(a: &OperatorMatrix) -> Result<Eigen, HilbertError> {
    let n = a.dim();
    let mut m = a.clone();
    let mut v = OperatorMatrix::identity(n);
    let scale = m.frobenius().max(f64::MIN_POSITIVE);
    let off = |m: &OperatorMatrix| {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += m[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };
    let mut sweeps = 0;
    while off(&m) > 1e-15 * scale {
        if sweeps == MAX_SWEEPS {
            return Err(HilbertError::EigenFailure { sweeps, off: off(&m) });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                let r = apq.norm();
                if r <= 1e-300 {
                    continue;
                }
                let phase = apq / r; // e^{iφ}
                let (app, aqq) = (m[(p, p)].re, m[(q, q)].re);
                let theta = (aqq - app) / (2.0 * r);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // G = D·R: G_pp = c, G_pq = s, G_qp = −s e^{−iφ}, G_qq = c e^{−iφ}.
                let gpp = Complex64::new(c, 0.0);
                let gpq = Complex64::new(s, 0.0);
                let gqp = -phase.conj() * s;
                let gqq = phase.conj() * c;
                for k in 0..n {
                    let (mp, mq) = (m[(k, p)], m[(k, q)]);
                    m[(k, p)] = mp * gpp + mq * gqp;
                    m[(k, q)] = mp * gpq + mq * gqq;
                    let (vp, vq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = vp * gpp + vq * gqp;
                    v[(k, q)] = vp * gpq + vq * gqq;
                }
                for k in 0..n {
                    let (mp, mq) = (m[(p, k)], m[(q, k)]);
                    m[(p, k)] = gpp.conj() * mp + gqp.conj() * mq;
                    m[(q, k)] = gpq.conj() * mp + gqq.conj() * mq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.total_cmp(&m[(j, j)].re).then(i.cmp(&j)));
    let values = order.iter().map(|&i| m[(i, i)].re).collect();
    let mut vectors = OperatorMatrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        let lead = (0..n)
            .map(|i| v[(i, src)])
            .find(|z| z.norm() > 1e-9)
            .unwrap_or(Complex64::one());
        let fix = lead.conj() / lead.norm();
        for i in 0..n {
            vectors[(i, col)] = v[(i, src)] * fix;
        }
    }
    Ok(Eigen { values, vectors })
}

/// `‖T‖ = √λ_max(T†T)`.
pub fn spectral_norm(t: &OperatorMatrix) -> Result<f64, HilbertError> {
    let tt = t.adjoint().matmul(t);
    let e = hermitian_eigen(&tt)?;
    Ok(e.values.last().copied().unwrap_or(0.0).max(0.0).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CStarVerdict {
    pub norm: f64,
    pub norm_of_square: f64,
    pub relative_residual: f64,
    pub pass: bool,
}

/// `‖T†T‖ = ‖T‖²` to relative tolerance `tol`.
pub fn cstar_check(t: &OperatorMatrix, tol: f64) -> Result<CStarVerdict, HilbertError> {
    let norm = spectral_norm(t)?;
    let norm_of_square = spectral_norm(&t.adjoint().matmul(t))?;
    let denom = (norm * norm).max(f64::MIN_POSITIVE);
    let relative_residual = (norm_of_square - norm * norm).abs() / denom;
    Ok(CStarVerdict {
        norm,
        norm_of_square,
        relative_residual,
        pass: relative_residual <= tol || (norm == 0.0 && norm_of_square == 0.0),
    })
}

// ---------------------------------------------------------------------------
// Carrier

/// Hermitian `dim × dim` matrices with commutator and Jordan products.
#[derive(Clone, Debug)]
pub struct MatrixCarrier {
    pub dim: usize,
    hbar: HBar,
    hbar_f: f64,
    pub tolerance: f64,
}

impl MatrixCarrier {
    pub fn new(dim: usize, hbar: HBar) -> Self {
        let hbar_f = rat_to_f64(hbar.value());
        MatrixCarrier {
            dim,
            hbar,
            hbar_f,
            tolerance: 1e-12,
        }
    }
}

impl TwoProductCarrier for MatrixCarrier {
    type Elem = OperatorMatrix;
    type Key = (usize, usize);
    type Coef = Complex64;

    fn class(&self) -> Class {
        Class::Elliptic
    }
    fn hbar(&self) -> &HBar {
        &self.hbar
    }
    fn zero(&self) -> OperatorMatrix {
        OperatorMatrix::zeros(self.dim, self.dim)
    }
    fn unit(&self) -> OperatorMatrix {
        OperatorMatrix::identity(self.dim)
    }
    fn add(&self, a: &OperatorMatrix, b: &OperatorMatrix) -> OperatorMatrix {
        a + b
    }
    fn scale(&self, a: &OperatorMatrix, r: &Rational) -> OperatorMatrix {
        a.scale(&Complex64::from_rational(r))
    }
    fn sigma(&self, a: &OperatorMatrix, b: &OperatorMatrix) -> OperatorMatrix {
        op_sigma(a, b).expect("carrier elements share dimension")
    }
    fn alpha(&self, a: &OperatorMatrix, b: &OperatorMatrix) -> OperatorMatrix {
        op_alpha(a, b, self.hbar_f).expect("carrier elements share dimension")
    }
    fn coords(&self, a: &OperatorMatrix) -> BTreeMap<(usize, usize), Complex64> {
        let mut out = BTreeMap::new();
        for i in 0..a.rows {
            for j in 0..a.cols {
                if !a[(i, j)].is_zero() {
                    out.insert((i, j), a[(i, j)]);
                }
            }
        }
        out
    }
    fn describe(&self, a: &OperatorMatrix) -> String {
        a.to_string()
    }
    fn tolerance(&self) -> f64 {
        self.tolerance
    }
}

/// Random Hermitian matrices with entries of modulus at most `scale`.
#[derive(Clone, Debug)]
pub struct HermitianSampler {
    pub dim: usize,
    pub scale: f64,
}

impl Sampler<OperatorMatrix> for HermitianSampler {
    fn sample(&self, rng: &mut ChaCha8Rng) -> OperatorMatrix {
        random_hermitian(rng, self.dim, self.scale)
    }
}

pub fn random_hermitian(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> OperatorMatrix {
    let mut m = OperatorMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = Complex64::new(rng.gen_range(-scale..=scale), 0.0);
        for j in i + 1..n {
            let z = Complex64::new(rng.gen_range(-scale..=scale), rng.gen_range(-scale..=scale)) / 2f64.sqrt();
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    m
}

pub fn random_complex(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> OperatorMatrix {
    OperatorMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0))
    })
}

// ---------------------------------------------------------------------------
// Kähler structure on ℝ²ⁿ

/// Integer matrices `J`, `Ω`, `g` on `ℝ²ⁿ`, coordinates `q1..qn, p1..pn`.
#[derive(Clone, Debug, PartialEq)]
pub struct KahlerTriple {
    pub n: usize,
    pub j: Matrix<i64>,
    pub omega: Matrix<i64>,
    pub g: Matrix<i64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KahlerVerdict {
    pub j_squared_is_minus_one: bool,
    pub omega_skew: bool,
    pub g_symmetric_positive: bool,
    pub g_equals_omega_j: bool,
    pub omega_equals_jt_g: bool,
}

impl KahlerVerdict {
    pub fn all(&self) -> bool {
        self.j_squared_is_minus_one
            && self.omega_skew
            && self.g_symmetric_positive
            && self.g_equals_omega_j
            && self.omega_equals_jt_g
    }
}

/// `J = [[0, −1],[1, 0]]`, `Ω = [[0, 1],[−1, 0]]`, `g = 1` in `n × n` blocks.
pub fn build_kahler(n: usize) -> KahlerTriple {
    assert!(n >= 1, "at least one degree of freedom");
    let block = |upper: i64, lower: i64| {
        Matrix::from_fn(2 * n, 2 * n, |i, j| {
            if i < n && j == i + n {
                upper
            } else if i >= n && j + n == i {
                lower
            } else {
                0
            }
        })
    };
    KahlerTriple {
        n,
        j: block(-1, 1),
        omega: block(1, -1),
        g: Matrix::identity(2 * n),
    }
}

impl KahlerTriple {
    pub fn validate(&self) -> KahlerVerdict {
        let m = 2 * self.n;
        let minus_one = Matrix::<i64>::identity(m).scale(&-1);
        KahlerVerdict {
            j_squared_is_minus_one: self.j.matmul(&self.j) == minus_one,
            omega_skew: self.omega.transpose() == self.omega.scale(&-1),
            g_symmetric_positive: self.g.transpose() == self.g && leading_minors_positive(&self.g),
            g_equals_omega_j: self.omega.matmul(&self.j) == self.g,
            omega_equals_jt_g: self.j.transpose().matmul(&self.g) == self.omega,
        }
    }

    fn check_len(&self, v: &[i64]) -> Result<(), HilbertError> {
        if v.len() != 2 * self.n {
            return Err(HilbertError::DimMismatch(v.len(), 2 * self.n));
        }
        Ok(())
    }
}

fn bilinear(m: &Matrix<i64>, x: &[i64], y: &[i64]) -> i64 {
    x.iter().zip(m.apply(y)).map(|(a, b)| a * b).sum()
}

/// Sylvester's criterion by exact fraction-free elimination.
fn leading_minors_positive(g: &Matrix<i64>) -> bool {
    let n = g.dim();
    let mut a: Vec<Vec<Rational>> = (0..n)
        .map(|i| (0..n).map(|j| crate::scalars::int(g[(i, j)])).collect())
        .collect();
    for k in 0..n {
        if a[k][k] <= Rational::zero() {
            return false;
        }
        for i in k + 1..n {
            let f = &a[i][k] / &a[k][k];
            for j in k..n {
                let v = &a[k][j] * &f;
                a[i][j] -= v;
            }
        }
    }
    true
}

/// `g(JX, JY) = g(X, Y)`, exact.
pub fn hermitean_property_check(t: &KahlerTriple, x: &[i64], y: &[i64]) -> Result<bool, HilbertError> {
    t.check_len(x)?;
    t.check_len(y)?;
    let (jx, jy) = (t.j.apply(x), t.j.apply(y));
    Ok(bilinear(&t.g, &jx, &jy) == bilinear(&t.g, x, y))
}

/// `⟨X, Y⟩ = XᵀgY + i XᵀΩY`.
pub fn inner_product(t: &KahlerTriple, x: &[i64], y: &[i64]) -> Result<Complex<i64>, HilbertError> {
    t.check_len(x)?;
    t.check_len(y)?;
    Ok(Complex::new(bilinear(&t.g, x, y), bilinear(&t.omega, x, y)))
}

/// Polynomial vector field on `ℝ²ⁿ`: component `i` multiplies `∂/∂xᵢ`.
pub type VectorField = Vec<Poly<Rational>>;

/// Lie bracket `[R, S]ⁱ = Rʲ ∂ⱼSⁱ − Sʲ ∂ⱼRⁱ`.
pub fn lie_bracket(r: &VectorField, s: &VectorField) -> VectorField {
    let m = r.len();
    (0..m)
        .map(|i| {
            let mut acc = Poly::zero(m);
            for j in 0..m {
                acc = acc.add_ref(&r[j].mul_ref(&s[i].partial(j)));
                acc = acc.sub_ref(&s[j].mul_ref(&r[i].partial(j)));
            }
            acc
        })
        .collect()
}

fn apply_j(j: &Matrix<i64>, v: &VectorField) -> VectorField {
    let m = v.len();
    (0..m)
        .map(|i| {
            (0..m).fold(Poly::zero(m), |acc, k| {
                let c = j[(i, k)];
                if c == 0 {
                    acc
                } else {
                    acc.add_ref(&v[k].scale(&crate::scalars::int(c)))
                }
            })
        })
        .collect()
}

/// `N(R, S) = [R, S] + J[JR, S] + J[R, JS] − [JR, JS]` for the constant `J`.
pub fn nijenhuis_constant_j(t: &KahlerTriple, r: &VectorField, s: &VectorField) -> VectorField {
    let j = &t.j;
    let (jr, js) = (apply_j(j, r), apply_j(j, s));
    let a = lie_bracket(r, s);
    let b = apply_j(j, &lie_bracket(&jr, s));
    let c = apply_j(j, &lie_bracket(r, &js));
    let d = lie_bracket(&jr, &js);
    (0..r.len())
        .map(|i| a[i].add_ref(&b[i]).add_ref(&c[i]).sub_ref(&d[i]))
        .collect()
}

/// `exp(K)` for `K = [[A, −B],[B, A]]` with `A` antisymmetric and `B`
/// symmetric: orthogonal, symplectic and commuting with `J`.
pub fn sample_j_commuting_symplectic(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Matrix<f64> {
    let mut a = Matrix::<f64>::zeros(n, n);
    let mut b = Matrix::<f64>::zeros(n, n);
    for i in 0..n {
        b[(i, i)] = rng.gen_range(-scale..=scale);
        for j in i + 1..n {
            let x = rng.gen_range(-scale..=scale);
            a[(i, j)] = x;
            a[(j, i)] = -x;
            let y = rng.gen_range(-scale..=scale);
            b[(i, j)] = y;
            b[(j, i)] = y;
        }
    }
    let k = Matrix::from_fn(2 * n, 2 * n, |i, j| match (i < n, j < n) {
        (true, true) => a[(i, j)],
        (true, false) => -b[(i, j - n)],
        (false, true) => b[(i - n, j)],
        (false, false) => a[(i - n, j - n)],
    });
    k.expm()
}

/// Checks that `W` is symplectic, commutes with `J`, and preserves
/// `XᵀgX = 1`. Returns `|(WX)ᵀg(WX) − 1|`.
pub fn normalization_constraint_check(
    t: &KahlerTriple,
    x: &[f64],
    w: &Matrix<f64>,
    tol: f64,
) -> Result<f64, HilbertError> {
    let g = t.g.map_into(|v| *v as f64);
    let om = t.omega.map_into(|v| *v as f64);
    let j = t.j.map_into(|v| *v as f64);
    let quad = |v: &[f64]| -> f64 { v.iter().zip(g.apply(v)).map(|(a, b)| a * b).sum() };
    let norm0 = quad(x);
    if (norm0 - 1.0).abs() > tol {
        return Err(HilbertError::NotNormalized(norm0));
    }
    let sympl = (&w.transpose().matmul(&om).matmul(w) - &om).max_abs();
    if sympl > tol {
        return Err(HilbertError::NonSymplecticW(sympl));
    }
    let comm = (&w.matmul(&j) - &j.matmul(w)).max_abs();
    if comm > tol {
        return Err(HilbertError::NotJCommuting(comm));
    }
    Ok((quad(&w.apply(x)) - 1.0).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pauli() -> [OperatorMatrix; 3] {
        [
            Matrix::from_rows(vec![vec![c(0., 0.), c(1., 0.)], vec![c(1., 0.), c(0., 0.)]]),
            Matrix::from_rows(vec![vec![c(0., 0.), c(0., -1.)], vec![c(0., 1.), c(0., 0.)]]),
            Matrix::from_rows(vec![vec![c(1., 0.), c(0., 0.)], vec![c(0., 0.), c(-1., 0.)]]),
        ]
    }

    #[test]
    fn pauli_products() {
        let [x, y, z] = pauli();
        assert!(op_alpha(&x, &x, 2.0).unwrap().max_abs() == 0.0);
        let a = op_alpha(&x, &y, 2.0).unwrap();
        assert!((&a + &z).max_abs() < 1e-15);
        assert!((&op_sigma(&x, &x).unwrap() - &OperatorMatrix::identity(2)).max_abs() < 1e-15);
        assert_eq!(op_sigma(&OperatorMatrix::identity(2), &y).unwrap(), y);
    }

    #[test]
    fn dim_mismatch() {
        let a = OperatorMatrix::identity(2);
        let b = OperatorMatrix::identity(3);
        assert_eq!(op_alpha(&a, &b, 1.0), Err(HilbertError::DimMismatch(2, 3)));
        assert!(op_sigma(&a, &b).is_err());
    }

    #[test]
    fn norms_of_simple_matrices() {
        assert!((spectral_norm(&OperatorMatrix::identity(3)).unwrap() - 1.0).abs() < 1e-14);
        let d = Matrix::from_rows(vec![vec![c(3., 0.), c(0., 0.)], vec![c(0., 0.), c(-4., 0.)]]);
        assert!((spectral_norm(&d).unwrap() - 4.0).abs() < 1e-14);
    }

    #[test]
    fn eigen_residuals() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in [1, 2, 5, 9, 16] {
            let a = random_hermitian(&mut rng, n, 3.0);
            let e = hermitian_eigen(&a).unwrap();
            for k in 0..n {
                let v = e.vector(k);
                let av = a.apply(&v);
                let r: f64 = av
                    .iter()
                    .zip(&v)
                    .map(|(x, y)| (x - y * e.values[k]).norm_sqr())
                    .sum::<f64>()
                    .sqrt();
                assert!(r < 1e-11, "n={n} k={k} r={r}");
            }
            let vv = e.vectors.adjoint().matmul(&e.vectors);
            assert!((&vv - &OperatorMatrix::identity(n)).max_abs() < 1e-12);
            assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn kahler_blocks_for_one_dof() {
        let t = build_kahler(1);
        assert_eq!(t.j, Matrix::from_rows(vec![vec![0, -1], vec![1, 0]]));
        assert_eq!(t.omega, Matrix::from_rows(vec![vec![0, 1], vec![-1, 0]]));
        assert_eq!(t.g, Matrix::identity(2));
        for n in 1..=5 {
            assert!(build_kahler(n).validate().all());
        }
    }

    #[test]
    fn inner_product_examples() {
        let t = build_kahler(3);
        let e = |i: usize| {
            let mut v = vec![0; 6];
            v[i] = 1;
            v
        };
        assert_eq!(inner_product(&t, &e(0), &e(0)).unwrap(), Complex::new(1, 0));
        assert_eq!(inner_product(&t, &e(0), &e(3)).unwrap(), Complex::new(0, 1));
        assert!(hermitean_property_check(&t, &e(1), &e(4)).unwrap());
        assert!(inner_product(&t, &e(0), &[1, 2]).is_err());
    }

    #[test]
    fn nijenhuis_on_diagonal_fields() {
        let t = build_kahler(1);
        let q = Poly::<Rational>::var(2, 0);
        let p = Poly::<Rational>::var(2, 1);
        let zero = Poly::zero(2);
        let r = vec![q, zero.clone()];
        let s = vec![zero, p];
        assert!(nijenhuis_constant_j(&t, &r, &s).iter().all(Poly::is_zero));
    }

    #[test]
    fn rotation_preserves_normalization() {
        let t = build_kahler(1);
        let theta = 0.7f64;
        let w = Matrix::from_rows(vec![vec![theta.cos(), -theta.sin()], vec![theta.sin(), theta.cos()]]);
        let x = [0.6, 0.8];
        assert!(normalization_constraint_check(&t, &x, &w, 1e-10).unwrap() < 1e-12);
        assert!(matches!(
            normalization_constraint_check(&t, &[1.0, 1.0], &w, 1e-10),
            Err(HilbertError::NotNormalized(_))
        ));
        let shear = Matrix::from_rows(vec![vec![2.0, 0.0], vec![0.0, 1.0]]);
        assert!(matches!(
            normalization_constraint_check(&t, &x, &shear, 1e-10),
            Err(HilbertError::NonSymplecticW(_))
        ));
    }
}
