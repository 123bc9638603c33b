//! Environment-assisted invariance and the swap-symmetry equivalence on
//! wavefunction pairs.
//!
//! A pair `(ψ_p, ψ_n)` is held as a joint state on `H_p ⊗ H_n`; product pairs
//! are the special case of Schmidt rank one. The relation
//! `(ψ_p, ψ_n) ∼ (φ_p, φ_n)` is carried by an [`Equivalence`]: two joint
//! states `left` ("ψ_p ⊗ φ_n") and `right` ("φ_p ⊗ ψ_n") with an ancilla `ξ`
//! and a response `U_p ↦ (U_n, U_ξ)` satisfying
//!
//! ```text
//! left ⊗ ξ = (U_p ⊗ U_n ⊗ U_ξ)(right ⊗ ξ)
//! ```
//!
//! for every `U_p` diagonal in the Schmidt basis of `right`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::hilbert::{hermitian_eigen, random_hermitian, HilbertError, OperatorMatrix};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EnvarianceError {
    #[error("state norm deviates from 1 by {0:.3e}")]
    NotNormalized(f64),
    #[error("amplitude count {got} does not match dims product {want}")]
    ShapeMismatch { got: usize, want: usize },
    #[error("operator is off-diagonal in the Schmidt basis by {0:.3e}")]
    NotSchmidtDiagonal(f64),
    #[error("total dimension {dim} exceeds cap {cap}")]
    DimensionBlowup { dim: usize, cap: usize },
    #[error("expected {want} phases or windings, got {got}")]
    PhaseCount { got: usize, want: usize },
    #[error(transparent)]
    Hilbert(#[from] HilbertError),
}

/// Default cap on the total dimension assembled for transitivity.
pub const DEFAULT_DIMENSION_CAP: usize = 256;

const NORM_TOL: f64 = 1e-12;
const DIAGONAL_TOL: f64 = 1e-10;

fn czero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Unit vector on a tensor product, first slot most significant.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    dims: Vec<usize>,
    amps: Vec<Complex64>,
}

impl PureState {
    pub fn new(dims: Vec<usize>, amps: Vec<Complex64>) -> Result<Self, EnvarianceError> {
        let want: usize = dims.iter().product();
        if amps.len() != want {
            return Err(EnvarianceError::ShapeMismatch { got: amps.len(), want });
        }
        let s = PureState { dims, amps };
        let dev = (s.norm() - 1.0).abs();
        if dev > NORM_TOL {
            return Err(EnvarianceError::NotNormalized(dev));
        }
        Ok(s)
    }

    /// Normalizes `amps` first.
    pub fn normalized(dims: Vec<usize>, amps: Vec<Complex64>) -> Result<Self, EnvarianceError> {
        let n = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        Self::new(dims, amps.into_iter().map(|z| z / n).collect())
    }

    /// `|k⟩` in a single space of dimension `d`.
    pub fn basis(d: usize, k: usize) -> Self {
        let mut amps = vec![czero(); d];
        amps[k] = Complex64::new(1.0, 0.0);
        PureState { dims: vec![d], amps }
    }

    pub fn random(rng: &mut ChaCha8Rng, dims: Vec<usize>) -> Self {
        let n: usize = dims.iter().product();
        let amps = (0..n)
            .map(|_| Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)))
            .collect();
        Self::normalized(dims, amps).expect("random amplitudes are nonzero almost surely")
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn total_dim(&self) -> usize {
        self.amps.len()
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn kron(&self, o: &PureState) -> PureState {
        let mut amps = Vec::with_capacity(self.amps.len() * o.amps.len());
        for a in &self.amps {
            for b in &o.amps {
                amps.push(a * b);
            }
        }
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&o.dims);
        PureState { dims, amps }
    }

    /// Applies `op` to one slot.
    pub fn apply_local(&self, slot: usize, op: &OperatorMatrix) -> PureState {
        let d = self.dims[slot];
        assert_eq!((op.rows(), op.cols()), (d, d), "operator shape on slot {slot}");
        let inner: usize = self.dims[slot + 1..].iter().product();
        let outer = self.amps.len() / (d * inner);
        let mut out = vec![czero(); self.amps.len()];
        for l in 0..outer {
            for r in 0..inner {
                for i in 0..d {
                    let mut acc = czero();
                    for j in 0..d {
                        acc += op[(i, j)] * self.amps[(l * d + j) * inner + r];
                    }
                    out[(l * d + i) * inner + r] = acc;
                }
            }
        }
        PureState {
            dims: self.dims.clone(),
            amps: out,
        }
    }

    /// Applies one operator per slot.
    pub fn apply_product(&self, ops: &[&OperatorMatrix]) -> PureState {
        assert_eq!(ops.len(), self.dims.len());
        ops.iter()
            .enumerate()
            .fold(self.clone(), |s, (k, op)| s.apply_local(k, op))
    }

    /// Reorders slots: slot `k` of the result is slot `order[k]` of `self`.
    pub fn permute(&self, order: &[usize]) -> PureState {
        let n = self.dims.len();
        assert_eq!(order.len(), n);
        let dims: Vec<usize> = order.iter().map(|&k| self.dims[k]).collect();
        let mut strides = vec![1usize; n];
        for k in (0..n.saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.dims[k + 1];
        }
        let mut out = vec![czero(); self.amps.len()];
        let mut idx = vec![0usize; n];
        for slot in out.iter_mut() {
            let src: usize = idx.iter().zip(order).map(|(&i, &k)| i * strides[k]).sum();
            *slot = self.amps[src];
            for k in (0..n).rev() {
                idx[k] += 1;
                if idx[k] < dims[k] {
                    break;
                }
                idx[k] = 0;
            }
        }
        PureState { dims, amps: out }
    }

    /// Largest amplitude difference; `None` if shapes differ.
    pub fn distance(&self, o: &PureState) -> Option<f64> {
        if self.dims != o.dims {
            return None;
        }
        Some(
            self.amps
                .iter()
                .zip(&o.amps)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max),
        )
    }

    /// Bipartite coefficient matrix `M` with `ψ = Σ M_ij |i⟩|j⟩`.
    fn coefficient_matrix(&self) -> OperatorMatrix {
        assert_eq!(self.dims.len(), 2, "bipartite state expected");
        let (dp, dn) = (self.dims[0], self.dims[1]);
        OperatorMatrix::from_fn(dp, dn, |i, j| self.amps[i * dn + j])
    }
}

/// `ψ = Σ_k λ_k |a_k⟩|b_k⟩`, with both bases completed to full orthonormal
/// bases. Entries past the Schmidt rank have `λ = 0`.
#[derive(Clone, Debug)]
pub struct SchmidtForm {
    /// Descending, length `min(d_p, d_n)`.
    pub coefficients: Vec<f64>,
    /// Column `k` is `|a_k⟩`.
    pub left: OperatorMatrix,
    /// Column `k` is `|b_k⟩`.
    pub right: OperatorMatrix,
}

/// Below this a Schmidt coefficient is treated as a null sector.
const NULL_SECTOR: f64 = 1e-9;

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Extends orthonormal `vs` to a basis of `ℂᵈ` by Gram–Schmidt over the
/// standard basis in index order, which keeps the choice deterministic.
fn complete_basis(mut vs: Vec<Vec<Complex64>>, d: usize) -> Vec<Vec<Complex64>> {
    for e in 0..d {
        if vs.len() == d {
            break;
        }
        let mut v = vec![czero(); d];
        v[e] = Complex64::new(1.0, 0.0);
        for _ in 0..2 {
            for u in &vs {
                let c = dot(u, &v);
                for (vi, ui) in v.iter_mut().zip(u) {
                    *vi -= c * ui;
                }
            }
        }
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n > 1e-6 {
            vs.push(v.into_iter().map(|z| z / n).collect());
        }
    }
    vs
}

fn from_columns(cols: &[Vec<Complex64>]) -> OperatorMatrix {
    OperatorMatrix::from_fn(cols[0].len(), cols.len(), |i, k| cols[k][i])
}

/// Schmidt decomposition from the eigen-decomposition of `MM†`.
pub fn schmidt(state: &PureState) -> Result<SchmidtForm, EnvarianceError> {
    let m = state.coefficient_matrix();
    let (dp, dn) = (m.rows(), m.cols());
    let e = hermitian_eigen(&m.matmul(&m.adjoint()))?;
    let r = dp.min(dn);
    let mut coefficients = Vec::with_capacity(r);
    let mut lefts = Vec::with_capacity(dp);
    let mut rights = Vec::new();
    let mt = m.transpose();
    for k in (0..dp).rev() {
        let a = e.vector(k);
        lefts.push(a.clone());
        if coefficients.len() == r {
            continue;
        }
        // λ b = Mᵀ ā.
        let conj_a: Vec<Complex64> = a.iter().map(|z| z.conj()).collect();
        let b: Vec<Complex64> = (0..dn).map(|j| (0..dp).map(|i| mt[(j, i)] * conj_a[i]).sum()).collect();
        let lambda = b.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if lambda > NULL_SECTOR {
            rights.push(b.into_iter().map(|z| z / lambda).collect());
            coefficients.push(lambda);
        } else {
            coefficients.push(0.0);
        }
    }
    let rank = rights.len();
    let rights = complete_basis(rights, dn);
    debug_assert_eq!(rights.len(), dn);
    debug_assert!(coefficients[rank..].iter().all(|&l| l == 0.0));
    Ok(SchmidtForm {
        coefficients,
        left: from_columns(&lefts),
        right: from_columns(&rights),
    })
}

impl SchmidtForm {
    pub fn rank(&self) -> usize {
        self.coefficients.iter().filter(|&&l| l > 0.0).count()
    }

    pub fn reconstruct(&self) -> PureState {
        let (dp, dn) = (self.left.rows(), self.right.rows());
        let mut amps = vec![czero(); dp * dn];
        for (k, &l) in self.coefficients.iter().enumerate() {
            for i in 0..dp {
                for j in 0..dn {
                    amps[i * dn + j] += l * self.left[(i, k)] * self.right[(j, k)];
                }
            }
        }
        PureState {
            dims: vec![dp, dn],
            amps,
        }
    }

    /// `|1 − Σλ²|` and the worst deviation of either basis from orthonormal.
    pub fn defects(&self) -> (f64, f64) {
        let s: f64 = self.coefficients.iter().map(|l| l * l).sum();
        let ortho = |b: &OperatorMatrix| (&b.adjoint().matmul(b) - &OperatorMatrix::identity(b.cols())).max_abs();
        ((1.0 - s).abs(), ortho(&self.left).max(ortho(&self.right)))
    }

    /// `U_p = Σ_k e^{iφ_k} |a_k⟩⟨a_k|` over the full left basis.
    pub fn phase_unitary(&self, phases: &[f64]) -> Result<OperatorMatrix, EnvarianceError> {
        let dp = self.left.rows();
        if phases.len() != dp {
            return Err(EnvarianceError::PhaseCount {
                got: phases.len(),
                want: dp,
            });
        }
        let d = OperatorMatrix::from_fn(dp, dp, |i, j| if i == j { Complex64::cis(phases[i]) } else { czero() });
        Ok(self.left.matmul(&d).matmul(&self.left.adjoint()))
    }

    /// Eigenphases of `U_p` in the left Schmidt basis.
    pub fn phases_of(&self, u_p: &OperatorMatrix) -> Result<Vec<f64>, EnvarianceError> {
        let d = self.left.adjoint().matmul(u_p).matmul(&self.left);
        let mut off = 0.0f64;
        for i in 0..d.rows() {
            for j in 0..d.cols() {
                if i != j {
                    off = off.max(d[(i, j)].norm());
                }
            }
            off = off.max((d[(i, i)].norm() - 1.0).abs());
        }
        if off > DIAGONAL_TOL {
            return Err(EnvarianceError::NotSchmidtDiagonal(off));
        }
        Ok((0..d.rows()).map(|k| d[(k, k)].arg()).collect())
    }
}

/// `e^{−i(φ + 2πl)}`. The integer turn `l` is reduced before any floating
/// point, so every winding yields the same bits.
pub fn counter_phase(phi: f64, winding: i64) -> Complex64 {
    let turns = winding.rem_euclid(1) as f64;
    Complex64::cis(-(phi + TAU * turns))
}

/// `U_n = Σ_k e^{−i(φ_k + 2πl_k)} |b_k⟩⟨b_k|` over Schmidt sectors, identity on
/// the null sectors of `H_n`.
pub fn counter_unitary(
    s: &SchmidtForm,
    u_p: &OperatorMatrix,
    windings: &[i64],
) -> Result<OperatorMatrix, EnvarianceError> {
    let phases = s.phases_of(u_p)?;
    let r = s.rank();
    if windings.len() < r {
        return Err(EnvarianceError::PhaseCount {
            got: windings.len(),
            want: r,
        });
    }
    let dn = s.right.rows();
    let diag: Vec<Complex64> = (0..dn)
        .map(|k| {
            if k < r {
                counter_phase(phases[k], windings[k])
            } else {
                Complex64::new(1.0, 0.0)
            }
        })
        .collect();
    let d = OperatorMatrix::from_fn(dn, dn, |i, j| if i == j { diag[i] } else { czero() });
    Ok(s.right.matmul(&d).matmul(&s.right.adjoint()))
}

/// `max |(U_p ⊗ U_n)ψ − ψ|` with `U_n` from [`counter_unitary`].
pub fn verify_reflexivity(state: &PureState, u_p: &OperatorMatrix, windings: &[i64]) -> Result<f64, EnvarianceError> {
    let s = schmidt(state)?;
    let u_n = counter_unitary(&s, u_p, windings)?;
    Ok(state.apply_product(&[u_p, &u_n]).distance(state).expect("same shape"))
}

/// Unitary `exp(iH)` for a random Hermitian `H`.
pub fn random_unitary(rng: &mut ChaCha8Rng, d: usize) -> Result<OperatorMatrix, EnvarianceError> {
    let e = hermitian_eigen(&random_hermitian(rng, d, 2.0))?;
    let diag = OperatorMatrix::from_fn(d, d, |i, j| if i == j { Complex64::cis(e.values[i]) } else { czero() });
    Ok(e.vectors.matmul(&diag).matmul(&e.vectors.adjoint()))
}

/// Random unitary diagonal in the left Schmidt basis of `s`.
pub fn random_schmidt_diagonal(rng: &mut ChaCha8Rng, s: &SchmidtForm) -> OperatorMatrix {
    let phases: Vec<f64> = (0..s.left.rows())
        .map(|_| rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI))
        .collect();
    s.phase_unitary(&phases).expect("phase count matches")
}

/// One instance of `(ψ_p, ψ_n) ∼ (φ_p, φ_n)`.
///
/// `left = (I ⊗ twist) right`; the response to `U_p` is
/// `U_n = e^{−iγ}·twist·counter(U_p)` and `U_ξ = e^{iγ}|ξ⟩⟨ξ| + (I − |ξ⟩⟨ξ|)`,
/// where `γ` is the eigenphase of `U_p` on the leading Schmidt sector. The
/// ancilla therefore carries a phase that `U_n` alone does not restore.
#[derive(Clone, Debug)]
pub struct Equivalence {
    pub left: PureState,
    pub right: PureState,
    pub ancilla: PureState,
    pub twist: OperatorMatrix,
    pub schmidt: SchmidtForm,
    pub windings: Vec<i64>,
}

#[derive(Clone, Debug)]
pub struct Response {
    pub u_n: OperatorMatrix,
    pub u_xi: OperatorMatrix,
}

impl Equivalence {
    pub fn new(
        right: PureState,
        twist: OperatorMatrix,
        ancilla: PureState,
        windings: Vec<i64>,
    ) -> Result<Self, EnvarianceError> {
        let left = right.apply_local(1, &twist);
        let schmidt = schmidt(&right)?;
        Ok(Equivalence {
            left,
            right,
            ancilla,
            twist,
            schmidt,
            windings,
        })
    }

    /// Random right state, twist, ancilla and windings in `{0, 1, 2}`.
    pub fn random(rng: &mut ChaCha8Rng, dp: usize, dn: usize, dxi: usize) -> Result<Self, EnvarianceError> {
        let right = PureState::random(rng, vec![dp, dn]);
        Self::random_over(rng, right, dxi)
    }

    /// Random twist, ancilla and windings around a given right state.
    pub fn random_over(rng: &mut ChaCha8Rng, right: PureState, dxi: usize) -> Result<Self, EnvarianceError> {
        let dn = right.dims()[1];
        let twist = random_unitary(rng, dn)?;
        let ancilla = PureState::random(rng, vec![dxi]);
        let windings = (0..dn.min(right.dims()[0])).map(|_| rng.gen_range(0..=2)).collect();
        Self::new(right, twist, ancilla, windings)
    }

    pub fn respond(&self, u_p: &OperatorMatrix) -> Result<Response, EnvarianceError> {
        let counter = counter_unitary(&self.schmidt, u_p, &self.windings)?;
        let gamma = self.schmidt.phases_of(u_p)?[0];
        let u_n = self.twist.matmul(&counter).scale(&Complex64::cis(-gamma));
        let xi = self.ancilla.amps();
        let d = xi.len();
        let g = Complex64::cis(gamma) - Complex64::new(1.0, 0.0);
        let u_xi = OperatorMatrix::from_fn(d, d, |i, j| {
            let id = if i == j { Complex64::new(1.0, 0.0) } else { czero() };
            id + g * xi[i] * xi[j].conj()
        });
        Ok(Response { u_n, u_xi })
    }

    /// `max |left ⊗ ξ − (U_p ⊗ U_n ⊗ U_ξ)(right ⊗ ξ)|`.
    pub fn residual(&self, u_p: &OperatorMatrix) -> Result<f64, EnvarianceError> {
        let r = self.respond(u_p)?;
        let lhs = self.left.kron(&self.ancilla);
        let rhs = self.right.kron(&self.ancilla).apply_product(&[u_p, &r.u_n, &r.u_xi]);
        Ok(lhs.distance(&rhs).expect("same shape"))
    }
}

/// How the symmetric construction inverts the recorded response.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InverseRule {
    /// `V_n = U_n(V_p⁻¹)⁻¹`.
    Adjoint,
    /// Entrywise conjugate in place of the inverse; a negative control.
    EntrywiseConjugate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetryVerdict {
    pub samples: usize,
    pub max_hypothesis_residual: f64,
    pub max_residual: f64,
    pub pass: bool,
}

/// Builds the reversed relation `right ⊗ ξ = (V_p ⊗ V_n ⊗ V_ξ)(left ⊗ ξ)` with
/// `V_n = U_n(V_p⁻¹)⁻¹`, `V_ξ = U_ξ(V_p⁻¹)⁻¹` and checks it for every `V_p`.
pub fn verify_symmetry(
    eq: &Equivalence,
    v_ps: &[OperatorMatrix],
    rule: InverseRule,
) -> Result<SymmetryVerdict, EnvarianceError> {
    let invert = |m: &OperatorMatrix| match rule {
        InverseRule::Adjoint => m.adjoint(),
        InverseRule::EntrywiseConjugate => m.conj(),
    };
    let (mut hyp, mut worst) = (0.0f64, 0.0f64);
    for v_p in v_ps {
        let u_p = v_p.adjoint();
        hyp = hyp.max(eq.residual(&u_p)?);
        let r = eq.respond(&u_p)?;
        let (v_n, v_xi) = (invert(&r.u_n), invert(&r.u_xi));
        let lhs = eq.right.kron(&eq.ancilla);
        let rhs = eq.left.kron(&eq.ancilla).apply_product(&[v_p, &v_n, &v_xi]);
        worst = worst.max(lhs.distance(&rhs).expect("same shape"));
    }
    Ok(SymmetryVerdict {
        samples: v_ps.len(),
        max_hypothesis_residual: hyp,
        max_residual: worst,
        pass: hyp <= 1e-12 && worst <= 1e-12,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransitivityVerdict {
    pub samples: usize,
    pub total_dim: usize,
    pub max_hypothesis_residual: f64,
    /// Both sides compared position by position as displayed.
    pub max_literal_residual: f64,
    /// After exchanging the two `H_p` factors and the two `H_n` factors.
    pub max_residual: f64,
    pub pass: bool,
}

/// Slot order of `first.left ⊗ ξ ⊗ second.left ⊗ η` read as
/// `a ⊗ f ⊗ (d ⊗ c ⊗ ξ ⊗ η)`. Slots: 0 = a, 1 = d, 2 = ξ, 3 = c, 4 = f, 5 = η.
const LHS_ORDER: [usize; 6] = [0, 4, 1, 3, 2, 5];
/// Slot order of `first.right ⊗ ξ ⊗ second.right ⊗ η` read as
/// `e ⊗ b ⊗ χ` with `χ = d ⊗ c ⊗ ξ ⊗ η`. Slots: 0 = c, 1 = b, 2 = ξ, 3 = e,
/// 4 = d, 5 = η.
const RHS_ORDER: [usize; 6] = [3, 1, 4, 0, 2, 5];

/// Aligns the displayed right side with the displayed left side: positions
/// 0 and 3 hold the two `H_p` factors, 1 and 2 the two `H_n` factors.
const SWAP_ALIGN: [usize; 6] = [3, 2, 1, 0, 4, 5];

/// Checks `a ⊗ f ⊗ χ = (W_p e) ⊗ (W_n b) ⊗ (W_χ χ)` with `χ = d ⊗ c ⊗ ξ ⊗ η`,
/// `W_n = U_n(W_p)` and `W_χ = V_n(W_p) ⊗ W_p ⊗ U_ξ ⊗ V_η`, given
/// `first: (a, b) ∼ (c, d)` and `second: (c, d) ∼ (e, f)`.
///
/// The two sides agree only up to exchanging the like factors (`a` sits where
/// `U_p c` does, `f` where `V_n d` does), so `pass` is judged after that swap
/// and the position-by-position residual is reported alongside.
///
/// Every `W_p` must be Schmidt-diagonal for both `first.right` and
/// `second.right`.
pub fn verify_transitivity(
    first: &Equivalence,
    second: &Equivalence,
    w_ps: &[OperatorMatrix],
    cap: usize,
) -> Result<TransitivityVerdict, EnvarianceError> {
    let total_dim =
        first.left.total_dim() * first.ancilla.total_dim() * second.left.total_dim() * second.ancilla.total_dim();
    if total_dim > cap {
        return Err(EnvarianceError::DimensionBlowup { dim: total_dim, cap });
    }
    let lhs = first
        .left
        .kron(&first.ancilla)
        .kron(&second.left)
        .kron(&second.ancilla)
        .permute(&LHS_ORDER);
    let base = first
        .right
        .kron(&first.ancilla)
        .kron(&second.right)
        .kron(&second.ancilla)
        .permute(&RHS_ORDER);
    let (mut hyp, mut literal, mut worst) = (0.0f64, 0.0f64, 0.0f64);
    for w_p in w_ps {
        hyp = hyp.max(first.residual(w_p)?).max(second.residual(w_p)?);
        let u = first.respond(w_p)?;
        let v = second.respond(w_p)?;
        let rhs = base.apply_product(&[w_p, &u.u_n, &v.u_n, w_p, &u.u_xi, &v.u_xi]);
        literal = literal.max(lhs.distance(&rhs).expect("same shape"));
        worst = worst.max(
            lhs.distance(&rhs.permute(&SWAP_ALIGN))
                .expect("like factors share dims"),
        );
    }
    Ok(TransitivityVerdict {
        samples: w_ps.len(),
        total_dim,
        max_hypothesis_residual: hyp,
        max_literal_residual: literal,
        max_residual: worst,
        pass: hyp <= 1e-12 && worst <= 1e-12,
    })
}

/// Two equivalences whose right states share a left Schmidt basis, so the
/// same `W_p` is admissible for both.
pub fn random_chain(
    rng: &mut ChaCha8Rng,
    dp: usize,
    dn: usize,
    dxi: usize,
    deta: usize,
) -> Result<(Equivalence, Equivalence), EnvarianceError> {
    let first = Equivalence::random(rng, dp, dn, dxi)?;
    // Same left basis, fresh coefficients and right basis.
    let basis = &first.schmidt.left;
    let other = random_unitary(rng, dn)?;
    let r = dp.min(dn);
    let mut lambdas: Vec<f64> = (0..r).map(|_| rng.gen_range(0.1..1.0)).collect();
    let n = lambdas.iter().map(|l| l * l).sum::<f64>().sqrt();
    lambdas.iter_mut().for_each(|l| *l /= n);
    let mut amps = vec![czero(); dp * dn];
    for (k, l) in lambdas.iter().enumerate() {
        for i in 0..dp {
            for j in 0..dn {
                amps[i * dn + j] += *l * basis[(i, k)] * other[(j, k)];
            }
        }
    }
    let right = PureState::normalized(vec![dp, dn], amps)?;
    let second = Equivalence::random_over(rng, right, deta)?;
    Ok((first, second))
}

/// Sample `W_p` admissible for a [`random_chain`] pair.
pub fn random_chain_unitary(rng: &mut ChaCha8Rng, first: &Equivalence) -> OperatorMatrix {
    random_schmidt_diagonal(rng, &first.schmidt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn bell() -> PureState {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        PureState::new(
            vec![2, 2],
            vec![Complex64::new(h, 0.0), czero(), czero(), Complex64::new(h, 0.0)],
        )
        .unwrap()
    }

    #[test]
    fn product_and_bell_spectra() {
        let p = PureState::basis(2, 0).kron(&PureState::basis(3, 2));
        let s = schmidt(&p).unwrap();
        assert_eq!(s.rank(), 1);
        assert!((s.coefficients[0] - 1.0).abs() < 1e-14);
        let b = schmidt(&bell()).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!(b.coefficients.iter().all(|l| (l - h).abs() < 1e-14));
    }

    #[test]
    fn zero_phases_give_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let psi = PureState::random(&mut rng, vec![3, 2]);
        let s = schmidt(&psi).unwrap();
        let u_p = s.phase_unitary(&[0.0; 3]).unwrap();
        let u_n = counter_unitary(&s, &u_p, &[0, 0]).unwrap();
        assert!((&u_n - &OperatorMatrix::identity(2)).max_abs() < 1e-14);
    }

    #[test]
    fn bell_counter_phases() {
        let s = schmidt(&bell()).unwrap();
        let theta = 0.7;
        let u_p = s.phase_unitary(&[theta, -theta]).unwrap();
        assert!(verify_reflexivity(&bell(), &u_p, &[0, 1]).unwrap() < 1e-14);
    }

    #[test]
    fn rejects_non_diagonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let psi = PureState::random(&mut rng, vec![2, 2]);
        let s = schmidt(&psi).unwrap();
        let u = random_unitary(&mut rng, 2).unwrap();
        assert!(matches!(
            counter_unitary(&s, &u, &[0, 0]),
            Err(EnvarianceError::NotSchmidtDiagonal(_))
        ));
    }

    #[test]
    fn permute_and_apply() {
        let a = PureState::basis(2, 1);
        let b = PureState::basis(3, 2);
        let ab = a.kron(&b);
        assert_eq!(ab.permute(&[1, 0]), b.kron(&a));
        let x = OperatorMatrix::from_rows(vec![
            vec![czero(), Complex64::new(1.0, 0.0)],
            vec![Complex64::new(1.0, 0.0), czero()],
        ]);
        assert_eq!(ab.apply_local(0, &x), PureState::basis(2, 0).kron(&b));
    }

    #[test]
    fn blowup_guard() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (f, s) = random_chain(&mut rng, 4, 4, 2, 1).unwrap();
        assert!(matches!(
            verify_transitivity(&f, &s, &[], DEFAULT_DIMENSION_CAP),
            Err(EnvarianceError::DimensionBlowup { dim: 512, cap: 256 })
        ));
    }
}
