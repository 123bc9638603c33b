//! Sparse multivariate polynomials over a [`Scalar`] ring.
//!
//! Storage is normalized: no zero coefficients are kept, so structural
//! equality is mathematical equality for exact rings.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::One;

use crate::scalars::{int, Rational, Scalar};

/// Exponent vector, one entry per variable.
pub type Monomial = Vec<u32>;

#[derive(Clone, PartialEq, Debug)]
pub struct Poly<S> {
    nvars: usize,
    terms: BTreeMap<Monomial, S>,
}

impl<S: Scalar> Poly<S> {
    pub fn zero(nvars: usize) -> Self {
        Poly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: S) -> Self {
        Self::monomial(nvars, vec![0; nvars], c)
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, S::one())
    }

    /// `c · x^exps`. Panics if `exps.len() != nvars`.
    pub fn monomial(nvars: usize, exps: Monomial, c: S) -> Self {
        assert_eq!(exps.len(), nvars, "exponent vector length");
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(exps, c);
        }
        p
    }

    /// The coordinate function `x_i`.
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(nvars, e, S::one())
    }

    /// Builds from `(exponents, coefficient)` pairs, merging duplicates.
    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, S)>) -> Self {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent vector length");
            p.add_term(e, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, S> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exps: &[u32]) -> S {
        self.terms.get(exps).cloned().unwrap_or_else(S::zero)
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// Highest power of variable `i` that occurs.
    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.keys().map(|e| e[i]).max().unwrap_or(0)
    }

    fn add_term(&mut self, e: Monomial, c: S) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().add_ref(&c);
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    fn check_vars(&self, other: &Self) {
        assert_eq!(self.nvars, other.nvars, "polynomials over different variable sets");
    }

    pub fn add_ref(&self, other: &Self) -> Self {
        self.check_vars(other);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub_ref(&self, other: &Self) -> Self {
        self.check_vars(other);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone().neg());
        }
        out
    }

    pub fn mul_ref(&self, other: &Self) -> Self {
        self.check_vars(other);
        let mut out = Self::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Monomial = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca.mul_ref(cb));
            }
        }
        out
    }

    pub fn scale(&self, r: &Rational) -> Self {
        self.map(|c| c.scale(r))
    }

    pub fn scale_by(&self, s: &S) -> Self {
        self.map(|c| c.mul_ref(s))
    }

    /// Applies `f` coefficientwise, dropping terms that become zero.
    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Poly<T> {
        let mut out = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            let v = f(c);
            if !v.is_zero() {
                out.terms.insert(e.clone(), v);
            }
        }
        out
    }

    /// Coefficientwise involution.
    pub fn conj(&self) -> Self {
        self.map(S::conj)
    }

    /// `∂^order f`, where `order[i]` is the number of derivatives in `x_i`.
    pub fn derivative(&self, order: &[u32]) -> Self {
        assert_eq!(order.len(), self.nvars, "derivative order length");
        let mut out = Self::zero(self.nvars);
        'terms: for (e, c) in &self.terms {
            let mut factor = Rational::one();
            let mut ne = e.clone();
            for (i, &k) in order.iter().enumerate() {
                if k > e[i] {
                    continue 'terms;
                }
                for j in 0..k {
                    factor *= int((e[i] - j) as i64);
                }
                ne[i] = e[i] - k;
            }
            out.add_term(ne, c.scale(&factor));
        }
        out
    }

    /// `∂f/∂x_i`.
    pub fn partial(&self, i: usize) -> Self {
        let mut order = vec![0; self.nvars];
        order[i] = 1;
        self.derivative(&order)
    }

    /// Evaluates at a point.
    pub fn eval(&self, point: &[S]) -> S {
        assert_eq!(point.len(), self.nvars, "evaluation point length");
        let mut acc = S::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &k) in point.iter().zip(e) {
                for _ in 0..k {
                    t = t.mul_ref(x);
                }
            }
            acc = acc.add_ref(&t);
        }
        acc
    }

    /// Canonical text with caller-supplied variable names.
    ///
    /// Terms appear in lexicographic exponent order, joined by ` + `; each term
    /// is `coef * x^a * y^b` with exponent 1 printed bare. The zero polynomial
    /// prints as `0`.
    pub fn to_text_with(&self, name: impl Fn(usize) -> String) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut parts = Vec::with_capacity(self.terms.len());
        for (e, c) in &self.terms {
            let mut s = c.to_string();
            for (i, &k) in e.iter().enumerate() {
                match k {
                    0 => {}
                    1 => s.push_str(&format!(" * {}", name(i))),
                    _ => s.push_str(&format!(" * {}^{}", name(i), k)),
                }
            }
            parts.push(s);
        }
        parts.join(" + ")
    }
}

/// Variable `i` of a phase space with `nvars = 2n` coordinates: `q1..qn`
/// followed by `p1..pn`.
pub fn phase_var_name(nvars: usize, i: usize) -> String {
    let n = nvars / 2;
    if nvars.is_multiple_of(2) && n > 0 {
        if i < n {
            format!("q{}", i + 1)
        } else {
            format!("p{}", i - n + 1)
        }
    } else {
        format!("x{i}")
    }
}

impl<S: Scalar> fmt::Display for Poly<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.nvars;
        f.write_str(&self.to_text_with(|i| phase_var_name(n, i)))
    }
}

impl<S: Scalar> Add for Poly<S> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        self.add_ref(&o)
    }
}

impl<S: Scalar> Sub for Poly<S> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self.sub_ref(&o)
    }
}

impl<S: Scalar> Mul for Poly<S> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        self.mul_ref(&o)
    }
}

impl<S: Scalar> Neg for Poly<S> {
    type Output = Self;
    fn neg(self) -> Self {
        self.map(|c| c.clone().neg())
    }
}

impl<'a, S: Scalar> Add<&'a Poly<S>> for &'a Poly<S> {
    type Output = Poly<S>;
    fn add(self, o: &Poly<S>) -> Poly<S> {
        self.add_ref(o)
    }
}

impl<'a, S: Scalar> Sub<&'a Poly<S>> for &'a Poly<S> {
    type Output = Poly<S>;
    fn sub(self, o: &Poly<S>) -> Poly<S> {
        self.sub_ref(o)
    }
}

impl<'a, S: Scalar> Mul<&'a Poly<S>> for &'a Poly<S> {
    type Output = Poly<S>;
    fn mul(self, o: &Poly<S>) -> Poly<S> {
        self.mul_ref(o)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::rat;

    type P = Poly<Rational>;

    #[test]
    fn normalization_drops_cancelled_terms() {
        let x = P::var(2, 0);
        let d = &x - &x;
        assert!(d.is_zero());
        assert_eq!(d.to_string(), "0");
    }

    #[test]
    fn multiplication_and_derivative() {
        let q = P::var(2, 0);
        let p = P::var(2, 1);
        let f = &(&q * &q) * &p; // q²p
        assert_eq!(f.derivative(&[2, 1]), P::constant(2, int(2)));
        assert_eq!(f.partial(0), (&q * &p).scale(&int(2)));
        assert!(f.derivative(&[3, 0]).is_zero());
        assert_eq!(f.degree(), Some(3));
    }

    #[test]
    fn canonical_text() {
        let q = P::var(2, 0);
        let p = P::var(2, 1);
        let f = &(&(&q * &q) * &p).scale(&rat(-3, 2)) + &P::one(2);
        assert_eq!(f.to_string(), "1 + -3/2 * q1^2 * p1");
        let g = &q + &p;
        assert_eq!(g.to_string(), "1 * p1 + 1 * q1");
    }

    #[test]
    fn evaluation() {
        let q = P::var(2, 0);
        let p = P::var(2, 1);
        let f = &(&q * &p) + &P::constant(2, int(5));
        assert_eq!(f.eval(&[int(2), int(3)]), int(11));
    }
}
