//! Sparse multivariate complex polynomials and monomial indexing.
//!
//! Monomials of `C^n` are listed degree first, then lexicographically on the
//! exponent vector within each degree, giving a bijection between positive
//! integer positions and exponent vectors. For n = 2 the listing starts
//! (0,0), (0,1), (1,0), (0,2), (1,1), (2,0), ...

mod exact;
mod normed;

pub use exact::{ExactPoly, RatComplex};
pub use normed::{Domain, NormedPoly, SupNorm, SupNormBudget};

use crate::error::{ConvError, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Binomial coefficient with u128 intermediates.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as u64
}

/// `m_k`: number of monomials of order up to k in n variables, and
/// `l_k = sum_q q (m_q - m_{q-1}) = n * binom(n+k, k-1)`.
pub fn monomial_counts(n: usize, k: u32) -> (u64, u64) {
    let n64 = n as u64;
    let k64 = k as u64;
    let m_k = binomial(n64 + k64, k64);
    let l_k = if k == 0 {
        0
    } else {
        n64 * binomial(n64 + k64, k64 - 1)
    };
    (m_k, l_k)
}

/// Number of exponent vectors of n variables with |alpha| = k.
fn compositions(k: u32, n: usize) -> u64 {
    if n == 0 {
        return if k == 0 { 1 } else { 0 };
    }
    binomial(k as u64 + n as u64 - 1, n as u64 - 1)
}

/// A monomial exponent vector together with its 1-based position in the
/// degree-graded lexicographic listing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialIndex {
    pub exponent: Vec<u32>,
    pub position: u64,
}

/// Exponent vector at 1-based position `i` of the listing for n variables.
pub fn monomial_at(n: usize, i: u64) -> MonomialIndex {
    assert!(n >= 1 && i >= 1, "monomial_at requires n >= 1, i >= 1");
    let mut degree = 0u32;
    let mut below = 0u64; // m_{degree-1}
    loop {
        let block = compositions(degree, n);
        if i <= below + block {
            let exponent = unrank_in_block(degree, n, i - below - 1);
            return MonomialIndex {
                exponent,
                position: i,
            };
        }
        below += block;
        degree += 1;
    }
}

/// Position of an exponent vector in the listing (inverse of `monomial_at`).
pub fn index_of(alpha: &[u32]) -> u64 {
    let n = alpha.len();
    assert!(n >= 1);
    let degree: u32 = alpha.iter().sum();
    let below: u64 = (0..degree).map(|d| compositions(d, n)).sum();
    below + rank_in_block(alpha) + 1
}

fn rank_in_block(alpha: &[u32]) -> u64 {
    let n = alpha.len();
    if n <= 1 {
        return 0;
    }
    let k: u32 = alpha.iter().sum();
    let mut rank = 0u64;
    for c in 0..alpha[0] {
        rank += compositions(k - c, n - 1);
    }
    rank + rank_in_block(&alpha[1..])
}

fn unrank_in_block(k: u32, n: usize, mut rank: u64) -> Vec<u32> {
    if n == 1 {
        return vec![k];
    }
    for c in 0..=k {
        let count = compositions(k - c, n - 1);
        if rank < count {
            let mut v = vec![c];
            v.extend(unrank_in_block(k - c, n - 1, rank));
            return v;
        }
        rank -= count;
    }
    unreachable!("rank exceeds block size")
}

/// All exponent vectors of n variables with |alpha| = k, in block order.
pub fn exponents_of_degree(n: usize, k: u32) -> Vec<Vec<u32>> {
    let count = compositions(k, n);
    (0..count).map(|r| unrank_in_block(k, n, r)).collect()
}

#[derive(Serialize, Deserialize)]
struct TermDto {
    alpha: Vec<u32>,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct PolyDto {
    n: usize,
    terms: Vec<TermDto>,
}

/// Sparse polynomial over C^n. Zero coefficients are never stored; the zero
/// polynomial has degree -1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolyDto", into = "PolyDto")]
pub struct Polynomial {
    n: usize,
    terms: BTreeMap<Vec<u32>, Complex64>,
}

impl TryFrom<PolyDto> for Polynomial {
    type Error = ConvError;
    fn try_from(dto: PolyDto) -> Result<Self> {
        let mut p = Polynomial::zero(dto.n);
        for t in dto.terms {
            if t.alpha.len() != dto.n {
                return Err(ConvError::DimensionMismatch {
                    expected: dto.n,
                    got: t.alpha.len(),
                });
            }
            p.add_term(&t.alpha, Complex64::new(t.re, t.im));
        }
        Ok(p)
    }
}

impl From<Polynomial> for PolyDto {
    fn from(p: Polynomial) -> Self {
        PolyDto {
            n: p.n,
            terms: p
                .terms
                .into_iter()
                .map(|(alpha, c)| TermDto {
                    alpha,
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        }
    }
}

impl Polynomial {
    pub fn zero(n: usize) -> Self {
        Polynomial {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, c: Complex64) -> Self {
        let mut p = Self::zero(n);
        p.add_term(&vec![0; n], c);
        p
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, Complex64::new(1.0, 0.0))
    }

    /// The coordinate polynomial `x_{var}`.
    pub fn variable(n: usize, var: usize) -> Self {
        assert!(var < n);
        let mut alpha = vec![0u32; n];
        alpha[var] = 1;
        Self::monomial(n, &alpha, Complex64::new(1.0, 0.0))
    }

    pub fn monomial(n: usize, alpha: &[u32], c: Complex64) -> Self {
        assert_eq!(alpha.len(), n);
        let mut p = Self::zero(n);
        p.add_term(alpha, c);
        p
    }

    /// The linear form `sum_i coeffs[i] x_i`.
    pub fn linear_form(coeffs: &[Complex64]) -> Self {
        let n = coeffs.len();
        let mut p = Self::zero(n);
        for (i, &c) in coeffs.iter().enumerate() {
            let mut alpha = vec![0u32; n];
            alpha[i] = 1;
            p.add_term(&alpha, c);
        }
        p
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Complex64)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Max |alpha| with nonzero coefficient; -1 for the zero polynomial.
    pub fn degree(&self) -> i64 {
        self.terms
            .keys()
            .map(|a| a.iter().sum::<u32>() as i64)
            .max()
            .unwrap_or(-1)
    }

    pub fn coefficient(&self, alpha: &[u32]) -> Complex64 {
        self.terms
            .get(alpha)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn add_term(&mut self, alpha: &[u32], c: Complex64) {
        debug_assert_eq!(alpha.len(), self.n);
        if c == Complex64::new(0.0, 0.0) {
            return;
        }
        let entry = self
            .terms
            .entry(alpha.to_vec())
            .or_insert(Complex64::new(0.0, 0.0));
        *entry += c;
        if *entry == Complex64::new(0.0, 0.0) {
            self.terms.remove(alpha);
        }
    }

    pub fn evaluate(&self, x: &[Complex64]) -> Result<Complex64> {
        if x.len() != self.n {
            return Err(ConvError::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        // Powers of each coordinate up to its maximal exponent.
        let mut max_exp = vec![0u32; self.n];
        for alpha in self.terms.keys() {
            for (m, &a) in max_exp.iter_mut().zip(alpha) {
                *m = (*m).max(a);
            }
        }
        let pow_tables: Vec<Vec<Complex64>> = x
            .iter()
            .zip(&max_exp)
            .map(|(&xi, &m)| {
                let mut t = Vec::with_capacity(m as usize + 1);
                t.push(Complex64::new(1.0, 0.0));
                for e in 1..=m {
                    let prev = t[e as usize - 1];
                    t.push(prev * xi);
                }
                t
            })
            .collect();
        let mut acc = Complex64::new(0.0, 0.0);
        for (alpha, &c) in &self.terms {
            let mut mono = c;
            for (i, &a) in alpha.iter().enumerate() {
                mono *= pow_tables[i][a as usize];
            }
            acc += mono;
        }
        Ok(acc)
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        assert_eq!(self.n, other.n);
        let mut out = self.clone();
        for (alpha, &c) in &other.terms {
            out.add_term(alpha, c);
        }
        out
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, c: Complex64) -> Polynomial {
        let mut out = Self::zero(self.n);
        if c == Complex64::new(0.0, 0.0) {
            return out;
        }
        for (alpha, &a) in &self.terms {
            out.add_term(alpha, a * c);
        }
        out
    }

    pub fn multiply(&self, other: &Polynomial) -> Polynomial {
        assert_eq!(self.n, other.n);
        let mut out = Self::zero(self.n);
        for (a, &ca) in &self.terms {
            for (b, &cb) in &other.terms {
                let alpha: Vec<u32> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                out.add_term(&alpha, ca * cb);
            }
        }
        out
    }

    pub fn power(&self, e: u32) -> Polynomial {
        let mut acc = Polynomial::one(self.n);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.multiply(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.multiply(&base);
            }
        }
        acc
    }

    /// The degree-k homogeneous slice; `p = sum_k homogeneous_part(p, k)`.
    pub fn homogeneous_part(&self, k: u32) -> Polynomial {
        let mut out = Self::zero(self.n);
        for (alpha, &c) in &self.terms {
            if alpha.iter().sum::<u32>() == k {
                out.add_term(alpha, c);
            }
        }
        out
    }

    pub fn is_homogeneous(&self, k: u32) -> bool {
        self.terms.keys().all(|a| a.iter().sum::<u32>() == k)
    }

    /// Substitute `x_i -> subs[i]`, e.g. to pass to a chart or a line.
    pub fn substitute(&self, subs: &[Polynomial]) -> Polynomial {
        assert_eq!(subs.len(), self.n);
        let m = subs.first().map(|p| p.n).unwrap_or(0);
        let mut out = Polynomial::zero(m);
        for (alpha, &c) in &self.terms {
            let mut term = Polynomial::constant(m, c);
            for (i, &a) in alpha.iter().enumerate() {
                if a > 0 {
                    term = term.multiply(&subs[i].power(a));
                }
            }
            out = out.add(&term);
        }
        out
    }

    /// Largest coefficient magnitude (0 for the zero polynomial).
    pub fn max_coefficient(&self) -> f64 {
        self.terms
            .values()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    /// Sum of coefficient magnitudes times r^|alpha|; bounds |p| on the
    /// closed polydisk of polyradius r.
    pub fn coefficient_bound(&self, r: f64) -> f64 {
        self.terms
            .iter()
            .map(|(a, c)| c.norm() * r.powi(a.iter().sum::<u32>() as i32))
            .sum()
    }

    /// Certified bound for |grad p| on the closed ball |x| <= r, via
    /// coefficient sums of each partial derivative.
    pub fn gradient_bound(&self, r: f64) -> f64 {
        (0..self.n)
            .map(|i| self.partial(i).coefficient_bound(r))
            .sum()
    }

    pub fn partial(&self, var: usize) -> Polynomial {
        let mut out = Self::zero(self.n);
        for (alpha, &c) in &self.terms {
            if alpha[var] == 0 {
                continue;
            }
            let mut beta = alpha.clone();
            beta[var] -= 1;
            out.add_term(&beta, c * alpha[var] as f64);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Brute-force listing by generate-sort, the independent oracle for the
    /// combinatorial rank/unrank.
    fn listing_oracle(n: usize, max_degree: u32) -> Vec<Vec<u32>> {
        fn gen(n: usize, k: u32) -> Vec<Vec<u32>> {
            if n == 1 {
                return vec![vec![k]];
            }
            let mut out = Vec::new();
            for c in 0..=k {
                for mut rest in gen(n - 1, k - c) {
                    let mut v = vec![c];
                    v.append(&mut rest);
                    out.push(v);
                }
            }
            out
        }
        let mut all = Vec::new();
        for k in 0..=max_degree {
            let mut block = gen(n, k);
            block.sort(); // lexicographic within the degree block
            all.append(&mut block);
        }
        all
    }

    #[test]
    fn monomial_at_matches_spec_values() {
        assert_eq!(monomial_at(2, 1).exponent, vec![0, 0]);
        assert_eq!(monomial_at(2, 4).exponent, vec![0, 2]);
        assert_eq!(monomial_at(1, 5).exponent, vec![4]);
        // forced order for n = 2 up to degree 2
        let expect: Vec<Vec<u32>> = vec![
            vec![0, 0],
            vec![0, 1],
            vec![1, 0],
            vec![0, 2],
            vec![1, 1],
            vec![2, 0],
        ];
        for (i, e) in expect.iter().enumerate() {
            assert_eq!(&monomial_at(2, i as u64 + 1).exponent, e);
        }
    }

    #[test]
    fn bijection_exhaustive_small_dims() {
        for n in 1..=3 {
            let oracle = listing_oracle(n, 14);
            for (idx, alpha) in oracle.iter().take(500).enumerate() {
                let i = idx as u64 + 1;
                let got = monomial_at(n, i);
                assert_eq!(&got.exponent, alpha, "n={n} i={i}");
                assert_eq!(index_of(alpha), i, "n={n} alpha={alpha:?}");
            }
        }
    }

    #[test]
    fn monomial_counts_match_spec_values() {
        assert_eq!(monomial_counts(2, 2), (6, 8));
        assert_eq!(monomial_counts(1, 1), (2, 1));
        assert_eq!(monomial_counts(1, 3), (4, 6));
        assert_eq!(monomial_counts(3, 0), (1, 0));
    }

    #[test]
    fn m_k_recurrence_by_enumeration() {
        for n in 1..=3usize {
            for k in 1..=10u32 {
                let (m_k, _) = monomial_counts(n, k);
                let (m_prev, _) = monomial_counts(n, k - 1);
                assert_eq!(
                    m_k - m_prev,
                    exponents_of_degree(n, k).len() as u64,
                    "n={n} k={k}"
                );
            }
        }
    }

    #[test]
    fn l_k_closed_form_matches_sum() {
        for n in 1..=3usize {
            for k in 0..=10u32 {
                let (_, l_k) = monomial_counts(n, k);
                let sum: u64 = (1..=k)
                    .map(|q| {
                        let (mq, _) = monomial_counts(n, q);
                        let (mp, _) = monomial_counts(n, q - 1);
                        q as u64 * (mq - mp)
                    })
                    .sum();
                assert_eq!(l_k, sum, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn evaluate_spec_examples() {
        // p = s1 * s2 at (2, 3) -> 6
        let p = Polynomial::variable(2, 0).multiply(&Polynomial::variable(2, 1));
        assert_eq!(p.evaluate(&[c(2.0, 0.0), c(3.0, 0.0)]).unwrap(), c(6.0, 0.0));

        // p = s^2 + 1 at i -> 0
        let p = Polynomial::variable(1, 0)
            .power(2)
            .add(&Polynomial::one(1));
        let v = p.evaluate(&[c(0.0, 1.0)]).unwrap();
        assert!(v.norm() < 1e-12);

        // p = prod_{i<=3} (s - 1/i) at 1/2 -> 0 (root)
        let mut p = Polynomial::one(1);
        for i in 1..=3 {
            let root = Polynomial::constant(1, c(1.0 / i as f64, 0.0));
            p = p.multiply(&Polynomial::variable(1, 0).sub(&root));
        }
        let v = p.evaluate(&[c(0.5, 0.0)]).unwrap();
        assert!(v.norm() < 1e-12);

        // zero polynomial evaluates to 0
        assert_eq!(
            Polynomial::zero(2).evaluate(&[c(1.0, 0.0), c(2.0, 0.0)]).unwrap(),
            c(0.0, 0.0)
        );
    }

    #[test]
    fn evaluate_dimension_mismatch() {
        let p = Polynomial::variable(2, 0);
        assert!(p.evaluate(&[c(1.0, 0.0)]).is_err());
    }

    #[test]
    fn zero_degree_sentinel() {
        assert_eq!(Polynomial::zero(3).degree(), -1);
        assert_eq!(Polynomial::one(3).degree(), 0);
    }

    #[test]
    fn homogeneous_parts_sum_to_poly() {
        let p = Polynomial::variable(2, 0)
            .power(2)
            .add(&Polynomial::variable(2, 1))
            .add(&Polynomial::one(2).scale(c(3.0, -1.0)));
        let mut sum = Polynomial::zero(2);
        for k in 0..=p.degree() as u32 {
            sum = sum.add(&p.homogeneous_part(k));
        }
        assert_eq!(sum, p);
    }

    #[test]
    fn json_round_trip_matches_format() {
        let p = Polynomial::variable(2, 0)
            .multiply(&Polynomial::variable(2, 1))
            .add(&Polynomial::one(2).scale(c(0.5, 1.0)));
        let js = serde_json::to_value(&p).unwrap();
        assert_eq!(js["n"], 2);
        assert!(js["terms"].as_array().unwrap().iter().any(|t| {
            t["alpha"] == serde_json::json!([1, 1]) && t["re"] == serde_json::json!(1.0)
        }));
        let q: Polynomial = serde_json::from_value(js).unwrap();
        assert_eq!(p, q);
    }

    proptest! {
        #[test]
        fn index_round_trip(n in 1usize..4, i in 1u64..600) {
            let m = monomial_at(n, i);
            prop_assert_eq!(index_of(&m.exponent), i);
        }

        #[test]
        fn graded_order_is_nondecreasing(n in 1usize..4, i in 1u64..300) {
            let a = monomial_at(n, i);
            let b = monomial_at(n, i + 1);
            let da: u32 = a.exponent.iter().sum();
            let db: u32 = b.exponent.iter().sum();
            prop_assert!(da <= db);
            if da == db {
                prop_assert!(a.exponent < b.exponent);
            }
        }

        #[test]
        fn product_evaluates_pointwise(
            re1 in -2.0f64..2.0, im1 in -2.0f64..2.0,
            re2 in -2.0f64..2.0, im2 in -2.0f64..2.0,
        ) {
            let p = Polynomial::variable(1, 0).add(&Polynomial::one(1));
            let q = Polynomial::variable(1, 0).power(2).sub(&Polynomial::one(1).scale(c(re2, im2)));
            let prod = p.multiply(&q);
            let x = [c(re1, im1)];
            let lhs = prod.evaluate(&x).unwrap();
            let rhs = p.evaluate(&x).unwrap() * q.evaluate(&x).unwrap();
            prop_assert!((lhs - rhs).norm() < 1e-9 * (1.0 + rhs.norm()));
        }
    }
}
