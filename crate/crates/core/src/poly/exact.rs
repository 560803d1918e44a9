//! Exact rational-complex polynomials for the enumeration synthesizer.
//!
//! Enumeration over polynomials with rational coefficients is only
//! well-defined with exact arithmetic: the constraint |p|_K <= 1 is decided
//! by comparing |p(x)|^2 to 1 in Q, never in floating point.

use super::Polynomial;
use crate::error::{ConvError, Result};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// A complex number with exact rational real and imaginary parts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatComplex {
    pub re: BigRational,
    pub im: BigRational,
}

impl RatComplex {
    pub fn zero() -> Self {
        RatComplex {
            re: BigRational::zero(),
            im: BigRational::zero(),
        }
    }

    pub fn from_integers(re: i64, im: i64) -> Self {
        RatComplex {
            re: BigRational::from_integer(BigInt::from(re)),
            im: BigRational::from_integer(BigInt::from(im)),
        }
    }

    pub fn from_parts(re_num: i64, im_num: i64, den: i64) -> Self {
        let d = BigInt::from(den);
        RatComplex {
            re: BigRational::new(BigInt::from(re_num), d.clone()),
            im: BigRational::new(BigInt::from(im_num), d),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn add(&self, other: &RatComplex) -> RatComplex {
        RatComplex {
            re: &self.re + &other.re,
            im: &self.im + &other.im,
        }
    }

    pub fn mul(&self, other: &RatComplex) -> RatComplex {
        RatComplex {
            re: &self.re * &other.re - &self.im * &other.im,
            im: &self.re * &other.im + &self.im * &other.re,
        }
    }

    pub fn scale_int(&self, k: i64) -> RatComplex {
        let k = BigRational::from_integer(BigInt::from(k));
        RatComplex {
            re: &self.re * &k,
            im: &self.im * &k,
        }
    }

    /// |z|^2 as an exact rational.
    pub fn abs_sq(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn to_complex64(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }

    /// Height: max of |numerator| and denominator over both parts.
    pub fn height(&self) -> BigInt {
        let parts = [
            self.re.numer().abs(),
            self.re.denom().clone(),
            self.im.numer().abs(),
            self.im.denom().clone(),
        ];
        parts.into_iter().max().unwrap()
    }

    /// Parses "a/b", plain integers, and finite decimals like "-1.25".
    pub fn parse_rational(s: &str) -> Result<BigRational> {
        let s = s.trim();
        if let Some((num, den)) = s.split_once('/') {
            let n: BigInt = num
                .trim()
                .parse()
                .map_err(|_| ConvError::InvalidInput(format!("bad rational {s}")))?;
            let d: BigInt = den
                .trim()
                .parse()
                .map_err(|_| ConvError::InvalidInput(format!("bad rational {s}")))?;
            if d.is_zero() {
                return Err(ConvError::InvalidInput("zero denominator".into()));
            }
            return Ok(BigRational::new(n, d));
        }
        if let Some((int_part, frac_part)) = s.split_once('.') {
            let digits = frac_part.len() as u32;
            let joined = format!("{int_part}{frac_part}");
            let n: BigInt = joined
                .parse()
                .map_err(|_| ConvError::InvalidInput(format!("bad decimal {s}")))?;
            let d = BigInt::from(10u32).pow(digits);
            return Ok(BigRational::new(n, d));
        }
        let n: BigInt = s
            .parse()
            .map_err(|_| ConvError::InvalidInput(format!("bad integer {s}")))?;
        Ok(BigRational::from_integer(n))
    }
}

impl fmt::Display for RatComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}+{}i", self.re, self.im)
    }
}

/// Sparse polynomial with exact rational-complex coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactPoly {
    n: usize,
    terms: BTreeMap<Vec<u32>, RatComplex>,
}

impl ExactPoly {
    pub fn zero(n: usize) -> Self {
        ExactPoly {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(n: usize, alpha: &[u32], c: RatComplex) -> Self {
        let mut p = Self::zero(n);
        p.add_term(alpha, c);
        p
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> i64 {
        self.terms
            .keys()
            .map(|a| a.iter().sum::<u32>() as i64)
            .max()
            .unwrap_or(-1)
    }

    pub fn add_term(&mut self, alpha: &[u32], c: RatComplex) {
        debug_assert_eq!(alpha.len(), self.n);
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(alpha.to_vec()).or_insert_with(RatComplex::zero);
        *slot = slot.add(&c);
        if slot.is_zero() {
            self.terms.remove(alpha);
        }
    }

    pub fn scale_int(&self, k: i64) -> ExactPoly {
        let mut out = Self::zero(self.n);
        for (a, c) in &self.terms {
            out.add_term(a, c.scale_int(k));
        }
        out
    }

    pub fn evaluate_exact(&self, x: &[RatComplex]) -> Result<RatComplex> {
        if x.len() != self.n {
            return Err(ConvError::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        let mut acc = RatComplex::zero();
        for (alpha, c) in &self.terms {
            let mut term = c.clone();
            for (i, &a) in alpha.iter().enumerate() {
                for _ in 0..a {
                    term = term.mul(&x[i]);
                }
            }
            acc = acc.add(&term);
        }
        Ok(acc)
    }

    /// Exact test `|p(x)| <= bound` with rational bound, via squares.
    pub fn value_within(&self, x: &[RatComplex], bound: &BigRational) -> Result<bool> {
        let v = self.evaluate_exact(x)?;
        Ok(v.abs_sq() <= bound * bound)
    }

    pub fn to_float(&self) -> Polynomial {
        let mut p = Polynomial::zero(self.n);
        for (a, c) in &self.terms {
            p.add_term(a, c.to_complex64());
        }
        p
    }

    /// Max coefficient height.
    pub fn height(&self) -> BigInt {
        self.terms
            .values()
            .map(|c| c.height())
            .max()
            .unwrap_or_else(BigInt::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &RatComplex)> {
        self.terms.iter()
    }
}
