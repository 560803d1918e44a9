//! Polynomial coefficients kept in factored form `c * prod f_i^{e_i}`.
//!
//! Synthesized series raise normalized polynomials to large powers; the
//! expanded values overflow f64 long before the root test needs them, so
//! terms evaluate to a log-magnitude plus unit phase instead.

use crate::error::Result;
use crate::poly::Polynomial;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Value of a factored term at a point: `phase * exp(log_mag)`.
#[derive(Debug, Clone, Copy)]
pub struct LogComplex {
    pub log_mag: f64,
    pub phase: Complex64,
}

impl LogComplex {
    pub fn zero() -> Self {
        LogComplex {
            log_mag: f64::NEG_INFINITY,
            phase: Complex64::new(0.0, 0.0),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.log_mag == f64::NEG_INFINITY
    }

    /// Clamped complex value; saturates to +-inf on overflow.
    pub fn to_complex(&self) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        self.phase * self.log_mag.exp()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Factor {
    pub poly: Polynomial,
    pub power: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FactoredPoly {
    n: usize,
    /// ln of the scalar constant's magnitude; -inf encodes the zero term.
    log_const: f64,
    /// Unit phase of the scalar constant.
    phase: Complex64,
    factors: Vec<Factor>,
}

impl FactoredPoly {
    pub fn constant(n: usize, c: Complex64) -> Self {
        if c.norm() == 0.0 {
            return FactoredPoly {
                n,
                log_const: f64::NEG_INFINITY,
                phase: Complex64::new(0.0, 0.0),
                factors: Vec::new(),
            };
        }
        FactoredPoly {
            n,
            log_const: c.norm().ln(),
            phase: c / c.norm(),
            factors: Vec::new(),
        }
    }

    pub fn from_poly(p: Polynomial) -> Self {
        let n = p.dimension();
        let mut f = Self::constant(n, Complex64::new(1.0, 0.0));
        f.push_factor(p, 1);
        f
    }

    /// Constant given directly in log scale (for values like m^{v(b-a)}).
    pub fn with_log_const(n: usize, log_const: f64) -> Self {
        FactoredPoly {
            n,
            log_const,
            phase: Complex64::new(1.0, 0.0),
            factors: Vec::new(),
        }
    }

    /// Constant in log scale with an explicit unit phase.
    pub fn with_log_const_phase(n: usize, log_const: f64, phase: Complex64) -> Self {
        let mag = phase.norm();
        if mag == 0.0 || log_const == f64::NEG_INFINITY {
            return Self::constant(n, Complex64::new(0.0, 0.0));
        }
        FactoredPoly {
            n,
            log_const,
            phase: phase / mag,
            factors: Vec::new(),
        }
    }

    /// Multiply in a scalar given in log scale.
    pub fn scale_log(&mut self, log_mag: f64, phase: Complex64) {
        if self.is_zero() {
            return;
        }
        let m = phase.norm();
        if m == 0.0 || log_mag == f64::NEG_INFINITY {
            *self = Self::constant(self.n, Complex64::new(0.0, 0.0));
            return;
        }
        self.log_const += log_mag;
        self.phase *= phase / m;
    }

    pub fn push_factor(&mut self, poly: Polynomial, power: u32) {
        if power == 0 {
            return;
        }
        if poly.is_zero() {
            self.log_const = f64::NEG_INFINITY;
            self.phase = Complex64::new(0.0, 0.0);
            self.factors.clear();
            return;
        }
        self.factors.push(Factor { poly, power });
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn is_zero(&self) -> bool {
        self.log_const == f64::NEG_INFINITY
    }

    /// ln magnitude of the scalar constant.
    pub fn log_constant(&self) -> f64 {
        self.log_const
    }

    pub fn degree(&self) -> i64 {
        if self.is_zero() {
            return -1;
        }
        self.factors
            .iter()
            .map(|f| f.poly.degree().max(0) * f.power as i64)
            .sum()
    }

    /// Raise the whole term to an integer power.
    pub fn pow(&self, e: u32) -> FactoredPoly {
        if e == 0 {
            return Self::constant(self.n, Complex64::new(1.0, 0.0));
        }
        let phase = if self.phase.norm() == 0.0 {
            self.phase
        } else {
            Complex64::from_polar(1.0, self.phase.im.atan2(self.phase.re) * e as f64)
        };
        FactoredPoly {
            n: self.n,
            log_const: self.log_const * e as f64,
            phase,
            factors: self
                .factors
                .iter()
                .map(|f| Factor {
                    poly: f.poly.clone(),
                    power: f.power * e,
                })
                .collect(),
        }
    }

    pub fn eval_log(&self, x: &[Complex64]) -> Result<LogComplex> {
        if self.is_zero() {
            return Ok(LogComplex::zero());
        }
        let mut log_mag = self.log_const;
        let mut phase = self.phase;
        for f in &self.factors {
            let v = f.poly.evaluate(x)?;
            let mag = v.norm();
            if mag == 0.0 {
                return Ok(LogComplex::zero());
            }
            log_mag += mag.ln() * f.power as f64;
            // Unit phase to the power, via the argument (powu of a unit
            // drifts off the circle for very large exponents).
            let theta = v.im.atan2(v.re) * f.power as f64;
            phase *= Complex64::from_polar(1.0, theta);
        }
        Ok(LogComplex { log_mag, phase })
    }

    /// Fully expanded polynomial; coefficients may overflow for very large
    /// powers, callers needing magnitudes only should prefer `eval_log`.
    pub fn expand(&self) -> Polynomial {
        if self.is_zero() {
            return Polynomial::zero(self.n);
        }
        let c = self.phase * self.log_const.exp();
        let mut out = Polynomial::constant(self.n, c);
        for f in &self.factors {
            out = out.multiply(&f.poly.power(f.power));
        }
        out
    }

    /// ln bound for |value| on the polydisk of polyradius r (certified).
    pub fn log_sup_bound(&self, r: f64) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        let mut acc = self.log_const;
        for f in &self.factors {
            let s = f.poly.coefficient_bound(r);
            if s == 0.0 {
                return f64::NEG_INFINITY;
            }
            acc += s.ln() * f.power as f64;
        }
        acc
    }

    /// ln bound for |grad value| on the ball |x| <= r, by the product rule
    /// over factors with coefficient-sum bounds.
    pub fn log_gradient_bound(&self, r: f64) -> f64 {
        if self.is_zero() || self.factors.is_empty() {
            return f64::NEG_INFINITY;
        }
        let sups: Vec<f64> = self
            .factors
            .iter()
            .map(|f| f.poly.coefficient_bound(r))
            .collect();
        let grads: Vec<f64> = self
            .factors
            .iter()
            .map(|f| f.poly.gradient_bound(r))
            .collect();
        // log-sum-exp over the product-rule terms.
        let mut terms = Vec::new();
        for i in 0..self.factors.len() {
            let e = self.factors[i].power as f64;
            if grads[i] == 0.0 {
                continue;
            }
            let mut t = self.log_const + e.ln() + grads[i].ln();
            if sups[i] == 0.0 && e > 1.0 {
                continue;
            }
            if e > 1.0 {
                t += (e - 1.0) * sups[i].ln();
            }
            for j in 0..self.factors.len() {
                if j != i {
                    if sups[j] == 0.0 {
                        t = f64::NEG_INFINITY;
                        break;
                    }
                    t += self.factors[j].power as f64 * sups[j].ln();
                }
            }
            terms.push(t);
        }
        let peak = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if peak == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        peak + terms.iter().map(|t| (t - peak).exp()).sum::<f64>().ln()
    }
}
