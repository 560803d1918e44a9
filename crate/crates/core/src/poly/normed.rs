//! Weighted polynomial pairs and the normalized norm system.
//!
//! An affine pair (p, k) with deg p <= k carries the pointwise value
//! |p(x)|^{1/k} / (1 + |x|^2)^{1/2}; a homogeneous pair (h, k) carries
//! |h(x)|^{1/k} / |x|. Suprema over a region or over all of C^n are
//! estimated by sampling plus local ascent; the sampled maximum is a
//! certified lower bound, the ascent value a heuristic upper estimate.

use super::Polynomial;
use crate::error::{ConvError, Result};
use crate::point_norm;
use crate::region::Region;
use crate::rng::Rng;
use num_complex::Complex64;

/// Where a supremum is taken.
#[derive(Debug, Clone, Copy)]
pub enum Domain<'a> {
    /// All of C^n (the plain `||(p,k)||`).
    Global,
    Region(&'a Region),
}

#[derive(Debug, Clone, Copy)]
pub struct SupNormBudget {
    /// Directions sampled per sphere radius.
    pub directions: usize,
    /// Largest radius is 2^max_radius_exp.
    pub max_radius_exp: i32,
    /// Multi-start count for the local ascent.
    pub ascent_starts: usize,
    pub ascent_iters: usize,
}

impl Default for SupNormBudget {
    fn default() -> Self {
        SupNormBudget {
            directions: 64,
            max_radius_exp: 6,
            ascent_starts: 8,
            ascent_iters: 60,
        }
    }
}

/// Bracketed supremum estimate.
#[derive(Debug, Clone, Copy)]
pub struct SupNorm {
    pub lower: f64,
    pub upper: f64,
    pub lower_certified: bool,
    pub upper_certified: bool,
}

/// A polynomial with a weight, `(p, k)` in Q(C^n) or `(h, k)` in Gamma(C^n).
#[derive(Debug, Clone, PartialEq)]
pub struct NormedPoly {
    poly: Polynomial,
    weight: u32,
    homogeneous: bool,
}

impl NormedPoly {
    pub fn new(poly: Polynomial, weight: u32) -> Result<Self> {
        if weight == 0 {
            return Err(ConvError::InvalidInput("weight must be positive".into()));
        }
        if poly.degree() > weight as i64 {
            return Err(ConvError::InvalidInput(format!(
                "degree {} exceeds weight {}",
                poly.degree(),
                weight
            )));
        }
        Ok(NormedPoly {
            poly,
            weight,
            homogeneous: false,
        })
    }

    pub fn new_homogeneous(poly: Polynomial, weight: u32) -> Result<Self> {
        if weight == 0 {
            return Err(ConvError::InvalidInput("weight must be positive".into()));
        }
        if !poly.is_zero() && !poly.is_homogeneous(weight) {
            return Err(ConvError::InvalidInput(format!(
                "polynomial is not homogeneous of degree {weight}"
            )));
        }
        Ok(NormedPoly {
            poly,
            weight,
            homogeneous: true,
        })
    }

    pub fn poly(&self) -> &Polynomial {
        &self.poly
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn is_homogeneous(&self) -> bool {
        self.homogeneous
    }

    pub fn dimension(&self) -> usize {
        self.poly.dimension()
    }

    /// `(p^a, a k)`, same pointwise normalized values.
    pub fn power(&self, a: u32) -> NormedPoly {
        NormedPoly {
            poly: self.poly.power(a),
            weight: self.weight * a,
            homogeneous: self.homogeneous,
        }
    }

    /// Unnormalized value `|(p(x), k)| = |p(x)|^{1/k}`.
    pub fn value(&self, x: &[Complex64]) -> Result<f64> {
        let v = self.poly.evaluate(x)?;
        Ok(v.norm().powf(1.0 / self.weight as f64))
    }

    /// The paper's pointwise normalized value.
    pub fn normalized_value(&self, x: &[Complex64]) -> Result<f64> {
        let v = self.poly.evaluate(x)?.norm();
        let root = v.powf(1.0 / self.weight as f64);
        if self.homogeneous {
            let nx = point_norm(x);
            if nx == 0.0 {
                return Err(ConvError::HomogeneousAtZero);
            }
            Ok(root / nx)
        } else {
            Ok(root / (1.0 + point_norm(x).powi(2)).sqrt())
        }
    }

    /// ln of the normalized value (`-inf` where p vanishes); stable for
    /// large weights and coefficients.
    pub fn log_normalized_value(&self, x: &[Complex64]) -> Result<f64> {
        let v = self.poly.evaluate(x)?.norm();
        let log_root = if v == 0.0 {
            f64::NEG_INFINITY
        } else {
            v.ln() / self.weight as f64
        };
        if self.homogeneous {
            let nx = point_norm(x);
            if nx == 0.0 {
                return Err(ConvError::HomogeneousAtZero);
            }
            Ok(log_root - nx.ln())
        } else {
            Ok(log_root - 0.5 * (1.0 + point_norm(x).powi(2)).ln())
        }
    }

    /// Supremum of the normalized value over a region or over C^n.
    ///
    /// The empty region returns 0 with both flags certified. For GLOBAL the
    /// estimate adds the limit through the leading form at infinity.
    pub fn sup_norm(&self, domain: Domain, budget: &SupNormBudget, seed: u64) -> SupNorm {
        let mut rng = Rng::new(seed).stream(0x5u64);
        match domain {
            Domain::Global => self.sup_global(budget, &mut rng),
            Domain::Region(region) => self.sup_region(region, budget, &mut rng),
        }
    }

    fn sup_global(&self, budget: &SupNormBudget, rng: &mut Rng) -> SupNorm {
        let n = self.dimension();
        let mut best = 0.0f64;
        let mut best_point: Option<Vec<Complex64>> = None;
        let radii: Vec<f64> = if self.homogeneous {
            vec![1.0]
        } else {
            let mut r = vec![0.5, 1.0];
            for e in 1..=budget.max_radius_exp {
                r.push(2f64.powi(e));
            }
            r
        };
        // Origin for affine pairs: value |p(0)|^{1/k}.
        if !self.homogeneous {
            if let Ok(v) = self.normalized_value(&vec![Complex64::new(0.0, 0.0); n]) {
                if v > best {
                    best = v;
                    best_point = Some(vec![Complex64::new(0.0, 0.0); n]);
                }
            }
        }
        for &r in &radii {
            for _ in 0..budget.directions {
                let u = rng.direction(n);
                let x: Vec<Complex64> = u.iter().map(|&z| z * r).collect();
                if let Ok(v) = self.normalized_value(&x) {
                    if v > best {
                        best = v;
                        best_point = Some(x);
                    }
                }
            }
        }
        let lower = best;
        // Leading-form limit at infinity for affine pairs.
        let mut upper = best;
        if !self.homogeneous {
            let lead = self.poly.homogeneous_part(self.weight);
            if !lead.is_zero() {
                let hom = NormedPoly {
                    poly: lead,
                    weight: self.weight,
                    homogeneous: true,
                };
                let mut inner = rng.stream(0x11);
                let at_inf = hom.sup_global(budget, &mut inner);
                upper = upper.max(at_inf.upper);
            }
        }
        // Multi-start ascent from the best points found.
        let start = best_point.unwrap_or_else(|| vec![Complex64::new(1.0, 0.0); n]);
        for s in 0..budget.ascent_starts {
            let x0 = if s == 0 {
                start.clone()
            } else {
                let scale = 2f64.powi(s as i32 % 5 - 2);
                rng.direction(n).iter().map(|&z| z * scale).collect()
            };
            let v = self.ascend(x0, budget.ascent_iters, None);
            upper = upper.max(v);
        }
        upper = upper.max(lower);
        SupNorm {
            lower,
            upper,
            lower_certified: true,
            upper_certified: false,
        }
    }

    fn sup_region(&self, region: &Region, budget: &SupNormBudget, rng: &mut Rng) -> SupNorm {
        let count = budget.directions * (budget.max_radius_exp.max(1) as usize + 2);
        let samples = match region.sample(count, rng) {
            Ok(s) => s,
            Err(_) => Vec::new(),
        };
        if samples.is_empty() {
            // Empty-region convention.
            return SupNorm {
                lower: 0.0,
                upper: 0.0,
                lower_certified: true,
                upper_certified: true,
            };
        }
        let mut lower = 0.0f64;
        let mut best_point = samples[0].clone();
        for x in &samples {
            if let Ok(v) = self.normalized_value(x) {
                if v > lower {
                    lower = v;
                    best_point = x.clone();
                }
            }
        }
        let exact = region.is_finite_points();
        let mut upper = lower;
        if !exact {
            for s in 0..budget.ascent_starts {
                let x0 = if s == 0 {
                    best_point.clone()
                } else {
                    samples[rng.below(samples.len())].clone()
                };
                let v = self.ascend(x0, budget.ascent_iters, Some(region));
                upper = upper.max(v);
            }
        }
        SupNorm {
            lower,
            upper,
            lower_certified: true,
            upper_certified: exact,
        }
    }

    /// Pattern-search ascent on the normalized value; steps that leave the
    /// region are projected back when the region supports it.
    fn ascend(&self, mut x: Vec<Complex64>, iters: usize, region: Option<&Region>) -> f64 {
        let mut cur = match self.normalized_value(&x) {
            Ok(v) if v.is_finite() => v,
            _ => return 0.0,
        };
        let mut step = 0.25 * (1.0 + point_norm(&x));
        for _ in 0..iters {
            let mut improved = false;
            'dirs: for i in 0..x.len() {
                for &delta in &[
                    Complex64::new(step, 0.0),
                    Complex64::new(-step, 0.0),
                    Complex64::new(0.0, step),
                    Complex64::new(0.0, -step),
                ] {
                    let mut y = x.clone();
                    y[i] += delta;
                    if let Some(r) = region {
                        if let Some(p) = r.project(&y) {
                            y = p;
                        } else if !r.contains(&y) {
                            continue;
                        }
                    }
                    if let Ok(v) = self.normalized_value(&y) {
                        if v > cur * (1.0 + 1e-12) {
                            cur = v;
                            x = y;
                            improved = true;
                            break 'dirs;
                        }
                    }
                }
            }
            if !improved {
                step *= 0.5;
                if step < 1e-9 {
                    break;
                }
            }
        }
        cur
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::region::Region;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn normalized_value_spec_examples() {
        // (p = 2s, k = 2) at x = 1 -> 1
        let p = Polynomial::variable(1, 0).scale(c(2.0, 0.0));
        let np = NormedPoly::new(p, 2).unwrap();
        assert!((np.normalized_value(&[c(1.0, 0.0)]).unwrap() - 1.0).abs() < 1e-12);

        // (h = x1 x2, k = 2, homogeneous) at (1,1) -> 1/sqrt(2)
        let h = Polynomial::variable(2, 0).multiply(&Polynomial::variable(2, 1));
        let nh = NormedPoly::new_homogeneous(h, 2).unwrap();
        let v = nh.normalized_value(&[c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!((v - 1.0 / 2f64.sqrt()).abs() < 1e-12);

        // (p = s, k = 1) at 3 -> 3/sqrt(10)
        let np = NormedPoly::new(Polynomial::variable(1, 0), 1).unwrap();
        let v = np.normalized_value(&[c(3.0, 0.0)]).unwrap();
        assert!((v - 3.0 / 10f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn homogeneous_errors_at_zero() {
        let nh = NormedPoly::new_homogeneous(Polynomial::variable(2, 0), 1).unwrap();
        assert!(matches!(
            nh.normalized_value(&[c(0.0, 0.0), c(0.0, 0.0)]),
            Err(ConvError::HomogeneousAtZero)
        ));
    }

    #[test]
    fn homogeneous_scale_covariance() {
        let h = Polynomial::variable(2, 0).multiply(&Polynomial::variable(2, 1));
        let nh = NormedPoly::new_homogeneous(h, 2).unwrap();
        let x = [c(0.3, 0.7), c(-1.2, 0.4)];
        let base = nh.normalized_value(&x).unwrap();
        for &lambda in &[c(2.0, 0.0), c(0.0, -3.5), c(0.1, 0.1)] {
            let lx: Vec<Complex64> = x.iter().map(|&z| z * lambda).collect();
            assert!((nh.normalized_value(&lx).unwrap() - base).abs() < 1e-10);
        }
    }

    #[test]
    fn power_trick_preserves_normalized_values() {
        let p = Polynomial::variable(1, 0)
            .power(2)
            .add(&Polynomial::one(1).scale(c(0.5, 0.25)));
        let np = NormedPoly::new(p, 3).unwrap();
        for a in [2u32, 3, 5] {
            let pa = np.power(a);
            for &x in &[c(0.4, -0.2), c(2.0, 1.0), c(0.0, 0.0)] {
                let lhs = pa.normalized_value(&[x]).unwrap();
                let rhs = np.normalized_value(&[x]).unwrap();
                assert!((lhs - rhs).abs() < 1e-9 * (1.0 + rhs));
            }
        }
    }

    /// Dense radial grid oracle for ||(s, 1)|| = sup |x|/(1+|x|^2)^{1/2} = 1.
    #[test]
    fn global_sup_of_coordinate_is_one() {
        let oracle = (0..20000)
            .map(|i| {
                let r = i as f64 * 0.01;
                r / (1.0 + r * r).sqrt()
            })
            .fold(0.0f64, f64::max);
        assert!((oracle - 1.0).abs() < 1e-2);

        let np = NormedPoly::new(Polynomial::variable(1, 0), 1).unwrap();
        let sup = np.sup_norm(Domain::Global, &SupNormBudget::default(), 1);
        assert!(sup.lower <= sup.upper + 1e-12);
        assert!((sup.upper - 1.0).abs() < 0.02, "upper = {}", sup.upper);
        assert!(sup.lower > 0.9);
    }

    #[test]
    fn global_sup_homogeneous_coordinate() {
        let nh = NormedPoly::new_homogeneous(Polynomial::variable(2, 0), 1).unwrap();
        let sup = nh.sup_norm(Domain::Global, &SupNormBudget::default(), 2);
        assert!((sup.upper - 1.0).abs() < 0.02);
    }

    #[test]
    fn sup_on_single_point_region() {
        let np = NormedPoly::new(Polynomial::variable(1, 0), 1).unwrap();
        let region = Region::finite(1, vec![vec![c(0.0, 0.0)]]);
        let sup = np.sup_norm(Domain::Region(&region), &SupNormBudget::default(), 3);
        assert_eq!(sup.lower, 0.0);
        assert_eq!(sup.upper, 0.0);
        assert!(sup.upper_certified);
    }

    #[test]
    fn sup_monotone_under_region_inclusion() {
        let p = Polynomial::variable(1, 0)
            .power(2)
            .add(&Polynomial::variable(1, 0).scale(c(0.3, 0.1)));
        let np = NormedPoly::new(p, 2).unwrap();
        let small = Region::ball(1, vec![c(0.0, 0.0)], 0.5);
        let big = Region::ball(1, vec![c(0.0, 0.0)], 2.0);
        let lb = np
            .sup_norm(Domain::Region(&small), &SupNormBudget::default(), 4)
            .lower;
        let ub = np
            .sup_norm(Domain::Region(&big), &SupNormBudget::default(), 5)
            .upper;
        assert!(lb <= ub + 1e-9);
    }
}
