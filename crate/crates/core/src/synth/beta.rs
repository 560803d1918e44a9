//! The beta-power witness construction.
//!
//! Given a normalized pair (p, v) that is small on the block's target set
//! and sizable at a probe y, the witness `h = p^a m^{v(b-a)}` (affine) or
//! `h = p^a (m <x,u>)^{v(b-a)}` with `u = conj(y)/|y|` (anchored; required
//! in the homogeneous case) has weight `q = b v` and satisfies the three
//! block clauses: global norm at most m, target norm at most 1, and value
//! above m/2 at y. The solver scans denominators b = 2, 3, ... and within
//! each b the largest beta = a/b first, accepting the first candidate whose
//! clauses verify by direct evaluation.

use crate::error::{ConvError, Result};
use crate::point_norm;
use crate::poly::Polynomial;
use crate::series::FactoredPoly;
use crate::Point;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum WitnessShape {
    Plain,
    /// Carries the unit anchor u = conj(y)/|y|.
    Anchored { u: Point },
}

/// The pair (p, v) a block works with, kept as an unexpanded product
/// `exp(log_scale) * f_1 ... f_k` so that evaluation at a root of any
/// chain factor is exactly zero (expanded coefficients would round).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WitnessBase {
    pub factors: Vec<Polynomial>,
    /// v = total degree of the product.
    pub weight: u32,
    /// ln of the normalization constant making the global sup <= 1.
    pub log_scale: f64,
    pub homogeneous: bool,
}

impl WitnessBase {
    pub fn new(factors: Vec<Polynomial>, log_scale: f64, homogeneous: bool) -> Result<WitnessBase> {
        let weight: i64 = factors.iter().map(|f| f.degree()).sum();
        if factors.is_empty() || weight < 1 {
            return Err(ConvError::InvalidInput(
                "witness base needs a nonconstant product".into(),
            ));
        }
        if homogeneous {
            for f in &factors {
                let d = f.degree();
                if !f.is_homogeneous(d as u32) {
                    return Err(ConvError::InvalidInput(
                        "homogeneous base needs homogeneous factors".into(),
                    ));
                }
            }
        }
        Ok(WitnessBase {
            factors,
            weight: weight as u32,
            log_scale,
            homogeneous,
        })
    }

    pub fn dimension(&self) -> usize {
        self.factors[0].dimension()
    }

    /// ln of the normalized pair value at x; exactly -inf on factor roots.
    pub fn log_normalized_value(&self, x: &[Complex64]) -> Result<f64> {
        let mut log = self.log_scale;
        for f in &self.factors {
            let v = f.evaluate(x)?.norm();
            if v == 0.0 {
                return Ok(f64::NEG_INFINITY);
            }
            log += v.ln();
        }
        let root = log / self.weight as f64;
        if self.homogeneous {
            let nx = point_norm(x);
            if nx == 0.0 {
                return Err(ConvError::HomogeneousAtZero);
            }
            Ok(root - nx.ln())
        } else {
            Ok(root - 0.5 * (1.0 + point_norm(x).powi(2)).ln())
        }
    }

    pub fn normalized_value(&self, x: &[Complex64]) -> Result<f64> {
        Ok(self.log_normalized_value(x)?.exp())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct BetaParams {
    /// Block level m >= 1.
    pub m: f64,
    /// Probe value level, 0 < r < 1 scale; enters (r/m)^beta > 1/2.
    pub r: f64,
    /// Denominator search bound.
    pub b_max: u32,
    /// Required relative clearance of the probe clause above m/2; 0 accepts
    /// any strict exceedance. Cell certificates need some slack here.
    pub probe_margin: f64,
}

/// A constructed witness with its recorded clause values.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BetaWitness {
    pub shape: WitnessShape,
    pub block: u32,
    pub base: WitnessBase,
    pub a: u32,
    pub b: u32,
    pub probe: Point,
    /// q = b * base_weight.
    pub weight: u64,
    pub term: FactoredPoly,
    /// Claimed sup of the normalized value over the whole space (<= m).
    pub clause_global: f64,
    /// Sampled sup of the normalized value on the block target (<= 1).
    pub clause_target: f64,
    /// Normalized value at the probe (> m/2).
    pub clause_probe: f64,
    pub projective: bool,
}

/// ln of the normalized value of a factored term with weight q.
pub fn normed_log_value(
    term: &FactoredPoly,
    q: u64,
    x: &[Complex64],
    projective: bool,
) -> Result<f64> {
    let v = term.eval_log(x)?;
    let root = if v.log_mag == f64::NEG_INFINITY {
        return Ok(f64::NEG_INFINITY);
    } else {
        v.log_mag / q as f64
    };
    if projective {
        let nx = point_norm(x);
        if nx == 0.0 {
            return Err(ConvError::HomogeneousAtZero);
        }
        Ok(root - nx.ln())
    } else {
        Ok(root - 0.5 * (1.0 + point_norm(x).powi(2)).ln())
    }
}

impl BetaWitness {
    /// Normalized value of the witness at a point.
    pub fn normed_value_at(&self, x: &[Complex64]) -> Result<f64> {
        Ok(normed_log_value(&self.term, self.weight, x, self.projective)?.exp())
    }

    pub fn beta(&self) -> f64 {
        self.a as f64 / self.b as f64
    }

    /// Re-verifies the three clauses on fresh target samples within tol:
    /// target norm <= 1, probe value > m/2, and the global claim <= m
    /// rechecked on fresh global sample points.
    pub fn reverify(
        &self,
        target_samples: &[Point],
        global_samples: &[Point],
        tol: f64,
    ) -> Result<bool> {
        let m = self.block as f64;
        for s in target_samples {
            if self.normed_value_at(s)? > 1.0 + tol {
                return Ok(false);
            }
        }
        if self.normed_value_at(&self.probe)? <= m / 2.0 * (1.0 - tol) {
            return Ok(false);
        }
        for s in global_samples {
            let v = match self.normed_value_at(s) {
                Ok(v) => v,
                Err(ConvError::HomogeneousAtZero) => continue,
                Err(e) => return Err(e),
            };
            if v > m * (1.0 + tol) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Builds a beta witness at probe y for block level m.
///
/// `base_sup` is the heuristic global sup of the normalized base pair and
/// must be at most 1; `target_samples` certify the block-target smallness.
pub fn beta_construct(
    base: &WitnessBase,
    params: &BetaParams,
    y: &[Complex64],
    target_samples: &[Point],
    shape_preference: &[WitnessShape],
    projective: bool,
    base_sup: f64,
) -> Result<BetaWitness> {
    if params.m < 1.0 {
        return Err(ConvError::InvalidInput("block level m must be >= 1".into()));
    }
    if base_sup > 1.0 + 1e-9 {
        return Err(ConvError::WitnessPrecondition(format!(
            "base sup {} exceeds 1",
            base_sup
        )));
    }
    if projective && !base.homogeneous {
        return Err(ConvError::WitnessPrecondition(
            "projective witnesses need a homogeneous base".into(),
        ));
    }
    let m = params.m;
    let v = base.weight;
    let n = base.dimension();

    // Sampled sup of the base on the block target, for the m^{-1/beta}
    // precondition.
    let mut base_target_sup = 0.0f64;
    for s in target_samples {
        base_target_sup = base_target_sup.max(base.normalized_value(s)?);
    }

    for b in 2..=params.b_max {
        for a in (1..b).rev() {
            if gcd(a, b) != 1 {
                continue;
            }
            let beta = a as f64 / b as f64;
            // (r/m)^beta > 1/2
            if beta * (params.r / m).ln() <= -(std::f64::consts::LN_2) {
                continue;
            }
            // ||(p, v)||_{target} < m^{-1/beta}
            if base_target_sup >= m.powf(-1.0 / beta) {
                continue;
            }
            for shape in shape_preference {
                let w = v * (b - a);
                // h = p^a (m ...)^{v(b-a)}: the base's normalization scalar
                // rides along in log scale.
                let mut term = FactoredPoly::with_log_const(
                    n,
                    a as f64 * base.log_scale + w as f64 * m.ln(),
                );
                for f in &base.factors {
                    term.push_factor(f.clone(), a);
                }
                let shape = match shape {
                    WitnessShape::Plain => {
                        if projective {
                            continue; // not homogeneous of degree q
                        }
                        WitnessShape::Plain
                    }
                    WitnessShape::Anchored { .. } => {
                        let ny = point_norm(y);
                        if ny == 0.0 {
                            continue;
                        }
                        let u: Point = y.iter().map(|&z| z.conj() / ny).collect();
                        let lin = Polynomial::linear_form(&u);
                        term.push_factor(lin, w);
                        WitnessShape::Anchored { u }
                    }
                };
                let q = (b as u64) * (v as u64);
                let clause_probe = normed_log_value(&term, q, y, projective)?.exp();
                if !(clause_probe > m / 2.0 * (1.0 + params.probe_margin)) {
                    continue;
                }
                let mut clause_target = 0.0f64;
                let mut ok = true;
                for s in target_samples {
                    let val = normed_log_value(&term, q, s, projective)?.exp();
                    clause_target = clause_target.max(val);
                    if val > 1.0 {
                        ok = false;
                        break;
                    }
                }
                if !ok {
                    continue;
                }
                // Global clause: ||(h, q)|| <= sup_p^beta m^{1-beta} <= m.
                let clause_global = base_sup.powf(beta) * m.powf(1.0 - beta);
                if clause_global > m * (1.0 + 1e-12) {
                    continue;
                }
                return Ok(BetaWitness {
                    shape,
                    block: m.round() as u32,
                    base: base.clone(),
                    a,
                    b,
                    probe: y.to_vec(),
                    weight: q,
                    term,
                    clause_global,
                    clause_target,
                    clause_probe,
                    projective,
                });
            }
        }
    }
    Err(ConvError::NoFeasibleBeta { r: params.r, m })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Polynomial;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Worked feasibility retry: base (z, 1), m = 2, r = 0.7, y = 1,
    /// target {0}. Beta = 1/2 gives normalized probe value exactly 1.0,
    /// not above m/2 = 1; beta = 2/3 gives 2^{-1/6} < 1; the first
    /// feasible candidate is beta = 1/3 with h = 4z, q = 3.
    #[test]
    fn solver_retries_to_first_feasible_beta() {
        let base = WitnessBase::new(vec![Polynomial::variable(1, 0)], 0.0, false).unwrap();
        let params = BetaParams {
            m: 2.0,
            r: 0.7,
            b_max: 8,
            probe_margin: 0.0,
        };
        let w = beta_construct(
            &base,
            &params,
            &[c(1.0, 0.0)],
            &[vec![c(0.0, 0.0)]],
            &[WitnessShape::Plain],
            false,
            1.0,
        )
        .unwrap();
        assert_eq!((w.a, w.b), (1, 3));
        assert_eq!(w.weight, 3);
        // h = z * 2^2 = 4z: value at 1 is 4^{1/3}/sqrt(2) = 2^{1/6}.
        let expect = 2f64.powf(1.0 / 6.0);
        assert!((w.clause_probe - expect).abs() < 1e-9);
        assert!(w.clause_probe > 1.0);
        assert!(w.clause_target <= 1e-12);
        assert!(w.clause_global <= 2.0);
    }

    /// Base vanishing on the target satisfies the target clause exactly.
    #[test]
    fn vanishing_base_target_clause_is_exact_zero() {
        let base_poly = Polynomial::variable(1, 0).sub(&Polynomial::one(1).scale(c(0.5, 0.0)));
        // normalization scalar 1/2 carried in log scale
        let base = WitnessBase::new(vec![base_poly], 0.5f64.ln(), false).unwrap();
        let params = BetaParams {
            m: 3.0,
            r: 0.4,
            b_max: 16,
            probe_margin: 0.0,
        };
        let w = beta_construct(
            &base,
            &params,
            &[c(2.0, 0.0)],
            &[vec![c(0.5, 0.0)]],
            &[WitnessShape::Plain, WitnessShape::Anchored { u: vec![] }],
            false,
            0.9,
        )
        .unwrap();
        assert_eq!(w.clause_target, 0.0);
        assert!(w.clause_probe > 1.5);
    }

    /// With r = m every beta satisfies the window condition and the first
    /// candidate examined is beta = 1/2.
    #[test]
    fn r_equal_m_picks_one_half() {
        let base = WitnessBase::new(vec![Polynomial::variable(1, 0)], 0.0, false).unwrap();
        let params = BetaParams {
            m: 1.0,
            r: 1.0,
            b_max: 8,
            probe_margin: 0.0,
        };
        let w = beta_construct(
            &base,
            &params,
            &[c(1.0, 0.0)],
            &[],
            &[WitnessShape::Plain],
            false,
            1.0,
        )
        .unwrap();
        assert_eq!((w.a, w.b), (1, 2));
    }

    #[test]
    fn projective_witness_is_homogeneous_and_scale_invariant() {
        let base = WitnessBase::new(vec![Polynomial::variable(2, 0)], 0.0, true).unwrap();
        let y = vec![c(1.0, 0.0), c(1.0, 0.0)];
        let r = 1.0 / 2f64.sqrt();
        let params = BetaParams {
            m: 2.0,
            r,
            b_max: 16,
            probe_margin: 0.0,
        };
        let target = vec![vec![c(0.0, 0.0), c(1.0, 0.0)]];
        let w = beta_construct(
            &base,
            &params,
            &y,
            &target,
            &[WitnessShape::Anchored { u: vec![] }],
            true,
            1.0,
        )
        .unwrap();
        assert!(w.clause_probe > 1.0);
        // Degree equals the weight: homogeneous slice.
        assert_eq!(w.term.degree(), w.weight as i64);
        // Scale invariance of the normalized value.
        let v1 = w.normed_value_at(&y).unwrap();
        let y2: Point = y.iter().map(|&z| z * c(-3.0, 4.0)).collect();
        let v2 = w.normed_value_at(&y2).unwrap();
        assert!((v1 - v2).abs() < 1e-9);
    }

    #[test]
    fn infeasible_when_r_too_small() {
        let base = WitnessBase::new(vec![Polynomial::variable(1, 0)], 0.0, false).unwrap();
        let params = BetaParams {
            m: 8.0,
            r: 1e-9,
            b_max: 4,
            probe_margin: 0.0,
        };
        let err = beta_construct(
            &base,
            &params,
            &[c(1.0, 0.0)],
            &[],
            &[WitnessShape::Plain],
            false,
            1.0,
        );
        assert!(matches!(err, Err(ConvError::NoFeasibleBeta { .. })));
    }
}
