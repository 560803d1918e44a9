//! Siciak extremal-function lower bounds and G-hull membership.

use super::witness::{ascend_coefficients, poly_sup_on_region, region_centroid, witness_candidates};
use crate::error::{ConvError, Result};
use crate::poly::{NormedPoly, Polynomial};
use crate::region::Region;
use crate::rng::Rng;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WitnessMethod {
    Constant,
    MonomialFamily,
    FeketeLagrange,
    LocalAscent,
    VanishingFamily,
}

/// A certified at-point lower bound for the extremal function.
#[derive(Debug, Clone)]
pub struct ExtremalEstimate {
    /// Lower bound for Phi_E(x); infinite when a witness vanishes on E but
    /// not at x.
    pub lower: f64,
    pub weight: u32,
    /// The witness polynomial, already normalized so its sampled sup on E
    /// is at most 1 (absent for the infinite case, where the raw vanishing
    /// polynomial is stored instead).
    pub witness: Polynomial,
    pub method: WitnessMethod,
    /// Sampled sup of the stored witness on E.
    pub constraint_sup: f64,
}

impl ExtremalEstimate {
    /// Re-evaluates the stored witness at x; certifies the reported bound.
    pub fn recheck(&self, x: &[Complex64]) -> Result<f64> {
        if self.lower.is_infinite() {
            return Ok(f64::INFINITY);
        }
        let v = self.witness.evaluate(x)?;
        Ok(v.norm().powf(1.0 / self.weight as f64))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ExtremalBudget {
    pub region_samples: usize,
    pub ascent_rounds: usize,
}

impl Default for ExtremalBudget {
    fn default() -> Self {
        ExtremalBudget {
            region_samples: 300,
            ascent_rounds: 5,
        }
    }
}

/// Best witnessed lower bound for Phi_E(x) over weights k <= k_max.
pub fn extremal_lower(
    region: &Region,
    x: &[Complex64],
    k_max: u32,
    budget: &ExtremalBudget,
    seed: u64,
) -> Result<ExtremalEstimate> {
    per_weight_bounds(region, x, k_max, budget, seed)?
        .into_iter()
        .max_by(|a, b| a.lower.partial_cmp(&b.lower).unwrap())
        .ok_or_else(|| ConvError::InvalidInput("k_max must be >= 1".into()))
}

/// Lower bounds per weight k = 1..=k_max; nondecreasing families.
pub fn per_weight_bounds(
    region: &Region,
    x: &[Complex64],
    k_max: u32,
    budget: &ExtremalBudget,
    seed: u64,
) -> Result<Vec<ExtremalEstimate>> {
    if k_max == 0 {
        return Err(ConvError::InvalidInput("k_max must be >= 1".into()));
    }
    let mut rng = Rng::new(seed).stream(0xE87);
    let centroid = region_centroid(region, &mut rng);
    let cfg = super::fekete::fekete_search(
        region,
        k_max.min(5),
        &super::fekete::FeketeBudget::default(),
        seed ^ 0x77,
    )
    .ok()
    .map(|c| c.points);

    let mut out = Vec::new();
    for k in 1..=k_max {
        let mut candidates = witness_candidates(
            region,
            k,
            &centroid,
            cfg.as_deref(),
            &mut rng.stream(0x100 + k as u64),
        );
        if let Some(base) = candidates.get(1).cloned() {
            candidates.push(ascend_coefficients(
                &base,
                region,
                x,
                budget.region_samples,
                budget.ascent_rounds,
                &mut rng.stream(0x200 + k as u64),
            ));
        }
        let mut best: Option<ExtremalEstimate> = None;
        for (ci, p) in candidates.iter().enumerate() {
            if p.is_zero() || p.degree() > k as i64 {
                continue;
            }
            let val_x = p.evaluate(x)?.norm();
            let sup =
                poly_sup_on_region(p, region, budget.region_samples, &mut rng.stream(0x300));
            if sup.upper <= 1e-12 * val_x.max(p.max_coefficient()) {
                if val_x > 0.0 {
                    // |p|_E = 0 with p(x) != 0: the bound is unbounded in
                    // the power of p.
                    best = Some(ExtremalEstimate {
                        lower: f64::INFINITY,
                        weight: k,
                        witness: p.clone(),
                        method: WitnessMethod::VanishingFamily,
                        constraint_sup: sup.upper,
                    });
                    break;
                }
                continue;
            }
            let scaled = p.scale(Complex64::new(1.0 / sup.upper, 0.0));
            let bound = (val_x / sup.upper).powf(1.0 / k as f64);
            let method = match ci {
                0 => WitnessMethod::Constant,
                i if i + 1 == candidates.len() => WitnessMethod::LocalAscent,
                1 | 2 => WitnessMethod::MonomialFamily,
                _ => WitnessMethod::FeketeLagrange,
            };
            if best.as_ref().map(|b| bound > b.lower).unwrap_or(true) {
                best = Some(ExtremalEstimate {
                    lower: bound,
                    weight: k,
                    witness: scaled.clone(),
                    method,
                    constraint_sup: poly_sup_on_region(
                        &scaled,
                        region,
                        budget.region_samples,
                        &mut rng.stream(0x400),
                    )
                    .upper,
                });
            }
        }
        out.push(best.ok_or_else(|| {
            ConvError::InvalidInput("no admissible witness found".into())
        })?);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HullVerdict {
    InsideHull,
    OutsideHull,
    Unresolved,
}

/// G-hull membership via the growth of extremal lower bounds in k.
pub fn ghull_member(
    region: &Region,
    x: &[Complex64],
    phi_max: f64,
    k_max: u32,
    budget: &ExtremalBudget,
    seed: u64,
) -> Result<HullVerdict> {
    let bounds = per_weight_bounds(region, x, k_max, budget, seed)?;
    if bounds.iter().any(|b| b.lower.is_infinite()) {
        return Ok(HullVerdict::OutsideHull);
    }
    let vals: Vec<f64> = bounds.iter().map(|b| b.lower).collect();
    let overall = vals.iter().cloned().fold(0.0f64, f64::max);
    let first_half = vals[..vals.len() / 2]
        .iter()
        .cloned()
        .fold(0.0f64, f64::max);
    let growing = first_half > 0.0 && overall > first_half * 1.2;
    if overall > phi_max && growing {
        return Ok(HullVerdict::OutsideHull);
    }
    if overall <= phi_max && !growing {
        return Ok(HullVerdict::InsideHull);
    }
    Ok(HullVerdict::Unresolved)
}

/// Projective extremal lower bound: Psi_E([x]) via homogeneous witnesses
/// constrained by the normalized sup on the cone over E.
pub fn extremal_lower_projective(
    region: &Region,
    x: &[Complex64],
    q_max: u32,
    seed: u64,
) -> Result<ExtremalEstimate> {
    if !region.is_projective() {
        return Err(ConvError::InvalidInput(
            "projective extremal bound needs a projective region".into(),
        ));
    }
    if crate::point_norm(x) == 0.0 {
        return Err(ConvError::ZeroProjectivePoint);
    }
    let n = region.ambient;
    let mut rng = Rng::new(seed).stream(0x9E87);
    let samples = region.sample(300, &mut rng).unwrap_or_default();
    let mut best: Option<ExtremalEstimate> = None;
    for q in 1..=q_max {
        // Homogeneous candidates: monomials and powers of defining forms.
        let mut cands: Vec<Polynomial> = crate::poly::exponents_of_degree(n, q)
            .into_iter()
            .map(|alpha| Polynomial::monomial(n, &alpha, Complex64::new(1.0, 0.0)))
            .collect();
        if let Some(polys) = region.variety_polys() {
            for g in polys {
                let d = g.degree();
                if d >= 1 && q as i64 % d == 0 {
                    cands.push(g.power((q as i64 / d) as u32));
                }
            }
        }
        for p in cands {
            let np = match NormedPoly::new_homogeneous(p.clone(), q) {
                Ok(np) => np,
                Err(_) => continue,
            };
            let val_x = np.normalized_value(x)?;
            let sup_e = samples
                .iter()
                .filter_map(|s| np.normalized_value(s).ok())
                .fold(0.0f64, f64::max);
            if sup_e <= 1e-12 {
                if val_x > 0.0 {
                    return Ok(ExtremalEstimate {
                        lower: f64::INFINITY,
                        weight: q,
                        witness: p,
                        method: WitnessMethod::VanishingFamily,
                        constraint_sup: sup_e,
                    });
                }
                continue;
            }
            let bound = val_x / sup_e;
            if best.as_ref().map(|b| bound > b.lower).unwrap_or(true) {
                best = Some(ExtremalEstimate {
                    lower: bound,
                    weight: q,
                    witness: p.scale(Complex64::new(1.0 / sup_e.powi(q as i32), 0.0)),
                    method: WitnessMethod::MonomialFamily,
                    constraint_sup: 1.0,
                });
            }
        }
    }
    best.ok_or_else(|| ConvError::InvalidInput("no projective witness".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn unit_disk() -> Region {
        Region::ball(1, vec![c(0.0, 0.0)], 1.0)
    }

    /// Classical oracle: Phi of the unit disk is max(1, |z|), witnessed by
    /// z^k with |z^k|_E = 1.
    #[test]
    fn disk_extremal_reaches_classical_value() {
        let budget = ExtremalBudget::default();
        for &(x, expect) in &[(2.0, 2.0), (5.0, 5.0), (1.0, 1.0)] {
            let est = extremal_lower(&unit_disk(), &[c(x, 0.0)], 6, &budget, 3).unwrap();
            assert!(
                est.lower >= expect * 0.98,
                "Phi({x}) lower {} vs {}",
                est.lower,
                expect
            );
            assert!(est.lower <= expect * 1.02);
            // Witness recheck within 1e-9.
            let again = est.recheck(&[c(x, 0.0)]).unwrap();
            assert!((again - est.lower).abs() < 1e-9 * (1.0 + est.lower));
            assert!(est.constraint_sup <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn point_region_gives_unbounded_bound() {
        let region = Region::finite(1, vec![vec![c(0.0, 0.0)]]);
        let est = extremal_lower(&region, &[c(1.0, 0.0)], 3, &ExtremalBudget::default(), 4)
            .unwrap();
        assert!(est.lower.is_infinite());
        assert_eq!(est.method, WitnessMethod::VanishingFamily);
    }

    #[test]
    fn on_the_region_the_bound_is_one() {
        let est = extremal_lower(
            &unit_disk(),
            &[c(1.0, 0.0)],
            4,
            &ExtremalBudget::default(),
            5,
        )
        .unwrap();
        assert!((est.lower - 1.0).abs() < 0.02);
    }

    #[test]
    fn bounds_monotone_in_k() {
        let budget = ExtremalBudget::default();
        let bounds =
            per_weight_bounds(&unit_disk(), &[c(3.0, 0.0)], 6, &budget, 6).unwrap();
        let running: Vec<f64> = bounds
            .iter()
            .scan(0.0f64, |acc, b| {
                *acc = acc.max(b.lower);
                Some(*acc)
            })
            .collect();
        for w in running.windows(2) {
            assert!(w[1] >= w[0] - 1e-12);
        }
    }

    #[test]
    fn ghull_spec_examples() {
        let budget = ExtremalBudget::default();
        let origin = Region::finite(1, vec![vec![c(0.0, 0.0)]]);
        assert_eq!(
            ghull_member(&origin, &[c(1.0, 0.0)], 100.0, 5, &budget, 7).unwrap(),
            HullVerdict::OutsideHull
        );
        assert_eq!(
            ghull_member(&origin, &[c(0.0, 0.0)], 100.0, 5, &budget, 8).unwrap(),
            HullVerdict::InsideHull
        );
        assert_eq!(
            ghull_member(&unit_disk(), &[c(5.0, 0.0)], 100.0, 5, &budget, 9).unwrap(),
            HullVerdict::InsideHull
        );
    }

    #[test]
    fn projective_extremal_on_p1() {
        // E = {x1 = 0} in P^1: witnesses x1^q vanish on E; Psi = inf off E.
        let e = Region::projective_variety(2, vec![Polynomial::variable(2, 0)]);
        let est =
            extremal_lower_projective(&e, &[c(1.0, 0.0), c(1.0, 0.0)], 4, 11).unwrap();
        assert!(est.lower.is_infinite());
    }
}
