//! Capacity via Chebyshev-type growth factors, and the Bernstein-constant
//! diagnostic.
//!
//! `L_{k,R} = R^{-1} (sup{|p| on the polydisk of radius R : |p|_E <= 1})^{1/k}`
//! is realized from below by explicit witness families; `c = 1/limsup_R L_R`
//! is bracketed from the realized values with the observed stabilization
//! across R and k as the uncertainty.

use super::fekete::{fekete_search, FeketeBudget};
use super::witness::{ascend_coefficients, poly_sup_on_region, region_centroid, witness_candidates};
use crate::error::{ConvError, Result};
use crate::poly::Polynomial;
use crate::region::Region;
use crate::rng::Rng;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy)]
pub struct CapacityBudget {
    pub region_samples: usize,
    pub torus_samples: usize,
    pub ascent_rounds: usize,
}

impl Default for CapacityBudget {
    fn default() -> Self {
        CapacityBudget {
            region_samples: 300,
            torus_samples: 256,
            ascent_rounds: 6,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LkrEntry {
    pub k: u32,
    pub r: f64,
    /// Witness-realized lower bound for L_{k,R}; infinite when a witness
    /// vanishes identically on E.
    pub value: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CapacityEstimate {
    pub per_kr: Vec<LkrEntry>,
    /// L_R = sup_k L_{k,R} per R in the schedule.
    pub l_r: Vec<(f64, f64)>,
    pub c_lower: f64,
    pub c_upper: f64,
    /// A polynomial vanishing on E was found: capacity-zero signal.
    pub vanishing_witness: bool,
}

/// Sup of |p| over the polydisk of polyradius r, sampled on the
/// distinguished boundary torus (maximum modulus puts the sup there).
fn sup_on_polydisk(p: &Polynomial, r: f64, samples: usize, rng: &mut Rng) -> f64 {
    let n = p.dimension();
    let mut best = 0.0f64;
    for _ in 0..samples {
        let x: Vec<Complex64> = (0..n).map(|_| rng.on_circle(r)).collect();
        if let Ok(v) = p.evaluate(&x) {
            best = best.max(v.norm());
        }
    }
    // Axis phases matter for monomial-like witnesses; include a structured
    // sweep as well.
    let sweeps = (samples / 8).max(8);
    for i in 0..sweeps {
        let th = std::f64::consts::TAU * i as f64 / sweeps as f64;
        let x: Vec<Complex64> = (0..n).map(|_| Complex64::from_polar(r, th)).collect();
        if let Ok(v) = p.evaluate(&x) {
            best = best.max(v.norm());
        }
    }
    best
}

pub fn capacity(
    region: &Region,
    k_max: u32,
    r_list: &[f64],
    budget: &CapacityBudget,
    seed: u64,
) -> Result<CapacityEstimate> {
    if k_max == 0 || r_list.is_empty() {
        return Err(ConvError::InvalidInput("capacity needs k_max >= 1 and radii".into()));
    }
    let mut rng = Rng::new(seed).stream(0xCA9);
    let centroid = region_centroid(region, &mut rng);
    let mut per_kr: Vec<LkrEntry> = Vec::new();
    let mut vanishing = false;

    for k in 1..=k_max {
        // Configuration points feed the Lagrange-style family.
        let cfg = fekete_search(region, k.min(6), &FeketeBudget::default(), seed ^ 0x33)
            .ok()
            .map(|c| c.points);
        let mut candidates = witness_candidates(
            region,
            k,
            &centroid,
            cfg.as_deref(),
            &mut rng.stream(k as u64),
        );
        // Local ascent from the ladder witness.
        if let Some(base) = candidates.get(1).cloned() {
            let target: Vec<Complex64> = centroid
                .iter()
                .map(|&c| c + Complex64::new(r_list[r_list.len() - 1], 0.0))
                .collect();
            candidates.push(ascend_coefficients(
                &base,
                region,
                &target,
                budget.region_samples,
                budget.ascent_rounds,
                &mut rng.stream(0x5eed ^ k as u64),
            ));
        }

        for &r in r_list {
            let mut best = 0.0f64;
            for p in &candidates {
                if p.degree() > k as i64 || p.is_zero() {
                    continue;
                }
                let sup_e =
                    poly_sup_on_region(p, region, budget.region_samples, &mut rng.stream(0xE));
                let sup_dr = sup_on_polydisk(p, r, budget.torus_samples, &mut rng.stream(0xD));
                if sup_e.upper <= 1e-12 * sup_dr.max(1.0) {
                    if sup_dr > 0.0 {
                        vanishing = true;
                        best = f64::INFINITY;
                    }
                    continue;
                }
                // Normalize to |p|_E <= 1 using the heuristic upper bound.
                let val = (sup_dr / sup_e.upper).powf(1.0 / k as f64) / r;
                best = best.max(val);
            }
            per_kr.push(LkrEntry { k, r, value: best });
        }
    }

    let l_r: Vec<(f64, f64)> = r_list
        .iter()
        .map(|&r| {
            let sup = per_kr
                .iter()
                .filter(|e| e.r == r)
                .map(|e| e.value)
                .fold(0.0f64, f64::max);
            (r, sup)
        })
        .collect();

    if vanishing || l_r.iter().any(|&(_, v)| v.is_infinite()) {
        return Ok(CapacityEstimate {
            per_kr,
            l_r,
            c_lower: 0.0,
            c_upper: 0.0,
            vanishing_witness: true,
        });
    }

    let l_final = l_r.last().map(|&(_, v)| v).unwrap_or(0.0);
    let l_max = l_r.iter().map(|&(_, v)| v).fold(0.0f64, f64::max);
    if l_max <= 0.0 {
        return Err(ConvError::InvalidInput(
            "witness family produced no usable bound".into(),
        ));
    }
    // Stabilization across R and across the last k increment set the
    // reported slack.
    let spread = if l_r.len() >= 2 {
        let prev = l_r[l_r.len() - 2].1;
        ((l_final - prev).abs() / l_max).min(1.0)
    } else {
        0.0
    };
    let k_gap = {
        let at = |k: u32| {
            per_kr
                .iter()
                .filter(|e| e.k == k)
                .map(|e| e.value)
                .fold(0.0f64, f64::max)
        };
        if k_max >= 2 {
            let a = at(k_max);
            let b = at(k_max - 1);
            if b > 0.0 {
                ((a - b).abs() / b).min(1.0)
            } else {
                0.5
            }
        } else {
            0.5
        }
    };
    let slack = (spread + k_gap + 0.02).min(0.9);
    let c_upper = 1.0 / l_max;
    let c_lower = c_upper * (1.0 - slack);
    Ok(CapacityEstimate {
        per_kr,
        l_r,
        c_lower,
        c_upper,
        vanishing_witness: false,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BernsteinReport {
    /// Per degree d: the largest observed (max_alpha |a_alpha| / |p|_E)^{1/d}.
    pub per_degree: Vec<(u32, f64)>,
    /// Some sampled polynomial had |p|_E = 0: capacity-zero signal.
    pub unbounded: bool,
}

/// Empirical lower bound for the Bernstein constant C_E: samples random
/// polynomials and maximizes the coefficient-to-sup ratio. Divergence of
/// the per-degree values flags capacity zero.
pub fn bernstein_constant(
    region: &Region,
    d_max: u32,
    trials: usize,
    seed: u64,
) -> Result<BernsteinReport> {
    if d_max == 0 {
        return Err(ConvError::InvalidInput("bernstein needs d_max >= 1".into()));
    }
    let n = region.ambient;
    let mut rng = Rng::new(seed).stream(0xBE57);
    let mut per_degree = Vec::new();
    let mut unbounded = false;
    for d in 1..=d_max {
        let mut best = 0.0f64;
        for t in 0..trials.max(4) {
            let p = if n == 1 && t % 3 == 0 {
                chebyshev_like(d, t as u32 / 3)
            } else {
                random_poly(n, d, &mut rng)
            };
            if p.is_zero() {
                continue;
            }
            let max_coeff = p.max_coefficient();
            let sup = poly_sup_on_region(&p, region, 200, &mut rng.stream(d as u64));
            if sup.upper <= 1e-14 * max_coeff {
                unbounded = true;
                continue;
            }
            best = best.max((max_coeff / sup.upper).powf(1.0 / d as f64));
        }
        per_degree.push((d, best));
    }
    Ok(BernsteinReport {
        per_degree,
        unbounded,
    })
}

fn random_poly(n: usize, d: u32, rng: &mut Rng) -> Polynomial {
    let mut p = Polynomial::zero(n);
    // Sparse draws over the graded basis up to degree d.
    let (m_d, _) = crate::poly::monomial_counts(n, d);
    for _ in 0..(2 * d as usize + 3) {
        let i = 1 + rng.below(m_d as usize) as u64;
        let alpha = crate::poly::monomial_at(n, i).exponent;
        p.add_term(&alpha, rng.gaussian());
    }
    p
}

/// Chebyshev polynomials mapped to [-2, 2], classical witnesses with
/// extremal coefficient growth on segments.
fn chebyshev_like(d: u32, variant: u32) -> Polynomial {
    let x = Polynomial::variable(1, 0);
    let half = x.scale(Complex64::new(0.5, 0.0));
    let mut t_prev = Polynomial::one(1);
    let mut t_cur = half.clone();
    for _ in 1..d {
        // T_{k+1}(y) = 2 y T_k - T_{k-1} with y = x/2
        let next = half
            .scale(Complex64::new(2.0, 0.0))
            .multiply(&t_cur)
            .sub(&t_prev);
        t_prev = t_cur;
        t_cur = next;
    }
    if variant % 2 == 1 {
        t_cur = t_cur.add(&t_prev.scale(Complex64::new(0.5, 0.0)));
    }
    t_cur
}
