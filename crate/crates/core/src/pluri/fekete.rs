//! Fekete configurations and transfinite diameter.
//!
//! `fekete_search` maximizes |V| by greedy insertion over a sampled pool
//! followed by single-point exchange sweeps. No global optimality is
//! claimed; every downstream quantity is reported as a lower bound with an
//! uncertainty estimate.

use super::vandermonde::log_abs_vandermonde;
use crate::error::{ConvError, Result};
use crate::poly::monomial_counts;
use crate::region::Region;
use crate::rng::Rng;
use crate::Point;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy)]
pub struct FeketeBudget {
    pub pool: usize,
    pub sweeps: usize,
}

impl Default for FeketeBudget {
    fn default() -> Self {
        FeketeBudget {
            pool: 400,
            sweeps: 4,
        }
    }
}

/// A point configuration with its Vandermonde value.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FeketeConfig {
    pub points: Vec<Point>,
    pub k: u32,
    /// ln |V(points)|; -inf for degenerate configurations.
    pub log_v: f64,
    /// d_k = |V|^{1/l_k}.
    pub d_k: f64,
}

impl FeketeConfig {
    fn from_points(points: Vec<Point>, k: u32, n: usize) -> Result<FeketeConfig> {
        let (_, l_k) = monomial_counts(n, k);
        let log_v = log_abs_vandermonde(&points, n)?;
        let d_k = if log_v == f64::NEG_INFINITY {
            0.0
        } else {
            (log_v / l_k as f64).exp()
        };
        Ok(FeketeConfig {
            points,
            k,
            log_v,
            d_k,
        })
    }
}

/// Greedy insertion plus exchange search for a near-maximal |V|
/// configuration of m_k points in the region.
pub fn fekete_search(
    region: &Region,
    k: u32,
    budget: &FeketeBudget,
    seed: u64,
) -> Result<FeketeConfig> {
    if k == 0 {
        return Err(ConvError::InvalidInput("fekete_search requires k >= 1".into()));
    }
    let n = region.ambient;
    let (m_k, _) = monomial_counts(n, k);
    let m = m_k as usize;
    let mut rng = Rng::new(seed).stream(0xFE7E);
    let pool = region.sample(budget.pool.max(m), &mut rng)?;
    if pool.is_empty() {
        return Err(ConvError::SamplerBudget("empty region for fekete".into()));
    }

    // Greedy insertion: at step j pick the pool point maximizing |V_j|.
    let mut config: Vec<Point> = vec![pool[0].clone()];
    while config.len() < m {
        let mut best = f64::NEG_INFINITY;
        let mut best_point = pool[0].clone();
        for cand in &pool {
            config.push(cand.clone());
            let lv = log_abs_vandermonde(&config, n)?;
            config.pop();
            if lv > best {
                best = lv;
                best_point = cand.clone();
            }
        }
        config.push(best_point);
    }

    // Exchange sweeps: replace single points while |V| improves.
    let mut log_v = log_abs_vandermonde(&config, n)?;
    for _ in 0..budget.sweeps {
        let mut improved = false;
        for i in 0..m {
            let mut best = log_v;
            let mut best_point: Option<Point> = None;
            let original = config[i].clone();
            for cand in &pool {
                config[i] = cand.clone();
                let lv = log_abs_vandermonde(&config, n)?;
                if lv > best + 1e-12 {
                    best = lv;
                    best_point = Some(cand.clone());
                }
            }
            match best_point {
                Some(p) => {
                    config[i] = p;
                    debug_assert!(best >= log_v);
                    log_v = best;
                    improved = true;
                }
                None => config[i] = original,
            }
        }
        if !improved {
            break;
        }
    }
    FeketeConfig::from_points(config, k, n)
}

/// The d_k sequence with a fitted extrapolation of the limit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TdiamReport {
    pub per_k: Vec<FeketeConfig>,
    pub extrapolated: f64,
    pub uncertainty: f64,
    /// Set when d_k collapses below the floor: capacity-zero diagnostic.
    pub pluripolar_flag: bool,
}

const D_FLOOR: f64 = 1e-9;

/// d_k for k <= k_max plus an extrapolation of d = lim d_k.
///
/// The fit model is ln d_k = ln d + c ln(k+1)/k, exact for disks and
/// mild for the other supported regions; the uncertainty reports the fit
/// residual and the sequence's remaining drift, not an assumed rate.
pub fn transfinite_diameter(
    region: &Region,
    k_max: u32,
    budget: &FeketeBudget,
    seed: u64,
) -> Result<TdiamReport> {
    if k_max < 2 {
        return Err(ConvError::InvalidInput("k_max must be at least 2".into()));
    }
    let mut per_k = Vec::new();
    for k in 1..=k_max {
        per_k.push(fekete_search(region, k, budget, seed ^ (k as u64) << 32)?);
    }
    let pluripolar_flag = per_k.iter().any(|f| f.d_k < D_FLOOR);
    if pluripolar_flag {
        return Ok(TdiamReport {
            per_k,
            extrapolated: 0.0,
            uncertainty: D_FLOOR,
            pluripolar_flag,
        });
    }
    // Least squares of y = ln d_k against x = ln(k+1)/k.
    let pts: Vec<(f64, f64)> = per_k
        .iter()
        .filter(|f| f.k >= 2 && f.d_k > 0.0)
        .map(|f| {
            let k = f.k as f64;
            ((k + 1.0).ln() / k, f.d_k.ln())
        })
        .collect();
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = if sxx > 1e-12 {
        pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / sxx
    } else {
        0.0
    };
    let intercept = my - slope * mx;
    let extrapolated = intercept.exp();
    let resid = pts
        .iter()
        .map(|p| (p.1 - (intercept + slope * p.0)).abs())
        .fold(0.0f64, f64::max);
    let last = per_k.last().unwrap().d_k;
    let prev = per_k[per_k.len() - 2].d_k;
    let drift = (last - prev).abs();
    let uncertainty = (3.0 * resid * extrapolated + drift).max(0.005 * extrapolated);
    Ok(TdiamReport {
        per_k,
        extrapolated,
        uncertainty,
        pluripolar_flag,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn unit_disk() -> Region {
        Region::ball(1, vec![c(0.0, 0.0)], 1.0)
    }

    /// Roots-of-unity oracle: d_k(unit circle) = (k+1)^{1/k}; |V| for the
    /// (k+1)-st roots of unity is (k+1)^{(k+1)/2}.
    fn circle_oracle(k: u32) -> f64 {
        ((k + 1) as f64).powf(1.0 / k as f64)
    }

    #[test]
    fn roots_of_unity_log_v_matches_formula() {
        for m in 2..=9usize {
            let pts: Vec<Point> = (0..m)
                .map(|i| {
                    let th = std::f64::consts::TAU * i as f64 / m as f64;
                    vec![c(th.cos(), th.sin())]
                })
                .collect();
            let lv = log_abs_vandermonde(&pts, 1).unwrap();
            let oracle = (m as f64) / 2.0 * (m as f64).ln();
            assert!(
                (lv - oracle).abs() < 1e-8,
                "m={m}: {lv} vs {oracle}"
            );
        }
    }

    #[test]
    fn fekete_on_circle_degree_two() {
        let cfg = fekete_search(&unit_disk(), 2, &FeketeBudget::default(), 7).unwrap();
        let oracle = circle_oracle(2); // sqrt(3)
        assert!(
            (cfg.d_k - oracle).abs() / oracle < 0.02,
            "d_2 = {} vs {}",
            cfg.d_k,
            oracle
        );
    }

    #[test]
    fn degenerate_single_point_region() {
        let region = Region::finite(1, vec![vec![c(0.25, 0.0)]]);
        let cfg = fekete_search(&region, 1, &FeketeBudget::default(), 3).unwrap();
        assert_eq!(cfg.d_k, 0.0);
        assert_eq!(cfg.log_v, f64::NEG_INFINITY);
    }

    #[test]
    fn scaling_of_matched_configurations() {
        // V is degree-homogeneous: scaling a configuration by lambda scales
        // d_k by |lambda| exactly.
        let cfg = fekete_search(&unit_disk(), 3, &FeketeBudget::default(), 11).unwrap();
        let lambda = c(0.0, 2.5);
        let scaled: Vec<Point> = cfg
            .points
            .iter()
            .map(|p| p.iter().map(|&z| z * lambda).collect())
            .collect();
        let lv = log_abs_vandermonde(&scaled, 1).unwrap();
        let (_, l_k) = monomial_counts(1, 3);
        let d_scaled = (lv / l_k as f64).exp();
        assert!((d_scaled - 2.5 * cfg.d_k).abs() < 0.01 * cfg.d_k);
    }

    #[test]
    fn monotone_under_region_inclusion() {
        let small = Region::ball(1, vec![c(0.0, 0.0)], 0.6);
        let cfg_small = fekete_search(&small, 3, &FeketeBudget::default(), 5).unwrap();
        let cfg_big = fekete_search(&unit_disk(), 3, &FeketeBudget::default(), 5).unwrap();
        assert!(cfg_small.log_v <= cfg_big.log_v + 1e-6);
    }

    #[test]
    fn finite_set_flags_pluripolar() {
        let pts: Vec<Point> = (0..5).map(|i| vec![c(i as f64 * 0.3 - 0.6, 0.0)]).collect();
        let region = Region::finite(1, pts);
        let report = transfinite_diameter(&region, 4, &FeketeBudget::default(), 2).unwrap();
        // m_4 = 5 points just fit; repeats force |V| = 0 beyond... m_k > 5
        // happens at k = 5; at k = 4 the 5 distinct points can still have
        // V != 0. Check k where m_k exceeds the count.
        let _ = &report;
        let report5 = transfinite_diameter(&region, 5, &FeketeBudget::default(), 2).unwrap();
        assert!(report5.pluripolar_flag);
        let last = report5.per_k.last().unwrap();
        assert_eq!(last.d_k, 0.0);
    }
}
