//! Windowed root-test classification of coefficient streams.
//!
//! The dichotomy behind every construction here is: bounded j-th root
//! values mean convergence, a sustained growth trend means divergence.
//! At a finite horizon the verdict comes from the record sequence of
//! r_j = |c_j|^{1/j} (running maxima over the nonzero support): a flat
//! record envelope classifies CONVERGES, a power-law envelope with enough
//! total growth classifies DIVERGES, anything in between is INDETERMINATE.
//! All trend statistics are invariant under scaling the stream by lambda^j,
//! which makes projective verdicts independent of the representative.

use super::MaterializedTerm;
use crate::error::{ConvError, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum VerdictKind {
    Converges,
    Diverges,
    Indeterminate,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ConvergenceVerdict {
    pub kind: VerdictKind,
    /// Estimated limsup_j |c_j|^{1/j}; may be infinite.
    pub growth_estimate: f64,
    /// (j_min, j_max) of the tail window used.
    pub window: (usize, usize),
    /// Separation from the decision thresholds; 0 for INDETERMINATE.
    pub margin: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct ClassifyConfig {
    /// Smallest admissible horizon.
    pub j_min: usize,
    /// Caller's scale for the bounded regime; only margins and the reported
    /// level use it, trend statistics are scale-free.
    pub expected_bound: f64,
    /// Minimal record-envelope slope (d log r / d log j) for divergence.
    pub diverge_slope: f64,
    /// Minimal total record growth factor for divergence.
    pub diverge_factor: f64,
    /// Maximal slope still considered flat.
    pub converge_slope: f64,
    /// Maximal record factor still considered flat.
    pub converge_factor: f64,
    /// Late/early slope ratio below which growth is treated as saturating.
    pub curvature_min: f64,
    /// Alternative to the slope ratio: growth is sustained when the records
    /// in the late half still gain at least this factor.
    pub late_factor_min: f64,
    /// Root values below this level are evaluation noise (probes that sit
    /// on a zero set up to double precision) and count as zeros.
    pub noise_floor: f64,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        ClassifyConfig {
            j_min: 8,
            expected_bound: 1.0,
            diverge_slope: 0.04,
            diverge_factor: 1.15,
            converge_slope: 0.02,
            converge_factor: 1.10,
            curvature_min: 0.4,
            late_factor_min: 1.25,
            noise_floor: 1e-6,
        }
    }
}

impl ClassifyConfig {
    pub fn bound_b(&self) -> f64 {
        1.5 * self.expected_bound.max(1.0)
    }
}

struct TrendStats {
    slope: f64,
    record_factor: f64,
    curvature_ok: bool,
    records: usize,
}

fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    if points.len() < 2 {
        return 0.0;
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx < 1e-12 {
        return 0.0;
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    sxy / sxx
}

fn trend(records: &[(f64, f64)], curvature_min: f64, late_factor_min: f64) -> TrendStats {
    if records.len() < 2 {
        return TrendStats {
            slope: 0.0,
            record_factor: 1.0,
            curvature_ok: true,
            records: records.len(),
        };
    }
    let record_factor = (records.last().unwrap().1 - records[0].1).exp();
    let span = records.last().unwrap().0 - records[0].0;
    let slope = if records.len() >= 3 && span >= std::f64::consts::LN_2 * 0.9 {
        least_squares_slope(records)
    } else {
        0.0
    };
    // Saturation guard: genuine power-law growth keeps its slope (or keeps
    // gaining whole factors) in the later records; a bounded stream
    // approaching its limsup flattens on both counts.
    let mut curvature_ok = true;
    if records.len() >= 6 && slope > 0.0 {
        let mid = records[0].0 + span / 2.0;
        let early: Vec<(f64, f64)> = records.iter().filter(|p| p.0 <= mid).cloned().collect();
        let late: Vec<(f64, f64)> = records.iter().filter(|p| p.0 > mid).cloned().collect();
        if early.len() >= 2 && late.len() >= 2 {
            let se = least_squares_slope(&early);
            let sl = least_squares_slope(&late);
            // The factor escape looks at the top third of the span, where
            // a saturating stream has already flattened.
            let tail_from = records[0].0 + span * 2.0 / 3.0;
            let tail: Vec<&(f64, f64)> =
                records.iter().filter(|p| p.0 >= tail_from).collect();
            let tail_factor = if tail.len() >= 2 {
                (tail.last().unwrap().1 - tail[0].1).exp()
            } else {
                1.0
            };
            if se > 1e-9 {
                curvature_ok = sl / se >= curvature_min || tail_factor >= late_factor_min;
            }
        }
    }
    TrendStats {
        slope,
        record_factor,
        curvature_ok,
        records: records.len(),
    }
}

/// Classifies a coefficient stream given as ln |c_j| (index = exponent j,
/// -inf at zero coefficients).
pub fn classify(log_mags: &[f64], cfg: &ClassifyConfig) -> Result<ConvergenceVerdict> {
    let horizon = log_mags.len().saturating_sub(1);
    if horizon < cfg.j_min {
        return Err(ConvError::WindowTooSmall {
            horizon,
            j_min: cfg.j_min,
        });
    }
    let window = (horizon.div_ceil(2), horizon);
    let floor = cfg.noise_floor.ln();
    let entries: Vec<(usize, f64)> = (1..=horizon)
        .filter(|&j| log_mags[j] != f64::NEG_INFINITY)
        .map(|j| (j, log_mags[j] / j as f64))
        .filter(|&(_, r)| r >= floor)
        .collect();

    if entries.is_empty() {
        return Ok(ConvergenceVerdict {
            kind: VerdictKind::Converges,
            growth_estimate: 0.0,
            window,
            margin: 1.0,
        });
    }
    if entries.iter().any(|&(_, r)| r.is_infinite() && r > 0.0) {
        return Ok(ConvergenceVerdict {
            kind: VerdictKind::Diverges,
            growth_estimate: f64::INFINITY,
            window,
            margin: f64::INFINITY,
        });
    }

    let tail_max = entries
        .iter()
        .filter(|&&(j, _)| j >= window.0)
        .map(|&(_, r)| r)
        .fold(f64::NEG_INFINITY, f64::max);
    let growth_estimate = if tail_max == f64::NEG_INFINITY {
        0.0
    } else {
        tail_max.exp()
    };

    // Record sequence: strictly increasing running maxima of log r_j.
    let mut records: Vec<(f64, f64)> = Vec::new();
    let mut best = f64::NEG_INFINITY;
    for &(j, r) in &entries {
        if r > best {
            best = r;
            records.push(((j as f64).ln(), r));
        }
    }
    let stats = trend(&records, cfg.curvature_min, cfg.late_factor_min);

    // The nonzero support ends early: the observed object is a polynomial
    // in t within this horizon.
    let support_ends_early = entries.last().map(|&(j, _)| j).unwrap_or(0) < window.0;

    let diverges = stats.slope >= cfg.diverge_slope
        && stats.record_factor >= cfg.diverge_factor
        && stats.curvature_ok
        && stats.records >= 3
        && !support_ends_early;
    let converges = stats.slope <= cfg.converge_slope && stats.record_factor <= cfg.converge_factor
        || support_ends_early;

    if diverges {
        let margin = (stats.slope / cfg.diverge_slope)
            .min(stats.record_factor / cfg.diverge_factor)
            - 1.0;
        return Ok(ConvergenceVerdict {
            kind: VerdictKind::Diverges,
            growth_estimate,
            window,
            margin,
        });
    }
    if converges {
        let flat_margin = if support_ends_early {
            1.0
        } else {
            (1.0 - stats.slope / cfg.converge_slope)
                .min((cfg.converge_factor - stats.record_factor) / (cfg.converge_factor - 1.0))
                .clamp(0.0, 1.0)
        };
        return Ok(ConvergenceVerdict {
            kind: VerdictKind::Converges,
            growth_estimate,
            window,
            margin: flat_margin,
        });
    }
    Ok(ConvergenceVerdict {
        kind: VerdictKind::Indeterminate,
        growth_estimate,
        window,
        margin: 0.0,
    })
}

/// Multivariate root test on the joint coefficients b_alpha of the
/// (n+1)-variable series, indexed by total degree |alpha| + q.
///
/// Cross-checks synthesizers: a series converging at every probe should
/// also converge jointly (Hartogs), a nontrivial convergence set forces
/// joint divergence.
pub fn hartogs_joint_check(
    terms: &[MaterializedTerm],
    horizon: u64,
    cfg: &ClassifyConfig,
) -> Result<ConvergenceVerdict> {
    let horizon = horizon as usize;
    let mut joint = vec![f64::NEG_INFINITY; horizon + 1];
    for t in terms {
        if t.poly.is_zero() {
            continue;
        }
        // Expand the factor product with each factor scaled to unit max
        // coefficient; the scales ride along in log space.
        let mut expanded = crate::poly::Polynomial::one(t.poly.dimension());
        let mut log_scale = t.poly.log_constant();
        let mut overflow = false;
        for f in t.poly.factors() {
            let maxc = f.poly.max_coefficient();
            if maxc == 0.0 {
                overflow = false;
                expanded = crate::poly::Polynomial::zero(t.poly.dimension());
                break;
            }
            let unit = f.poly.scale(num_complex::Complex64::new(1.0 / maxc, 0.0));
            log_scale += maxc.ln() * f.power as f64;
            expanded = expanded.multiply(&unit.power(f.power));
            if expanded.max_coefficient().is_infinite() {
                overflow = true;
                break;
            }
        }
        if overflow {
            return Err(ConvError::BudgetExhausted(
                "joint coefficient expansion overflowed; lower the horizon".into(),
            ));
        }
        for (alpha, c) in expanded.terms() {
            let d = alpha.iter().sum::<u32>() as usize + t.exponent as usize;
            if d <= horizon && c.norm() > 0.0 {
                let log_b = c.norm().ln() + log_scale;
                if log_b > joint[d] {
                    joint[d] = log_b;
                }
            }
        }
    }
    classify(&joint, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stream_from<F: Fn(usize) -> f64>(d: usize, log_c: F) -> Vec<f64> {
        let mut v = vec![f64::NEG_INFINITY; d + 1];
        for (j, item) in v.iter_mut().enumerate().skip(1) {
            *item = log_c(j);
        }
        v
    }

    #[test]
    fn geometric_stream_converges_with_growth_two() {
        // c_j = 2^j
        let s = stream_from(64, |j| j as f64 * 2f64.ln());
        let v = classify(&s, &ClassifyConfig::default()).unwrap();
        assert_eq!(v.kind, VerdictKind::Converges);
        assert!((v.growth_estimate - 2.0).abs() < 1e-9);
        assert!(v.margin > 0.5);
    }

    #[test]
    fn factorial_stream_diverges_at_sixty() {
        // c_j = j!; oracle for the window: (j!)^{1/j} grows ~ j/e.
        let mut log_fact = 0.0;
        let mut s = vec![f64::NEG_INFINITY; 61];
        for j in 1..=60usize {
            log_fact += (j as f64).ln();
            s[j] = log_fact;
        }
        let v = classify(&s, &ClassifyConfig::default()).unwrap();
        assert_eq!(v.kind, VerdictKind::Diverges);
        assert!(v.margin > 1.0);
        // growth estimate near 60!. ^{1/60} ~ 60/e * (2 pi 60)^(1/120)
        assert!(v.growth_estimate > 15.0 && v.growth_estimate < 30.0);
    }

    #[test]
    fn zero_stream_converges_with_zero_growth() {
        let s = vec![f64::NEG_INFINITY; 65];
        let v = classify(&s, &ClassifyConfig::default()).unwrap();
        assert_eq!(v.kind, VerdictKind::Converges);
        assert_eq!(v.growth_estimate, 0.0);
    }

    #[test]
    fn window_too_small_is_an_error() {
        let s = vec![f64::NEG_INFINITY; 5];
        assert!(matches!(
            classify(&s, &ClassifyConfig::default()),
            Err(ConvError::WindowTooSmall { .. })
        ));
    }

    #[test]
    fn verdict_invariant_under_dropping_zero_coefficients() {
        // Same nonzero entries on a sparser support.
        let mut dense = vec![f64::NEG_INFINITY; 65];
        let mut sparse = vec![f64::NEG_INFINITY; 65];
        for j in (2..=64).step_by(2) {
            let r = 0.5 * ((j / 2) as f64) * ((j / 2) as f64).ln(); // (k)^{k/2} at j=2k
            dense[j] = r;
            sparse[j] = r;
        }
        for j in (1..=63).step_by(2) {
            dense[j] = f64::NEG_INFINITY; // explicit zeros, same thing
        }
        let a = classify(&dense, &ClassifyConfig::default()).unwrap();
        let b = classify(&sparse, &ClassifyConfig::default()).unwrap();
        assert_eq!(a.kind, b.kind);
    }

    #[test]
    fn power_law_with_small_magnitude_still_diverges() {
        // log c_{2k} = k ln k + 2k ln 0.05 gives r_{2k} = k^{1/2} * 0.05:
        // levels stay below 0.3 out to j = 64 yet the trend is an exact
        // power law with slope 1/2.
        let s = stream_from(64, |j| {
            if j % 2 == 0 {
                let k = j as f64 / 2.0;
                k * k.ln() + 2.0 * k * (0.05f64).ln()
            } else {
                f64::NEG_INFINITY
            }
        });
        let v = classify(&s, &ClassifyConfig::default()).unwrap();
        assert_eq!(v.kind, VerdictKind::Diverges);
        assert!(v.growth_estimate < 0.5);
    }

    #[test]
    fn scale_invariance_of_verdicts() {
        // Multiplying c_j by lambda^j shifts log r by a constant.
        let base = stream_from(64, |j| (j as f64) * 0.3 + (j as f64).ln() * 3.0);
        let shifted: Vec<f64> = base
            .iter()
            .enumerate()
            .map(|(j, &l)| {
                if l == f64::NEG_INFINITY {
                    l
                } else {
                    l + j as f64 * (7.5f64).ln()
                }
            })
            .collect();
        let a = classify(&base, &ClassifyConfig::default()).unwrap();
        let b = classify(&shifted, &ClassifyConfig::default()).unwrap();
        assert_eq!(a.kind, b.kind);
        assert!((a.margin - b.margin).abs() < 1e-6);
    }

    #[test]
    fn saturating_stream_is_not_divergent() {
        // r_j -> 2 from below: bounded, so never DIVERGES.
        let s = stream_from(64, |j| {
            let r = 2.0 * (1.0 - 1.0 / (j as f64).sqrt());
            (j as f64) * r.max(0.1).ln()
        });
        let v = classify(&s, &ClassifyConfig::default()).unwrap();
        assert_ne!(v.kind, VerdictKind::Diverges);
    }

    #[test]
    fn infinite_entry_forces_divergence() {
        let mut s = stream_from(32, |_| 0.0);
        s[20] = f64::INFINITY;
        let v = classify(&s, &ClassifyConfig::default()).unwrap();
        assert_eq!(v.kind, VerdictKind::Diverges);
        assert!(v.growth_estimate.is_infinite());
    }
}
