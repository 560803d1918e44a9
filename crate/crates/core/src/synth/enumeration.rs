//! Enumeration synthesis: `f = sum_j p_j(s)^{r_j} t^{r_j k_j}` over
//! rational-coefficient pairs (p_j, k_j) with |p_j|_K <= 1, the powers
//! chosen so the exponents strictly increase.
//!
//! The constraint is decided in exact rational arithmetic. The enumerated
//! slice is a dense low-height core (every coefficient tuple up to height
//! 2 and degree k_cap) plus a height ladder h * p over the core members
//! that vanish identically on K; the ladder caps the feasible part of the
//! family while keeping the shell counts linear in the height bound.

use super::{
    EnumShells, Exactness, ProbeResult, SynthMode, SynthesisReport, TargetSet,
};
use crate::error::{ConvError, Result};
use crate::poly::{ExactPoly, RatComplex};
use crate::region::Region;
use crate::rng::Rng;
use crate::series::{
    ClassifyConfig, ConvergenceVerdict, ExplicitTerm, FactoredPoly, SeriesSpec, TermRule,
    VerdictKind,
};
use crate::Point;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use std::collections::BTreeSet;

#[derive(Debug, Clone, Copy)]
pub struct EnumConfig {
    /// Degree bound of enumerated polynomials.
    pub k_cap: u32,
    /// Height ladder bound.
    pub height: u32,
    pub off_probes: usize,
    pub seed: u64,
}

impl Default for EnumConfig {
    fn default() -> Self {
        EnumConfig {
            k_cap: 2,
            height: 8,
            off_probes: 40,
            seed: 0,
        }
    }
}

/// Continued-fraction rational reconstruction with a denominator cap;
/// exact-mode inputs must be honest rationals.
fn to_rational(x: f64, den_cap: i64) -> Result<BigRational> {
    if !x.is_finite() {
        return Err(ConvError::InvalidInput("nonfinite coordinate".into()));
    }
    let mut best = (BigInt::from(0), BigInt::from(1));
    let mut err_best = x.abs();
    for den in 1..=den_cap {
        let num = (x * den as f64).round();
        let err = (x - num / den as f64).abs();
        if err < err_best {
            err_best = err;
            best = (BigInt::from(num as i64), BigInt::from(den));
        }
        if err_best < 1e-12 {
            break;
        }
    }
    if err_best > 1e-9 {
        return Err(ConvError::InvalidInput(format!(
            "coordinate {x} is not a small rational; exact mode needs rational data"
        )));
    }
    Ok(BigRational::new(best.0, best.1))
}

fn rationalize_point(p: &[num_complex::Complex64]) -> Result<Vec<RatComplex>> {
    p.iter()
        .map(|z| {
            Ok(RatComplex {
                re: to_rational(z.re, 64)?,
                im: to_rational(z.im, 64)?,
            })
        })
        .collect()
}

/// Distinct coefficient values of height at most 2:
/// (a + b i)/d with |a|,|b| <= 2 and d in {1, 2}.
fn coefficient_values() -> Vec<RatComplex> {
    let mut vals: Vec<RatComplex> = Vec::new();
    for d in [1i64, 2] {
        for a in -2i64..=2 {
            for b in -2i64..=2 {
                let v = RatComplex::from_parts(a, b, d);
                if !vals.contains(&v) {
                    vals.push(v);
                }
            }
        }
    }
    vals
}

struct Member {
    poly: ExactPoly,
    weight: u32,
    shell: u32,
}

fn exact_key(p: &ExactPoly) -> String {
    use std::fmt::Write;
    let mut s = String::new();
    for (alpha, c) in p.terms() {
        let _ = write!(s, "{alpha:?}:{}/{};", c.re, c.im);
    }
    s
}

fn enumerate_members(k_points: &[Vec<RatComplex>], cfg: &EnumConfig) -> Vec<Member> {
    let one = BigRational::one();
    let values = coefficient_values();
    let slots = cfg.k_cap as usize + 1;
    let mut members = Vec::new();
    let mut vanishers = Vec::new();
    let mut seen = BTreeSet::new();

    // Dense core: every coefficient tuple, filtered exactly.
    let mut index = vec![0usize; slots];
    'outer: loop {
        let mut p = ExactPoly::zero(1);
        for (d, &vi) in index.iter().enumerate() {
            p.add_term(&[d as u32], values[vi].clone());
        }
        if !p.is_zero() {
            let admissible = k_points
                .iter()
                .all(|x| p.value_within(x, &one).unwrap_or(false));
            if admissible {
                let vanishes = k_points
                    .iter()
                    .all(|x| p.evaluate_exact(x).map(|v| v.is_zero()).unwrap_or(false));
                let shell = p.height().to_u32().unwrap_or(2).max(1);
                let weight = p.degree().max(1) as u32;
                if seen.insert(exact_key(&p)) {
                    if vanishes {
                        vanishers.push(p.clone());
                    }
                    members.push(Member {
                        poly: p,
                        weight,
                        shell,
                    });
                }
            }
        }
        // Advance the mixed-radix counter.
        for slot in 0..slots {
            index[slot] += 1;
            if index[slot] < values.len() {
                continue 'outer;
            }
            index[slot] = 0;
        }
        break;
    }
    members.sort_by_key(|m| m.shell);

    // Height ladder over the exactly-vanishing core members.
    for h in 3..=cfg.height as i64 {
        for v in &vanishers {
            let p = v.scale_int(h);
            if seen.insert(exact_key(&p)) {
                let weight = p.degree().max(1) as u32;
                members.push(Member {
                    poly: p,
                    weight,
                    shell: h as u32,
                });
            }
        }
    }
    members
}

/// Members for variety-with-ball targets: scaled constants plus exact
/// multiples of the defining polynomial (which vanish on K identically).
fn variety_members(g: &ExactPoly, cfg: &EnumConfig) -> Vec<Member> {
    let mut members = Vec::new();
    let mut seen = BTreeSet::new();
    // Constants of modulus at most 1.
    for c in coefficient_values() {
        let norm: BigRational = c.abs_sq();
        if norm <= BigRational::one() && !c.is_zero() {
            let p = ExactPoly::monomial(1, &[0], c);
            if seen.insert(exact_key(&p)) {
                members.push(Member {
                    poly: p,
                    weight: 1,
                    shell: 1,
                });
            }
        }
    }
    for h in 1..=cfg.height as i64 {
        let p = g.scale_int(h);
        if seen.insert(exact_key(&p)) {
            let weight = p.degree().max(1) as u32;
            members.push(Member {
                poly: p,
                weight,
                shell: h.unsigned_abs() as u32,
            });
        }
    }
    members
}

/// Classifies an enumeration stream from its shell metadata: on-target
/// streams keep every term value at most 1 (the exact constraint); off
/// target, the per-shell maxima grow with the height ladder.
pub fn enum_verdict(shells: &EnumShells, log_mags: &[f64]) -> Result<ConvergenceVerdict> {
    if shells.is_empty() {
        return Err(ConvError::InvalidInput("no enumeration metadata".into()));
    }
    let horizon = log_mags.len().saturating_sub(1);
    let mut shell_max: std::collections::BTreeMap<u32, f64> = std::collections::BTreeMap::new();
    let mut overall = 0.0f64;
    for &(exponent, shell, weight) in shells {
        let e = exponent as usize;
        if e > horizon {
            continue;
        }
        let l = log_mags[e];
        let v = if l == f64::NEG_INFINITY {
            0.0
        } else {
            // |p^r|^{1/(r k)} = |p|^{1/k}
            (l / exponent as f64).exp()
        };
        let _ = weight;
        let slot = shell_max.entry(shell).or_insert(0.0);
        if v > *slot {
            *slot = v;
        }
        overall = overall.max(v);
    }
    let window = (1usize, horizon);
    if overall <= 1.0 + 1e-9 {
        return Ok(ConvergenceVerdict {
            kind: VerdictKind::Converges,
            growth_estimate: overall,
            window,
            margin: (1.0 - overall).max(0.0) + 1e-3,
        });
    }
    // Ladder trend: shell maxima should grow essentially linearly in the
    // height once off the G-hull.
    let ladder: Vec<(u32, f64)> = shell_max
        .iter()
        .filter(|&(&h, _)| h >= 2)
        .map(|(&h, &v)| (h, v))
        .collect();
    if ladder.len() >= 2 {
        let first = ladder[0].1;
        let last = ladder[ladder.len() - 1].1;
        let nondecreasing = ladder.windows(2).all(|w| w[1].1 >= w[0].1 * (1.0 - 1e-9));
        if nondecreasing && last > 1.0 && first > 0.0 && last >= 1.3 * first.min(1.0) {
            let margin = (last / first.max(1.0)).min(last) - 1.0;
            return Ok(ConvergenceVerdict {
                kind: VerdictKind::Diverges,
                growth_estimate: overall,
                window,
                margin: margin.max(0.05),
            });
        }
    }
    Ok(ConvergenceVerdict {
        kind: VerdictKind::Indeterminate,
        growth_estimate: overall,
        window,
        margin: 0.0,
    })
}

/// Enumeration synthesis targeting the G-hull of a finite rational set
/// (or of a variety clipped by a ball).
pub fn synth_enumeration(region: &Region, cfg: &EnumConfig) -> Result<SynthesisReport> {
    if region.ambient != 1 {
        return Err(ConvError::InvalidInput(
            "enumeration synthesis is implemented for subsets of C".into(),
        ));
    }
    let (members, target) = if let Some(points) = region.finite_point_list() {
        let exact_points: Vec<Vec<RatComplex>> = points
            .iter()
            .map(|p| rationalize_point(p))
            .collect::<Result<_>>()?;
        let members = enumerate_members(&exact_points, cfg);
        let target = TargetSet::from_points_1d(
            &points.iter().map(|p| p[0]).collect::<Vec<_>>(),
        )?;
        (members, target)
    } else if let Some(polys) = region.variety_polys() {
        let g = &polys[0];
        let mut exact = ExactPoly::zero(1);
        for (alpha, c) in g.terms() {
            exact.add_term(
                alpha,
                RatComplex {
                    re: to_rational(c.re, 64)?,
                    im: to_rational(c.im, 64)?,
                },
            );
        }
        let members = variety_members(&exact, cfg);
        let target = TargetSet::affine(1, vec![g.clone()])?;
        (members, target)
    } else {
        return Err(ConvError::InvalidInput(
            "enumeration targets are FINITE or VARIETY regions".into(),
        ));
    };
    if members.is_empty() {
        return Err(ConvError::BudgetExhausted("empty enumeration".into()));
    }

    // Strictly increasing exponents r_j k_j.
    let mut terms = Vec::with_capacity(members.len());
    let mut shells: EnumShells = Vec::with_capacity(members.len());
    let mut prev = 0u64;
    for m in &members {
        let k = m.weight as u64;
        let r = prev / k + 1;
        let exponent = r * k;
        debug_assert!(exponent > prev);
        prev = exponent;
        let float_poly = m.poly.to_float();
        let mut poly = FactoredPoly::constant(1, num_complex::Complex64::new(1.0, 0.0));
        poly.push_factor(float_poly, r as u32);
        terms.push(ExplicitTerm { exponent, poly });
        shells.push((exponent, m.shell, m.weight));
    }
    let horizon = prev;
    let spec = SeriesSpec::new(1, vec![TermRule::Explicit { terms }])
        .with_class_checked(1, 0, horizon)?;

    // Probe plan: the K points plus an off-target polar grid.
    let mut rng = Rng::new(cfg.seed).stream(0xE9);
    let mut plan: Vec<(Point, bool)> = Vec::new();
    if let Some(points) = region.finite_point_list() {
        for p in points {
            plan.push((p.clone(), true));
        }
    } else {
        for p in target.region(1).sample(12, &mut rng)? {
            plan.push((p, true));
        }
    }
    let radii = [0.4, 0.6, 0.9, 1.3, 1.8];
    let mut placed = 0;
    let mut angle_idx = 0u32;
    while placed < cfg.off_probes && angle_idx < cfg.off_probes as u32 * 8 {
        let r = radii[(angle_idx as usize) % radii.len()];
        let th = std::f64::consts::TAU * (angle_idx as f64 * 0.137).fract();
        angle_idx += 1;
        let x = vec![num_complex::Complex64::from_polar(r, th)];
        if target.distance(&x, cfg.seed) >= 0.2 {
            plan.push((x, false));
            placed += 1;
        }
    }

    let probes: Vec<ProbeResult> = plan
        .par_iter()
        .map(|(x, on_target)| {
            let stream = spec.restrict_affine(x, horizon)?;
            let verdict = enum_verdict(&shells, &stream.log_mags)?;
            Ok(ProbeResult {
                probe: x.clone(),
                on_target: *on_target,
                verdict,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let hartogs = spec
        .hartogs_joint(horizon.min(240), &ClassifyConfig::default())
        .unwrap_or(ConvergenceVerdict {
            kind: VerdictKind::Indeterminate,
            growth_estimate: f64::INFINITY,
            window: (1, horizon as usize),
            margin: 0.0,
        });

    Ok(SynthesisReport {
        mode: SynthMode::Enumeration,
        spec,
        target,
        exactness: Exactness::Exact,
        horizon,
        probes,
        certified_window: None,
        witnesses: Vec::new(),
        enum_shells: shells,
        hartogs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn origin_target_verdicts() {
        let region = Region::finite(1, vec![vec![c(0.0, 0.0)]]);
        let cfg = EnumConfig {
            k_cap: 1,
            height: 8,
            off_probes: 10,
            seed: 1,
        };
        let report = synth_enumeration(&region, &cfg).unwrap();
        assert!(report.spec.check_class(1, 0, report.horizon).unwrap());
        // Exponents strictly increase.
        let exps = report.spec.exponents(report.horizon).unwrap();
        for w in exps.windows(2) {
            assert!(w[1] > w[0]);
        }
        for p in &report.probes {
            if p.on_target {
                assert_eq!(p.verdict.kind, VerdictKind::Converges);
                assert!(p.verdict.growth_estimate <= 1.0 + 1e-9);
            } else {
                assert_eq!(p.verdict.kind, VerdictKind::Diverges, "at {:?}", p.probe);
            }
        }
    }

    #[test]
    fn two_point_target_diverges_between() {
        let region = Region::finite(1, vec![vec![c(0.0, 0.0)], vec![c(1.0, 0.0)]]);
        let cfg = EnumConfig {
            k_cap: 2,
            height: 16,
            off_probes: 6,
            seed: 2,
        };
        let report = synth_enumeration(&region, &cfg).unwrap();
        // The midpoint 1/2 diverges: interpolation witnesses h z (z - 1).
        let stream = report
            .spec
            .restrict_affine(&[c(0.5, 0.0)], report.horizon)
            .unwrap();
        let v = enum_verdict(&report.enum_shells, &stream.log_mags).unwrap();
        assert_eq!(v.kind, VerdictKind::Diverges);
        // And the K points converge.
        for p in &report.probes {
            if p.on_target {
                assert_eq!(p.verdict.kind, VerdictKind::Converges);
            }
        }
    }

    #[test]
    fn exactness_of_the_constraint() {
        // All emitted terms satisfy |p(x)|^{1/k} <= 1 at the K points,
        // checked here in floating point as a shadow of the exact filter.
        let region = Region::finite(1, vec![vec![c(0.0, 0.0)], vec![c(1.0, 0.0)]]);
        let cfg = EnumConfig {
            k_cap: 2,
            height: 6,
            off_probes: 2,
            seed: 3,
        };
        let report = synth_enumeration(&region, &cfg).unwrap();
        for x in [[c(0.0, 0.0)], [c(1.0, 0.0)]] {
            let stream = report.spec.restrict_affine(&x, report.horizon).unwrap();
            for (j, &l) in stream.log_mags.iter().enumerate().skip(1) {
                if l != f64::NEG_INFINITY {
                    assert!(l / j as f64 <= 1e-9, "term {j} value above 1");
                }
            }
        }
    }

    #[test]
    fn rejects_irrational_points() {
        let region = Region::finite(1, vec![vec![c(0.123456789123, 0.0)]]);
        assert!(synth_enumeration(&region, &EnumConfig::default()).is_err());
    }
}
