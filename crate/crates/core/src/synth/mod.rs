//! Synthesis of divergent series with prescribed convergence sets, plus
//! the independent verification pass.
//!
//! Targets are ascending unions of polynomial zero sets presented as
//! divisor chains: block m works against `g_m = p_1 ... p_m`. Four
//! synthesizers are provided: the exact single-variety rule, the
//! rational-coefficient enumeration, the block construction with
//! beta-power witnesses, and its projective variant.

mod beta;
mod block;
mod enumeration;
mod variety;

pub use beta::{beta_construct, normed_log_value, BetaParams, BetaWitness, WitnessBase, WitnessShape};
pub use block::{block_verdict, synth_block, synth_projective, BlockConfig};
pub use enumeration::{enum_verdict, synth_enumeration, EnumConfig};
pub use variety::{synth_variety, variety_spec, VarietyConfig};

use crate::error::{ConvError, Result};
use crate::poly::Polynomial;
use crate::region::{canonical_rep, fs_distance, univariate_roots, Region, Space};
use crate::rng::Rng;
use crate::series::{classify, ClassifyConfig, ConvergenceVerdict, SeriesSpec, VerdictKind};
use crate::{point_norm, Point};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// A pluripolar target: the ascending union of the zero sets of the
/// divisor-chain products g_m = factors[0] * ... * factors[m-1].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TargetSet {
    pub space: Space,
    pub n: usize,
    pub factors: Vec<Polynomial>,
}

impl TargetSet {
    pub fn affine(n: usize, factors: Vec<Polynomial>) -> Result<TargetSet> {
        if factors.is_empty() || factors.iter().any(|p| p.degree() < 1) {
            return Err(ConvError::InvalidInput(
                "target needs nonconstant polynomial factors".into(),
            ));
        }
        Ok(TargetSet {
            space: Space::Affine,
            n,
            factors,
        })
    }

    pub fn projective(n: usize, factors: Vec<Polynomial>) -> Result<TargetSet> {
        for p in &factors {
            let d = p.degree();
            if d < 1 || !p.is_homogeneous(d as u32) {
                return Err(ConvError::InvalidInput(
                    "projective targets need homogeneous factors".into(),
                ));
            }
        }
        if factors.is_empty() {
            return Err(ConvError::InvalidInput("empty target".into()));
        }
        Ok(TargetSet {
            space: Space::Projective,
            n,
            factors,
        })
    }

    /// Finite affine targets {e_1, e_2, ...} in C as the chain of linear
    /// factors (z - e_i).
    pub fn from_points_1d(points: &[Complex64]) -> Result<TargetSet> {
        let factors = points
            .iter()
            .map(|&e| Polynomial::variable(1, 0).sub(&Polynomial::constant(1, e)))
            .collect();
        TargetSet::affine(1, factors)
    }

    pub fn levels(&self) -> u32 {
        self.factors.len() as u32
    }

    /// g_m: the product of the first min(m, len) factors.
    pub fn g(&self, m: u32) -> Polynomial {
        let take = (m as usize).min(self.factors.len()).max(1);
        let mut acc = Polynomial::one(self.n);
        for f in &self.factors[..take] {
            acc = acc.multiply(f);
        }
        acc
    }

    /// The zero-set region of g_{level}.
    pub fn region(&self, level: u32) -> Region {
        let polys = vec![self.g(level)];
        match self.space {
            Space::Affine => Region::variety(self.n, polys),
            Space::Projective => Region::projective_variety(self.n, polys),
        }
    }

    pub fn is_projective(&self) -> bool {
        self.space == Space::Projective
    }

    /// Membership of the full (truncated) union at the default tolerance.
    pub fn contains(&self, x: &[Complex64]) -> bool {
        self.region(self.levels()).contains(x)
    }

    /// Zero points of the degree-1 chain factors at which the factor
    /// evaluates to exactly 0.0 in floating point (monic affine factors
    /// z - e and homogeneous binary forms give exact cancellation). Each
    /// root is paired with the first level containing it.
    pub fn chain_roots(&self) -> Vec<(Point, u32)> {
        let mut out: Vec<(Point, u32)> = Vec::new();
        for (i, f) in self.factors.iter().enumerate() {
            if f.degree() != 1 {
                continue;
            }
            let candidate: Option<Point> = if self.is_projective() && self.n == 2 {
                // a x1 + b x2 vanishes at [b, -a].
                let a = f.coefficient(&[1, 0]);
                let b = f.coefficient(&[0, 1]);
                Some(vec![b, -a])
            } else if !self.is_projective() && self.n == 1 {
                let c1 = f.coefficient(&[1]);
                let c0 = f.coefficient(&[0]);
                if c1.norm() == 0.0 {
                    None
                } else {
                    Some(vec![-c0 / c1])
                }
            } else {
                None
            };
            if let Some(root) = candidate {
                if let Ok(v) = f.evaluate(&root) {
                    if v.norm() == 0.0
                        && !out
                            .iter()
                            .any(|(p, _)| p.iter().zip(&root).all(|(x, y)| x == y))
                    {
                        out.push((root, i as u32 + 1));
                    }
                }
            }
        }
        out
    }

    /// Distance estimate to the truncated union: exact roots for n = 1,
    /// sampled otherwise; FS distance in the projective case.
    pub fn distance(&self, x: &[Complex64], seed: u64) -> f64 {
        let g = self.g(self.levels());
        if self.is_projective() {
            let mut rng = Rng::new(seed).stream(0xD157);
            let samples = self
                .region(self.levels())
                .sample(200, &mut rng)
                .unwrap_or_default();
            return samples
                .iter()
                .map(|p| fs_distance(x, p))
                .fold(f64::INFINITY, f64::min);
        }
        if self.n == 1 {
            let deg = g.degree().max(0) as usize;
            let mut coeffs = vec![Complex64::new(0.0, 0.0); deg + 1];
            for (alpha, &c) in g.terms() {
                coeffs[alpha[0] as usize] = c;
            }
            return univariate_roots(&coeffs)
                .iter()
                .map(|&r| (x[0] - r).norm())
                .fold(f64::INFINITY, f64::min);
        }
        let mut rng = Rng::new(seed).stream(0xD158);
        let samples = self
            .region(self.levels())
            .sample_windowed(300, 2.0 * (1.0 + point_norm(x)), &mut rng)
            .unwrap_or_default();
        samples
            .iter()
            .map(|p| {
                x.iter()
                    .zip(p)
                    .map(|(a, b)| (a - b).norm_sqr())
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Exactness {
    Exact,
    Windowed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SynthMode {
    Variety,
    Enumeration,
    Block,
    Projective,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProbeResult {
    pub probe: Point,
    pub on_target: bool,
    pub verdict: ConvergenceVerdict,
}

/// The window within which off-target divergence is certified.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CertifiedWindow {
    pub radius: f64,
    pub resolution: f64,
    /// Tube around the target excluded from certification.
    pub excluded_tube: f64,
}

/// Shell metadata of the enumeration synthesizer: (exponent, shell index,
/// weight k_j) per materialized term.
pub type EnumShells = Vec<(u64, u32, u32)>;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SynthesisReport {
    pub mode: SynthMode,
    pub spec: SeriesSpec,
    pub target: TargetSet,
    pub exactness: Exactness,
    pub horizon: u64,
    pub probes: Vec<ProbeResult>,
    pub certified_window: Option<CertifiedWindow>,
    #[serde(default)]
    pub witnesses: Vec<BetaWitness>,
    #[serde(default)]
    pub enum_shells: EnumShells,
    pub hartogs: ConvergenceVerdict,
}

impl SynthesisReport {
    /// Every on-target probe converges and every off-target probe diverges.
    pub fn all_consistent(&self) -> bool {
        self.probes.iter().all(|p| {
            if p.on_target {
                p.verdict.kind == VerdictKind::Converges
            } else {
                p.verdict.kind == VerdictKind::Diverges
            }
        })
    }
}

/// Per-probe empirical membership data for the sets
/// `E_m = {s : |s| <= m, |P_j(s)|^{1/j} <= m for all j}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EmMembership {
    pub probe: Point,
    /// Smallest integer level m with |s| <= m and sup_j r_j <= m, within
    /// the cap; None when the probe escapes every tested level.
    pub level: Option<u32>,
    /// sup_j |P_j(s)|^{1/j} over the materialized horizon.
    pub sup_root: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyReport {
    /// Independent verdicts recomputed from the spec alone.
    pub probes: Vec<ProbeResult>,
    pub em: Vec<EmMembership>,
    /// Probes where synthesis and verification verdicts conflict
    /// (CONVERGES against DIVERGES); soundness requires this empty.
    pub conflicts: Vec<usize>,
    /// Probes where either side is INDETERMINATE.
    pub indeterminate: Vec<usize>,
    pub consistent: bool,
}

/// Independent re-check of a synthesis report: re-materializes the spec,
/// re-derives verdicts with fresh samples, and computes the empirical
/// E_m membership per probe.
pub fn verify(report: &SynthesisReport, probe_plan: &[Point], seed: u64) -> Result<VerifyReport> {
    let spec = &report.spec;
    let horizon = report.horizon;
    let mut probes = Vec::with_capacity(probe_plan.len());
    let mut em = Vec::with_capacity(probe_plan.len());
    for x in probe_plan {
        let stream = if report.target.is_projective() {
            spec.restrict_projective(x, horizon)?
        } else {
            spec.restrict_affine(x, horizon)?
        };
        let on_target = report.target.contains(x);
        let verdict = match report.mode {
            SynthMode::Variety => classify(&stream.log_mags, &ClassifyConfig::default())?,
            SynthMode::Enumeration => {
                enumeration::enum_verdict(&report.enum_shells, &stream.log_mags)?
            }
            SynthMode::Block | SynthMode::Projective => {
                block::block_verdict(&report.witnesses, x, report.target.is_projective())?
            }
        };
        // Empirical E_m level.
        let sup_root = stream
            .log_mags
            .iter()
            .enumerate()
            .skip(1)
            .map(|(j, &l)| (l / j as f64).exp())
            .fold(0.0f64, f64::max);
        let m_cap = 64u32;
        let need = sup_root.max(point_norm(x));
        let level = if need.is_finite() && need <= m_cap as f64 {
            Some((need.ceil() as u32).max(1))
        } else {
            None
        };
        em.push(EmMembership {
            probe: x.clone(),
            level,
            sup_root,
        });
        probes.push(ProbeResult {
            probe: x.clone(),
            on_target,
            verdict,
        });
    }

    let mut conflicts = Vec::new();
    let mut indeterminate = Vec::new();
    for (i, pv) in probes.iter().enumerate() {
        if pv.verdict.kind == VerdictKind::Indeterminate {
            indeterminate.push(i);
        }
        if let Some(sv) = report
            .probes
            .iter()
            .find(|r| same_probe(&r.probe, &pv.probe, report.target.is_projective()))
        {
            let pair = (sv.verdict.kind, pv.verdict.kind);
            if matches!(
                pair,
                (VerdictKind::Converges, VerdictKind::Diverges)
                    | (VerdictKind::Diverges, VerdictKind::Converges)
            ) {
                conflicts.push(i);
            }
            if sv.verdict.kind == VerdictKind::Indeterminate && !indeterminate.contains(&i) {
                indeterminate.push(i);
            }
        }
    }
    let consistent = conflicts.is_empty();
    let _ = seed;
    Ok(VerifyReport {
        probes,
        em,
        conflicts,
        indeterminate,
        consistent,
    })
}

fn same_probe(a: &[Complex64], b: &[Complex64], projective: bool) -> bool {
    if a.len() != b.len() {
        return false;
    }
    if projective {
        match (canonical_rep(a), canonical_rep(b)) {
            (Ok(ca), Ok(cb)) => ca.iter().zip(&cb).all(|(x, y)| (x - y).norm() < 1e-9),
            _ => false,
        }
    } else {
        a.iter().zip(b).all(|(x, y)| (x - y).norm() < 1e-12)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn divisor_chain_is_ascending() {
        let target =
            TargetSet::from_points_1d(&(1..=5).map(|i| c(1.0 / i as f64, 0.0)).collect::<Vec<_>>())
                .unwrap();
        for m in 1..=4u32 {
            // Every zero of g_m is a zero of g_{m+1}.
            let region_next = target.region(m + 1);
            let mut rng = Rng::new(3);
            for x in target.region(m).sample(20, &mut rng).unwrap() {
                assert!(region_next.contains(&x));
            }
        }
    }

    #[test]
    fn distance_on_1d_chain() {
        let target = TargetSet::from_points_1d(&[c(1.0, 0.0), c(0.5, 0.0)]).unwrap();
        let d = target.distance(&[c(0.75, 0.0)], 1);
        assert!((d - 0.25).abs() < 1e-9);
        assert!(target.contains(&[c(0.5, 0.0)]));
        assert!(!target.contains(&[c(0.75, 0.0)]));
    }
}
