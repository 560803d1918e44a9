//! Exact synthesis for a single polynomial zero set.
//!
//! For a nonconstant p of degree d the series `sum_k (k p(s))^k t^{kd}` is
//! Class (1,0) with Conv = {p = 0}: every term vanishes on the variety,
//! and off it the root-test values grow like (k |p(s)|)^{1/d}.

use super::{
    CertifiedWindow, Exactness, ProbeResult, SynthMode, SynthesisReport, TargetSet,
};
use crate::error::{ConvError, Result};
use crate::poly::Polynomial;
use crate::rng::Rng;
use crate::series::{
    classify, ClassifyConfig, ExponentSeq, PowerSeq, ScaleSeq, SeriesSpec, TermRule,
};
use crate::Point;
use rayon::prelude::*;

#[derive(Debug, Clone, Copy)]
pub struct VarietyConfig {
    pub horizon: u64,
    pub window_radius: f64,
    /// Probes closer to the variety than this are not seeded off-target.
    pub min_distance: f64,
    pub on_target_probes: usize,
    pub off_target_probes: usize,
    pub seed: u64,
}

impl Default for VarietyConfig {
    fn default() -> Self {
        VarietyConfig {
            horizon: 64,
            window_radius: 2.0,
            min_distance: 0.05,
            on_target_probes: 50,
            off_target_probes: 150,
            seed: 0,
        }
    }
}

/// The spec alone: `sum_k (k p)^k t^{k d}`.
pub fn variety_spec(p: &Polynomial) -> Result<SeriesSpec> {
    let d = p.degree();
    if d < 1 {
        return Err(ConvError::InvalidInput(
            "variety synthesis needs a nonconstant polynomial".into(),
        ));
    }
    SeriesSpec::new(
        p.dimension(),
        vec![TermRule::PowerSchedule {
            base: p.clone(),
            scale: ScaleSeq::NuPowNu,
            power: PowerSeq::Affine { a: 1, b: 0 },
            exponent: ExponentSeq::Affine { a: d as u64, b: 0 },
            nu_start: 1,
        }],
    )
    .with_class_checked(1, 0, 256)
}

pub fn synth_variety(p: &Polynomial, cfg: &VarietyConfig) -> Result<SynthesisReport> {
    let spec = variety_spec(p)?;
    let target = TargetSet::affine(p.dimension(), vec![p.clone()])?;
    let mut rng = Rng::new(cfg.seed).stream(0x7A12);

    // On-target probes from the variety sampler.
    let on_probes = target
        .region(1)
        .sample_windowed(cfg.on_target_probes, cfg.window_radius, &mut rng)?;
    // Off-target probes: seeded in the window, rejected inside the tube.
    let mut off_probes: Vec<Point> = Vec::new();
    let mut guard = 0;
    while off_probes.len() < cfg.off_target_probes && guard < cfg.off_target_probes * 100 {
        guard += 1;
        let x: Point = (0..p.dimension())
            .map(|_| rng.in_disk(cfg.window_radius))
            .collect();
        if target.distance(&x, cfg.seed) >= cfg.min_distance {
            off_probes.push(x);
        }
    }
    if off_probes.len() < cfg.off_target_probes {
        return Err(ConvError::SamplerBudget(
            "could not seed enough off-target probes".into(),
        ));
    }

    let classify_cfg = ClassifyConfig::default();
    let plan: Vec<(Point, bool)> = on_probes
        .into_iter()
        .map(|x| (x, true))
        .chain(off_probes.into_iter().map(|x| (x, false)))
        .collect();
    let probes: Vec<ProbeResult> = plan
        .par_iter()
        .map(|(x, on_target)| {
            let stream = spec.restrict_affine(x, cfg.horizon)?;
            let verdict = classify(&stream.log_mags, &classify_cfg)?;
            Ok(ProbeResult {
                probe: x.clone(),
                on_target: *on_target,
                verdict,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let hartogs = spec.hartogs_joint(cfg.horizon, &classify_cfg)?;
    Ok(SynthesisReport {
        mode: SynthMode::Variety,
        spec,
        target,
        exactness: Exactness::Exact,
        horizon: cfg.horizon,
        probes,
        certified_window: Some(CertifiedWindow {
            radius: cfg.window_radius,
            resolution: 0.0,
            excluded_tube: cfg.min_distance,
        }),
        witnesses: Vec::new(),
        enum_shells: Vec::new(),
        hartogs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::VerdictKind;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn axes_probe_verdicts() {
        // p = s1 s2: on-target (0, 5) all-zero stream; off-target (1, 1)
        // grows like k^k at even exponents.
        let p = Polynomial::variable(2, 0).multiply(&Polynomial::variable(2, 1));
        let spec = variety_spec(&p).unwrap();
        let cfg = ClassifyConfig::default();

        let on = spec
            .restrict_affine(&[c(0.0, 0.0), c(5.0, 0.0)], 64)
            .unwrap();
        assert!(on.log_mags.iter().all(|&l| l == f64::NEG_INFINITY));
        let v = classify(&on.log_mags, &cfg).unwrap();
        assert_eq!(v.kind, VerdictKind::Converges);

        let off = spec
            .restrict_affine(&[c(1.0, 0.0), c(1.0, 0.0)], 64)
            .unwrap();
        // c_{2k} = k^k exactly.
        for k in 1..=5usize {
            let expect = (k as f64).powi(k as i32).ln();
            assert!((off.log_mags[2 * k] - expect).abs() < 1e-9);
        }
        let v = classify(&off.log_mags, &cfg).unwrap();
        assert_eq!(v.kind, VerdictKind::Diverges);
    }

    #[test]
    fn shifted_line_verdicts() {
        // p = s - 1: probe 1 converges (zero stream), probe 0 diverges
        // with c_k = k^k.
        let p = Polynomial::variable(1, 0).sub(&Polynomial::one(1));
        let spec = variety_spec(&p).unwrap();
        let cfg = ClassifyConfig::default();
        let at1 = spec.restrict_affine(&[c(1.0, 0.0)], 64).unwrap();
        assert_eq!(
            classify(&at1.log_mags, &cfg).unwrap().kind,
            VerdictKind::Converges
        );
        let at0 = spec.restrict_affine(&[c(0.0, 0.0)], 64).unwrap();
        for k in [1usize, 3, 7] {
            let expect = (k as f64).powi(k as i32).ln();
            assert!((at0.log_mags[k] - expect).abs() < 1e-9);
        }
        assert_eq!(
            classify(&at0.log_mags, &cfg).unwrap().kind,
            VerdictKind::Diverges
        );
    }

    #[test]
    fn full_run_consistent_and_jointly_divergent() {
        let p = Polynomial::variable(1, 0).sub(&Polynomial::one(1));
        let cfg = VarietyConfig {
            on_target_probes: 10,
            off_target_probes: 30,
            ..Default::default()
        };
        let report = synth_variety(&p, &cfg).unwrap();
        assert!(report.all_consistent());
        assert_eq!(report.hartogs.kind, VerdictKind::Diverges);
        assert_eq!(report.exactness, Exactness::Exact);
        assert!(report.spec.check_class(1, 0, 128).unwrap());
    }

    #[test]
    fn constant_polynomial_rejected() {
        let p = Polynomial::one(2);
        assert!(synth_variety(&p, &VarietyConfig::default()).is_err());
    }
}
