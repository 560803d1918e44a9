//! Block synthesis: one witness family per level m against the ascending
//! targets E_m, assembled into a single Class (1,0) series.
//!
//! Per block m the construction needs, on the window minus a tube around
//! E_m, witnesses whose normalized value exceeds m/2 on certified cells
//! while staying at most 1 on E_m (ball- or K_m-clipped) and at most m
//! globally. Coverage is certified per cell from a center evaluation plus
//! a gradient-bound Lipschitz decrement. Cells that cannot be covered
//! shrink the certified window; the report says so.

use super::beta::{beta_construct, BetaParams, BetaWitness, WitnessBase, WitnessShape};
use super::{
    CertifiedWindow, Exactness, ProbeResult, SynthMode, SynthesisReport, TargetSet,
};
use crate::error::{ConvError, Result};
use crate::poly::{Domain, NormedPoly, SupNormBudget};
use crate::region::{find_avoiding_hyperplane, ProjCover};
use crate::rng::Rng;
use crate::series::{
    ClassifyConfig, ConvergenceVerdict, ExplicitTerm, SeriesSpec, TermRule, VerdictKind,
};
use crate::{point_norm, Point};
use num_complex::Complex64;
use rayon::prelude::*;

#[derive(Debug, Clone, Copy)]
pub struct BlockConfig {
    pub m_max: u32,
    pub window_radius: f64,
    /// Tube around each block target excluded from coverage.
    pub eps: f64,
    /// Cell spacing of the cover grid.
    pub resolution: f64,
    pub b_max: u32,
    pub target_samples: usize,
    pub max_witnesses_per_block: usize,
    pub seed: u64,
}

impl Default for BlockConfig {
    fn default() -> Self {
        BlockConfig {
            m_max: 8,
            window_radius: 2.0,
            eps: 0.05,
            // Fine enough that the tube the cells leave around the target
            // (eps + cell half-diagonals) stays close to eps itself.
            resolution: 0.02,
            b_max: 64,
            target_samples: 200,
            max_witnesses_per_block: 48,
            seed: 0,
        }
    }
}

/// Per-factor data for the cell certificates: the factor itself, its
/// power, and the (weight, exponent) pairs of its gradient coefficient
/// bound `G(r) = sum |c| |alpha| r^{|alpha| - 1}`.
struct FactorBound<'a> {
    poly: &'a crate::poly::Polynomial,
    power: u32,
    grad_terms: Vec<(f64, i32)>,
}

fn factor_bounds(term: &crate::series::FactoredPoly) -> Vec<FactorBound<'_>> {
    term.factors()
        .iter()
        .map(|f| {
            let grad_terms = f
                .poly
                .terms()
                .filter(|(alpha, _)| alpha.iter().sum::<u32>() > 0)
                .map(|(alpha, c)| {
                    let d: u32 = alpha.iter().sum();
                    (c.norm() * d as f64, d as i32 - 1)
                })
                .collect();
            FactorBound {
                poly: &f.poly,
                power: f.power,
                grad_terms,
            }
        })
        .collect()
}

/// Certified lower bound of the normalized witness value over the ball of
/// radius `half_diag` around `center` (the cell's enclosing ball).
///
/// The bound works factor by factor: `|f(x)| >= |f(center)| - G_f d` with
/// G_f the coefficient gradient bound of the factor on the outer ball.
/// Bounding each factor separately keeps the certificate tight for the
/// high powers the witnesses carry (a whole-product Lipschitz constant
/// scales with the power and certifies nothing).
fn cell_min_normed(
    log_const: f64,
    factors: &[FactorBound<'_>],
    q: u64,
    center: &[Complex64],
    half_diag: f64,
    projective: bool,
) -> f64 {
    let r_out = point_norm(center) + half_diag;
    let mut log_min = log_const;
    if log_min == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    for f in factors {
        let fc = match f.poly.evaluate(center) {
            Ok(v) => v.norm(),
            Err(_) => return f64::NEG_INFINITY,
        };
        let grad: f64 = f
            .grad_terms
            .iter()
            .map(|&(w, e)| w * r_out.powi(e))
            .sum();
        let dec = grad * half_diag;
        if fc <= dec {
            return f64::NEG_INFINITY;
        }
        log_min += (fc - dec).ln() * f.power as f64;
    }
    // Lower bound of the quotient: numerator lower bound over the cell,
    // denominator at the outer radius.
    let denom = if projective {
        r_out.max(1e-9).ln()
    } else {
        0.5 * (1.0 + r_out * r_out).ln()
    };
    (log_min / q as f64 - denom).exp()
}

struct Cell {
    center: Point,
    half_diag: f64,
}

/// Reference points of the level's target for cheap distance checks:
/// exact univariate roots in the affine 1-D case, samples plus chain
/// roots otherwise. Computed once per block.
fn target_points(target: &TargetSet, level: u32, seed: u64) -> Vec<Point> {
    let sub = TargetSet {
        space: target.space,
        n: target.n,
        factors: target.factors[..(level as usize).min(target.factors.len())].to_vec(),
    };
    let mut pts: Vec<Point> = sub.chain_roots().into_iter().map(|(p, _)| p).collect();
    if target.n == 1 && !target.is_projective() {
        let g = sub.g(level);
        let mut coeffs = vec![Complex64::new(0.0, 0.0); g.degree().max(0) as usize + 1];
        for (alpha, &c) in g.terms() {
            coeffs[alpha[0] as usize] = c;
        }
        for r in crate::region::univariate_roots(&coeffs) {
            pts.push(vec![r]);
        }
    } else {
        let mut rng = Rng::new(seed).stream(0x79);
        if let Ok(samples) = sub.region(level).sample(300, &mut rng) {
            pts.extend(samples);
        }
    }
    pts
}

fn dist_to_points(x: &[Complex64], pts: &[Point], projective: bool) -> f64 {
    pts.iter()
        .map(|p| {
            if projective {
                crate::region::fs_distance(x, p)
            } else {
                x.iter()
                    .zip(p)
                    .map(|(a, b)| (a - b).norm_sqr())
                    .sum::<f64>()
                    .sqrt()
            }
        })
        .fold(f64::INFINITY, f64::min)
}

/// Affine grid cells inside the window, outside the eps-tube of the
/// block's target.
fn affine_cells(target: &TargetSet, level: u32, cfg: &BlockConfig, seed: u64) -> Vec<Cell> {
    let n = target.n;
    let res = cfg.resolution;
    let half_diag = res * 0.5 * (2.0 * n as f64).sqrt();
    let steps = (2.0 * cfg.window_radius / res).ceil() as i64;
    let mut centers: Vec<Point> = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::new();
        for base in &centers {
            for i in 0..steps {
                for j in 0..steps {
                    let re = -cfg.window_radius + (i as f64 + 0.5) * res;
                    let im = -cfg.window_radius + (j as f64 + 0.5) * res;
                    let mut p = base.clone();
                    p.push(Complex64::new(re, im));
                    next.push(p);
                }
            }
        }
        centers = next;
    }
    let pts = target_points(target, level, seed);
    centers
        .into_iter()
        .filter(|c| point_norm(c) <= cfg.window_radius)
        .filter(|c| dist_to_points(c, &pts, false) > cfg.eps + half_diag)
        .map(|center| Cell { center, half_diag })
        .collect()
}

/// Chart cells covering P^1: [1, w] and [w, 1] with |w| <= 1.
fn projective_cells(target: &TargetSet, level: u32, cfg: &BlockConfig, seed: u64) -> Vec<Cell> {
    assert_eq!(target.n, 2, "projective cover cells implemented for P^1");
    let res = cfg.resolution;
    let half_diag = res * 0.5 * std::f64::consts::SQRT_2;
    let steps = (2.2 / res).ceil() as i64;
    let pts = target_points(target, level, seed);
    let mut cells = Vec::new();
    for chart in 0..2 {
        for i in 0..steps {
            for j in 0..steps {
                let re = -1.1 + (i as f64 + 0.5) * res;
                let im = -1.1 + (j as f64 + 0.5) * res;
                let w = Complex64::new(re, im);
                if w.norm() > 1.1 {
                    continue;
                }
                let center: Point = if chart == 0 {
                    vec![Complex64::new(1.0, 0.0), w]
                } else {
                    vec![w, Complex64::new(1.0, 0.0)]
                };
                if dist_to_points(&center, &pts, true) > cfg.eps + half_diag {
                    cells.push(Cell { center, half_diag });
                }
            }
        }
    }
    cells
}

/// Normalizes the level-m divisor chain so its global normalized sup is
/// below 1 (heuristic upper bound times a 1.1 safety factor). The chain is
/// kept unexpanded so evaluation at any factor root is exactly zero; the
/// normalization scalar rides along in log scale.
fn normalized_base(
    target: &TargetSet,
    m: u32,
    projective: bool,
    seed: u64,
) -> Result<(WitnessBase, f64)> {
    let g = target.g(m);
    let d = g.degree();
    if d < 1 {
        return Err(ConvError::InvalidInput("block base must be nonconstant".into()));
    }
    let d = d as u32;
    let raw = if projective {
        NormedPoly::new_homogeneous(g.clone(), d)?
    } else {
        NormedPoly::new(g, d)?
    };
    let sup = raw.sup_norm(Domain::Global, &SupNormBudget::default(), seed);
    let u = sup.upper.max(1e-12) * 1.1;
    let take = (m as usize).min(target.factors.len()).max(1);
    let base = WitnessBase::new(
        target.factors[..take].to_vec(),
        -(d as f64) * u.ln(),
        projective,
    )?;
    Ok((base, 1.0 / 1.1))
}

fn build_block_witnesses(
    target: &TargetSet,
    m: u32,
    cfg: &BlockConfig,
    projective: bool,
) -> Result<(Vec<BetaWitness>, Vec<Cell>, Vec<usize>)> {
    let seed = cfg.seed ^ ((m as u64) << 17);
    let mut rng = Rng::new(seed).stream(0xB10C);
    let (base, base_sup) = normalized_base(target, m, projective, seed)?;

    // Samples of the block target clipped to the ball/K_m. Exact chain
    // roots are preferred: sampled variety points carry ~1e-12 residuals
    // that the 1/v-th root inflates to O(1e-2) normalized values, which
    // would wrongly block the m^{-1/beta} precondition.
    let take = (m as usize).min(target.factors.len()).max(1);
    let sub = TargetSet {
        space: target.space,
        n: target.n,
        factors: target.factors[..take].to_vec(),
    };
    let mut tsamples: Vec<Point> = Vec::new();
    for (root, _) in sub.chain_roots() {
        let inside = if projective {
            ProjCover::new(m as f64, target.n)?.contains(&root, 1e-9)?
        } else {
            point_norm(&root) <= m as f64 + 1e-9
        };
        if inside {
            tsamples.push(root);
        }
    }
    let exact_count = sub
        .factors
        .iter()
        .filter(|f| f.degree() == 1)
        .count();
    if tsamples.is_empty() || exact_count < sub.factors.len() {
        // Higher-degree factors: fall back to sampled points (clause (i)
        // stays sample-certified, the precondition gets conservative).
        let region = target.region(m);
        if let Ok(samples) = region.sample_windowed(cfg.target_samples, m as f64, &mut rng) {
            for s in samples {
                let inside = if projective {
                    ProjCover::new(m as f64, target.n)?.contains(&s, 1e-9)?
                } else {
                    point_norm(&s) <= m as f64 + 1e-9
                };
                if inside {
                    tsamples.push(s);
                }
            }
        }
    }

    let cells = if projective {
        projective_cells(target, m, cfg, seed)
    } else {
        affine_cells(target, m, cfg, seed)
    };
    let mut covered = vec![false; cells.len()];
    let mut abandoned: Vec<usize> = Vec::new();
    let mut witnesses: Vec<BetaWitness> = Vec::new();

    let shapes_for = |probe_norm: f64| -> Vec<WitnessShape> {
        if projective {
            vec![WitnessShape::Anchored { u: vec![] }]
        } else if probe_norm < 0.8 {
            vec![WitnessShape::Plain, WitnessShape::Anchored { u: vec![] }]
        } else {
            vec![WitnessShape::Anchored { u: vec![] }, WitnessShape::Plain]
        }
    };

    // Base values at cell centers are fixed for the block.
    let base_vals: Vec<f64> = cells
        .iter()
        .map(|c| {
            base.log_normalized_value(&c.center)
                .unwrap_or(f64::NEG_INFINITY)
        })
        .collect();

    while witnesses.len() < cfg.max_witnesses_per_block {
        // Greedy: the uncovered cell with the largest base value (most
        // feasible), preferring far cells once the bulk is covered.
        let pick = (0..cells.len())
            .filter(|&i| !covered[i])
            .max_by(|&i, &j| base_vals[i].partial_cmp(&base_vals[j]).unwrap());
        let Some(idx) = pick else { break };
        let y = cells[idx].center.clone();
        let r_y = base
            .normalized_value(&y)
            .unwrap_or(0.0)
            .min(0.999);
        if r_y <= 0.0 {
            abandoned.push(idx);
            covered[idx] = true;
            continue;
        }
        // Ask for clearance above m/2 first (cell certificates eat a few
        // percent); fall back to any strict exceedance.
        let witness = [0.10, 0.0].iter().find_map(|&margin| {
            let params = BetaParams {
                m: m as f64,
                r: r_y,
                b_max: cfg.b_max,
                probe_margin: margin,
            };
            match beta_construct(
                &base,
                &params,
                &y,
                &tsamples,
                &shapes_for(point_norm(&y)),
                projective,
                base_sup,
            ) {
                Ok(w) => Some(Ok(w)),
                Err(ConvError::NoFeasibleBeta { .. }) => None,
                Err(e) => Some(Err(e)),
            }
        });
        let witness = match witness {
            Some(w) => w,
            None => Err(ConvError::NoFeasibleBeta {
                r: r_y,
                m: m as f64,
            }),
        };
        match witness {
            Ok(w) => {
                let bounds = factor_bounds(&w.term);
                let log_const = w.term.log_constant();
                let mut newly = 0;
                for (i, cell) in cells.iter().enumerate() {
                    if covered[i] {
                        continue;
                    }
                    let lo = cell_min_normed(
                        log_const,
                        &bounds,
                        w.weight,
                        &cell.center,
                        cell.half_diag,
                        projective,
                    );
                    if lo > m as f64 / 2.0 {
                        covered[i] = true;
                        newly += 1;
                    }
                }
                if newly == 0 {
                    // Could not even certify its own cell; drop the cell
                    // from the certified region rather than loop.
                    abandoned.push(idx);
                    covered[idx] = true;
                    continue;
                }
                witnesses.push(w);
            }
            Err(ConvError::NoFeasibleBeta { .. }) => {
                abandoned.push(idx);
                covered[idx] = true;
            }
            Err(e) => return Err(e),
        }
    }
    let mut uncovered: Vec<usize> = (0..cells.len()).filter(|&i| !covered[i]).collect();
    uncovered.extend(abandoned);
    Ok((witnesses, cells, uncovered))
}

/// Strictly increasing exponents by raising witnesses to powers
/// (normalized values are power-invariant, so margins are preserved).
fn assemble(witnesses: &[BetaWitness], n: usize) -> (SeriesSpec, u64) {
    let mut order: Vec<usize> = (0..witnesses.len()).collect();
    order.sort_by_key(|&i| witnesses[i].weight);
    let mut terms = Vec::with_capacity(witnesses.len());
    let mut prev = 0u64;
    for i in order {
        let w = &witnesses[i];
        let mult = prev / w.weight + 1;
        let exponent = mult * w.weight;
        debug_assert!(exponent > prev);
        terms.push(ExplicitTerm {
            exponent,
            poly: w.term.pow(mult as u32),
        });
        prev = exponent;
    }
    let max_exp = prev;
    let spec = SeriesSpec::new(n, vec![TermRule::Explicit { terms }]);
    (spec, max_exp)
}

/// Block-aware verdict at a probe: every block exceeding m/2 is the
/// divergence pattern; vanishing from some block onward with the earlier
/// blocks inside their global bound is the convergence pattern.
pub fn block_verdict(
    witnesses: &[BetaWitness],
    x: &[Complex64],
    projective: bool,
) -> Result<ConvergenceVerdict> {
    if witnesses.is_empty() {
        return Err(ConvError::InvalidInput("no witnesses to evaluate".into()));
    }
    let m_max = witnesses.iter().map(|w| w.block).max().unwrap();
    let mut block_max = vec![0.0f64; m_max as usize + 1];
    let mut max_weight = 1u64;
    for w in witnesses {
        let v = match w.normed_value_at(x) {
            Ok(v) => v,
            Err(ConvError::HomogeneousAtZero) => return Err(ConvError::ZeroProjectivePoint),
            Err(e) => return Err(e),
        };
        let b = w.block as usize;
        if v > block_max[b] {
            block_max[b] = v;
        }
        max_weight = max_weight.max(w.weight);
    }
    let window = (1usize, max_weight as usize);
    let scale = if projective {
        1.0
    } else {
        (1.0 + point_norm(x).powi(2)).sqrt()
    };
    let growth = block_max
        .iter()
        .cloned()
        .fold(0.0f64, f64::max)
        * scale;

    let exceeds_all = (1..=m_max).all(|m| block_max[m as usize] > m as f64 / 2.0);
    if exceeds_all {
        let margin = (1..=m_max)
            .map(|m| block_max[m as usize] / (m as f64 / 2.0))
            .fold(f64::INFINITY, f64::min)
            - 1.0;
        return Ok(ConvergenceVerdict {
            kind: VerdictKind::Diverges,
            growth_estimate: growth,
            window,
            margin,
        });
    }
    // Vanishing tail: some m0 with all blocks >= m0 identically zero here.
    let m0 = (1..=m_max)
        .find(|&m| (m..=m_max).all(|mm| block_max[mm as usize] <= 1e-12));
    if let Some(m0) = m0 {
        let bounded = (1..m0).all(|m| block_max[m as usize] <= m as f64 * (1.0 + 1e-9));
        if bounded {
            return Ok(ConvergenceVerdict {
                kind: VerdictKind::Converges,
                growth_estimate: growth,
                window,
                margin: 1.0,
            });
        }
    }
    Ok(ConvergenceVerdict {
        kind: VerdictKind::Indeterminate,
        growth_estimate: growth,
        window,
        margin: 0.0,
    })
}

fn block_report(
    target: &TargetSet,
    cfg: &BlockConfig,
    projective: bool,
) -> Result<SynthesisReport> {
    if projective && target.n != 2 {
        return Err(ConvError::InvalidInput(
            "projective block synthesis is implemented for P^1 (n = 2)".into(),
        ));
    }
    let mut all_witnesses = Vec::new();
    let mut certified_radius = cfg.window_radius;
    let mut worst_uncovered: Option<f64> = None;
    for m in 1..=cfg.m_max {
        let (ws, cells, uncovered) = build_block_witnesses(target, m, cfg, projective)?;
        if ws.is_empty() {
            return Err(ConvError::BudgetExhausted(format!(
                "block {m} produced no witnesses"
            )));
        }
        for idx in &uncovered {
            let r = point_norm(&cells[*idx].center);
            worst_uncovered = Some(match worst_uncovered {
                Some(w) => w.min(r),
                None => r,
            });
        }
        all_witnesses.extend(ws);
    }
    if let Some(r) = worst_uncovered {
        // Shrink the certified window below the innermost uncovered cell.
        certified_radius = certified_radius.min((r - cfg.resolution).max(0.0));
    }

    let (spec, max_exp) = assemble(&all_witnesses, target.n);
    let spec = spec.with_class_checked(1, 0, max_exp)?;
    let horizon = (2 * max_exp).max(64);

    // Probe plan: on-target probes are the exact chain roots (witness
    // bases vanish there bit-exactly); sampled variety points carry
    // root-finding error that the beta powers would inflate.
    let mut rng = Rng::new(cfg.seed).stream(0x9B0);
    let mut plan: Vec<(Point, bool)> = Vec::new();
    for (root, level) in target.chain_roots() {
        if level <= cfg.m_max {
            plan.push((root, true));
        }
    }
    let mut guard = 0;
    while plan.iter().filter(|(_, on)| !on).count() < 24 && guard < 4000 {
        guard += 1;
        let x: Point = if projective {
            let w = rng.in_disk(1.0);
            if guard % 2 == 0 {
                vec![Complex64::new(1.0, 0.0), w]
            } else {
                vec![w, Complex64::new(1.0, 0.0)]
            }
        } else {
            (0..target.n)
                .map(|_| rng.in_disk(certified_radius.max(0.3)))
                .collect()
        };
        let dist = target.distance(&x, cfg.seed);
        let inside = if projective {
            true
        } else {
            point_norm(&x) <= certified_radius
        };
        if dist > cfg.eps + cfg.resolution && inside {
            plan.push((x, false));
        }
    }

    let probes: Vec<ProbeResult> = plan
        .par_iter()
        .map(|(x, on_target)| {
            let verdict = block_verdict(&all_witnesses, x, projective)?;
            Ok(ProbeResult {
                probe: x.clone(),
                on_target: *on_target,
                verdict,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let hartogs = spec
        .hartogs_joint(max_exp.min(300), &ClassifyConfig::default())
        .unwrap_or(ConvergenceVerdict {
            kind: VerdictKind::Indeterminate,
            growth_estimate: f64::INFINITY,
            window: (1, max_exp as usize),
            margin: 0.0,
        });

    Ok(SynthesisReport {
        mode: if projective {
            SynthMode::Projective
        } else {
            SynthMode::Block
        },
        spec,
        target: target.clone(),
        exactness: Exactness::Windowed,
        horizon,
        probes,
        certified_window: Some(CertifiedWindow {
            radius: certified_radius,
            resolution: cfg.resolution,
            excluded_tube: cfg.eps,
        }),
        witnesses: all_witnesses,
        enum_shells: Vec::new(),
        hartogs,
    })
}

/// Affine block synthesis against an ascending divisor-chain target.
pub fn synth_block(target: &TargetSet, cfg: &BlockConfig) -> Result<SynthesisReport> {
    if target.is_projective() {
        return Err(ConvError::InvalidInput(
            "use synth_projective for projective targets".into(),
        ));
    }
    block_report(target, cfg, false)
}

/// Projective block synthesis over P^1 with K_M covers and anchored
/// homogeneous witnesses; the non-occupying hypothesis is certified by an
/// avoiding hyperplane per level.
pub fn synth_projective(target: &TargetSet, cfg: &BlockConfig) -> Result<SynthesisReport> {
    if !target.is_projective() {
        return Err(ConvError::InvalidInput(
            "synth_projective needs a projective target".into(),
        ));
    }
    // Certify the non-occupying hypothesis for each cover level.
    for m in 1..=cfg.m_max {
        let cover = ProjCover::new(m as f64, target.n)?;
        let cert = find_avoiding_hyperplane(&cover, None, 1e-4, cfg.seed ^ m as u64)?;
        debug_assert!(cert.separation > 0.0);
    }
    let mut report = block_report(target, cfg, true)?;
    // Projective verdicts are scale-invariant; normalize stored probes.
    for p in &mut report.probes {
        if let Ok(c) = crate::region::canonical_rep(&p.probe) {
            p.probe = c;
        }
    }
    Ok(report)
}
