//! Shared polynomial witness machinery: plain sup norms over regions and
//! the candidate families used by capacity and extremal bounds.

use crate::poly::Polynomial;
use crate::region::Region;
use crate::rng::Rng;
use crate::Point;
use num_complex::Complex64;

/// Sampled bracket for sup_E |p|: `lower` is the max over evaluated points
/// (certified), `upper` adds local ascent (heuristic except on finite sets).
#[derive(Debug, Clone, Copy)]
pub struct PolySup {
    pub lower: f64,
    pub upper: f64,
    pub exact: bool,
}

pub fn poly_sup_on_region(
    p: &Polynomial,
    region: &Region,
    samples: usize,
    rng: &mut Rng,
) -> PolySup {
    let pts = match region.sample(samples, rng) {
        Ok(pts) => pts,
        Err(_) => Vec::new(),
    };
    if pts.is_empty() {
        return PolySup {
            lower: 0.0,
            upper: 0.0,
            exact: true,
        };
    }
    let mut lower = 0.0f64;
    let mut best = pts[0].clone();
    for x in &pts {
        if let Ok(v) = p.evaluate(x) {
            if v.norm() > lower {
                lower = v.norm();
                best = x.clone();
            }
        }
    }
    let exact = region.is_finite_points();
    let mut upper = lower;
    if !exact {
        upper = upper.max(ascend_abs(p, best, 60, region));
        for _ in 0..4 {
            let start = pts[rng.below(pts.len())].clone();
            upper = upper.max(ascend_abs(p, start, 40, region));
        }
    }
    PolySup {
        lower,
        upper,
        exact,
    }
}

fn ascend_abs(p: &Polynomial, mut x: Point, iters: usize, region: &Region) -> f64 {
    let mut cur = match p.evaluate(&x) {
        Ok(v) => v.norm(),
        Err(_) => return 0.0,
    };
    let mut step = 0.2;
    for _ in 0..iters {
        let mut improved = false;
        'outer: for i in 0..x.len() {
            for &d in &[
                Complex64::new(step, 0.0),
                Complex64::new(-step, 0.0),
                Complex64::new(0.0, step),
                Complex64::new(0.0, -step),
            ] {
                let mut y = x.clone();
                y[i] += d;
                let y = match region.project(&y) {
                    Some(proj) => proj,
                    None => {
                        if !region.contains(&y) {
                            continue;
                        }
                        y
                    }
                };
                if let Ok(v) = p.evaluate(&y) {
                    if v.norm() > cur * (1.0 + 1e-12) {
                        cur = v.norm();
                        x = y;
                        improved = true;
                        break 'outer;
                    }
                }
            }
        }
        if !improved {
            step *= 0.5;
            if step < 1e-10 {
                break;
            }
        }
    }
    cur
}

/// Mean of region samples, the affine centering used by ladder witnesses.
pub fn region_centroid(region: &Region, rng: &mut Rng) -> Point {
    let n = region.ambient;
    match region.sample(64, rng) {
        Ok(pts) if !pts.is_empty() => {
            let mut c = vec![Complex64::new(0.0, 0.0); n];
            for p in &pts {
                for (ci, pi) in c.iter_mut().zip(p) {
                    *ci += pi;
                }
            }
            c.into_iter().map(|z| z / pts.len() as f64).collect()
        }
        _ => vec![Complex64::new(0.0, 0.0); n],
    }
}

/// Candidate polynomials of degree <= k for the inner sup over
/// {p : |p|_E <= 1}: centered ladders, finite-set interpolation products,
/// and Lagrange-style products through configuration points.
pub fn witness_candidates(
    region: &Region,
    k: u32,
    centroid: &[Complex64],
    config_points: Option<&[Point]>,
    rng: &mut Rng,
) -> Vec<Polynomial> {
    let n = region.ambient;
    let mut out = Vec::new();
    out.push(Polynomial::one(n));

    // Centered ladder: ((x - c) . u)^k over sampled directions.
    let dirs: Vec<Point> = if n == 1 {
        vec![vec![Complex64::new(1.0, 0.0)]]
    } else {
        (0..4).map(|_| rng.direction(n)).collect()
    };
    for u in &dirs {
        let shift: Complex64 = centroid
            .iter()
            .zip(u)
            .map(|(&ci, &ui)| ci * ui)
            .sum();
        let lin = Polynomial::linear_form(u).sub(&Polynomial::constant(n, shift));
        for e in [k, k.max(1) / 2] {
            if e >= 1 {
                out.push(lin.power(e));
            }
        }
    }

    // Interpolation products vanishing on finite sets.
    if let Some(points) = region.finite_point_list() {
        if points.len() as u32 <= k {
            let mut prod = Polynomial::one(n);
            for e in &points {
                let u = if n == 1 {
                    vec![Complex64::new(1.0, 0.0)]
                } else {
                    rng.direction(n)
                };
                let shift: Complex64 = e.iter().zip(&u).map(|(&ei, &ui)| ei * ui).sum();
                prod = prod.multiply(&Polynomial::linear_form(&u).sub(&Polynomial::constant(n, shift)));
            }
            out.push(prod);
        }
    }

    // Powers of the defining polynomials of a variety region.
    if let Some(polys) = region.variety_polys() {
        for g in polys {
            let d = g.degree();
            if d >= 1 {
                let e = (k as i64 / d).max(0) as u32;
                if e >= 1 {
                    out.push(g.power(e));
                }
            }
        }
    }

    // Lagrange-style products through configuration points (n = 1).
    if n == 1 {
        if let Some(cfg) = config_points {
            for leave in 0..cfg.len().min(6) {
                let mut prod = Polynomial::one(1);
                let mut deg = 0;
                for (i, f) in cfg.iter().enumerate() {
                    if i == leave || deg + 1 > k as usize {
                        continue;
                    }
                    prod = prod
                        .multiply(&Polynomial::variable(1, 0).sub(&Polynomial::constant(1, f[0])));
                    deg += 1;
                }
                out.push(prod);
            }
        }
    }
    out
}

/// Coordinate ascent on coefficients: maximize |p(target)| holding the
/// sampled sup on E at or below 1 (penalty projection by rescaling).
pub fn ascend_coefficients(
    start: &Polynomial,
    region: &Region,
    target: &[Complex64],
    samples: usize,
    rounds: usize,
    rng: &mut Rng,
) -> Polynomial {
    let mut best = start.clone();
    let sup = poly_sup_on_region(&best, region, samples, rng);
    if sup.upper <= 0.0 {
        return best;
    }
    let mut best_obj = objective(&best, region, target, samples, rng);
    let alphas: Vec<Vec<u32>> = best.terms().map(|(a, _)| a.clone()).collect();
    let mut step = 0.3;
    for _ in 0..rounds {
        let mut improved = false;
        for alpha in &alphas {
            for &d in &[
                Complex64::new(step, 0.0),
                Complex64::new(-step, 0.0),
                Complex64::new(0.0, step),
                Complex64::new(0.0, -step),
            ] {
                let mut cand = best.clone();
                let c = cand.coefficient(alpha);
                cand.add_term(alpha, c * d);
                let obj = objective(&cand, region, target, samples, rng);
                if obj > best_obj * (1.0 + 1e-9) {
                    best = cand;
                    best_obj = obj;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
            if step < 1e-4 {
                break;
            }
        }
    }
    best
}

fn objective(
    p: &Polynomial,
    region: &Region,
    target: &[Complex64],
    samples: usize,
    rng: &mut Rng,
) -> f64 {
    let sup = poly_sup_on_region(p, region, samples, &mut rng.stream(0x0B1));
    if sup.upper <= 1e-300 {
        return 0.0;
    }
    match p.evaluate(target) {
        Ok(v) => v.norm() / sup.upper,
        Err(_) => 0.0,
    }
}
