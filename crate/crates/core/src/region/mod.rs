//! Closed-set descriptors with membership tests and seeded samplers.
//!
//! The grammar covers what the algorithms consume: algebraic varieties,
//! finite sets, balls, polydisks, spheres/circles, segments, unions,
//! intersections, and projective hyperplanes. Variety sampling fixes all
//! but one coordinate and solves the remaining univariate slice.

mod projective;
mod roots;

pub use projective::{
    canonical_rep, find_avoiding_hyperplane, fs_distance, hermitian, AvoidanceCertificate,
    Hyperplane, ProjCover,
};
pub use roots::univariate_roots;

use crate::error::{ConvError, Result};
use crate::point_norm;
use crate::poly::Polynomial;
use crate::rng::Rng;
use crate::Point;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Default membership tolerance, scaled by the residual's natural size.
pub const EPS_MEM: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Space {
    /// C^n with n coordinates.
    Affine,
    /// P^{n-1}, points given by nonzero representatives in C^n.
    Projective,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RegionKind {
    Variety { polys: Vec<Polynomial> },
    Finite { points: Vec<Point> },
    Ball { center: Point, radius: f64 },
    Polydisk { center: Point, radius: f64 },
    Sphere { center: Point, radius: f64 },
    Segment { a: Complex64, b: Complex64 },
    Union { parts: Vec<Region> },
    Intersection { parts: Vec<Region> },
    Hyperplane { normal: Point },
}

/// Membership outcome with the residual that was compared to tolerance.
#[derive(Debug, Clone, Copy)]
pub struct Membership {
    pub inside: bool,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Region {
    pub space: Space,
    /// Ambient complex dimension (n for C^n; representative length for P^{n-1}).
    pub ambient: usize,
    #[serde(flatten)]
    pub kind: RegionKind,
}

impl Region {
    pub fn variety(n: usize, polys: Vec<Polynomial>) -> Region {
        Region {
            space: Space::Affine,
            ambient: n,
            kind: RegionKind::Variety { polys },
        }
    }

    pub fn projective_variety(n: usize, polys: Vec<Polynomial>) -> Region {
        Region {
            space: Space::Projective,
            ambient: n,
            kind: RegionKind::Variety { polys },
        }
    }

    pub fn finite(n: usize, points: Vec<Point>) -> Region {
        Region {
            space: Space::Affine,
            ambient: n,
            kind: RegionKind::Finite { points },
        }
    }

    pub fn ball(n: usize, center: Point, radius: f64) -> Region {
        Region {
            space: Space::Affine,
            ambient: n,
            kind: RegionKind::Ball { center, radius },
        }
    }

    pub fn sphere(n: usize, center: Point, radius: f64) -> Region {
        Region {
            space: Space::Affine,
            ambient: n,
            kind: RegionKind::Sphere { center, radius },
        }
    }

    pub fn polydisk(n: usize, center: Point, radius: f64) -> Region {
        Region {
            space: Space::Affine,
            ambient: n,
            kind: RegionKind::Polydisk { center, radius },
        }
    }

    pub fn segment(a: Complex64, b: Complex64) -> Region {
        Region {
            space: Space::Affine,
            ambient: 1,
            kind: RegionKind::Segment { a, b },
        }
    }

    pub fn union(parts: Vec<Region>) -> Region {
        let ambient = parts.first().map(|r| r.ambient).unwrap_or(1);
        let space = parts.first().map(|r| r.space).unwrap_or(Space::Affine);
        Region {
            space,
            ambient,
            kind: RegionKind::Union { parts },
        }
    }

    pub fn intersection(parts: Vec<Region>) -> Region {
        let ambient = parts.first().map(|r| r.ambient).unwrap_or(1);
        let space = parts.first().map(|r| r.space).unwrap_or(Space::Affine);
        Region {
            space,
            ambient,
            kind: RegionKind::Intersection { parts },
        }
    }

    pub fn is_projective(&self) -> bool {
        self.space == Space::Projective
    }

    pub fn is_finite_points(&self) -> bool {
        match &self.kind {
            RegionKind::Finite { .. } => true,
            RegionKind::Union { parts } | RegionKind::Intersection { parts } => {
                parts.iter().all(|p| p.is_finite_points())
            }
            _ => false,
        }
    }

    /// The explicit point list when the region is a finite set (or a union
    /// of finite sets).
    pub fn finite_point_list(&self) -> Option<Vec<Point>> {
        match &self.kind {
            RegionKind::Finite { points } => Some(points.clone()),
            RegionKind::Union { parts } => {
                let mut all = Vec::new();
                for p in parts {
                    all.extend(p.finite_point_list()?);
                }
                Some(all)
            }
            _ => None,
        }
    }

    /// Defining polynomials when the region is a variety (possibly clipped
    /// by balls in an intersection).
    pub fn variety_polys(&self) -> Option<Vec<Polynomial>> {
        match &self.kind {
            RegionKind::Variety { polys } => Some(polys.clone()),
            RegionKind::Intersection { parts } => {
                parts.iter().find_map(|p| p.variety_polys())
            }
            _ => None,
        }
    }

    /// Membership at the default tolerance.
    pub fn contains(&self, x: &[Complex64]) -> bool {
        self.membership(x, EPS_MEM).map(|m| m.inside).unwrap_or(false)
    }

    /// Membership with residual; tolerance is scaled per kind as documented.
    pub fn membership(&self, x: &[Complex64], eps: f64) -> Result<Membership> {
        if x.len() != self.ambient {
            return Err(ConvError::DimensionMismatch {
                expected: self.ambient,
                got: x.len(),
            });
        }
        if self.is_projective() && point_norm(x) == 0.0 {
            return Err(ConvError::ZeroProjectivePoint);
        }
        let nx = point_norm(x);
        match &self.kind {
            RegionKind::Variety { polys } => {
                let mut worst = 0.0f64;
                let mut inside = true;
                for p in polys {
                    let v = p.evaluate(x)?.norm();
                    let scale = eps * (1.0 + nx).powi(p.degree().max(0) as i32);
                    worst = worst.max(v);
                    if v > scale {
                        inside = false;
                    }
                }
                Ok(Membership {
                    inside,
                    residual: worst,
                })
            }
            RegionKind::Finite { points } => {
                let dist = if self.is_projective() {
                    points
                        .iter()
                        .map(|p| fs_distance(x, p))
                        .fold(f64::INFINITY, f64::min)
                } else {
                    points
                        .iter()
                        .map(|p| {
                            x.iter()
                                .zip(p)
                                .map(|(a, b)| (a - b).norm_sqr())
                                .sum::<f64>()
                                .sqrt()
                        })
                        .fold(f64::INFINITY, f64::min)
                };
                Ok(Membership {
                    inside: dist <= eps * (1.0 + nx),
                    residual: dist,
                })
            }
            RegionKind::Ball { center, radius } => {
                let d = dist_to(x, center);
                Ok(Membership {
                    inside: d <= radius + eps * (1.0 + nx),
                    residual: (d - radius).max(0.0),
                })
            }
            RegionKind::Polydisk { center, radius } => {
                let d = x
                    .iter()
                    .zip(center)
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0f64, f64::max);
                Ok(Membership {
                    inside: d <= radius + eps * (1.0 + nx),
                    residual: (d - radius).max(0.0),
                })
            }
            RegionKind::Sphere { center, radius } => {
                let d = (dist_to(x, center) - radius).abs();
                Ok(Membership {
                    inside: d <= eps * (1.0 + nx),
                    residual: d,
                })
            }
            RegionKind::Segment { a, b } => {
                let d = dist_to_segment(x[0], *a, *b);
                Ok(Membership {
                    inside: d <= eps * (1.0 + nx),
                    residual: d,
                })
            }
            RegionKind::Union { parts } => {
                let mut best = f64::INFINITY;
                let mut inside = false;
                for part in parts {
                    let m = part.membership(x, eps)?;
                    best = best.min(m.residual);
                    inside |= m.inside;
                }
                Ok(Membership {
                    inside,
                    residual: best,
                })
            }
            RegionKind::Intersection { parts } => {
                let mut worst = 0.0f64;
                let mut inside = true;
                for part in parts {
                    let m = part.membership(x, eps)?;
                    worst = worst.max(m.residual);
                    inside &= m.inside;
                }
                Ok(Membership {
                    inside,
                    residual: worst,
                })
            }
            RegionKind::Hyperplane { normal } => {
                let plane = Hyperplane::new(normal.clone())?;
                let d = plane.distance(x)?;
                Ok(Membership {
                    inside: d <= eps,
                    residual: d,
                })
            }
        }
    }

    /// Seeded sampler with the default window.
    pub fn sample(&self, count: usize, rng: &mut Rng) -> Result<Vec<Point>> {
        self.sample_windowed(count, 2.0, rng)
    }

    /// Deterministic under the rng state; every returned point passes
    /// membership at the default tolerance.
    pub fn sample_windowed(&self, count: usize, window: f64, rng: &mut Rng) -> Result<Vec<Point>> {
        if count == 0 {
            return Ok(Vec::new());
        }
        match &self.kind {
            RegionKind::Finite { points } => {
                if points.is_empty() {
                    return Ok(Vec::new());
                }
                Ok((0..count).map(|i| points[i % points.len()].clone()).collect())
            }
            RegionKind::Ball { center, radius } => Ok((0..count)
                .map(|i| {
                    let dir = rng.direction(self.ambient);
                    // Half the draws on the boundary sphere: extremal
                    // configurations concentrate there.
                    let r = if i % 2 == 0 {
                        *radius
                    } else {
                        radius * rng.uniform().powf(0.5 / self.ambient as f64)
                    };
                    dir.iter().zip(center).map(|(d, c)| d * r + c).collect()
                })
                .collect()),
            RegionKind::Sphere { center, radius } => Ok((0..count)
                .map(|_| {
                    let dir = rng.direction(self.ambient);
                    dir.iter().zip(center).map(|(d, c)| d * *radius + c).collect()
                })
                .collect()),
            RegionKind::Polydisk { center, radius } => Ok((0..count)
                .map(|i| {
                    (0..self.ambient)
                        .map(|j| {
                            let z = if i % 2 == 0 {
                                rng.on_circle(*radius)
                            } else {
                                rng.in_disk(*radius)
                            };
                            z + center[j]
                        })
                        .collect()
                })
                .collect()),
            RegionKind::Segment { a, b } => Ok((0..count)
                .map(|i| {
                    let t = if i == 0 {
                        0.0
                    } else if i == 1 {
                        1.0
                    } else {
                        rng.uniform()
                    };
                    vec![a + (b - a) * t]
                })
                .collect()),
            RegionKind::Variety { polys } => self.sample_variety(polys, count, window, rng),
            RegionKind::Union { parts } => {
                let live: Vec<&Region> = parts.iter().collect();
                if live.is_empty() {
                    return Ok(Vec::new());
                }
                let mut out = Vec::with_capacity(count);
                for i in 0..count {
                    let pick = (i + rng.below(live.len())) % live.len();
                    let mut s = live[pick].sample_windowed(1, window, rng)?;
                    out.append(&mut s);
                }
                Ok(out)
            }
            RegionKind::Intersection { parts } => {
                let Some(first) = parts.first() else {
                    return Ok(Vec::new());
                };
                let mut out = Vec::with_capacity(count);
                let budget = count * 200;
                let mut tries = 0;
                while out.len() < count && tries < budget {
                    tries += 1;
                    for cand in first.sample_windowed(1, window, rng)? {
                        let ok = parts[1..]
                            .iter()
                            .all(|p| p.membership(&cand, EPS_MEM).map(|m| m.inside).unwrap_or(false));
                        if ok {
                            out.push(cand);
                        }
                    }
                }
                if out.len() < count {
                    return Err(ConvError::SamplerBudget(format!(
                        "intersection sampler produced {} of {} points",
                        out.len(),
                        count
                    )));
                }
                Ok(out)
            }
            RegionKind::Hyperplane { normal } => {
                let plane = Hyperplane::new(normal.clone())?;
                let n = self.ambient;
                let mut out = Vec::with_capacity(count);
                let mut guard = 0;
                while out.len() < count && guard < count * 50 {
                    guard += 1;
                    let raw = rng.direction(n);
                    // Project out the normal component.
                    let along = hermitian(&raw, &plane.normal);
                    let proj: Point = raw
                        .iter()
                        .zip(&plane.normal)
                        .map(|(&r, &nu)| r - nu * along)
                        .collect();
                    if point_norm(&proj) > 1e-9 {
                        out.push(canonical_rep(&proj)?);
                    }
                }
                if out.len() < count {
                    return Err(ConvError::SamplerBudget("hyperplane sampler".into()));
                }
                Ok(out)
            }
        }
    }

    fn sample_variety(
        &self,
        polys: &[Polynomial],
        count: usize,
        window: f64,
        rng: &mut Rng,
    ) -> Result<Vec<Point>> {
        let n = self.ambient;
        let Some(lead) = polys.first() else {
            return Err(ConvError::SamplerBudget("variety with no polynomials".into()));
        };
        let mut out = Vec::with_capacity(count);
        let budget = count * 400;
        let mut tries = 0;
        while out.len() < count && tries < budget {
            tries += 1;
            // Freeze all but one coordinate and solve the 1-D slice.
            let solve_var = rng.below(n);
            let mut x: Point = (0..n).map(|_| rng.in_disk(window)).collect();
            if self.is_projective() {
                // Representative scale is free; keep coordinates O(1).
            }
            let coeffs = univariate_slice(lead, &x, solve_var);
            let all_zero = coeffs.iter().all(|c| c.norm() < 1e-14);
            let candidates: Vec<Complex64> = if all_zero {
                // The slice is identically zero (e.g. an axis of s1*s2):
                // any value works.
                vec![rng.in_disk(window)]
            } else {
                univariate_roots(&coeffs)
                    .into_iter()
                    .map(|r| newton_polish(&coeffs, r))
                    .collect()
            };
            for root in candidates {
                if root.norm() > window * 4.0 {
                    continue;
                }
                x[solve_var] = root;
                if self.is_projective() && point_norm(&x) == 0.0 {
                    continue;
                }
                let candidate = if self.is_projective() {
                    canonical_rep(&x)?
                } else {
                    x.clone()
                };
                if self
                    .membership(&candidate, EPS_MEM)
                    .map(|m| m.inside)
                    .unwrap_or(false)
                {
                    out.push(candidate);
                    if out.len() == count {
                        break;
                    }
                }
            }
        }
        if out.len() < count {
            return Err(ConvError::SamplerBudget(format!(
                "variety sampler produced {} of {} points in window {window}",
                out.len(),
                count
            )));
        }
        Ok(out)
    }

    /// Projection onto the region where geometry makes it cheap; used by
    /// ascent refiners. None when no projection is available.
    pub fn project(&self, x: &[Complex64]) -> Option<Point> {
        match &self.kind {
            RegionKind::Ball { center, radius } => {
                let d = dist_to(x, center);
                if d <= *radius {
                    return Some(x.to_vec());
                }
                Some(
                    x.iter()
                        .zip(center)
                        .map(|(a, c)| c + (a - c) * (*radius / d))
                        .collect(),
                )
            }
            RegionKind::Sphere { center, radius } => {
                let d = dist_to(x, center);
                if d < 1e-12 {
                    let mut y = center.clone();
                    y[0] += Complex64::new(*radius, 0.0);
                    return Some(y);
                }
                Some(
                    x.iter()
                        .zip(center)
                        .map(|(a, c)| c + (a - c) * (*radius / d))
                        .collect(),
                )
            }
            RegionKind::Polydisk { center, radius } => Some(
                x.iter()
                    .zip(center)
                    .map(|(a, c)| {
                        let d = (a - c).norm();
                        if d <= *radius {
                            *a
                        } else {
                            c + (a - c) * (*radius / d)
                        }
                    })
                    .collect(),
            ),
            RegionKind::Segment { a, b } => {
                let z = x[0];
                let ab = b - a;
                let len2 = ab.norm_sqr();
                if len2 < 1e-300 {
                    return Some(vec![*a]);
                }
                let t = ((z - a) * ab.conj()).re / len2;
                let t = t.clamp(0.0, 1.0);
                Some(vec![a + ab * t])
            }
            _ => None,
        }
    }
}

fn dist_to(x: &[Complex64], center: &[Complex64]) -> f64 {
    x.iter()
        .zip(center)
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

fn dist_to_segment(z: Complex64, a: Complex64, b: Complex64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 < 1e-300 {
        return (z - a).norm();
    }
    let t = ((z - a) * ab.conj()).re / len2;
    let t = t.clamp(0.0, 1.0);
    (z - (a + ab * t)).norm()
}

/// A few Newton steps to push a root residual down to rounding level.
fn newton_polish(coeffs: &[Complex64], mut z: Complex64) -> Complex64 {
    for _ in 0..3 {
        let mut f = Complex64::new(0.0, 0.0);
        let mut df = Complex64::new(0.0, 0.0);
        for &c in coeffs.iter().rev() {
            df = df * z + f;
            f = f * z + c;
        }
        if df.norm() < 1e-300 || f.norm() == 0.0 {
            break;
        }
        z -= f / df;
    }
    z
}

/// Coefficients (low-to-high) of `p` restricted to the line where every
/// coordinate except `var` is frozen at `x`.
fn univariate_slice(p: &Polynomial, x: &[Complex64], var: usize) -> Vec<Complex64> {
    let deg = p
        .terms()
        .map(|(a, _)| a[var])
        .max()
        .unwrap_or(0) as usize;
    let mut coeffs = vec![Complex64::new(0.0, 0.0); deg + 1];
    for (alpha, &c) in p.terms() {
        let mut factor = c;
        for (i, &a) in alpha.iter().enumerate() {
            if i != var {
                factor *= x[i].powu(a);
            }
        }
        coeffs[alpha[var] as usize] += factor;
    }
    coeffs
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn axes() -> Region {
        let p = Polynomial::variable(2, 0).multiply(&Polynomial::variable(2, 1));
        Region::variety(2, vec![p])
    }

    #[test]
    fn membership_spec_examples() {
        // VARIETY(s1*s2) at (0, 7): inside with residual 0
        let m = axes().membership(&[c(0.0, 0.0), c(7.0, 0.0)], EPS_MEM).unwrap();
        assert!(m.inside);
        assert_eq!(m.residual, 0.0);

        // BALL(0, 2) in C at 3: outside
        let ball = Region::ball(1, vec![c(0.0, 0.0)], 2.0);
        assert!(!ball.membership(&[c(3.0, 0.0)], EPS_MEM).unwrap().inside);

        // UNION(FINITE({1/i})) at 1/3: inside
        let pts: Vec<Point> = (1..=10).map(|i| vec![c(1.0 / i as f64, 0.0)]).collect();
        let fin = Region::union(vec![Region::finite(1, pts)]);
        assert!(fin
            .membership(&[c(1.0 / 3.0, 0.0)], EPS_MEM)
            .unwrap()
            .inside);
    }

    #[test]
    fn union_intersection_are_boolean_lattice() {
        let b1 = Region::ball(1, vec![c(0.0, 0.0)], 1.0);
        let b2 = Region::ball(1, vec![c(1.0, 0.0)], 1.0);
        let u = Region::union(vec![b1.clone(), b2.clone()]);
        let i = Region::intersection(vec![b1.clone(), b2.clone()]);
        for x in [c(-0.5, 0.0), c(0.5, 0.0), c(1.8, 0.0), c(3.0, 0.0)] {
            let in1 = b1.contains(&[x]);
            let in2 = b2.contains(&[x]);
            assert_eq!(u.contains(&[x]), in1 || in2, "x={x}");
            assert_eq!(i.contains(&[x]), in1 && in2, "x={x}");
        }
    }

    #[test]
    fn variety_sampler_lands_on_axes() {
        let mut rng = Rng::new(5);
        let pts = axes().sample_windowed(10, 2.0, &mut rng).unwrap();
        assert_eq!(pts.len(), 10);
        for p in &pts {
            let on_axis = p[0].norm() < 1e-7 || p[1].norm() < 1e-7;
            assert!(on_axis, "point {p:?} not on an axis");
        }
    }

    #[test]
    fn finite_sampler_repeats_points() {
        let region = Region::finite(1, vec![vec![c(0.0, 0.0)]]);
        let mut rng = Rng::new(1);
        let pts = region.sample(3, &mut rng).unwrap();
        assert_eq!(pts.len(), 3);
        assert!(pts.iter().all(|p| p[0].norm() == 0.0));
    }

    #[test]
    fn sampler_is_deterministic_under_seed() {
        let ball = Region::ball(2, vec![c(0.0, 0.0), c(0.0, 0.0)], 1.5);
        let a = ball.sample(20, &mut Rng::new(42).stream(1)).unwrap();
        let b = ball.sample(20, &mut Rng::new(42).stream(1)).unwrap();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x, y);
        }
    }

    #[test]
    fn segment_membership_and_sampling() {
        let seg = Region::segment(c(-2.0, 0.0), c(2.0, 0.0));
        assert!(seg.contains(&[c(0.7, 0.0)]));
        assert!(!seg.contains(&[c(0.0, 0.5)]));
        assert!(!seg.contains(&[c(2.5, 0.0)]));
        let mut rng = Rng::new(3);
        for p in seg.sample(25, &mut rng).unwrap() {
            assert!(seg.contains(&p));
        }
    }

    #[test]
    fn region_json_round_trip() {
        let r = Region::union(vec![
            Region::ball(1, vec![c(0.0, 0.0)], 1.0),
            Region::finite(1, vec![vec![c(1.0, 0.0)], vec![c(0.0, 1.0)]]),
        ]);
        let js = serde_json::to_string(&r).unwrap();
        let back: Region = serde_json::from_str(&js).unwrap();
        assert!(back.contains(&[c(1.0, 0.0)]));
        assert!(back.contains(&[c(0.5, 0.2)]));
        assert!(!back.contains(&[c(2.0, 2.0)]));
    }

    #[test]
    fn projective_zero_rep_rejected() {
        let h = Region {
            space: Space::Projective,
            ambient: 2,
            kind: RegionKind::Hyperplane {
                normal: vec![c(1.0, 0.0), c(0.0, 0.0)],
            },
        };
        assert!(h.membership(&[c(0.0, 0.0), c(0.0, 0.0)], EPS_MEM).is_err());
    }

    #[test]
    fn cone_variety_sampler_in_c2() {
        // s1^2 + s2^2 = 0: the two complex lines s2 = +-i s1.
        let p = Polynomial::variable(2, 0)
            .power(2)
            .add(&Polynomial::variable(2, 1).power(2));
        let cone = Region::variety(2, vec![p.clone()]);
        let mut rng = Rng::new(8);
        for x in cone.sample_windowed(12, 2.0, &mut rng).unwrap() {
            assert!(p.evaluate(&x).unwrap().norm() < 1e-6 * (1.0 + point_norm(&x)).powi(2));
        }
    }
}
