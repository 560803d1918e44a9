//! Projective points, Fubini-Study distance, the K_M cover sets, and
//! hyperplane avoidance certificates.

use crate::error::{ConvError, Result};
use crate::point_norm;
use crate::rng::Rng;
use crate::Point;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Canonical representative of [x]: unit norm, first coordinate of largest
/// magnitude rotated to positive real.
pub fn canonical_rep(x: &[Complex64]) -> Result<Point> {
    let norm = point_norm(x);
    if norm == 0.0 {
        return Err(ConvError::ZeroProjectivePoint);
    }
    let lead = x
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm().partial_cmp(&b.1.norm()).unwrap())
        .map(|(i, _)| i)
        .unwrap();
    let phase = x[lead] / x[lead].norm();
    Ok(x.iter().map(|&z| z / phase / norm).collect())
}

/// Hermitian inner product `sum_i a_i conj(b_i)`.
pub fn hermitian(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(&x, &y)| x * y.conj()).sum()
}

/// Sine of the Fubini-Study angle between [x] and [y]; unitary invariant.
pub fn fs_distance(x: &[Complex64], y: &[Complex64]) -> f64 {
    let nx = point_norm(x);
    let ny = point_norm(y);
    if nx == 0.0 || ny == 0.0 {
        return 0.0;
    }
    let cos2 = (hermitian(x, y).norm() / (nx * ny)).min(1.0);
    (1.0 - cos2 * cos2).max(0.0).sqrt()
}

/// A hyperplane of P^{n-1}, the zero set of the Hermitian form against
/// `normal`. Any two are unitary images of each other.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Hyperplane {
    pub normal: Point,
}

impl Hyperplane {
    pub fn new(normal: Point) -> Result<Self> {
        let n = point_norm(&normal);
        if n == 0.0 {
            return Err(ConvError::ZeroProjectivePoint);
        }
        Ok(Hyperplane {
            normal: normal.into_iter().map(|z| z / n).collect(),
        })
    }

    /// From a spanning set of n-1 vectors: the Hermitian-orthogonal
    /// complement, found by Gaussian elimination.
    pub fn from_span(vectors: &[Point]) -> Result<Self> {
        let n = vectors
            .first()
            .map(|v| v.len())
            .ok_or_else(|| ConvError::InvalidInput("empty span".into()))?;
        if vectors.len() != n - 1 {
            return Err(ConvError::InvalidInput(format!(
                "need {} spanning vectors for a hyperplane of P^{}, got {}",
                n - 1,
                n - 1,
                vectors.len()
            )));
        }
        // Solve conj(V) nu = 0 by elimination with partial pivoting.
        let mut rows: Vec<Vec<Complex64>> = vectors
            .iter()
            .map(|v| v.iter().map(|z| z.conj()).collect())
            .collect();
        let mut pivot_cols = Vec::new();
        let mut r = 0usize;
        for col in 0..n {
            let (best, mag) = (r..rows.len())
                .map(|i| (i, rows[i][col].norm()))
                .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
                .unwrap_or((r, 0.0));
            if mag < 1e-12 {
                continue;
            }
            rows.swap(r, best);
            let piv = rows[r][col];
            for i in 0..rows.len() {
                if i != r {
                    let f = rows[i][col] / piv;
                    for c in 0..n {
                        let sub = rows[r][c] * f;
                        rows[i][c] -= sub;
                    }
                }
            }
            pivot_cols.push(col);
            r += 1;
            if r == rows.len() {
                break;
            }
        }
        if r < n - 1 {
            return Err(ConvError::InvalidInput(
                "spanning vectors are linearly dependent".into(),
            ));
        }
        let free = (0..n).find(|c| !pivot_cols.contains(c)).unwrap();
        let mut nu = vec![Complex64::new(0.0, 0.0); n];
        nu[free] = Complex64::new(1.0, 0.0);
        for (i, &pc) in pivot_cols.iter().enumerate() {
            nu[pc] = -rows[i][free] / rows[i][pc];
        }
        Hyperplane::new(nu)
    }

    /// FS distance from [x] to the hyperplane: |<x, normal>| / |x|.
    pub fn distance(&self, x: &[Complex64]) -> Result<f64> {
        let nx = point_norm(x);
        if nx == 0.0 {
            return Err(ConvError::ZeroProjectivePoint);
        }
        Ok(hermitian(x, &self.normal).norm() / nx)
    }
}

/// The ascending cover `K_M = S_1 u ... u S_n` of P^{n-1}:
/// `S_1 = {[1,0,...,0]}` and `S_k` bounds the first k-1 coordinates by
/// `M |x_k|` with the later ones zero.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProjCover {
    pub m: f64,
    pub n: usize,
}

impl ProjCover {
    pub fn new(m: f64, n: usize) -> Result<Self> {
        if m <= 0.0 || n < 2 {
            return Err(ConvError::InvalidInput(
                "K_M needs M > 0 and ambient dimension >= 2".into(),
            ));
        }
        Ok(ProjCover { m, n })
    }

    /// Membership of [x] in the piece S_k (1-based k).
    pub fn in_piece(&self, k: usize, x: &[Complex64], eps: f64) -> Result<bool> {
        if point_norm(x) == 0.0 {
            return Err(ConvError::ZeroProjectivePoint);
        }
        if k == 1 {
            let e1: Point = (0..self.n)
                .map(|i| Complex64::new(if i == 0 { 1.0 } else { 0.0 }, 0.0))
                .collect();
            return Ok(fs_distance(x, &e1) <= eps);
        }
        let scale = point_norm(x);
        let tail_zero = x[k..].iter().all(|z| z.norm() <= eps * scale);
        let head: f64 = x[..k - 1].iter().map(|z| z.norm_sqr()).sum();
        let bound = self.m * self.m * x[k - 1].norm_sqr();
        Ok(tail_zero && head <= bound + eps * scale * scale)
    }

    pub fn contains(&self, x: &[Complex64], eps: f64) -> Result<bool> {
        for k in 1..=self.n {
            if self.in_piece(k, x, eps)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Canonical representatives sampled from the pieces; every returned
    /// point satisfies its piece inequality exactly by construction.
    pub fn sample(&self, count: usize, rng: &mut Rng) -> Vec<Point> {
        let mut out = Vec::with_capacity(count);
        for i in 0..count {
            let k = 1 + (i + rng.below(self.n)) % self.n;
            let mut x = vec![Complex64::new(0.0, 0.0); self.n];
            if k == 1 {
                x[0] = Complex64::new(1.0, 0.0);
            } else {
                x[k - 1] = Complex64::new(1.0, 0.0);
                // Head inside the ball of radius M, boundary-biased.
                let r = self.m * rng.uniform().sqrt();
                let dir = rng.direction(k - 1);
                for (j, &d) in dir.iter().enumerate() {
                    x[j] = d * r;
                }
            }
            out.push(canonical_rep(&x).expect("nonzero by construction"));
        }
        out
    }
}

/// Search certificate: the hyperplane together with the observed minimal
/// FS separation from the avoided set.
#[derive(Debug, Clone)]
pub struct AvoidanceCertificate {
    pub hyperplane: Hyperplane,
    pub separation: f64,
    pub epsilon: f64,
}

/// Finds a hyperplane avoiding K_M (optionally also an extra point) with a
/// sampled separation certificate, shrinking epsilon in `v_j = e_j + eps e_{j+1}`
/// until the sampled distance clears `delta_min`.
pub fn find_avoiding_hyperplane(
    cover: &ProjCover,
    extra_point: Option<&Point>,
    delta_min: f64,
    seed: u64,
) -> Result<AvoidanceCertificate> {
    let n = cover.n;
    let mut rng = Rng::new(seed).stream(0xA01D);
    let samples = {
        let mut s = cover.sample(600, &mut rng);
        // Always include the piece anchors.
        for k in 1..=n {
            let mut x = vec![Complex64::new(0.0, 0.0); n];
            x[k - 1] = Complex64::new(1.0, 0.0);
            if k >= 2 {
                let mut y = x.clone();
                for j in 0..k - 1 {
                    y[j] = Complex64::new(cover.m / ((k - 1) as f64).sqrt(), 0.0);
                }
                s.push(y);
            }
            s.push(x);
        }
        s
    };
    let mut eps = 0.5f64;
    for attempt in 0..40 {
        let span: Vec<Point> = (0..n - 1)
            .map(|j| {
                let mut v = vec![Complex64::new(0.0, 0.0); n];
                v[j] = Complex64::new(1.0, 0.0);
                v[j + 1] = Complex64::new(eps, 0.0);
                v
            })
            .collect();
        let mut plane = Hyperplane::from_span(&span)?;
        let mut sep = samples
            .iter()
            .map(|x| plane.distance(x).unwrap_or(0.0))
            .fold(f64::INFINITY, f64::min);
        if let Some(u) = extra_point {
            // Perturb within the open set of avoiding hyperplanes if the
            // extra point happens to lie on this one.
            let mut tries = 0;
            while plane.distance(u)? < delta_min && tries < 50 {
                let jitter: Point = plane
                    .normal
                    .iter()
                    .map(|&z| z + rng.gaussian() * (delta_min * 4.0))
                    .collect();
                let candidate = Hyperplane::new(jitter)?;
                let cand_sep = samples
                    .iter()
                    .map(|x| candidate.distance(x).unwrap_or(0.0))
                    .fold(f64::INFINITY, f64::min);
                if cand_sep >= sep * 0.5 && candidate.distance(u)? >= delta_min {
                    sep = cand_sep.min(candidate.distance(u)?);
                    plane = candidate;
                    break;
                }
                tries += 1;
            }
            if plane.distance(u)? < delta_min {
                eps *= 0.5;
                continue;
            }
            sep = sep.min(plane.distance(u)?);
        }
        if sep >= delta_min {
            return Ok(AvoidanceCertificate {
                hyperplane: plane,
                separation: sep,
                epsilon: eps,
            });
        }
        eps *= 0.5;
        let _ = attempt;
    }
    Err(ConvError::CertificationFailure { attempts: 40 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn canonical_rep_is_scale_invariant() {
        let x = vec![c(0.0, 2.0), c(1.0, -1.0)];
        let a = canonical_rep(&x).unwrap();
        let lx: Vec<Complex64> = x.iter().map(|&z| z * c(-0.3, 1.7)).collect();
        let b = canonical_rep(&lx).unwrap();
        for (u, v) in a.iter().zip(&b) {
            assert!((u - v).norm() < 1e-10);
        }
        assert!((point_norm(&a) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_rep_rejected() {
        assert!(canonical_rep(&[c(0.0, 0.0)]).is_err());
    }

    #[test]
    fn fs_distance_unitary_invariant_on_p1() {
        let x = vec![c(1.0, 0.0), c(0.5, 0.5)];
        let y = vec![c(0.2, -1.0), c(1.0, 0.0)];
        let d = fs_distance(&x, &y);
        // Apply the unitary [[0,1],[-1,0]].
        let ux = vec![x[1], -x[0]];
        let uy = vec![y[1], -y[0]];
        assert!((fs_distance(&ux, &uy) - d).abs() < 1e-12);
    }

    #[test]
    fn cover_is_ascending_and_eventually_covers() {
        let mut rng = Rng::new(11);
        let k1 = ProjCover::new(1.0, 3).unwrap();
        let k2 = ProjCover::new(2.0, 3).unwrap();
        for x in k1.sample(50, &mut rng) {
            assert!(k1.contains(&x, 1e-9).unwrap());
            assert!(k2.contains(&x, 1e-9).unwrap());
        }
        // Arbitrary directions are covered once M is large enough: the
        // last nonzero coordinate names the piece, and the head norm sets M.
        let mut rng = Rng::new(12);
        for _ in 0..50 {
            let x = rng.direction(3);
            let head: f64 = x[..2].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let needed = (head / x[2].norm()).ceil() + 1.0;
            assert!(ProjCover::new(needed, 3).unwrap().contains(&x, 1e-9).unwrap());
        }
    }

    #[test]
    fn avoiding_hyperplane_for_k1_in_p2() {
        let cover = ProjCover::new(1.0, 3).unwrap();
        let cert = find_avoiding_hyperplane(&cover, None, 1e-3, 7).unwrap();
        assert!(cert.separation >= 1e-3);
        // Fresh samples keep half the separation.
        let mut rng = Rng::new(999);
        let fresh = cover.sample(400, &mut rng);
        let worst = fresh
            .iter()
            .map(|x| cert.hyperplane.distance(x).unwrap())
            .fold(f64::INFINITY, f64::min);
        assert!(
            worst >= cert.separation / 2.0,
            "worst {worst} vs sep {}",
            cert.separation
        );
    }

    #[test]
    fn avoiding_with_extra_point() {
        let cover = ProjCover::new(1.0, 3).unwrap();
        let u = vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
        let cert = find_avoiding_hyperplane(&cover, Some(&u), 1e-3, 8).unwrap();
        assert!(cert.hyperplane.distance(&u).unwrap() >= 1e-3);
        assert!(cert.separation >= 1e-3);
    }

    #[test]
    fn p1_hyperplane_is_a_point_avoiding_both_pieces() {
        // n = 2: K_1 in P^1 is {[1,0]} u {|x1| <= |x2|}; V = [1, eps].
        let cover = ProjCover::new(1.0, 2).unwrap();
        let cert = find_avoiding_hyperplane(&cover, None, 1e-3, 9).unwrap();
        let e1 = vec![c(1.0, 0.0), c(0.0, 0.0)];
        assert!(cert.hyperplane.distance(&e1).unwrap() > 0.0);
    }
}
