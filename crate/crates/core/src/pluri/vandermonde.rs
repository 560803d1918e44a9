//! Vandermonde determinants over the graded monomial basis.
//!
//! `V(s_1, ..., s_j) = det(s_q^{alpha(p)})` with rows indexed by the first j
//! monomials and columns by the points.

use crate::error::{ConvError, Result};
use crate::poly::monomial_at;
use crate::Point;
use num_complex::Complex64;

fn monomial_value(x: &[Complex64], alpha: &[u32]) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    for (xi, &a) in x.iter().zip(alpha) {
        acc *= xi.powu(a);
    }
    acc
}

/// Exact duplicate points force V = 0 (equal columns); floating-point
/// elimination alone leaves ~1e-16 residue there.
fn has_duplicate_points(points: &[Point]) -> bool {
    for a in 0..points.len() {
        for b in a + 1..points.len() {
            if points[a]
                .iter()
                .zip(&points[b])
                .all(|(x, y)| x.re == y.re && x.im == y.im)
            {
                return true;
            }
        }
    }
    false
}

/// Builds the j x j Vandermonde matrix, rows = monomials alpha(1..j).
fn matrix(points: &[Point], n: usize) -> Result<Vec<Vec<Complex64>>> {
    let j = points.len();
    for p in points {
        if p.len() != n {
            return Err(ConvError::DimensionMismatch {
                expected: n,
                got: p.len(),
            });
        }
    }
    let alphas: Vec<Vec<u32>> = (1..=j as u64).map(|i| monomial_at(n, i).exponent).collect();
    Ok(alphas
        .iter()
        .map(|a| points.iter().map(|s| monomial_value(s, a)).collect())
        .collect())
}

/// Determinant by LU with partial pivoting; exact 0 when a pivot vanishes.
fn lu_det(mut m: Vec<Vec<Complex64>>) -> Complex64 {
    let j = m.len();
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..j {
        let (pivot_row, pivot_mag) = (col..j)
            .map(|r| (r, m[r][col].norm()))
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap();
        if pivot_mag == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if pivot_row != col {
            m.swap(pivot_row, col);
            det = -det;
        }
        let piv = m[col][col];
        det *= piv;
        for r in col + 1..j {
            let f = m[r][col] / piv;
            for c in col..j {
                let sub = m[col][c] * f;
                m[r][c] -= sub;
            }
        }
    }
    det
}

/// ln |det|, with -inf for singular matrices; stable for large values.
fn lu_log_abs_det(mut m: Vec<Vec<Complex64>>) -> f64 {
    let j = m.len();
    let mut acc = 0.0f64;
    for col in 0..j {
        let (pivot_row, pivot_mag) = (col..j)
            .map(|r| (r, m[r][col].norm()))
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap();
        if pivot_mag == 0.0 {
            return f64::NEG_INFINITY;
        }
        if pivot_row != col {
            m.swap(pivot_row, col);
        }
        let piv = m[col][col];
        acc += piv.norm().ln();
        for r in col + 1..j {
            let f = m[r][col] / piv;
            for c in col..j {
                let sub = m[col][c] * f;
                m[r][c] -= sub;
            }
        }
    }
    acc
}

/// The j-th Vandermonde determinant of j points in C^n.
pub fn vandermonde(points: &[Point], n: usize) -> Result<Complex64> {
    if points.is_empty() {
        return Err(ConvError::InvalidInput("vandermonde of no points".into()));
    }
    let m = matrix(points, n)?;
    if has_duplicate_points(points) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    Ok(lu_det(m))
}

/// ln |V(points)|; -inf when the configuration is degenerate.
pub fn log_abs_vandermonde(points: &[Point], n: usize) -> Result<f64> {
    if points.is_empty() {
        return Err(ConvError::InvalidInput("vandermonde of no points".into()));
    }
    let m = matrix(points, n)?;
    if has_duplicate_points(points) {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(lu_log_abs_det(m))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn univariate_matches_pair_product() {
        // n=1, {0,1,2}: det = 2, equals prod_{i<q}(s_q - s_i).
        let pts: Vec<Point> = vec![vec![c(0.0, 0.0)], vec![c(1.0, 0.0)], vec![c(2.0, 0.0)]];
        let v = vandermonde(&pts, 1).unwrap();
        assert!((v - c(2.0, 0.0)).norm() < 1e-12);

        // and for generic complex points
        let zs = [c(0.3, -0.2), c(-1.0, 0.8), c(0.9, 0.1), c(0.0, 1.4)];
        let pts: Vec<Point> = zs.iter().map(|&z| vec![z]).collect();
        let v = vandermonde(&pts, 1).unwrap();
        let mut oracle = c(1.0, 0.0);
        for q in 0..zs.len() {
            for i in 0..q {
                oracle *= zs[q] - zs[i];
            }
        }
        assert!((v - oracle).norm() < 1e-10 * oracle.norm());
    }

    #[test]
    fn repeated_point_vanishes() {
        let pts: Vec<Point> = vec![vec![c(0.7, 0.1)], vec![c(0.7, 0.1)]];
        assert_eq!(vandermonde(&pts, 1).unwrap(), c(0.0, 0.0));
        assert_eq!(log_abs_vandermonde(&pts, 1).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn bivariate_spec_example() {
        // n=2, {(0,0),(0,1),(1,0)}: rows 1, s2, s1 -> det = 1.
        let pts: Vec<Point> = vec![
            vec![c(0.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0)],
        ];
        let v = vandermonde(&pts, 2).unwrap();
        assert!((v - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn antisymmetry_under_swaps_exhaustive_small() {
        // |V| fixed, V flips sign, for all transpositions; n <= 2, j <= 6.
        let base: Vec<Point> = (0..6)
            .map(|i| {
                let t = i as f64;
                vec![c(0.3 * t - 0.8, 0.1 * t), c(0.05 * t * t - 0.4, -0.2 * t)]
            })
            .collect();
        for j in 2..=6usize {
            let pts: Vec<Point> = base[..j].to_vec();
            let v = vandermonde(&pts, 2).unwrap();
            for a in 0..j {
                for b in a + 1..j {
                    let mut sw = pts.clone();
                    sw.swap(a, b);
                    let vs = vandermonde(&sw, 2).unwrap();
                    assert!(
                        (vs + v).norm() < 1e-9 * (1.0 + v.norm()),
                        "j={j} swap ({a},{b})"
                    );
                }
            }
        }
        // univariate too
        for j in 2..=6usize {
            let pts: Vec<Point> = (0..j).map(|i| vec![c(0.4 * i as f64 - 0.7, 0.3)]).collect();
            let v = vandermonde(&pts, 1).unwrap();
            let mut sw = pts.clone();
            sw.swap(0, j - 1);
            let vs = vandermonde(&sw, 1).unwrap();
            assert!((vs.norm() - v.norm()).abs() < 1e-9 * (1.0 + v.norm()));
        }
    }

    #[test]
    fn log_det_matches_det_for_moderate_values() {
        let pts: Vec<Point> = (0..5)
            .map(|i| vec![c((i as f64 * 0.9).cos(), (i as f64 * 0.9).sin())])
            .collect();
        let v = vandermonde(&pts, 1).unwrap();
        let lv = log_abs_vandermonde(&pts, 1).unwrap();
        assert!((lv - v.norm().ln()).abs() < 1e-9);
    }
}
