//! Durand-Kerner root finding for univariate slices of varieties.

use num_complex::Complex64;

/// All roots of `sum_d coeffs[d] z^d` (low-to-high coefficients).
///
/// Returns an empty vector for constant or zero polynomials. Roots at the
/// origin from trailing zero coefficients are split off exactly.
pub fn univariate_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let zero = Complex64::new(0.0, 0.0);
    let mut c: Vec<Complex64> = coeffs.to_vec();
    while c.last().map(|z| z.norm() < 1e-300).unwrap_or(false) {
        c.pop();
    }
    if c.len() <= 1 {
        return Vec::new();
    }
    let mut zeros_at_origin = 0usize;
    while c.first().map(|z| z.norm() < 1e-300).unwrap_or(false) {
        c.remove(0);
        zeros_at_origin += 1;
    }
    let mut roots = vec![zero; zeros_at_origin];
    let deg = c.len() - 1;
    if deg == 0 {
        return roots;
    }
    let lead = c[deg];
    let monic: Vec<Complex64> = c.iter().map(|z| z / lead).collect();

    // Cauchy bound for the root radius.
    let radius = 1.0
        + monic[..deg]
            .iter()
            .map(|z| z.norm())
            .fold(0.0f64, f64::max);
    let seed = Complex64::new(0.4, 0.9);
    let mut w: Vec<Complex64> = (0..deg)
        .map(|i| seed.powu(i as u32 + 1) * radius / seed.norm().powi(i as i32 + 1) * 0.7)
        .collect();

    let eval = |z: Complex64| -> Complex64 {
        let mut acc = zero;
        for &cd in monic.iter().rev() {
            acc = acc * z + cd;
        }
        acc
    };

    for _ in 0..400 {
        let mut delta_max = 0.0f64;
        for i in 0..deg {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..deg {
                if j != i {
                    denom *= w[i] - w[j];
                }
            }
            if denom.norm() < 1e-300 {
                // Perturb coincident iterates.
                w[i] += Complex64::new(1e-6, 1e-6);
                continue;
            }
            let step = eval(w[i]) / denom;
            w[i] -= step;
            delta_max = delta_max.max(step.norm());
        }
        if delta_max < 1e-13 * radius.max(1.0) {
            break;
        }
    }
    roots.extend(w);
    roots
}
