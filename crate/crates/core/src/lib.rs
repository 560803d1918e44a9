//! Numerical pluripotential theory at desk scale.
//!
//! The crate has five subsystems:
//!
//! - [`poly`] — sparse multivariate complex polynomials with a degree-graded
//!   lexicographic monomial index, plus the normalized norm system on weighted
//!   pairs `(p, k)`.
//! - [`series`] — formal power series `Σ P_j(s) t^j` given by finite term
//!   rules, with class checks, normalization to Class (1,0), directional
//!   restriction and a windowed convergence classifier.
//! - [`region`] — descriptors, membership tests and samplers for the closed
//!   sets the algorithms run on (varieties, finite sets, balls, projective
//!   covers, hyperplanes).
//! - [`pluri`] — Vandermonde determinants, Fekete configurations, transfinite
//!   diameter, capacity, the Bernstein-constant diagnostic, extremal-function
//!   lower bounds and plurisubharmonic weight transforms.
//! - [`synth`] — constructors for divergent series whose convergence sets are
//!   prescribed pluripolar targets, with probe-grid verification.
//!
//! All operations are pure functions of their inputs and an explicit seed;
//! parallel evaluation is safe and deterministic.

pub mod error;
pub mod poly;
pub mod region;
pub mod rng;
pub mod series;
pub mod synth;

pub mod pluri;

pub use error::ConvError;
pub use num_complex::Complex64;

/// A point of `C^n`, one complex coordinate per variable.
pub type Point = Vec<Complex64>;

/// Evaluation floor standing in for `-inf` in reports and orderings.
pub const NEG_FLOOR: f64 = -1e12;

/// Euclidean norm `|x|` of a point.
pub fn point_norm(x: &[Complex64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Caps the global rayon thread pool, honoring `CONVLAB_THREADS` when set.
///
/// Safe to call more than once; only the first call takes effect.
pub fn configure_threads(explicit: Option<usize>) {
    let from_env = std::env::var("CONVLAB_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok());
    if let Some(n) = explicit.or(from_env) {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global();
    }
}
