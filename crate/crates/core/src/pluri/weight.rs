//! Plurisubharmonic weights presented in a closed grammar.
//!
//! Everything evaluates in log scale: an H-class function h is stored as
//! ln h, an L-class function directly. The grammar (logs of polynomial
//! moduli, maxima, nonnegative sums, log-sum-exp, and the gluing pieces of
//! the L-completion) guarantees plurisubharmonicity by construction and
//! makes certified ball suprema computable from coefficient bounds.

use crate::error::{ConvError, Result};
use crate::point_norm;
use crate::poly::Polynomial;
use crate::Point;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum WeightExpr {
    Const(f64),
    /// ln |x|.
    LogRadius,
    /// ln (1 + |x|^2)^{1/2}.
    LogAffineNorm,
    /// scale * ln |p(x)| with scale > 0.
    LogAbsPoly { poly: Polynomial, scale: f64 },
    Max(Vec<WeightExpr>),
    /// sum w_i e_i with w_i >= 0.
    WeightedSum(Vec<(f64, WeightExpr)>),
    /// ln sum exp(e_i): the log of a sum of G-class functions.
    LogSumExp(Vec<WeightExpr>),
    /// One gluing piece of the L-completion:
    /// max(2^{-j} (u/M_j - 1), 2^{-j} ln|x| - 1) inside |x| < exp(2^j),
    /// and the log branch outside.
    SaddulaevPiece {
        inner: Box<WeightExpr>,
        m_j: f64,
        j: u32,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    /// Logarithmic growth: u <= ln(1+|x|) + C.
    L,
    /// Stored as ln h for absolutely 1-homogeneous h.
    H,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeightFunction {
    pub n: usize,
    pub family: Family,
    pub expr: WeightExpr,
}

fn logsumexp(vals: &[f64]) -> f64 {
    let peak = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if peak == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    peak + vals.iter().map(|v| (v - peak).exp()).sum::<f64>().ln()
}

impl WeightExpr {
    pub fn evaluate(&self, x: &[Complex64]) -> Result<f64> {
        match self {
            WeightExpr::Const(c) => Ok(*c),
            WeightExpr::LogRadius => {
                let r = point_norm(x);
                Ok(if r == 0.0 { f64::NEG_INFINITY } else { r.ln() })
            }
            WeightExpr::LogAffineNorm => Ok(0.5 * (1.0 + point_norm(x).powi(2)).ln()),
            WeightExpr::LogAbsPoly { poly, scale } => {
                let v = poly.evaluate(x)?.norm();
                Ok(if v == 0.0 {
                    f64::NEG_INFINITY
                } else {
                    scale * v.ln()
                })
            }
            WeightExpr::Max(children) => {
                let mut best = f64::NEG_INFINITY;
                for c in children {
                    best = best.max(c.evaluate(x)?);
                }
                Ok(best)
            }
            WeightExpr::WeightedSum(children) => {
                let mut acc = 0.0;
                for (w, c) in children {
                    if *w == 0.0 {
                        continue;
                    }
                    let v = c.evaluate(x)?;
                    if v == f64::NEG_INFINITY {
                        return Ok(f64::NEG_INFINITY);
                    }
                    acc += w * v;
                }
                Ok(acc)
            }
            WeightExpr::LogSumExp(children) => {
                let vals = children
                    .iter()
                    .map(|c| c.evaluate(x))
                    .collect::<Result<Vec<f64>>>()?;
                Ok(logsumexp(&vals))
            }
            WeightExpr::SaddulaevPiece { inner, m_j, j } => {
                let scale = 2f64.powi(-(*j as i32));
                let log_x = {
                    let r = point_norm(x);
                    if r == 0.0 {
                        f64::NEG_INFINITY
                    } else {
                        r.ln()
                    }
                };
                let log_branch = if log_x == f64::NEG_INFINITY {
                    f64::NEG_INFINITY
                } else {
                    scale * log_x - 1.0
                };
                // |x| < exp(2^j) compared in logs.
                if log_x < 2f64.powi(*j as i32) {
                    let u = inner.evaluate(x)?;
                    let u_branch = if u == f64::NEG_INFINITY {
                        f64::NEG_INFINITY
                    } else {
                        scale * (u / m_j - 1.0)
                    };
                    Ok(u_branch.max(log_branch))
                } else {
                    Ok(log_branch)
                }
            }
        }
    }

    /// Certified upper bound on the ball |x| <= exp(log_r), from
    /// coefficient sums; always finite for finite log_r.
    pub fn sup_bound_logr(&self, log_r: f64) -> Result<f64> {
        match self {
            WeightExpr::Const(c) => Ok(*c),
            WeightExpr::LogRadius => Ok(log_r),
            WeightExpr::LogAffineNorm => Ok(0.5 * logsumexp(&[0.0, 2.0 * log_r])),
            WeightExpr::LogAbsPoly { poly, scale } => {
                if poly.is_zero() {
                    return Ok(f64::NEG_INFINITY);
                }
                let terms: Vec<f64> = poly
                    .terms()
                    .map(|(alpha, c)| {
                        c.norm().ln() + alpha.iter().sum::<u32>() as f64 * log_r.max(0.0)
                    })
                    .collect();
                Ok(scale * logsumexp(&terms))
            }
            WeightExpr::Max(children) => {
                let mut best = f64::NEG_INFINITY;
                for c in children {
                    best = best.max(c.sup_bound_logr(log_r)?);
                }
                Ok(best)
            }
            WeightExpr::WeightedSum(children) => {
                let mut acc = 0.0;
                for (w, c) in children {
                    if *w == 0.0 {
                        continue;
                    }
                    if *w < 0.0 {
                        return Err(ConvError::GrammarUncertifiable(
                            "negative weight in sum".into(),
                        ));
                    }
                    let b = c.sup_bound_logr(log_r)?;
                    if b == f64::NEG_INFINITY {
                        return Ok(f64::NEG_INFINITY);
                    }
                    acc += w * b;
                }
                Ok(acc)
            }
            WeightExpr::LogSumExp(children) => {
                let vals = children
                    .iter()
                    .map(|c| c.sup_bound_logr(log_r))
                    .collect::<Result<Vec<f64>>>()?;
                Ok(logsumexp(&vals))
            }
            WeightExpr::SaddulaevPiece { inner, m_j, j } => {
                let scale = 2f64.powi(-(*j as i32));
                let ball_log = log_r.min(2f64.powi(*j as i32));
                let u_bound = inner.sup_bound_logr(ball_log)?;
                let b1 = if u_bound == f64::NEG_INFINITY {
                    f64::NEG_INFINITY
                } else {
                    scale * (u_bound / m_j - 1.0)
                };
                Ok(b1.max(scale * log_r - 1.0))
            }
        }
    }

    /// Structural 1-homogeneity check for the H grammar (in log scale:
    /// e(lambda x) = e(x) + ln|lambda|).
    pub fn is_h_grammar(&self) -> bool {
        match self {
            WeightExpr::LogRadius => true,
            WeightExpr::LogAbsPoly { poly, scale } => {
                let d = poly.degree();
                d >= 1 && poly.is_homogeneous(d as u32) && (scale * d as f64 - 1.0).abs() < 1e-12
            }
            WeightExpr::Max(children) | WeightExpr::LogSumExp(children) => {
                children.iter().all(|c| c.is_h_grammar())
            }
            WeightExpr::WeightedSum(children) => {
                let total: f64 = children.iter().map(|(w, _)| *w).sum();
                (total - 1.0).abs() < 1e-12
                    && children.iter().all(|(w, c)| *w >= 0.0 && c.is_h_grammar())
            }
            _ => false,
        }
    }
}

impl WeightFunction {
    pub fn log_abs_poly(poly: Polynomial, scale: f64, family: Family) -> Result<Self> {
        if scale <= 0.0 {
            return Err(ConvError::InvalidInput("scale must be positive".into()));
        }
        let n = poly.dimension();
        let expr = WeightExpr::LogAbsPoly { poly, scale };
        if family == Family::H && !expr.is_h_grammar() {
            return Err(ConvError::InvalidInput(
                "not 1-homogeneous: H requires a homogeneous polynomial with scale 1/deg".into(),
            ));
        }
        Ok(WeightFunction { n, family, expr })
    }

    pub fn evaluate(&self, x: &[Complex64]) -> Result<f64> {
        if x.len() != self.n {
            return Err(ConvError::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        self.expr.evaluate(x)
    }

    /// Evaluation clamped at the reporting floor.
    pub fn evaluate_floored(&self, x: &[Complex64]) -> Result<f64> {
        Ok(self.evaluate(x)?.max(crate::NEG_FLOOR))
    }
}

/// The correspondence `f(x_0, x) -> log f(1, x)` from H of n+1 variables
/// to L of n variables; the zero set of h off {x_0 = 0} maps to the
/// minus-infinity set of the output.
pub fn h_to_l(h: &WeightFunction) -> Result<WeightFunction> {
    if h.family != Family::H {
        return Err(ConvError::InvalidInput("h_to_l needs an H-family weight".into()));
    }
    if h.n < 2 {
        return Err(ConvError::InvalidInput(
            "h_to_l needs at least 2 variables (x_0 and x)".into(),
        ));
    }
    if !h.expr.is_h_grammar() {
        return Err(ConvError::GrammarUncertifiable(
            "expression is not in the H grammar".into(),
        ));
    }
    let n_out = h.n - 1;
    let expr = substitute_first_one(&h.expr, h.n)?;
    Ok(WeightFunction {
        n: n_out,
        family: Family::L,
        expr,
    })
}

fn substitute_first_one(expr: &WeightExpr, n: usize) -> Result<WeightExpr> {
    let n_out = n - 1;
    Ok(match expr {
        WeightExpr::LogRadius => WeightExpr::LogAffineNorm,
        WeightExpr::LogAbsPoly { poly, scale } => {
            // x_0 -> 1, x_i -> new variable i-1.
            let mut subs = Vec::with_capacity(n);
            subs.push(Polynomial::one(n_out));
            for i in 0..n_out {
                subs.push(Polynomial::variable(n_out, i));
            }
            WeightExpr::LogAbsPoly {
                poly: poly.substitute(&subs),
                scale: *scale,
            }
        }
        WeightExpr::Max(children) => WeightExpr::Max(
            children
                .iter()
                .map(|c| substitute_first_one(c, n))
                .collect::<Result<_>>()?,
        ),
        WeightExpr::LogSumExp(children) => WeightExpr::LogSumExp(
            children
                .iter()
                .map(|c| substitute_first_one(c, n))
                .collect::<Result<_>>()?,
        ),
        WeightExpr::WeightedSum(children) => WeightExpr::WeightedSum(
            children
                .iter()
                .map(|(w, c)| Ok((*w, substitute_first_one(c, n)?)))
                .collect::<Result<_>>()?,
        ),
        _ => {
            return Err(ConvError::GrammarUncertifiable(
                "node outside the H grammar".into(),
            ))
        }
    })
}

/// Output of the L-completion construction.
#[derive(Debug, Clone)]
pub struct SaddulaevReport {
    pub m_values: Vec<f64>,
    /// Per E-sample: value of the partial sum at j_max, and whether the
    /// partial sums trend to -infinity (true when u = -inf there).
    pub e_values: Vec<f64>,
    pub e_diverges: Vec<bool>,
    /// Per off-sample: finite value of the partial sum.
    pub off_values: Vec<f64>,
    /// Per sample (E then off): first index from which the partial sums
    /// are nonincreasing; None if not reached by j_max.
    pub monotone_from: Vec<Option<u32>>,
    /// Magnitude bound for the discarded tail at the off samples.
    pub tail_bound: f64,
}

/// Builds `v = sum_j v_j` with
/// `v_j = max(2^{-j}(u/M_j - 1), 2^{-j} ln|x| - 1)` glued at |x| = exp(2^j),
/// where `M_j >= sup{u : |x| <= exp(2^j)}` is certified from the grammar.
///
/// v is plurisubharmonic with v <= log+ |x|, is -infinity exactly where u
/// is (in the limit), and the partial sums are eventually nonincreasing.
pub fn saddulaev_transform(
    u: &WeightFunction,
    e_samples: &[Point],
    off_samples: &[Point],
    j_max: u32,
) -> Result<(WeightFunction, SaddulaevReport)> {
    if j_max == 0 {
        return Err(ConvError::InvalidInput("j_max must be >= 1".into()));
    }
    let mut m_values = Vec::with_capacity(j_max as usize);
    let mut prev: f64 = 1.0;
    for j in 1..=j_max {
        let raw = u.expr.sup_bound_logr(2f64.powi(j as i32))?;
        if !raw.is_finite() && raw != f64::NEG_INFINITY {
            return Err(ConvError::GrammarUncertifiable(format!(
                "sup bound at j = {j} is not finite"
            )));
        }
        let m_j = raw.max(prev + 0.1).max(1.0);
        m_values.push(m_j);
        prev = m_j;
    }
    let pieces: Vec<(f64, WeightExpr)> = (1..=j_max)
        .map(|j| {
            (
                1.0,
                WeightExpr::SaddulaevPiece {
                    inner: Box::new(u.expr.clone()),
                    m_j: m_values[j as usize - 1],
                    j,
                },
            )
        })
        .collect();
    let v = WeightFunction {
        n: u.n,
        family: Family::L,
        expr: WeightExpr::WeightedSum(pieces),
    };

    let partials = |x: &Point| -> Result<Vec<f64>> {
        let mut sums = Vec::with_capacity(j_max as usize);
        let mut acc = 0.0f64;
        for j in 1..=j_max {
            let piece = WeightExpr::SaddulaevPiece {
                inner: Box::new(u.expr.clone()),
                m_j: m_values[j as usize - 1],
                j,
            };
            let vj = piece.evaluate(x)?;
            acc = if vj == f64::NEG_INFINITY || acc == f64::NEG_INFINITY {
                f64::NEG_INFINITY
            } else {
                acc + vj
            };
            sums.push(acc);
        }
        Ok(sums)
    };
    let monotone_from_of = |sums: &[f64]| -> Option<u32> {
        // First j such that the partial sums never increase afterwards.
        let mut from = sums.len();
        for i in (1..sums.len()).rev() {
            if sums[i] <= sums[i - 1] + 1e-12 {
                from = i;
            } else {
                break;
            }
        }
        if from < sums.len() {
            Some(from as u32)
        } else if sums.len() == 1 {
            Some(1)
        } else {
            None
        }
    };

    let mut e_values = Vec::new();
    let mut e_diverges = Vec::new();
    let mut monotone_from = Vec::new();
    for x in e_samples {
        let sums = partials(x)?;
        let last = *sums.last().unwrap();
        e_values.push(last.max(crate::NEG_FLOOR));
        // u = -inf on the target set makes every u-branch -inf, so the
        // partial sums decrease by about 1 per index once the log branch
        // dominates.
        let diverges = last == f64::NEG_INFINITY
            || u.evaluate(x)? == f64::NEG_INFINITY;
        e_diverges.push(diverges);
        monotone_from.push(monotone_from_of(&sums));
    }
    let mut off_values = Vec::new();
    let mut tail_bound = 0.0f64;
    for x in off_samples {
        let sums = partials(x)?;
        off_values.push(*sums.last().unwrap());
        monotone_from.push(monotone_from_of(&sums));
        let u_x = u.evaluate(x)?;
        if u_x.is_finite() {
            let t = 2f64.powi(-(j_max as i32)) * (u_x.abs() / m_values[0] + 2.0);
            tail_bound = tail_bound.max(t);
        }
    }
    Ok((
        v,
        SaddulaevReport {
            m_values,
            e_values,
            e_diverges,
            off_values,
            monotone_from,
            tail_bound,
        },
    ))
}
