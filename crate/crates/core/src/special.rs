//! Special functions and scalar root finding.
//!
//! Only the principal branch of the Lambert W function is provided. The
//! lower branch W₋₁ yields a success probability that increases with the
//! arrival rate, so it never describes a physical operating point here.

use std::f64::consts::{E, PI};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MathError {
    #[error("argument {arg} outside the domain of {function}")]
    Domain { function: &'static str, arg: f64 },
    #[error("f(lo) and f(hi) have the same sign on [{lo}, {hi}]")]
    Bracket { lo: f64, hi: f64 },
    #[error("{what} did not converge within {iterations} iterations")]
    Convergence {
        what: &'static str,
        iterations: usize,
    },
    #[error("invalid numeric tolerances: {0}")]
    Tolerances(&'static str),
}

/// Stopping rules shared by the iterative solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericTolerances {
    pub residual_tol: f64,
    pub max_iterations: usize,
}

impl Default for NumericTolerances {
    fn default() -> Self {
        NumericTolerances {
            residual_tol: 1e-12,
            max_iterations: 64,
        }
    }
}

impl NumericTolerances {
    pub fn new(residual_tol: f64, max_iterations: usize) -> Result<Self, MathError> {
        if !(residual_tol > 0.0 && residual_tol.is_finite()) {
            return Err(MathError::Tolerances("residual_tol must be positive"));
        }
        if max_iterations == 0 {
            return Err(MathError::Tolerances("max_iterations must be at least 1"));
        }
        Ok(NumericTolerances {
            residual_tol,
            max_iterations,
        })
    }
}

/// z-coordinate of the branch point, −1/e.
pub const BRANCH_POINT: f64 = -1.0 / E;

/// Principal branch W₀ of the Lambert W function with default tolerances.
pub fn lambert_w0(z: f64) -> Result<f64, MathError> {
    lambert_w0_with(z, NumericTolerances::default())
}

/// Principal branch W₀: the w ≥ −1 solving w·eʷ = z, for z ≥ −1/e.
///
/// The initial guess comes from the branch-point series near −1/e, a
/// logarithmic approximation in the middle range and the asymptotic
/// expansion ln z − ln ln z for large z. Halley steps then refine it
/// until the step is at rounding level; the result is accepted only if
/// |w·eʷ − z| ≤ `residual_tol`·max(1, |z|).
pub fn lambert_w0_with(z: f64, tol: NumericTolerances) -> Result<f64, MathError> {
    if z.is_nan() {
        return Err(MathError::Domain {
            function: "lambert_w0",
            arg: z,
        });
    }
    if z <= BRANCH_POINT {
        // Accept a few ulps below −1/e so that a caller computing −e⁻¹
        // its own way still lands on the branch point.
        if BRANCH_POINT - z <= 4.0 * f64::EPSILON * -BRANCH_POINT {
            return Ok(-1.0);
        }
        return Err(MathError::Domain {
            function: "lambert_w0",
            arg: z,
        });
    }
    if z == 0.0 {
        return Ok(0.0);
    }
    if z == f64::INFINITY {
        return Ok(f64::INFINITY);
    }

    let mut w = initial_guess(z);
    for _ in 0..tol.max_iterations {
        let ew = w.exp();
        let f = w * ew - z;
        if f == 0.0 {
            break;
        }
        let wp1 = w + 1.0;
        if wp1 == 0.0 {
            break;
        }
        let step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
        if !step.is_finite() {
            break;
        }
        w -= step;
        if step.abs() <= 4.0 * f64::EPSILON * (1.0 + w.abs()) {
            break;
        }
    }

    let residual = (w * w.exp() - z).abs();
    if residual <= tol.residual_tol * z.abs().max(1.0) && w >= -1.0 {
        Ok(w)
    } else {
        Err(MathError::Convergence {
            what: "lambert_w0",
            iterations: tol.max_iterations,
        })
    }
}

fn initial_guess(z: f64) -> f64 {
    if z < -0.32 {
        // Series in p = √(2(ez+1)) about the branch point.
        let p = (2.0 * E.mul_add(z, 1.0)).max(0.0).sqrt();
        -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0 + p * (-43.0 / 540.0))))
    } else if z < 3.0 {
        let l = z.ln_1p();
        l * (1.0 - (1.0 + l).ln() / (2.0 + l))
    } else {
        let l1 = z.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    }
}

/// Γ(1+δ)Γ(1−δ) = πδ / sin(πδ) for δ ∈ (0,1).
pub fn gamma_reflection_product(delta: f64) -> Result<f64, MathError> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(MathError::Domain {
            function: "gamma_reflection_product",
            arg: delta,
        });
    }
    let x = PI * delta;
    Ok(x / x.sin())
}

/// Finds a root of a continuous function bracketed by `[lo, hi]`.
///
/// Uses false position with the Illinois modification, falling back to
/// bisection whenever the interpolated point leaves the open bracket. The
/// sequence of evaluations depends only on the inputs. Returns as soon as
/// |f(t)| ≤ `residual_tol` or the bracket is narrower than `residual_tol`.
pub fn solve_bracketed_root<F>(
    mut f: F,
    lo: f64,
    hi: f64,
    tol: NumericTolerances,
) -> Result<f64, MathError>
where
    F: FnMut(f64) -> f64,
{
    let (mut lo, mut hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut flo = f(lo);
    let mut fhi = f(hi);
    if flo.is_nan() || fhi.is_nan() {
        return Err(MathError::Bracket { lo, hi });
    }
    if flo.abs() <= tol.residual_tol {
        return Ok(lo);
    }
    if fhi.abs() <= tol.residual_tol {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(MathError::Bracket { lo, hi });
    }

    #[derive(PartialEq)]
    enum Side {
        None,
        Lo,
        Hi,
    }
    let mut last = Side::None;

    for _ in 0..tol.max_iterations {
        if hi - lo <= tol.residual_tol {
            return Ok(0.5 * (lo + hi));
        }
        let mut t = (lo * fhi - hi * flo) / (fhi - flo);
        if !(t > lo && t < hi) {
            t = 0.5 * (lo + hi);
        }
        let ft = f(t);
        if ft.is_nan() {
            return Err(MathError::Convergence {
                what: "solve_bracketed_root",
                iterations: tol.max_iterations,
            });
        }
        if ft.abs() <= tol.residual_tol {
            return Ok(t);
        }
        if ft.signum() == fhi.signum() {
            hi = t;
            fhi = ft;
            if last == Side::Hi {
                flo *= 0.5;
            }
            last = Side::Hi;
        } else {
            lo = t;
            flo = ft;
            if last == Side::Lo {
                fhi *= 0.5;
            }
            last = Side::Lo;
        }
    }
    if hi - lo <= tol.residual_tol {
        return Ok(0.5 * (lo + hi));
    }
    Err(MathError::Convergence {
        what: "solve_bracketed_root",
        iterations: tol.max_iterations,
    })
}
