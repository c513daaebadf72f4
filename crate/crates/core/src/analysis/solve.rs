use serde::{Deserialize, Serialize};

use crate::error::{domain, Result, SpheraError};
use crate::quadrature::QuadConfig;
use crate::ratio::SphereSetup;
use crate::transform::{alpha_moment, evaluate, ComplexExponent};

/// Real solutions of `F(λ) = ν`, symmetric about `k/2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealRoots {
    /// `[k − λ, λ]` in increasing order, or the single double root `[k/2]`.
    pub roots: Vec<f64>,
    /// The root at or above `k/2`.
    pub lambda: f64,
    /// `F(λ) − ν`.
    pub residual: f64,
    pub iterations: usize,
    /// `F(k/2)`, the minimum of `F` on the real line.
    pub minimum: f64,
}

const MAX_ITERATIONS: usize = 200;
const MAX_DOUBLINGS: usize = 60;

fn real_value(setup: &SphereSetup, lambda: f64, config: &QuadConfig) -> Result<f64> {
    Ok(evaluate(setup, ComplexExponent::real(lambda), config)?
        .quad
        .require_converged()?
        .re())
}

/// Solves `F(λ) = ν` on the real line.
///
/// `F` is strictly convex and symmetric about `k/2`, so the equation has the
/// pair `{λ, k − λ}` above the minimum, the double root `{k/2}` at it, and no
/// solution below. The root `λ ≥ k/2` is bracketed by doubling, then refined by
/// Newton steps on `F' = ∫ ω^λ ln ω dS` safeguarded by bisection.
pub fn solve_real(setup: &SphereSetup, nu: f64, config: &QuadConfig) -> Result<RealRoots> {
    if !nu.is_finite() {
        return domain("target value must be finite");
    }
    let inner = config.tightened(1e-2);
    let half = 0.5 * f64::from(setup.k());
    let min_eval = evaluate(setup, ComplexExponent::real(half), &inner)?
        .quad
        .require_converged()?;
    let minimum = min_eval.re();
    let tol = 1e-12 * minimum.abs().max(nu.abs()) + 4.0 * min_eval.abs_error;
    let double = |residual: f64| RealRoots {
        roots: vec![half],
        lambda: half,
        residual,
        iterations: 0,
        minimum,
    };
    if nu < minimum - tol {
        return Err(SpheraError::NoSolution { nu, minimum });
    }
    if nu <= minimum + tol {
        return Ok(double(minimum - nu));
    }

    // bracket [lo, hi] with F(lo) < ν ≤ F(hi)
    let mut lo = half;
    let mut width = 1.0;
    let mut hi = half + width;
    let mut f_hi = real_value(setup, hi, &inner)?;
    let mut doublings = 0;
    while f_hi < nu {
        doublings += 1;
        if doublings > MAX_DOUBLINGS || !f_hi.is_finite() {
            return domain(format!("could not bracket the root of F(λ) = {nu}"));
        }
        lo = hi;
        width *= 2.0;
        hi = half + width;
        f_hi = real_value(setup, hi, &inner)?;
    }

    let mut lambda = hi;
    let mut residual = f_hi - nu;
    let mut iterations = 0;
    let scale = nu.abs().max(minimum.abs());
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let slope = alpha_moment(setup, ComplexExponent::real(lambda), 1, &inner)?.re();
        let newton = lambda - residual / slope;
        let candidate = if slope > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        let f = real_value(setup, candidate, &inner)?;
        let step = (candidate - lambda).abs();
        lambda = candidate;
        residual = f - nu;
        if residual > 0.0 {
            hi = lambda;
        } else {
            lo = lambda;
        }
        let converged_value = residual.abs() <= 1e-14 * scale;
        let converged_step = step <= 1e-14 * lambda.abs().max(1.0);
        if converged_value || converged_step || hi - lo <= 4.0 * f64::EPSILON * hi.abs() {
            break;
        }
    }
    let k = f64::from(setup.k());
    Ok(RealRoots {
        roots: vec![k - lambda, lambda],
        lambda,
        residual,
        iterations,
        minimum,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn setup() -> SphereSetup {
        SphereSetup::new(2, 1.0, 0.5).unwrap()
    }

    #[test]
    fn minimum_gives_double_root() {
        let s = setup();
        let cfg = QuadConfig::default();
        let nu = evaluate(&s, ComplexExponent::real(1.0), &cfg).unwrap().w;
        let roots = solve_real(&s, nu, &cfg).unwrap();
        assert_eq!(roots.roots, vec![1.0]);
        assert_relative_eq!(roots.minimum, 3.0 * std::f64::consts::PI * 3f64.ln(), max_relative = 1e-12);
    }

    #[test]
    fn area_gives_zero_and_k() {
        let s = SphereSetup::new(3, 2.0, 0.7).unwrap();
        let roots = solve_real(&s, s.area(), &QuadConfig::default()).unwrap();
        assert!(roots.roots[0].abs() < 1e-9, "{roots:?}");
        assert!((roots.roots[1] - 3.0).abs() < 1e-9);
        assert_eq!(roots.roots[0] + roots.roots[1], 3.0);
    }

    #[test]
    fn round_trip() {
        let s = setup();
        let cfg = QuadConfig::default();
        for lambda0 in [0.3, 1.7, 3.0, 6.5, -4.0] {
            let nu = evaluate(&s, ComplexExponent::real(lambda0), &cfg).unwrap().w;
            let roots = solve_real(&s, nu, &cfg).unwrap();
            let hit = roots.roots.iter().map(|r| (r - lambda0).abs()).fold(f64::INFINITY, f64::min);
            assert!(hit <= 1e-9, "λ0={lambda0}: {roots:?}");
            let back = evaluate(&s, ComplexExponent::real(roots.lambda), &cfg).unwrap().w;
            assert!((back - nu).abs() <= 1e-9 * nu.abs());
        }
    }

    #[test]
    fn below_minimum_is_rejected() {
        let s = setup();
        match solve_real(&s, 5.0, &QuadConfig::default()) {
            Err(SpheraError::NoSolution { nu, minimum }) => {
                assert_eq!(nu, 5.0);
                assert!(minimum > 10.0);
            }
            other => panic!("expected NoSolution, got {other:?}"),
        }
        assert!(solve_real(&s, f64::NAN, &QuadConfig::default()).is_err());
    }
}
