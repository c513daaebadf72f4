//! The transform `F(α) = ∫_{S^k} ω^α dS` and its calculus.
//!
//! `F` is entire in `α`; with `α = ξ + iζ` it splits as `F = W + iI` with
//! `W = ∫ ω^ξ cos(ζ ln ω) dS` and `I = ∫ ω^ξ sin(ζ ln ω) dS`. All derivatives
//! are taken under the integral sign: each derivative in `α` inserts one
//! factor `ln ω`, and a derivative in `ζ` is `i` times a derivative in `ξ`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::quadrature::{integrate_zonal, QuadConfig, QuadResult};
use crate::ratio::{SphereSetup, StripHalfwidth};

/// Highest total derivative order supported by [`d_w`] and [`d_i`].
pub const MAX_DERIVATIVE_ORDER: u32 = 4;
/// Highest power of `ln ω` supported by [`log_moment`].
pub const MAX_LOG_MOMENT: u32 = 24;
/// Highest Taylor truncation order supported by [`taylor`].
pub const MAX_TAYLOR_ORDER: usize = 12;

/// Complex exponent `α = ξ + iζ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexExponent {
    pub xi: f64,
    pub zeta: f64,
}

impl ComplexExponent {
    pub fn new(xi: f64, zeta: f64) -> Result<Self> {
        if !xi.is_finite() || !zeta.is_finite() {
            return domain("exponent components must be finite");
        }
        Ok(Self { xi, zeta })
    }

    pub fn real(xi: f64) -> Self {
        Self { xi, zeta: 0.0 }
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.xi, self.zeta)
    }

    pub fn from_complex(z: Complex64) -> Self {
        Self { xi: z.re, zeta: z.im }
    }

    /// `k − α`.
    pub fn reflected(self, k: u32) -> Self {
        Self {
            xi: f64::from(k) - self.xi,
            zeta: -self.zeta,
        }
    }
}

/// `F(α)` split into `W = Re F` and `I = Im F`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransformValue {
    pub w: f64,
    pub i: f64,
    /// Shared quadrature record: both parts come from one complex integral.
    pub quad: QuadResult,
}

impl TransformValue {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.w, self.i)
    }

    pub fn abs_error(&self) -> f64 {
        self.quad.abs_error
    }
}

/// A real quantity obtained by quadrature, with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealEstimate {
    pub value: f64,
    pub abs_error: f64,
    pub evals: usize,
    pub converged: bool,
}

impl RealEstimate {
    fn from_quad(value: f64, quad: &QuadResult) -> Self {
        Self {
            value,
            abs_error: quad.abs_error,
            evals: quad.evals,
            converged: quad.converged,
        }
    }
}

/// `F(α)`.
pub fn evaluate(setup: &SphereSetup, alpha: ComplexExponent, config: &QuadConfig) -> Result<TransformValue> {
    let quad = alpha_moment(setup, alpha, 0, config)?;
    Ok(TransformValue {
        w: quad.re(),
        i: quad.im(),
        quad,
    })
}

/// `F^{(n)}(α) = ∫ ω^α (ln ω)^n dS`.
pub fn alpha_moment(
    setup: &SphereSetup,
    alpha: ComplexExponent,
    n: u32,
    config: &QuadConfig,
) -> Result<QuadResult> {
    let a = ComplexExponent::new(alpha.xi, alpha.zeta)?.to_complex();
    let power = n as i32;
    integrate_zonal(
        setup,
        alpha.zeta,
        |pt| (a * pt.ln_omega).exp() * pt.ln_omega.powi(power),
        config,
    )
}

fn mixed_partial(
    setup: &SphereSetup,
    alpha: ComplexExponent,
    order_xi: u32,
    order_zeta: u32,
    config: &QuadConfig,
) -> Result<(Complex64, QuadResult)> {
    let n = order_xi + order_zeta;
    if n > MAX_DERIVATIVE_ORDER {
        return domain(format!(
            "total derivative order {n} exceeds the supported {MAX_DERIVATIVE_ORDER}"
        ));
    }
    let quad = alpha_moment(setup, alpha, n, config)?;
    // ∂_ζ = i ∂_α on an analytic function
    let rotation = Complex64::new(0.0, 1.0).powu(order_zeta);
    Ok((rotation * quad.value, quad))
}

/// `∂^{m₁+m₂} W / ∂ξ^{m₁} ∂ζ^{m₂}` at `α`.
pub fn d_w(
    setup: &SphereSetup,
    alpha: ComplexExponent,
    order_xi: u32,
    order_zeta: u32,
    config: &QuadConfig,
) -> Result<RealEstimate> {
    let (v, quad) = mixed_partial(setup, alpha, order_xi, order_zeta, config)?;
    Ok(RealEstimate::from_quad(v.re, &quad))
}

/// `∂^{m₁+m₂} I / ∂ξ^{m₁} ∂ζ^{m₂}` at `α`.
pub fn d_i(
    setup: &SphereSetup,
    alpha: ComplexExponent,
    order_xi: u32,
    order_zeta: u32,
    config: &QuadConfig,
) -> Result<RealEstimate> {
    let (v, quad) = mixed_partial(setup, alpha, order_xi, order_zeta, config)?;
    Ok(RealEstimate::from_quad(v.im, &quad))
}

/// First-order partials of `W` and `I` from a single integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gradient {
    pub w_xi: f64,
    pub w_zeta: f64,
    pub i_xi: f64,
    pub i_zeta: f64,
    pub abs_error: f64,
}

pub fn gradient(setup: &SphereSetup, alpha: ComplexExponent, config: &QuadConfig) -> Result<Gradient> {
    let quad = alpha_moment(setup, alpha, 1, config)?;
    let d = quad.value;
    Ok(Gradient {
        w_xi: d.re,
        w_zeta: -d.im,
        i_xi: d.im,
        i_zeta: d.re,
        abs_error: quad.abs_error,
    })
}

/// Trigonometric weight of a log-moment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "b", rename_all = "snake_case")]
pub enum Trig {
    None,
    Cos(f64),
    Sin(f64),
}

/// `∫ ω^ξ (ln ω)^m · trig(b ln ω) dS`.
pub fn log_moment(
    setup: &SphereSetup,
    xi: f64,
    m: u32,
    trig: Trig,
    config: &QuadConfig,
) -> Result<RealEstimate> {
    if m > MAX_LOG_MOMENT {
        return domain(format!("log-moment order {m} exceeds the supported {MAX_LOG_MOMENT}"));
    }
    if !xi.is_finite() {
        return domain("xi must be finite");
    }
    let power = m as i32;
    let (b, weight): (f64, fn(f64) -> f64) = match trig {
        Trig::None => (0.0, |_| 1.0),
        Trig::Cos(b) => (b, f64::cos),
        Trig::Sin(b) => (b, f64::sin),
    };
    if !b.is_finite() {
        return domain("trigonometric frequency must be finite");
    }
    let quad = integrate_zonal(
        setup,
        b,
        |pt| {
            let l = pt.ln_omega;
            Complex64::new((xi * l).exp() * l.powi(power) * weight(b * l), 0.0)
        },
        config,
    )?;
    Ok(RealEstimate::from_quad(quad.re(), &quad))
}

/// Even Taylor series of `F` about `k/2`; odd coefficients vanish.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaylorSeries {
    pub center: f64,
    /// `c_m = F^{(2m)}(k/2)/(2m)!` for `m = 0..=order`.
    pub coeffs: Vec<f64>,
    pub coeff_errors: Vec<f64>,
    pub order: usize,
}

impl TaylorSeries {
    /// `Σ c_m (α − k/2)^{2m}`, evaluated by Horner's rule in `(α − k/2)²`.
    pub fn eval(&self, alpha: Complex64) -> Complex64 {
        let z = alpha - self.center;
        let z2 = z * z;
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z2 + c)
    }

    /// Magnitude of the first omitted term at distance `rho` from the centre,
    /// bounded through the last stored coefficient ratio.
    pub fn tail_estimate(&self, rho: f64) -> f64 {
        let n = self.coeffs.len();
        if n < 2 {
            return f64::NAN;
        }
        let ratio = self.coeffs[n - 1] / self.coeffs[n - 2];
        self.coeffs[n - 1] * ratio * rho.powi(2 * n as i32)
    }
}

/// Taylor coefficients of `F` at `k/2` up to `(α − k/2)^{2M}`.
pub fn taylor(setup: &SphereSetup, order: usize, config: &QuadConfig) -> Result<TaylorSeries> {
    if order > MAX_TAYLOR_ORDER {
        return domain(format!("Taylor order {order} exceeds the supported {MAX_TAYLOR_ORDER}"));
    }
    let center = 0.5 * f64::from(setup.k());
    let mut coeffs = Vec::with_capacity(order + 1);
    let mut coeff_errors = Vec::with_capacity(order + 1);
    let mut factorial = 1.0;
    for m in 0..=order {
        if m > 0 {
            factorial *= (2 * m - 1) as f64 * (2 * m) as f64;
        }
        let moment = log_moment(setup, center, 2 * m as u32, Trig::None, config)?;
        coeffs.push(moment.value / factorial);
        coeff_errors.push(moment.abs_error / factorial);
    }
    Ok(TaylorSeries {
        center,
        coeffs,
        coeff_errors,
        order,
    })
}

/// Half-width `p` of the strip on which `cos(ζ ln ω) ≥ 0` for all `y`.
pub fn strip_halfwidth(setup: &SphereSetup) -> StripHalfwidth {
    setup.strip_halfwidth()
}
