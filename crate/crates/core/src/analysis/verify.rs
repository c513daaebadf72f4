use std::f64::consts::PI;

use num_complex::Complex64;

use super::report::{Component, Identity, ReportInput, VerificationReport};
use crate::error::{domain, Result};
use crate::quadrature::{integrate_distance_power, integrate_interval, QuadConfig};
use crate::ratio::SphereSetup;
use crate::transform::{evaluate, log_moment, ComplexExponent, Trig};

/// `F(α)` against `F(k − α)`.
pub fn verify_reflection(
    setup: &SphereSetup,
    alpha: ComplexExponent,
    config: &QuadConfig,
) -> Result<VerificationReport> {
    let lhs = evaluate(setup, alpha, config)?;
    let rhs = evaluate(setup, alpha.reflected(setup.k()), config)?;
    Ok(VerificationReport::build(ReportInput {
        identity: Identity::Reflection,
        parameters: &[
            ("k", f64::from(setup.k())),
            ("R", setup.radius()),
            ("r", setup.r()),
            ("xi", alpha.xi),
            ("zeta", alpha.zeta),
        ],
        lhs: lhs.value(),
        rhs: rhs.value(),
        scale: lhs.value().norm(),
        quad_error: lhs.abs_error() + rhs.abs_error(),
        evals: lhs.quad.evals + rhs.quad.evals,
        converged: lhs.quad.converged && rhs.quad.converged,
    }))
}

/// The three vanishing families at `ξ = k/2`:
/// `∫ ω^{k/2} sin(b ln ω)`, `∫ ω^{k/2} (ln ω)^{2m+1} cos(b ln ω)` and
/// `∫ ω^{k/2} (ln ω)^{2m} sin(b ln ω)`.
///
/// The report's left side carries the largest family in absolute value and
/// the tolerance is scaled by `F(k/2)`.
pub fn verify_imag_vanishing(
    setup: &SphereSetup,
    b: f64,
    m: u32,
    config: &QuadConfig,
) -> Result<VerificationReport> {
    let half = 0.5 * f64::from(setup.k());
    let scale = evaluate(setup, ComplexExponent::real(half), config)?;
    let families = [
        ("sin", log_moment(setup, half, 0, Trig::Sin(b), config)?),
        ("odd_cos", log_moment(setup, half, 2 * m + 1, Trig::Cos(b), config)?),
        ("even_sin", log_moment(setup, half, 2 * m, Trig::Sin(b), config)?),
    ];
    let worst = families
        .iter()
        .map(|(_, e)| e.value)
        .fold(0.0f64, |acc, v| if v.abs() > acc.abs() { v } else { acc });
    let quad_error = families.iter().map(|(_, e)| e.abs_error).sum::<f64>();
    let mut report = VerificationReport::build(ReportInput {
        identity: Identity::ImagVanishing,
        parameters: &[
            ("k", f64::from(setup.k())),
            ("R", setup.radius()),
            ("r", setup.r()),
            ("b", b),
            ("m", f64::from(m)),
        ],
        lhs: Complex64::new(worst, 0.0),
        rhs: Complex64::new(0.0, 0.0),
        scale: scale.w,
        quad_error,
        evals: families.iter().map(|(_, e)| e.evals).sum::<usize>() + scale.quad.evals,
        converged: families.iter().all(|(_, e)| e.converged) && scale.quad.converged,
    });
    report.components = families
        .iter()
        .map(|(label, e)| Component {
            label: (*label).to_string(),
            value: e.value,
            abs_error: e.abs_error,
        })
        .collect();
    Ok(report)
}

/// `∫ dS/|x−y|^α` against `|R² − r²|^{(β−α)/2} ∫ dS/|x−y|^β` with `β = 2k − α`.
pub fn verify_distance_identity(
    setup: &SphereSetup,
    alpha: ComplexExponent,
    config: &QuadConfig,
) -> Result<VerificationReport> {
    let a = alpha.to_complex();
    let beta = Complex64::new(2.0 * f64::from(setup.k()), 0.0) - a;
    let lhs = integrate_distance_power(setup, a, config)?;
    let rhs_int = integrate_distance_power(setup, beta, config)?;
    let big_r = setup.radius();
    let r = setup.r();
    let gap = ((big_r - r) * (big_r + r)).abs();
    let factor = (0.5 * (beta - a) * gap.ln()).exp();
    let rhs = factor * rhs_int.value;
    Ok(VerificationReport::build(ReportInput {
        identity: Identity::DistancePower,
        parameters: &[
            ("k", f64::from(setup.k())),
            ("R", big_r),
            ("r", r),
            ("xi", alpha.xi),
            ("zeta", alpha.zeta),
        ],
        lhs: lhs.value,
        rhs,
        scale: lhs.value.norm(),
        quad_error: lhs.abs_error + factor.norm() * rhs_int.abs_error,
        evals: lhs.evals + rhs_int.evals,
        converged: lhs.converged && rhs_int.converged,
    }))
}

/// `∫_0^{2π} (a − b sin θ)^{−p} dθ` against
/// `(a² − b²)^{1/2 − p} ∫_0^{2π} (a − b sin θ)^{p − 1} dθ`, both by direct
/// periodic quadrature.
pub fn verify_k1_trig(p: Complex64, a: f64, b: f64, config: &QuadConfig) -> Result<VerificationReport> {
    if !(a > b && b > 0.0) || !a.is_finite() {
        return domain(format!("need a > b > 0, got a = {a}, b = {b}"));
    }
    if !p.re.is_finite() || !p.im.is_finite() {
        return domain("exponent must be finite");
    }
    let breaks: Vec<f64> = (0..=8).map(|i| 2.0 * PI * f64::from(i) / 8.0).collect();
    let log_base = |t: f64| (a - b * t.sin()).ln();
    let lhs = integrate_interval(|t| (-p * log_base(t)).exp(), &breaks, config)?;
    let rhs_int = integrate_interval(|t| ((p - 1.0) * log_base(t)).exp(), &breaks, config)?;
    let factor = ((0.5 - p) * ((a - b) * (a + b)).ln()).exp();
    let rhs = factor * rhs_int.value;
    Ok(VerificationReport::build(ReportInput {
        identity: Identity::TrigK1,
        parameters: &[("p_re", p.re), ("p_im", p.im), ("a", a), ("b", b)],
        lhs: lhs.value,
        rhs,
        scale: lhs.value.norm(),
        quad_error: lhs.abs_error + factor.norm() * rhs_int.abs_error,
        evals: lhs.evals + rhs_int.evals,
        converged: lhs.converged && rhs_int.converged,
    }))
}

/// `(2πR/r)·|R² − r²|·sin(b ln((R+r)/|R−r|))/b`, with the logarithmic limit at
/// `b = 0`.
pub fn closed_form_k2_value(setup: &SphereSetup, b: f64) -> Result<f64> {
    if setup.k() != 2 {
        return domain(format!("closed form requires k = 2, got k = {}", setup.k()));
    }
    if setup.r() == 0.0 {
        return domain("closed form requires r > 0");
    }
    let big_r = setup.radius();
    let r = setup.r();
    let pre = 2.0 * PI * big_r / r * ((big_r - r) * (big_r + r)).abs();
    let span = setup.log_span();
    Ok(if b == 0.0 {
        pre * span
    } else {
        pre * (b * span).sin() / b
    })
}

/// Quadrature of `∫_{S²} ω^{1+ib} dS` against its closed form.
pub fn closed_form_k2(setup: &SphereSetup, b: f64, config: &QuadConfig) -> Result<VerificationReport> {
    let closed = closed_form_k2_value(setup, b)?;
    let f = evaluate(setup, ComplexExponent::new(1.0, b)?, config)?;
    Ok(VerificationReport::build(ReportInput {
        identity: Identity::ClosedFormK2,
        parameters: &[("R", setup.radius()), ("r", setup.r()), ("b", b)],
        lhs: f.value(),
        rhs: Complex64::new(closed, 0.0),
        scale: closed.abs(),
        quad_error: f.abs_error(),
        evals: f.quad.evals,
        converged: f.quad.converged,
    }))
}

/// The standard battery of identity checks for one setup.
pub fn default_suite(setup: &SphereSetup, config: &QuadConfig) -> Result<Vec<VerificationReport>> {
    let k = f64::from(setup.k());
    let p = setup.strip_halfwidth().finite().unwrap_or(1.0);
    let mut reports = Vec::new();

    let alphas = [
        (0.0, 0.0),
        (0.3, 0.0),
        (0.5 * k + 0.7, 0.0),
        (k + 1.5, 0.0),
        (-2.0, 0.0),
        (0.4, 0.5 * p),
        (0.5 * k + 0.8, -0.9 * p),
        (k + 0.5, p),
    ];
    for (xi, zeta) in alphas {
        reports.push(verify_reflection(setup, ComplexExponent::new(xi, zeta)?, config)?);
    }
    for b in [0.5, 1.0, 2.0] {
        for m in 0..3 {
            reports.push(verify_imag_vanishing(setup, b, m, config)?);
        }
    }
    for (xi, zeta) in [(k - 1.0, 0.0), (0.5, 0.0), (k, 0.0), (1.2, 0.3)] {
        reports.push(verify_distance_identity(setup, ComplexExponent::new(xi, zeta)?, config)?);
    }
    if setup.k() == 2 && setup.r() > 0.0 {
        for b in [0.0, 0.5, 1.0, PI / setup.log_span(), 5.0] {
            reports.push(closed_form_k2(setup, b, config)?);
        }
    }
    if setup.k() == 1 && setup.r() > 0.0 {
        // a = R² + r², b = 2Rr reduces the periodic integral to this circle
        let a = setup.radius().powi(2) + setup.r().powi(2);
        let b = 2.0 * setup.radius() * setup.r();
        for p_exp in [
            Complex64::new(0.0, 0.0),
            Complex64::new(0.5, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(0.5, 0.3),
        ] {
            reports.push(verify_k1_trig(p_exp, a, b, config)?);
        }
    }
    Ok(reports)
}
