use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Which identity a report checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Identity {
    /// `F(α) = F(k − α)`.
    Reflection,
    /// `∫ ω^{k/2} sin(b ln ω) dS = 0` and the odd/even log-moment families.
    ImagVanishing,
    /// `∫ |x−y|^{−α} dS = |R² − r²|^{(β−α)/2} ∫ |x−y|^{−β} dS` for `α + β = 2k`.
    DistancePower,
    /// The periodic identity for `∫ (a − b sin θ)^{−p} dθ`.
    TrigK1,
    /// Closed form of `∫_{S²} ω^{1+ib} dS`.
    ClosedFormK2,
}

/// A named partial value contributing to a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub label: String,
    pub value: f64,
    pub abs_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub identity: Identity,
    pub parameters: BTreeMap<String, f64>,
    #[serde(with = "crate::wire::complex")]
    pub lhs: Complex64,
    #[serde(with = "crate::wire::complex")]
    pub rhs: Complex64,
    pub residual_abs: f64,
    pub residual_rel: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Some quadrature behind the report did not reach its tolerance.
    pub inconclusive: bool,
    /// Summed quadrature error estimates of both sides.
    pub quad_error: f64,
    pub evals: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub components: Vec<Component>,
}

/// Residual tolerance for an identity: `max(1e−8·scale, 4·Σ quadrature error)`.
pub fn identity_tolerance(scale: f64, summed_error: f64) -> f64 {
    (1e-8 * scale.abs()).max(4.0 * summed_error)
}

pub(crate) struct ReportInput<'a> {
    pub identity: Identity,
    pub parameters: &'a [(&'a str, f64)],
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub scale: f64,
    pub quad_error: f64,
    pub evals: usize,
    pub converged: bool,
}

impl VerificationReport {
    pub(crate) fn build(input: ReportInput<'_>) -> Self {
        let residual_abs = (input.lhs - input.rhs).norm();
        let residual_rel = if input.scale > 0.0 {
            residual_abs / input.scale
        } else {
            residual_abs
        };
        let tolerance = identity_tolerance(input.scale, input.quad_error);
        Self {
            identity: input.identity,
            parameters: input
                .parameters
                .iter()
                .map(|(k, v)| ((*k).to_string(), *v))
                .collect(),
            lhs: input.lhs,
            rhs: input.rhs,
            residual_abs,
            residual_rel,
            tolerance,
            pass: residual_abs <= tolerance,
            inconclusive: !input.converged,
            quad_error: input.quad_error,
            evals: input.evals,
            components: Vec::new(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_iff_within_tolerance() {
        let mk = |lhs: f64, err: f64| {
            VerificationReport::build(ReportInput {
                identity: Identity::Reflection,
                parameters: &[("xi", 1.0)],
                lhs: Complex64::new(lhs, 0.0),
                rhs: Complex64::new(1.0, 0.0),
                scale: 1.0,
                quad_error: err,
                evals: 1,
                converged: true,
            })
        };
        assert!(mk(1.0 + 5e-9, 0.0).pass);
        assert!(!mk(1.0 + 2e-8, 0.0).pass);
        // error estimates widen the tolerance
        assert!(mk(1.0 + 2e-8, 1e-8).pass);
        let r = mk(1.5, 0.0);
        assert_eq!(r.pass, r.residual_abs <= r.tolerance);
        assert_eq!(r.parameters["xi"], 1.0);
    }
}
