use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result, SpheraError};
use crate::quadrature::QuadConfig;
use crate::ratio::SphereSetup;
use crate::transform::{evaluate, gradient, ComplexExponent};

/// Number of Newton starts on the search ring.
pub const PICARD_STARTS: usize = 16;

const MAX_NEWTON_ITERATIONS: usize = 50;
const MAX_BACKTRACKS: usize = 8;
const ACCEPT_RTOL: f64 = 1e-6;
const DEDUP_DISTANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RootOrigin {
    /// `β` itself.
    Given,
    /// `k − β`.
    Reflected,
    /// Found by Newton from the start ring.
    Extra,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PicardRoot {
    #[serde(with = "crate::wire::complex")]
    pub alpha: Complex64,
    /// `|F(α) − F(β)|`.
    pub residual: f64,
    /// `|Im α| ≤ p`.
    pub in_strip: bool,
    pub origin: RootOrigin,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PicardResult {
    #[serde(with = "crate::wire::complex")]
    pub beta: Complex64,
    #[serde(with = "crate::wire::complex")]
    pub target: Complex64,
    pub rho: f64,
    pub roots: Vec<PicardRoot>,
    pub starts: usize,
    /// Starts whose Newton iteration ended on an accepted root.
    pub converged_starts: usize,
    /// Some start was abandoned because a quadrature exhausted its budget.
    pub partial: bool,
}

impl PicardResult {
    pub fn extras(&self) -> impl Iterator<Item = &PicardRoot> {
        self.roots.iter().filter(|r| r.origin == RootOrigin::Extra)
    }
}

enum StartOutcome {
    Root(Complex64),
    Diverged,
    Budget,
}

struct Search<'a> {
    setup: &'a SphereSetup,
    config: &'a QuadConfig,
    target: Complex64,
    max_step: f64,
}

impl Search<'_> {
    /// `F(α) − F(β)`, or `None` when the quadrature ran out of budget.
    fn mismatch(&self, alpha: Complex64) -> Result<Option<Complex64>> {
        let f = match evaluate(self.setup, ComplexExponent::from_complex(alpha), self.config) {
            Ok(f) => f,
            Err(SpheraError::NonConvergence { .. }) => return Ok(None),
            Err(e) => return Err(e),
        };
        if !f.quad.converged {
            return Ok(None);
        }
        Ok(Some(f.value() - self.target))
    }

    fn newton(&self, start: Complex64) -> Result<StartOutcome> {
        let accept = ACCEPT_RTOL * self.target.norm().max(f64::MIN_POSITIVE);
        let mut alpha = start;
        let Some(mut g) = self.mismatch(alpha)? else {
            return Ok(StartOutcome::Budget);
        };
        for _ in 0..MAX_NEWTON_ITERATIONS {
            let grad = match gradient(self.setup, ComplexExponent::from_complex(alpha), self.config) {
                Ok(d) => d,
                Err(SpheraError::NonConvergence { .. }) => return Ok(StartOutcome::Budget),
                Err(e) => return Err(e),
            };
            // [W_ξ W_ζ; I_ξ I_ζ] · (dξ, dζ) = −(ΔW, ΔI)
            let det = grad.w_xi * grad.i_zeta - grad.w_zeta * grad.i_xi;
            if !(det.abs() > 0.0) || !det.is_finite() {
                return Ok(StartOutcome::Diverged);
            }
            let dxi = -(grad.i_zeta * g.re - grad.w_zeta * g.im) / det;
            let dzeta = -(-grad.i_xi * g.re + grad.w_xi * g.im) / det;
            let mut delta = Complex64::new(dxi, dzeta);
            if delta.norm() > self.max_step {
                delta *= self.max_step / delta.norm();
            }
            let mut accepted = None;
            for _ in 0..=MAX_BACKTRACKS {
                let candidate = alpha + delta;
                let Some(gc) = self.mismatch(candidate)? else {
                    return Ok(StartOutcome::Budget);
                };
                if gc.norm() < g.norm() {
                    accepted = Some((candidate, gc));
                    break;
                }
                delta *= 0.5;
            }
            let Some((next, gn)) = accepted else {
                return Ok(if g.norm() <= accept {
                    StartOutcome::Root(alpha)
                } else {
                    StartOutcome::Diverged
                });
            };
            let moved = (next - alpha).norm();
            alpha = next;
            g = gn;
            if g.norm() <= 1e-12 * self.target.norm() || moved <= 1e-13 * alpha.norm().max(1.0) {
                break;
            }
        }
        Ok(if g.norm() <= accept {
            StartOutcome::Root(alpha)
        } else {
            StartOutcome::Diverged
        })
    }
}

/// Best-effort search for further solutions of `F(α) = F(β)`.
///
/// Newton's method on `(W − W(β), I − I(β))` is started from
/// [`PICARD_STARTS`] equally spaced points of the circle `|α − k/2| = ρ`.
/// The trivial pair `{β, k − β}` is always reported; every further root is
/// kept only if `|F(α) − F(β)| ≤ 1e−6·|F(β)|`. Finding no extra root is not
/// a failure.
pub fn picard_search(
    setup: &SphereSetup,
    beta: ComplexExponent,
    rho: f64,
    config: &QuadConfig,
) -> Result<PicardResult> {
    config.validate()?;
    if !(rho > 0.0 && rho.is_finite()) {
        return domain("search radius must be positive");
    }
    let beta = ComplexExponent::new(beta.xi, beta.zeta)?;
    let target = evaluate(setup, beta, config)?.quad.require_converged()?.value;
    let p = setup.strip_halfwidth().to_f64();
    let in_strip = |a: Complex64| a.im.abs() <= p;
    let search = Search {
        setup,
        config,
        target,
        max_step: (0.25 * rho).max(0.5),
    };

    let b = beta.to_complex();
    let reflected = beta.reflected(setup.k()).to_complex();
    let mut roots = vec![PicardRoot {
        alpha: b,
        residual: 0.0,
        in_strip: in_strip(b),
        origin: RootOrigin::Given,
    }];
    let mut partial = false;
    let push = |roots: &mut Vec<PicardRoot>, alpha: Complex64, origin: RootOrigin| -> Result<()> {
        if roots.iter().any(|r| (r.alpha - alpha).norm() <= DEDUP_DISTANCE) {
            return Ok(());
        }
        let f = evaluate(setup, ComplexExponent::from_complex(alpha), config)?;
        roots.push(PicardRoot {
            alpha,
            residual: (f.value() - target).norm(),
            in_strip: in_strip(alpha),
            origin,
        });
        Ok(())
    };
    push(&mut roots, reflected, RootOrigin::Reflected)?;

    let center = Complex64::new(0.5 * f64::from(setup.k()), 0.0);
    let mut converged_starts = 0;
    for j in 0..PICARD_STARTS {
        let phase = 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / PICARD_STARTS as f64;
        let start = center + Complex64::from_polar(rho, phase);
        match search.newton(start)? {
            StartOutcome::Root(alpha) => {
                converged_starts += 1;
                push(&mut roots, alpha, RootOrigin::Extra)?;
            }
            StartOutcome::Diverged => {}
            StartOutcome::Budget => partial = true,
        }
    }
    // keep only extras that pass the residual check on re-evaluation
    let accept = ACCEPT_RTOL * target.norm();
    roots.retain(|r| r.origin != RootOrigin::Extra || r.residual <= accept);

    Ok(PicardResult {
        beta: b,
        target,
        rho,
        roots,
        starts: PICARD_STARTS,
        converged_starts,
        partial,
    })
}
