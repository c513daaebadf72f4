use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::quadrature::QuadConfig;
use crate::ratio::SphereSetup;
use crate::transform::{evaluate, ComplexExponent};

/// A rectangular grid of exponents `ξ + iζ`, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub xi_min: f64,
    pub xi_max: f64,
    pub n_xi: usize,
    pub zeta_min: f64,
    pub zeta_max: f64,
    pub n_zeta: usize,
}

impl GridSpec {
    /// `ξ ∈ k/2 ± 3` on 13 nodes and `ζ ∈ [−p, p]` on 9 nodes; both centre
    /// lines are grid lines.
    pub fn default_for(setup: &SphereSetup) -> Self {
        let half = 0.5 * f64::from(setup.k());
        let p = setup.strip_halfwidth().finite().unwrap_or(1.0);
        Self {
            xi_min: half - 3.0,
            xi_max: half + 3.0,
            n_xi: 13,
            zeta_min: -p,
            zeta_max: p,
            n_zeta: 9,
        }
    }

    fn axis(min: f64, max: f64, n: usize) -> Vec<f64> {
        if n == 1 {
            return vec![min];
        }
        (0..n)
            .map(|i| {
                if i + 1 == n {
                    max
                } else {
                    min + (max - min) * i as f64 / (n - 1) as f64
                }
            })
            .collect()
    }

    pub fn xi_nodes(&self) -> Vec<f64> {
        Self::axis(self.xi_min, self.xi_max, self.n_xi)
    }

    pub fn zeta_nodes(&self) -> Vec<f64> {
        Self::axis(self.zeta_min, self.zeta_max, self.n_zeta)
    }

    fn validate(&self, setup: &SphereSetup) -> Result<()> {
        let finite = [self.xi_min, self.xi_max, self.zeta_min, self.zeta_max]
            .iter()
            .all(|v| v.is_finite());
        if !finite || self.n_xi == 0 || self.n_zeta == 0 {
            return domain("grid bounds must be finite with at least one node per axis");
        }
        if self.xi_min > self.xi_max || self.zeta_min > self.zeta_max {
            return domain("grid bounds are reversed");
        }
        if self.n_xi * self.n_zeta > 1_000_000 {
            return domain("grid has more than a million nodes");
        }
        if let Some(p) = setup.strip_halfwidth().finite() {
            let slack = 1e-12 * p;
            if self.zeta_min < -p - slack || self.zeta_max > p + slack {
                return domain(format!("grid leaves the strip |ζ| ≤ {p}"));
            }
        }
        Ok(())
    }
}

/// Signs of `I` on a grid: `signs[j][i]` belongs to `(xi[i], zeta[j])`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignMap {
    pub xi: Vec<f64>,
    pub zeta: Vec<f64>,
    pub values: Vec<Vec<f64>>,
    pub errors: Vec<Vec<f64>>,
    pub signs: Vec<Vec<i8>>,
    pub center: f64,
}

impl SignMap {
    /// Every node classified as zero lies on `ξ = k/2` or `ζ = 0`, and every
    /// node on those lines is classified as zero.
    pub fn zero_set_on_axes(&self) -> bool {
        let tol = 1e-12 * self.center.abs().max(1.0);
        self.nodes().all(|(i, j)| {
            let on_axis = (self.xi[i] - self.center).abs() <= tol || self.zeta[j] == 0.0;
            on_axis == (self.signs[j][i] == 0)
        })
    }

    /// `sign I(ξ, ζ) = −sign I(k − ξ, ζ) = −sign I(ξ, −ζ)` wherever the
    /// mirrored node is also on the grid.
    pub fn antisymmetric(&self) -> bool {
        let find = |axis: &[f64], x: f64| {
            axis.iter()
                .position(|&y| (y - x).abs() <= 1e-12 * x.abs().max(1.0))
        };
        self.nodes().all(|(i, j)| {
            let s = self.signs[j][i];
            let mirror_xi = find(&self.xi, 2.0 * self.center - self.xi[i])
                .map_or(true, |ii| self.signs[j][ii] == -s);
            let mirror_zeta = find(&self.zeta, -self.zeta[j])
                .map_or(true, |jj| self.signs[jj][i] == -s);
            mirror_xi && mirror_zeta
        })
    }

    fn nodes(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.zeta.len()).flat_map(move |j| (0..self.xi.len()).map(move |i| (i, j)))
    }
}

/// Evaluates `I` on a grid and classifies each node as positive, negative or
/// zero, where zero means `|I| ≤ 4·err + 1e−12·|W|`.
pub fn sign_map_i(setup: &SphereSetup, grid: &GridSpec, config: &QuadConfig) -> Result<SignMap> {
    grid.validate(setup)?;
    let xi = grid.xi_nodes();
    let zeta = grid.zeta_nodes();
    let mut values = Vec::with_capacity(zeta.len());
    let mut errors = Vec::with_capacity(zeta.len());
    let mut signs = Vec::with_capacity(zeta.len());
    for &z in &zeta {
        let mut row_v = Vec::with_capacity(xi.len());
        let mut row_e = Vec::with_capacity(xi.len());
        let mut row_s = Vec::with_capacity(xi.len());
        for &x in &xi {
            let f = evaluate(setup, ComplexExponent::new(x, z)?, config)?;
            let threshold = 4.0 * f.abs_error() + 1e-12 * f.w.abs();
            let sign = if f.i.abs() <= threshold {
                0
            } else if f.i > 0.0 {
                1
            } else {
                -1
            };
            row_v.push(f.i);
            row_e.push(f.abs_error());
            row_s.push(sign);
        }
        values.push(row_v);
        errors.push(row_e);
        signs.push(row_s);
    }
    Ok(SignMap {
        xi,
        zeta,
        values,
        errors,
        signs,
        center: 0.5 * f64::from(setup.k()),
    })
}
