//! Geometric constructions for the spherical ratio of two points.
//!
//! Everything here is closed-form: the ratio itself and its star points, the
//! one-dimensional angular form used by the quadrature layer, inversion in the
//! sphere, the tangent spheres on which the ratio is constant, and the limits
//! of the ratio along paths approaching a point of the sphere.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result, SpheraError};
use crate::wire::ExtendedRepr;

/// Relative cutoff for set conditions that are exact in the continuum:
/// point coincidence, `|x| = |y|`, `r = R` and tangency of a line.
pub const EQUALITY_RTOL: f64 = 1e-12;

/// Area of the unit `m`-sphere, `2π^{(m+1)/2} / Γ((m+1)/2)`.
///
/// Uses the two-step recurrence `|σ_m| = 2π/(m−1) · |σ_{m−2}|` from
/// `|σ_0| = 2` and `|σ_1| = 2π`, which avoids a gamma function.
pub fn unit_sphere_area(m: u32) -> f64 {
    let (mut area, mut j) = if m % 2 == 0 { (2.0, 0) } else { (2.0 * PI, 1) };
    while j < m {
        j += 2;
        area *= 2.0 * PI / f64::from(j - 1);
    }
    area
}

/// Area of the `m`-sphere of the given radius.
pub fn sphere_area(m: u32, radius: f64) -> Result<f64> {
    if !(radius > 0.0) || !radius.is_finite() {
        return domain(format!("sphere radius must be positive and finite, got {radius}"));
    }
    Ok(unit_sphere_area(m) * radius.powi(m as i32))
}

/// Half-width of the strip `|Im α| ≤ p` on which `cos(ζ ln ω) ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "ExtendedRepr", try_from = "ExtendedRepr")]
pub enum StripHalfwidth {
    Finite(f64),
    /// The point sits at the centre, `ω ≡ 1`, and every `ζ` qualifies.
    Unbounded,
}

impl StripHalfwidth {
    pub fn finite(self) -> Option<f64> {
        match self {
            StripHalfwidth::Finite(p) => Some(p),
            StripHalfwidth::Unbounded => None,
        }
    }

    /// Plain `f64`, with `+∞` for the unbounded case.
    pub fn to_f64(self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }
}

/// A value of `[0, ∞]`, kept tagged so that `∞` is never a stray float.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "ExtendedRepr", try_from = "ExtendedRepr")]
pub enum ExtendedReal {
    Finite(f64),
    PosInfinity,
}

impl ExtendedReal {
    pub fn is_finite(self) -> bool {
        matches!(self, ExtendedReal::Finite(_))
    }
}

/// The fixed scene: sphere `S^k(R)` centred at the origin and a point `x` at
/// distance `r` from the origin, `r ≠ R`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphereSetup {
    k: u32,
    radius: f64,
    r: f64,
}

impl SphereSetup {
    pub fn new(k: u32, radius: f64, r: f64) -> Result<Self> {
        if k == 0 {
            return domain("sphere dimension k must be at least 1");
        }
        if !(radius > 0.0) || !radius.is_finite() {
            return domain(format!("sphere radius must be positive and finite, got {radius}"));
        }
        if !(r >= 0.0) || !r.is_finite() {
            return domain(format!("|x| must be non-negative and finite, got {r}"));
        }
        if (r * r - radius * radius).abs() <= EQUALITY_RTOL * radius * radius {
            return domain("the point x lies on the sphere (r = R)");
        }
        Ok(Self { k, radius, r })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn is_interior(&self) -> bool {
        self.r < self.radius
    }

    /// `Υ = min{R/r, r/R}`, with `Υ = 0` at the centre.
    pub fn upsilon(&self) -> f64 {
        if self.r == 0.0 {
            0.0
        } else {
            (self.radius / self.r).min(self.r / self.radius)
        }
    }

    /// `ln((R + r)/|R − r|) = ln((1 + Υ)/(1 − Υ))`, the largest value of `ln ω`.
    pub fn log_span(&self) -> f64 {
        let (big, small) = if self.r < self.radius {
            (self.radius, self.r)
        } else {
            (self.r, self.radius)
        };
        // ln((b + s)/(b − s)) = ln1p(s/b) − ln1p(−s/b)
        let t = small / big;
        t.ln_1p() - (-t).ln_1p()
    }

    /// `p = (π/2) / ln((R + r)/|R − r|)`.
    pub fn strip_halfwidth(&self) -> StripHalfwidth {
        let span = self.log_span();
        if span == 0.0 {
            StripHalfwidth::Unbounded
        } else {
            StripHalfwidth::Finite(0.5 * PI / span)
        }
    }

    /// `|σ_{k−1}|`, the unit `(k−1)`-sphere area.
    pub fn sigma_km1(&self) -> f64 {
        unit_sphere_area(self.k - 1)
    }

    /// `|σ_k|`, the unit `k`-sphere area.
    pub fn sigma_k(&self) -> f64 {
        unit_sphere_area(self.k)
    }

    /// Area of `S^k(R)`.
    pub fn area(&self) -> f64 {
        self.sigma_k() * self.radius.powi(self.k as i32)
    }

    /// The same sphere seen from the inverse point `R²/r`.
    pub fn inverted(&self) -> Result<Self> {
        let r_bar = invert_point(self)?;
        Self::new(self.k, self.radius, r_bar)
    }
}

/// Decomposition of a point pair into the two segments whose ratio is `ω`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioBreakdown {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// Second intersection of line `xy` with `S^k(|x|)`, or `x` under tangency.
    pub x_star: Vec<f64>,
    /// Second intersection of line `xy` with `S^k(|y|)`, or `y` under tangency.
    pub y_star: Vec<f64>,
    /// `|x − y*|`.
    pub l: f64,
    /// `|x − y|`.
    pub q: f64,
    pub omega: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| u * v).sum()
}

fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum::<f64>().sqrt()
}

/// Second point where the line through `p` with direction `dir` meets the
/// sphere `S(|p|)`, or `p` itself when the line is tangent.
///
/// `|p + t·dir|² = |p|²` has roots `t = 0` and `t = −2 p·dir/|dir|²`; the
/// double root (tangency) is detected through the normalised discriminant
/// `(p·dir)²/|dir|²`.
fn star_point(p: &[f64], dir: &[f64]) -> Vec<f64> {
    let dd = norm_sq(dir);
    let pd = dot(p, dir);
    let p2 = norm_sq(p);
    if pd * pd / dd <= EQUALITY_RTOL * p2 {
        return p.to_vec();
    }
    let t = -2.0 * pd / dd;
    p.iter().zip(dir).map(|(a, b)| a + t * b).collect()
}

/// Spherical ratio `ω(x, y)` and its geometric breakdown.
pub fn ratio_from_points(x: &[f64], y: &[f64]) -> Result<RatioBreakdown> {
    if x.len() != y.len() {
        return domain(format!("dimension mismatch: {} vs {}", x.len(), y.len()));
    }
    if x.len() < 2 {
        return domain("points must live in R^{k+1} with k >= 1");
    }
    if x.iter().chain(y).any(|c| !c.is_finite()) {
        return domain("point coordinates must be finite");
    }
    let nx2 = norm_sq(x);
    let ny2 = norm_sq(y);
    let scale = nx2.max(ny2);
    let d: Vec<f64> = y.iter().zip(x).map(|(b, a)| b - a).collect();
    let q2 = norm_sq(&d);
    if q2 <= EQUALITY_RTOL * scale {
        return Err(SpheraError::DegeneratePair);
    }
    let q = q2.sqrt();
    // |y|² − |x|² = (y − x)·(y + x), free of the cancellation in the norm difference
    let sum: Vec<f64> = y.iter().zip(x).map(|(b, a)| b + a).collect();
    let numerator = dot(&d, &sum).abs();

    if numerator <= EQUALITY_RTOL * scale {
        return Ok(RatioBreakdown {
            x: x.to_vec(),
            y: y.to_vec(),
            x_star: y.to_vec(),
            y_star: x.to_vec(),
            l: 0.0,
            q,
            omega: 0.0,
        });
    }

    let e: Vec<f64> = d.iter().map(|c| -c).collect();
    let x_star = star_point(x, &d);
    let y_star = star_point(y, &e);
    let l = distance(x, &y_star);
    Ok(RatioBreakdown {
        x: x.to_vec(),
        y: y.to_vec(),
        x_star,
        y_star,
        l,
        q,
        omega: numerator / q2,
    })
}

/// `ω` as a function of `θ = π − ∠xOy` for `y ∈ S^k(R)`:
/// `(1 − Υ²)/(1 + Υ² + 2Υ cos θ)`.
pub fn omega_theta(setup: &SphereSetup, theta: f64) -> Result<f64> {
    if !(0.0..=PI).contains(&theta) {
        return domain(format!("theta must lie in [0, π], got {theta}"));
    }
    let u = setup.upsilon();
    Ok((1.0 - u * u) / (1.0 + u * u + 2.0 * u * theta.cos()))
}

/// Bounds `(1 − Υ)/(1 + Υ) ≤ ω ≤ (1 + Υ)/(1 − Υ)` over the sphere.
pub fn omega_bounds(setup: &SphereSetup) -> (f64, f64) {
    let span = setup.log_span();
    ((-span).exp(), span.exp())
}

/// Radius of the inverse point: `r̄ = R²/r`.
pub fn invert_point(setup: &SphereSetup) -> Result<f64> {
    if setup.r() == 0.0 {
        return Err(SpheraError::InversionUndefined);
    }
    Ok(setup.radius() * setup.radius() / setup.r())
}

/// Which way the centre `T` of a tangent sphere sits from `y` along line `Oy`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TangentSide {
    TowardOrigin,
    AwayFromOrigin,
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0) || !delta.is_finite() {
        return domain(format!("tangent-sphere radius must be positive and finite, got {delta}"));
    }
    Ok(())
}

/// Constant value `|OT|/δ` of `ω(·, y)` on the sphere of radius `δ` centred at
/// `T ∈ line(Oy)` and passing through `y`, where `|y| = radius`.
pub fn tangent_sphere_level(radius: f64, delta: f64, side: TangentSide) -> Result<f64> {
    if !(radius > 0.0) {
        return domain(format!("sphere radius must be positive, got {radius}"));
    }
    check_delta(delta)?;
    let ot = match side {
        TangentSide::AwayFromOrigin => radius + delta,
        TangentSide::TowardOrigin => (radius - delta).abs(),
    };
    Ok(ot / delta)
}

/// Centre `T` of the tangent sphere through `y` with radius `delta`.
pub fn tangent_sphere_center(y: &[f64], delta: f64, side: TangentSide) -> Result<Vec<f64>> {
    check_delta(delta)?;
    let ny = norm_sq(y).sqrt();
    if ny == 0.0 {
        return domain("y must differ from the origin");
    }
    let scale = match side {
        TangentSide::AwayFromOrigin => 1.0 + delta / ny,
        TangentSide::TowardOrigin => 1.0 - delta / ny,
    };
    Ok(y.iter().map(|c| c * scale).collect())
}

/// Uniform random points of the tangent sphere `S_T(δ)` through `y`.
pub fn sample_tangent_sphere<R: Rng + ?Sized>(
    y: &[f64],
    delta: f64,
    side: TangentSide,
    n: usize,
    rng: &mut R,
) -> Result<Vec<Vec<f64>>> {
    let center = tangent_sphere_center(y, delta, side)?;
    let dim = y.len();
    let mut points = Vec::with_capacity(n);
    while points.len() < n {
        let g: Vec<f64> = (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let gn = norm_sq(&g).sqrt();
        if gn < 1e-12 {
            continue;
        }
        points.push(center.iter().zip(&g).map(|(c, u)| c + delta * u / gn).collect());
    }
    Ok(points)
}

/// Family of `C¹` paths through a point `y` of the sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PathVariant {
    /// A great circle of `S^k(|y|)`.
    OnSphere,
    /// A line in the tangent hyperplane at `y`.
    TangentPlane,
    /// A great circle of the tangent sphere `S_T(δ)`.
    TangentSphere { delta: f64, side: TangentSide },
    /// A straight segment entering the ball at angle `γ₀` to line `Oy`.
    StraightLine { gamma0: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathSpec {
    pub variant: PathVariant,
    pub y: Vec<f64>,
    pub samples: usize,
}

/// Limit `A(p)` together with the sampled approach.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathLimit {
    pub limit: ExtendedReal,
    /// `|x_i − y|` for each sample, decreasing.
    pub distances: Vec<f64>,
    pub omegas: Vec<f64>,
    /// `l = |x_i − y*|`; tends to `2R cos γ₀` on straight lines.
    pub l_values: Vec<f64>,
}

impl PathLimit {
    /// Whether the last quarter of the samples approaches the limit
    /// monotonically.
    pub fn tail_is_monotone(&self) -> bool {
        let n = self.omegas.len();
        let start = n - (n / 4).max(2);
        let tail = &self.omegas[start..];
        match self.limit {
            ExtendedReal::PosInfinity => tail.windows(2).all(|w| w[1] > w[0]),
            ExtendedReal::Finite(a) => {
                let slack = 1e-12 * a.abs().max(1.0);
                tail.windows(2).all(|w| (w[1] - a).abs() <= (w[0] - a).abs() + slack)
            }
        }
    }
}

/// Unit vector orthogonal to `y`.
fn orthogonal_unit(y: &[f64]) -> Vec<f64> {
    let ny = norm_sq(y).sqrt();
    let axis = y
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let proj = y[axis] / ny;
    let mut e: Vec<f64> = y.iter().map(|c| -proj * c / ny).collect();
    e[axis] += 1.0;
    let en = norm_sq(&e).sqrt();
    e.iter().map(|c| c / en).collect()
}

/// Closest approach of a sampled path, relative to `R`: a safe margin above
/// the relative coincidence tolerance `1e−12` on squared distances.
const PATH_FLOOR: f64 = 1e-5;

/// Limit of `ω(x, y)` as `x → y` along the given path, with a sampled
/// confirmation sequence at geometrically shrinking path parameters.
pub fn path_limit(spec: &PathSpec, setup: &SphereSetup) -> Result<PathLimit> {
    let radius = setup.radius();
    if spec.y.len() != setup.k() as usize + 1 {
        return domain(format!(
            "y must have {} coordinates, got {}",
            setup.k() + 1,
            spec.y.len()
        ));
    }
    let ny = norm_sq(&spec.y).sqrt();
    if (ny - radius).abs() > 1e-9 * radius {
        return domain(format!("y must lie on S^k(R): |y| = {ny}, R = {radius}"));
    }
    if spec.samples < 4 {
        return domain("at least 4 approach samples are required");
    }
    let y_hat: Vec<f64> = spec.y.iter().map(|c| c / ny).collect();
    let e1 = orthogonal_unit(&spec.y);

    let (limit, s0) = match spec.variant {
        PathVariant::OnSphere => (ExtendedReal::Finite(0.0), 0.5 * radius),
        PathVariant::TangentPlane => (ExtendedReal::Finite(1.0), 0.5 * radius),
        PathVariant::TangentSphere { delta, side } => (
            ExtendedReal::Finite(tangent_sphere_level(radius, delta, side)?),
            0.5 * delta.min(radius),
        ),
        PathVariant::StraightLine { gamma0 } => {
            if !(gamma0 > 0.0 && gamma0 <= 0.5 * PI) {
                return domain(format!("gamma0 must lie in (0, π/2], got {gamma0}"));
            }
            // At γ₀ = π/2 the line lies in the tangent hyperplane.
            let limit = if (0.5 * PI - gamma0) <= 1e-12 {
                ExtendedReal::Finite(1.0)
            } else {
                ExtendedReal::PosInfinity
            };
            (limit, 0.5 * radius)
        }
    };

    // Displacement x − y in closed form: forming x first and subtracting
    // would leave an absolute error ~ε·R that swamps |x|² − |y|² ~ q².
    let toward_y: Vec<f64> = match spec.variant {
        PathVariant::TangentSphere { delta, side } => {
            let center = tangent_sphere_center(&spec.y, delta, side)?;
            spec.y.iter().zip(&center).map(|(a, c)| (a - c) / delta).collect()
        }
        _ => y_hat.clone(),
    };
    let displacement = |s: f64| -> Vec<f64> {
        // (cos φ − 1) = −2 sin²(φ/2), exact for small φ
        let arc = |rho: f64, phi: f64| -> Vec<f64> {
            let c = -2.0 * (0.5 * phi).sin().powi(2);
            toward_y
                .iter()
                .zip(&e1)
                .map(|(a, b)| rho * (c * a + phi.sin() * b))
                .collect()
        };
        match spec.variant {
            PathVariant::OnSphere => arc(radius, s / radius),
            PathVariant::TangentPlane => e1.iter().map(|b| s * b).collect(),
            PathVariant::TangentSphere { delta, .. } => arc(delta, s / delta),
            PathVariant::StraightLine { gamma0 } => y_hat
                .iter()
                .zip(&e1)
                .map(|(a, b)| s * (-gamma0.cos() * a + gamma0.sin() * b))
                .collect(),
        }
    };

    let mut distances = Vec::with_capacity(spec.samples);
    let mut omegas = Vec::with_capacity(spec.samples);
    let mut l_values = Vec::with_capacity(spec.samples);
    // halve the arc parameter per sample, unless that would approach y closer
    // than the coincidence tolerance allows; then spread geometrically down
    // to that floor instead
    let floor = PATH_FLOOR * radius;
    let last = spec.samples - 1;
    let ratio = if s0 * 0.5f64.powi(last as i32) >= floor {
        0.5
    } else {
        (floor / s0).powf(1.0 / last as f64)
    };
    for i in 0..spec.samples {
        let s = s0 * ratio.powi(i as i32);
        let d = displacement(s);
        let x: Vec<f64> = spec.y.iter().zip(&d).map(|(a, b)| a + b).collect();
        let b = ratio_from_points(&x, &spec.y)?;
        // |x|² − |y|² = 2 y·d + |d|²
        let q2 = norm_sq(&d);
        let gap = (2.0 * dot(&spec.y, &d) + q2).abs();
        let omega = if b.omega == 0.0 { 0.0 } else { gap / q2 };
        distances.push(q2.sqrt());
        omegas.push(omega);
        l_values.push(b.l);
    }
    Ok(PathLimit {
        limit,
        distances,
        omegas,
        l_values,
    })
}
