use serde::{Deserialize, Serialize};

use crate::error::{domain, Result, SpheraError};
use crate::quadrature::QuadConfig;
use crate::ratio::SphereSetup;
use crate::transform::{evaluate, gradient, ComplexExponent, Gradient, TransformValue};

/// Default arc-length step of the continuation.
pub const DEFAULT_STEP: f64 = 0.05;

const MAX_HALVINGS: u32 = 12;
const MAX_CORRECTOR_ITERATIONS: usize = 10;
const MAX_POINTS: usize = 20_000;
const MAX_ROOT_ITERATIONS: usize = 200;

/// One stored point `(t, v(t))` of a level curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub t: f64,
    pub v: f64,
    /// `W(t, v) − level`.
    pub w_residual: f64,
    /// `I(t, v)`.
    pub i: f64,
    /// Quadrature error estimate of the evaluation at this point.
    pub abs_error: f64,
}

/// The solution set of `W(ξ, ζ) = W(a, b)` in the quadrant
/// `[k/2, ∞) × [0, p]`, stored as a monotone graph `ζ = v(ξ)` running from
/// the left/bottom boundary path to the top edge `ζ = p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelCurve {
    pub level: f64,
    pub seed: (f64, f64),
    pub points: Vec<CurvePoint>,
    /// Endpoint on the left/bottom boundary.
    pub start: (f64, f64),
    /// Endpoint on the top edge.
    pub end: (f64, f64),
    pub step: f64,
    pub strip_halfwidth: f64,
}

impl LevelCurve {
    /// A curve that collapses to one point (the minimum of `W` on the quadrant).
    pub fn is_degenerate(&self) -> bool {
        self.points.len() == 1
    }

    pub fn max_abs_residual(&self) -> f64 {
        self.points.iter().map(|p| p.w_residual.abs()).fold(0.0, f64::max)
    }

    pub fn v_strictly_increasing(&self) -> bool {
        self.points.windows(2).all(|w| w[1].v > w[0].v)
    }

    pub fn t_nondecreasing(&self) -> bool {
        self.points.windows(2).all(|w| w[1].t >= w[0].t)
    }

    /// Slope of the first chord; the local direction at the start.
    pub fn initial_slope(&self) -> Option<f64> {
        let p = self.points.first()?;
        let q = self.points.get(1)?;
        Some((q.v - p.v) / (q.t - p.t))
    }

    /// `v(t)` by linear interpolation between stored points.
    pub fn interpolate(&self, t: f64) -> Option<f64> {
        let first = self.points.first()?;
        let last = self.points.last()?;
        if t < first.t || t > last.t {
            return None;
        }
        let i = self.points.partition_point(|p| p.t < t);
        if i == 0 {
            return Some(first.v);
        }
        let (p, q) = (self.points[i - 1], self.points[i]);
        if q.t == p.t {
            return Some(q.v);
        }
        Some(p.v + (q.v - p.v) * (t - p.t) / (q.t - p.t))
    }
}

/// `I` sampled along a traced curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImagProfile {
    pub values: Vec<f64>,
    pub errors: Vec<f64>,
    /// Every consecutive difference exceeds minus the neighbouring error sum.
    pub strictly_increasing: bool,
    /// Smallest consecutive difference; absent for a single-point curve.
    pub min_increment: Option<f64>,
    pub statement: String,
}

struct Tracer<'a> {
    setup: &'a SphereSetup,
    config: QuadConfig,
    level: f64,
    half: f64,
    p: f64,
}

#[derive(Clone, Copy)]
enum Hold {
    /// Fix `t` and solve for `v`.
    T,
    /// Fix `v` and solve for `t`.
    V,
}

impl Tracer<'_> {
    fn value(&self, t: f64, v: f64) -> Result<TransformValue> {
        evaluate(self.setup, ComplexExponent::new(t, v)?, &self.config)
    }

    fn grad(&self, t: f64, v: f64) -> Result<Gradient> {
        gradient(self.setup, ComplexExponent::new(t, v)?, &self.config)
    }

    fn residual_tol(&self) -> f64 {
        1e-11 * self.level.abs().max(1.0)
    }

    fn point(&self, t: f64, v: f64) -> Result<CurvePoint> {
        let f = self.value(t, v)?;
        Ok(CurvePoint {
            t,
            v,
            w_residual: f.w - self.level,
            i: f.i,
            abs_error: f.abs_error(),
        })
    }

    /// Unit tangent `(−W_ζ, W_ξ)/|∇W|`, oriented towards increasing `t` and `v`.
    fn tangent(&self, t: f64, v: f64) -> Result<(f64, f64)> {
        let g = self.grad(t, v)?;
        let (dt, dv) = (-g.w_zeta, g.w_xi);
        let norm = dt.hypot(dv);
        if norm <= 1e-9 * self.level.abs().max(1.0) {
            // both partials vanish only at the corner (k/2, 0), where the
            // level set leaves along the diagonal
            return Ok((std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2));
        }
        Ok((dt.max(0.0) / norm, dv.max(0.0) / norm))
    }

    fn correct(&self, mut t: f64, mut v: f64, hold: Hold) -> Result<Option<(f64, f64)>> {
        for _ in 0..MAX_CORRECTOR_ITERATIONS {
            let res = self.value(t, v)?.w - self.level;
            if res.abs() <= self.residual_tol() {
                return Ok(Some((t, v)));
            }
            let g = self.grad(t, v)?;
            match hold {
                Hold::T => {
                    if !(g.w_zeta < 0.0) {
                        return Ok(None);
                    }
                    v = (v - res / g.w_zeta).max(0.0);
                }
                Hold::V => {
                    if !(g.w_xi > 0.0) {
                        return Ok(None);
                    }
                    t = (t - res / g.w_xi).max(self.half);
                }
            }
            if !t.is_finite() || !v.is_finite() {
                return Ok(None);
            }
        }
        Ok(None)
    }

    /// Root of the increasing function `f` on `[lo, hi]` given `f(lo) ≤ 0 ≤ f(hi)`,
    /// by Newton steps safeguarded with bisection.
    fn monotone_root<F>(&self, mut f: F, mut lo: f64, mut hi: f64) -> Result<f64>
    where
        F: FnMut(f64) -> Result<(f64, f64)>,
    {
        let ftol = 1e-13 * self.level.abs().max(1.0);
        let mut x = 0.5 * (lo + hi);
        for _ in 0..MAX_ROOT_ITERATIONS {
            let (fx, dfx) = f(x)?;
            if fx.abs() <= ftol {
                return Ok(x);
            }
            if fx > 0.0 {
                hi = x;
            } else {
                lo = x;
            }
            let xtol = 4.0 * f64::EPSILON * lo.abs().max(hi.abs()).max(1.0);
            if hi - lo <= xtol {
                return Ok(x);
            }
            let newton = x - fx / dfx;
            x = if dfx > 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
        }
        Ok(x)
    }

    /// Endpoint on the path `(k/2, b) → (k/2, 0) → (a, 0)`, along which `W`
    /// increases monotonically.
    fn start_point(&self, a: f64, b: f64) -> Result<(f64, f64)> {
        if a == self.half || b == 0.0 {
            return Ok(if a == self.half { (a, b) } else { (a, 0.0) });
        }
        let at = |s: f64| {
            if s <= b {
                (self.half, b - s)
            } else {
                (self.half + (s - b), 0.0)
            }
        };
        let length = b + (a - self.half);
        let s = self.monotone_root(
            |s| {
                let (t, v) = at(s);
                let w = self.value(t, v)?.w - self.level;
                let g = self.grad(t, v)?;
                let slope = if s <= b { -g.w_zeta } else { g.w_xi };
                Ok((w, slope))
            },
            0.0,
            length,
        )?;
        Ok(at(s))
    }

    /// Endpoint `(a₁, p)` on the top edge, `a₁ ≥ a`.
    fn end_point(&self, a: f64, b: f64) -> Result<(f64, f64)> {
        if b == self.p {
            return Ok((a, b));
        }
        let h = |xi: f64| -> Result<(f64, f64)> {
            let w = self.value(xi, self.p)?.w - self.level;
            Ok((w, self.grad(xi, self.p)?.w_xi))
        };
        let mut lo = a;
        let mut width = 1.0;
        let mut hi = a + width;
        while h(hi)?.0 < 0.0 {
            lo = hi;
            width *= 2.0;
            hi = a + width;
            if width > 1e6 {
                return domain("level curve does not reach the top edge");
            }
        }
        Ok((self.monotone_root(h, lo, hi)?, self.p))
    }
}

/// Traces the level curve of `W` through `seed = (a, b)` in the quadrant
/// `[k/2, ∞) × [0, p]`.
///
/// Both endpoints come from monotone one-dimensional root finding; the
/// interior is advanced by an arc-length predictor along the tangent
/// `(−W_ζ, W_ξ)` and a Newton corrector that holds fixed whichever coordinate
/// the tangent is most aligned with. A failed correction halves the step.
pub fn trace_level_curve(
    setup: &SphereSetup,
    seed: (f64, f64),
    step: f64,
    config: &QuadConfig,
) -> Result<LevelCurve> {
    config.validate()?;
    let p = match setup.strip_halfwidth().finite() {
        Some(p) => p,
        None => return domain("level curves need r > 0: W is constant when x is the centre"),
    };
    let (a, b) = seed;
    let half = 0.5 * f64::from(setup.k());
    if !a.is_finite() || !b.is_finite() || a < half || b < 0.0 || b > p {
        return domain(format!(
            "seed ({a}, {b}) lies outside the quadrant [{half}, ∞) × [0, {p}]"
        ));
    }
    if !(step > 0.0 && step.is_finite()) {
        return domain("step must be positive");
    }
    let inner = config.tightened(1e-2);
    let level = evaluate(setup, ComplexExponent::new(a, b)?, &inner)?.w;
    let tracer = Tracer {
        setup,
        config: inner,
        level,
        half,
        p,
    };
    let start = tracer.start_point(a, b)?;
    let end = tracer.end_point(a, b)?;

    let mut points = vec![tracer.point(start.0, start.1)?];
    if start == end {
        return Ok(LevelCurve {
            level,
            seed,
            points,
            start,
            end,
            step,
            strip_halfwidth: p,
        });
    }

    let (mut t, mut v) = start;
    let mut h = step;
    loop {
        if points.len() >= MAX_POINTS {
            return Err(SpheraError::CorrectorFailure { xi: t, zeta: v });
        }
        let (dt, dv) = tracer.tangent(t, v)?;
        let mut halvings = 0;
        let next = loop {
            let (tp, vp) = (t + h * dt, v + h * dv);
            if vp >= p {
                break None;
            }
            let hold = if dt >= dv { Hold::T } else { Hold::V };
            if let Some((tc, vc)) = tracer.correct(tp, vp, hold)? {
                let moved = (tc - t).hypot(vc - v);
                if vc >= p {
                    break None;
                }
                if tc >= t && vc > v && moved <= 2.0 * h {
                    break Some((tc, vc));
                }
            }
            halvings += 1;
            if halvings > MAX_HALVINGS {
                return Err(SpheraError::CorrectorFailure { xi: t, zeta: v });
            }
            h *= 0.5;
        };
        match next {
            Some((tc, vc)) => {
                points.push(tracer.point(tc, vc)?);
                t = tc;
                v = vc;
                h = (2.0 * h).min(step);
            }
            None => break,
        }
    }
    let last = points[points.len() - 1];
    if (end.0 - last.t).hypot(end.1 - last.v) <= 1e-3 * step {
        points.pop();
    }
    points.push(tracer.point(end.0, end.1)?);

    Ok(LevelCurve {
        level,
        seed,
        points,
        start,
        end,
        step,
        strip_halfwidth: p,
    })
}

/// Height `v ∈ [0, p]` with `W(t, v) = level`, if the level is attained above `t`.
pub fn level_height(setup: &SphereSetup, level: f64, t: f64, config: &QuadConfig) -> Result<Option<f64>> {
    let p = match setup.strip_halfwidth().finite() {
        Some(p) => p,
        None => return domain("level curves need r > 0"),
    };
    let half = 0.5 * f64::from(setup.k());
    if !(t >= half) || !t.is_finite() || !level.is_finite() {
        return domain(format!("t = {t} must lie in [{half}, ∞)"));
    }
    let tracer = Tracer {
        setup,
        config: config.tightened(1e-2),
        level,
        half,
        p,
    };
    let bottom = tracer.value(t, 0.0)?.w - level;
    let top = tracer.value(t, p)?.w - level;
    // W decreases in ζ, so level − W(t, ζ) increases
    if bottom < 0.0 || top > 0.0 {
        return Ok(None);
    }
    let v = tracer.monotone_root(
        |v| {
            let w = tracer.value(t, v)?.w - level;
            Ok((-w, tracer.grad(t, v)?.w_zeta.abs()))
        },
        0.0,
        p,
    )?;
    Ok(Some(v))
}

/// Samples `I` at every stored point of `curve` and checks that it increases.
pub fn imag_along_curve(curve: &LevelCurve, setup: &SphereSetup, config: &QuadConfig) -> Result<ImagProfile> {
    let mut values = Vec::with_capacity(curve.points.len());
    let mut errors = Vec::with_capacity(curve.points.len());
    for pt in &curve.points {
        let f = evaluate(setup, ComplexExponent::new(pt.t, pt.v)?, config)?;
        values.push(f.i);
        errors.push(f.abs_error());
    }
    let mut strictly_increasing = true;
    let mut min_increment: Option<f64> = None;
    for i in 1..values.len() {
        let d = values[i] - values[i - 1];
        min_increment = Some(min_increment.map_or(d, |m| m.min(d)));
        if !(d > -(errors[i] + errors[i - 1])) {
            strictly_increasing = false;
        }
    }
    let (a, b) = curve.seed;
    let statement = if values.len() < 2 {
        format!(
            "the level set of W = {} in the quadrant is the single point ({}, {}); F takes its value there only",
            curve.level, curve.start.0, curve.start.1
        )
    } else if strictly_increasing {
        format!(
            "I increases from {} to {} along W = {}, so F({a} + {b}i) is attained at exactly one point of the quadrant",
            values[0],
            values[values.len() - 1],
            curve.level
        )
    } else {
        format!(
            "I is not monotone along W = {} within the quadrature error; uniqueness for seed ({a}, {b}) is not confirmed",
            curve.level
        )
    };
    Ok(ImagProfile {
        values,
        errors,
        strictly_increasing,
        min_increment,
        statement,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> SphereSetup {
        SphereSetup::new(2, 1.0, 0.5).unwrap()
    }

    #[test]
    fn seed_validation() {
        let s = setup();
        let p = s.strip_halfwidth().to_f64();
        let cfg = QuadConfig::default();
        assert!(trace_level_curve(&s, (1.5, p * 1.01), DEFAULT_STEP, &cfg).is_err());
        assert!(trace_level_curve(&s, (0.9, 0.1), DEFAULT_STEP, &cfg).is_err());
        assert!(trace_level_curve(&s, (1.5, -0.1), DEFAULT_STEP, &cfg).is_err());
        assert!(trace_level_curve(&s, (1.5, 0.1), 0.0, &cfg).is_err());
        let centre = SphereSetup::new(2, 1.0, 0.0).unwrap();
        assert!(trace_level_curve(&centre, (1.5, 0.1), DEFAULT_STEP, &cfg).is_err());
    }

    #[test]
    fn top_left_corner_is_degenerate() {
        let s = setup();
        let p = s.strip_halfwidth().to_f64();
        let c = trace_level_curve(&s, (1.0, p), DEFAULT_STEP, &QuadConfig::default()).unwrap();
        assert!(c.is_degenerate());
        assert_eq!(c.start, (1.0, p));
        assert_eq!(c.end, (1.0, p));
    }

    #[test]
    fn bottom_seed_curve_invariants() {
        let s = setup();
        let p = s.strip_halfwidth().to_f64();
        let cfg = QuadConfig::default();
        let c = trace_level_curve(&s, (1.6, 0.0), DEFAULT_STEP, &cfg).unwrap();
        assert_eq!(c.start, (1.6, 0.0));
        assert_eq!(c.end.1, p);
        assert!(c.end.0 >= 1.6);
        assert!(c.max_abs_residual() <= 1e-8, "{}", c.max_abs_residual());
        assert!(c.v_strictly_increasing());
        assert!(c.t_nondecreasing());
        let prof = imag_along_curve(&c, &s, &cfg).unwrap();
        assert_eq!(prof.values[0], 0.0);
        assert!(prof.strictly_increasing);
    }

    #[test]
    fn interior_seed_starts_on_left_or_bottom_edge() {
        let s = setup();
        let p = s.strip_halfwidth().to_f64();
        let cfg = QuadConfig::default();
        let c = trace_level_curve(&s, (1.5, 0.4 * p), DEFAULT_STEP, &cfg).unwrap();
        assert!(c.start.0 == 1.0 || c.start.1 == 0.0);
        assert!(c.start.0 <= 1.5 && 1.5 <= c.end.0);
        assert!(c.v_strictly_increasing());
        let at_seed = c.interpolate(1.5).unwrap();
        assert!((at_seed - 0.4 * p).abs() < 1e-3);
        let exact = level_height(&s, c.level, 1.5, &cfg).unwrap().unwrap();
        assert!((exact - 0.4 * p).abs() < 1e-9, "{exact}");
    }

    #[test]
    fn level_height_outside_range() {
        let s = setup();
        let cfg = QuadConfig::default();
        assert_eq!(level_height(&s, 1.0, 1.5, &cfg).unwrap(), None);
        assert_eq!(level_height(&s, 1e6, 1.5, &cfg).unwrap(), None);
        assert!(level_height(&s, 10.0, 0.5, &cfg).is_err());
    }
}
