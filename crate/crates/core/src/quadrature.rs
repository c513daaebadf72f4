//! Zonal reduction of sphere integrals and the adaptive 1-D driver behind it.
//!
//! For an integrand that depends on `y ∈ S^k(R)` only through the polar angle,
//!
//! ```text
//! ∫_{S^k} h dS_y = |σ_{k−1}| R^k ∫_0^π h(θ) sin^{k−1}θ dθ.
//! ```
//!
//! The driver integrates in the supplementary angle `u = π − θ`, where
//! `|x − y|² = (R − r)² + 4Rr sin²(u/2)` keeps full relative accuracy at the
//! peak of `ω` (`θ = π`, i.e. `u = 0`). Panels come from a phase-bounded
//! initial partition and are refined by bisecting the panel with the largest
//! Gauss–Kronrod error estimate. Complex integrands are carried as one
//! complex value so real and imaginary parts share the same panels.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result, SpheraError};
use crate::ratio::SphereSetup;

/// Tolerances and budgets for one adaptive integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_evals: usize,
    /// Largest phase change `|ζ|·Δ ln ω` allowed inside one initial panel.
    pub oscillation_cap: f64,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_evals: 10_000_000,
            oscillation_cap: PI / 4.0,
        }
    }
}

impl QuadConfig {
    /// Default configuration with both tolerances set to `tol`.
    pub fn with_tolerance(tol: f64) -> Self {
        Self {
            abs_tol: tol,
            rel_tol: tol,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) {
            return domain("quadrature tolerances must be positive");
        }
        if self.max_evals < 100 {
            return domain("max_evals must be at least 100");
        }
        if !(self.oscillation_cap > 0.0) || !self.oscillation_cap.is_finite() {
            return domain("oscillation_cap must be positive and finite");
        }
        Ok(())
    }

    /// Both tolerances scaled by `factor`.
    pub fn tightened(&self, factor: f64) -> Self {
        Self {
            abs_tol: self.abs_tol * factor,
            rel_tol: self.rel_tol * factor,
            ..*self
        }
    }
}

/// Outcome of one adaptive integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadResult {
    #[serde(with = "crate::wire::complex")]
    pub value: Complex64,
    pub abs_error: f64,
    pub evals: usize,
    pub converged: bool,
}

impl QuadResult {
    pub fn re(&self) -> f64 {
        self.value.re
    }

    pub fn im(&self) -> f64 {
        self.value.im
    }

    /// Turns a non-converged result into an error.
    pub fn require_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(SpheraError::NonConvergence {
                abs_error: self.abs_error,
                evals: self.evals,
            })
        }
    }

    fn scaled(self, factor: f64) -> Self {
        Self {
            value: self.value * factor,
            abs_error: self.abs_error * factor.abs(),
            ..self
        }
    }
}

// 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        scaled = res_asc * (200.0 * scaled / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    err: f64,
}

/// One G7–K15 panel: Kronrod value and the rescaled Gauss–Kronrod error,
/// summed over the real and imaginary parts.
fn gk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs_re = WGK[7] * fc.re.abs();
    let mut abs_im = WGK[7] * fc.im.abs();
    let mut values = [(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)); 7];
    for (j, slot) in values.iter_mut().enumerate() {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        kronrod += (f1 + f2) * WGK[j];
        if j % 2 == 1 {
            gauss += (f1 + f2) * WG[j / 2];
        }
        abs_re += WGK[j] * (f1.re.abs() + f2.re.abs());
        abs_im += WGK[j] * (f1.im.abs() + f2.im.abs());
        *slot = (f1, f2);
    }
    let mean = kronrod * 0.5;
    let mut asc_re = WGK[7] * (fc.re - mean.re).abs();
    let mut asc_im = WGK[7] * (fc.im - mean.im).abs();
    for (j, (f1, f2)) in values.iter().enumerate() {
        asc_re += WGK[j] * ((f1.re - mean.re).abs() + (f2.re - mean.re).abs());
        asc_im += WGK[j] * ((f1.im - mean.im).abs() + (f2.im - mean.im).abs());
    }
    let h = half.abs();
    let diff = (kronrod - gauss) * half;
    let err = rescale_error(diff.re, abs_re * h, asc_re * h)
        + rescale_error(diff.im, abs_im * h, asc_im * h);
    Panel {
        a,
        b,
        value: kronrod * half,
        err,
    }
}

fn neumaier_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

fn total<'a>(panels: impl Iterator<Item = &'a Panel> + Clone) -> (Complex64, f64) {
    let re = neumaier_sum(panels.clone().map(|p| p.value.re));
    let im = neumaier_sum(panels.clone().map(|p| p.value.im));
    let err = panels.map(|p| p.err).sum();
    (Complex64::new(re, im), err)
}

/// Heap entry for refinement: larger error first, then smaller left endpoint.
struct Candidate {
    err: f64,
    a: f64,
    index: usize,
}

impl Candidate {
    fn new(panel: &Panel, index: usize) -> Self {
        Self {
            err: panel.err,
            a: panel.a,
            index,
        }
    }
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err
            .total_cmp(&other.err)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

/// Adaptive Gauss–Kronrod integration of `f` over `[breaks[0], breaks[last]]`,
/// starting from the given partition.
///
/// Refinement always bisects the first panel with the largest error estimate
/// and sums panels in positional order, so results are bit-reproducible.
pub fn integrate_interval<F: Fn(f64) -> Complex64>(
    f: F,
    breaks: &[f64],
    config: &QuadConfig,
) -> Result<QuadResult> {
    config.validate()?;
    if breaks.len() < 2 || breaks.windows(2).any(|w| !(w[1] > w[0])) {
        return domain("breakpoints must be strictly increasing with at least two entries");
    }
    let mut panels: Vec<Panel> = breaks.windows(2).map(|w| gk15(&f, w[0], w[1])).collect();
    let mut evals = 15 * panels.len();
    // live panels are ordered by their left endpoint, so the heap key
    // (error, −a) selects the first panel carrying the largest error
    let mut heap: BinaryHeap<Candidate> = panels
        .iter()
        .enumerate()
        .map(|(i, p)| Candidate::new(p, i))
        .collect();
    let mut live = vec![true; panels.len()];
    let (mut value, mut err) = total(panels.iter());
    let mut since_exact = 0usize;
    let mut converged;
    loop {
        let tol = config.abs_tol.max(config.rel_tol * value.norm());
        if err <= 2.0 * tol || since_exact >= 1024 {
            // re-anchor the running sums against drift
            (value, err) = total(panels.iter().zip(&live).filter(|(_, l)| **l).map(|(p, _)| p));
            since_exact = 0;
        }
        let tol = config.abs_tol.max(config.rel_tol * value.norm());
        converged = err <= tol && value.re.is_finite() && value.im.is_finite();
        if converged || evals + 30 > config.max_evals {
            break;
        }
        let Some(worst) = heap.pop() else { break };
        let Panel { a, b, value: v, err: e } = panels[worst.index];
        let mid = 0.5 * (a + b);
        if !(mid > a && mid < b) || (b - a) <= 8.0 * f64::EPSILON * a.abs().max(b.abs()) {
            break;
        }
        let left = gk15(&f, a, mid);
        let right = gk15(&f, mid, b);
        evals += 30;
        value += left.value + right.value - v;
        err += left.err + right.err - e;
        live[worst.index] = false;
        for child in [left, right] {
            heap.push(Candidate::new(&child, panels.len()));
            panels.push(child);
            live.push(true);
        }
        since_exact += 1;
    }
    let mut kept: Vec<Panel> = panels
        .into_iter()
        .zip(live)
        .filter_map(|(p, l)| l.then_some(p))
        .collect();
    kept.sort_by(|x, y| x.a.total_cmp(&y.a));
    let (value, abs_error) = total(kept.iter());
    Ok(QuadResult {
        value,
        abs_error,
        evals,
        converged,
    })
}

/// Quantities available at one node of the zonal reduction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZonalPoint {
    /// `θ = π − ∠xOy`.
    pub theta: f64,
    pub cos_theta: f64,
    pub sin_theta: f64,
    pub omega: f64,
    pub ln_omega: f64,
    /// `|x − y|²`.
    pub distance_sq: f64,
}

impl ZonalPoint {
    /// Node at supplementary angle `u = π − θ`.
    fn at_supplement(setup: &SphereSetup, u: f64) -> Self {
        let big_r = setup.radius();
        let r = setup.r();
        let s = (0.5 * u).sin();
        let gap = (big_r - r).abs();
        let distance_sq = gap * gap + 4.0 * big_r * r * s * s;
        let ln_omega = if r == 0.0 {
            0.0
        } else {
            gap.ln() + (big_r + r).ln() - distance_sq.ln()
        };
        let omega = if r == 0.0 { 1.0 } else { gap * (big_r + r) / distance_sq };
        Self {
            theta: PI - u,
            cos_theta: -u.cos(),
            sin_theta: u.sin(),
            omega,
            ln_omega,
            distance_sq,
        }
    }
}

/// Width below which geometric grading towards the peak stops.
const GRADING_FLOOR: f64 = 1e-14 * PI;

/// Initial partition of `[0, π]` in the supplementary angle `u = π − θ`.
fn supplement_breaks(setup: &SphereSetup, zeta: f64, cap: f64) -> Vec<f64> {
    let ups = setup.upsilon();
    if ups == 0.0 {
        return vec![0.0, PI];
    }
    let span = setup.log_span();
    let total_phase = 2.0 * span * zeta.abs().max(1.0);
    let n = ((total_phase / cap).ceil() as usize).max(1);

    let big_r = setup.radius();
    let r = setup.r();
    let gap = (big_r - r).abs();
    let mut breaks = Vec::with_capacity(n + 64);
    breaks.push(0.0);
    // Equal steps in ln ω, from ln ω_max = span down to −span.
    for j in 1..n {
        let ln_w = span - 2.0 * span * (j as f64) / (n as f64);
        // |x − y|² = |R² − r²|/ω = (R − r)² + 4Rr sin²(u/2)
        let d2 = gap * (big_r + r) * (-ln_w).exp();
        let s2 = ((d2 - gap * gap) / (4.0 * big_r * r)).clamp(0.0, 1.0);
        let u = 2.0 * s2.sqrt().asin();
        if u > *breaks.last().unwrap() && u < PI {
            breaks.push(u);
        }
    }
    breaks.push(PI);

    if ups > 0.9 {
        let first = breaks[1];
        let mut graded = Vec::new();
        let mut w = 0.5 * first;
        while w >= GRADING_FLOOR {
            graded.push(w);
            w *= 0.5;
        }
        graded.reverse();
        breaks.splice(1..1, graded);
    }
    breaks
}

/// Initial panels `[θ_lo, θ_hi]` covering `[0, π]` for an integrand whose
/// phase is `ζ ln ω(θ)`.
///
/// Each panel carries a variation of `ln ω` of at most
/// `oscillation_cap / max(|ζ|, 1)`; for `Υ > 0.9` the panels next to the peak
/// at `θ = π` are additionally graded with ratio 1/2.
pub fn adaptive_segments(setup: &SphereSetup, zeta: f64, config: &QuadConfig) -> Vec<(f64, f64)> {
    let breaks = supplement_breaks(setup, zeta, config.oscillation_cap);
    let mut panels: Vec<(f64, f64)> = breaks.windows(2).map(|w| (PI - w[1], PI - w[0])).collect();
    panels.reverse();
    panels
}

/// `∫_{S^k(R)} h dS_y` for an integrand depending only on the polar angle.
///
/// `zeta` is the phase rate of `h` in `ln ω`; it only shapes the initial
/// partition.
pub fn integrate_zonal<H>(setup: &SphereSetup, zeta: f64, h: H, config: &QuadConfig) -> Result<QuadResult>
where
    H: Fn(&ZonalPoint) -> Complex64,
{
    config.validate()?;
    let breaks = supplement_breaks(setup, zeta, config.oscillation_cap);
    let k = setup.k();
    let prefactor = setup.sigma_km1() * setup.radius().powi(k as i32);
    let weight_power = (k - 1) as i32;
    let inner = QuadConfig {
        abs_tol: config.abs_tol / prefactor,
        ..*config
    };
    let result = integrate_interval(
        |u| {
            let pt = ZonalPoint::at_supplement(setup, u);
            h(&pt) * pt.sin_theta.powi(weight_power)
        },
        &breaks,
        &inner,
    )?;
    Ok(result.scaled(prefactor))
}

/// `∫_{S^k(R)} g(ω(x, y)) dS_y`.
pub fn integrate_sphere<G>(setup: &SphereSetup, g: G, config: &QuadConfig) -> Result<QuadResult>
where
    G: Fn(f64) -> Complex64,
{
    integrate_zonal(setup, 0.0, |pt| g(pt.omega), config)
}

/// `∫_{S^k(R)} |x − y|^{−α} dS_y`, with `|x − y|² = R² + r² + 2Rr cos θ`.
pub fn integrate_distance_power(
    setup: &SphereSetup,
    alpha: Complex64,
    config: &QuadConfig,
) -> Result<QuadResult> {
    if !alpha.re.is_finite() || !alpha.im.is_finite() {
        return domain("exponent must be finite");
    }
    let half = -0.5 * alpha;
    integrate_zonal(
        setup,
        0.5 * alpha.im,
        |pt| (half * pt.distance_sq.ln()).exp(),
        config,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn setup(k: u32, radius: f64, r: f64) -> SphereSetup {
        SphereSetup::new(k, radius, r).unwrap()
    }

    fn one(_: f64) -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    #[test]
    fn constant_integrand_gives_area() {
        let cfg = QuadConfig::default();
        let res = integrate_sphere(&setup(2, 1.0, 0.5), one, &cfg).unwrap();
        assert!(res.converged);
        assert!(res.evals > 0);
        assert_relative_eq!(res.re(), 4.0 * PI, max_relative = 1e-13);
        for k in 1..6 {
            let s = setup(k, 1.7, 0.3);
            let res = integrate_sphere(&s, one, &cfg).unwrap();
            assert_relative_eq!(res.re(), s.area(), max_relative = 1e-12);
        }
    }

    #[test]
    fn omega_integrand_k2_closed_form() {
        let res = integrate_sphere(&setup(2, 1.0, 0.5), |w| Complex64::new(w, 0.0), &QuadConfig::default())
            .unwrap();
        // 3π ln 3
        assert_relative_eq!(res.re(), 10.354_176_885_669_607_984, max_relative = 1e-12);
    }

    #[test]
    fn centre_point_makes_omega_one() {
        let s = setup(2, 1.0, 0.0);
        let alpha = Complex64::new(2.3, -1.1);
        let res = integrate_zonal(&s, alpha.im, |pt| (alpha * pt.ln_omega).exp(), &QuadConfig::default())
            .unwrap();
        assert_relative_eq!(res.re(), 4.0 * PI, max_relative = 1e-13);
        assert!(res.im().abs() < 1e-13);
    }

    #[test]
    fn distance_power_shell_theorem() {
        let cfg = QuadConfig::default();
        let s = setup(2, 1.0, 0.5);
        let a0 = integrate_distance_power(&s, Complex64::new(0.0, 0.0), &cfg).unwrap();
        assert_relative_eq!(a0.re(), 4.0 * PI, max_relative = 1e-13);
        let inside = integrate_distance_power(&s, Complex64::new(1.0, 0.0), &cfg).unwrap();
        assert_relative_eq!(inside.re(), 4.0 * PI, max_relative = 1e-11);
        let outside = integrate_distance_power(&setup(2, 1.0, 2.0), Complex64::new(1.0, 0.0), &cfg).unwrap();
        assert_relative_eq!(outside.re(), 2.0 * PI, max_relative = 1e-11);
        let s3 = setup(3, 2.0, 1.0);
        let area = integrate_distance_power(&s3, Complex64::new(0.0, 0.0), &cfg).unwrap();
        assert_relative_eq!(area.re(), s3.area(), max_relative = 1e-13);
    }

    #[test]
    fn segment_counts() {
        let cfg = QuadConfig::default();
        let smooth = adaptive_segments(&setup(2, 1.0, 0.5), 0.0, &cfg);
        assert!(smooth.len() < 10, "{} panels", smooth.len());
        assert_eq!(smooth.first().unwrap().0, 0.0);
        assert_eq!(smooth.last().unwrap().1, PI);
        assert!(smooth.windows(2).all(|w| w[0].1 == w[1].0));

        let osc = adaptive_segments(&setup(2, 1.0, 0.5), 50.0, &cfg);
        // total phase ζ·2 ln 3 split into pieces of at most π/4
        let expected = (50.0 * 2.0 * 3f64.ln() / (PI / 4.0)).ceil() as usize;
        assert_eq!(osc.len(), expected);
        let s = setup(2, 1.0, 0.5);
        for &(lo, hi) in &osc {
            let wl = crate::ratio::omega_theta(&s, lo).unwrap().ln();
            let wh = crate::ratio::omega_theta(&s, hi).unwrap().ln();
            assert!((wh - wl) * 50.0 <= cfg.oscillation_cap * (1.0 + 1e-9));
        }
    }

    #[test]
    fn near_singular_panels_concentrate_at_peak() {
        let cfg = QuadConfig::default();
        let panels = adaptive_segments(&setup(2, 1.0, 0.99), 0.0, &cfg);
        let near_peak = panels.iter().filter(|p| p.0 > 0.9 * PI).count();
        assert!(near_peak * 2 > panels.len());
        let last = panels.last().unwrap();
        assert!(last.1 - last.0 < 1e-12);
    }

    /// ∫_0^π cos^n θ sin θ dθ = 2/(n+1) for even n, 0 for odd n.
    #[test]
    fn polynomial_exactness_k2() {
        let cfg = QuadConfig::with_tolerance(1e-13);
        for r in [0.2, 0.5, 0.95] {
            let s = setup(2, 1.0, r);
            for n in 0..=10 {
                let res = integrate_zonal(&s, 0.0, |pt| Complex64::new(pt.cos_theta.powi(n), 0.0), &cfg).unwrap();
                let exact = if n % 2 == 0 { 2.0 / f64::from(n + 1) } else { 0.0 } * 2.0 * PI;
                assert!((res.re() - exact).abs() <= 1e-12, "n={n}, r={r}: {} vs {exact}", res.re());
            }
        }
    }

    fn closed_form_k2(radius: f64, r: f64, b: f64) -> f64 {
        let span = ((radius + r) / (radius - r).abs()).ln();
        let pre = 2.0 * PI * radius / r * (radius * radius - r * r).abs();
        if b == 0.0 {
            pre * span
        } else {
            pre * (b * span).sin() / b
        }
    }

    fn k2_cosine_moment(s: &SphereSetup, b: f64, cfg: &QuadConfig) -> QuadResult {
        integrate_zonal(s, b, |pt| Complex64::new(pt.omega * (b * pt.ln_omega).cos(), 0.0), cfg).unwrap()
    }

    #[test]
    fn error_estimates_are_honest() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let cfg = QuadConfig::default();
        let trials = 300;
        let mut honest = 0;
        for _ in 0..trials {
            let radius = rng.random_range(0.5..3.0);
            let ratio = if rng.random_bool(0.5) {
                rng.random_range(0.05..0.97)
            } else {
                rng.random_range(1.03..8.0)
            };
            let b = rng.random_range(0.0..6.0);
            let s = setup(2, radius, ratio * radius);
            let res = k2_cosine_moment(&s, b, &cfg);
            let truth = closed_form_k2(radius, ratio * radius, b);
            if (res.re() - truth).abs() <= 10.0 * res.abs_error {
                honest += 1;
            }
        }
        assert!(honest * 100 >= trials * 99, "{honest}/{trials}");
    }

    #[test]
    fn deterministic_bits() {
        let s = setup(3, 1.3, 0.9);
        let cfg = QuadConfig::default();
        let alpha = Complex64::new(0.7, 2.5);
        let run = || integrate_zonal(&s, alpha.im, |pt| (alpha * pt.ln_omega).exp(), &cfg).unwrap();
        let a = run();
        let b = run();
        assert_eq!(a.value.re.to_bits(), b.value.re.to_bits());
        assert_eq!(a.value.im.to_bits(), b.value.im.to_bits());
        assert_eq!(a.abs_error.to_bits(), b.abs_error.to_bits());
        assert_eq!(a.evals, b.evals);
    }

    #[test]
    fn refinement_is_consistent() {
        let base = QuadConfig::with_tolerance(1e-6);
        for (r, b) in [(0.5, 1.0), (0.9, 3.0), (0.99, 0.5), (4.0, 2.0)] {
            let s = setup(2, 1.0, r);
            let coarse = k2_cosine_moment(&s, b, &base);
            let fine = k2_cosine_moment(&s, b, &base.tightened(0.5));
            assert!(
                (coarse.re() - fine.re()).abs() <= coarse.abs_error + fine.abs_error,
                "r={r} b={b}"
            );
        }
    }

    #[test]
    fn converged_results_meet_tolerance() {
        let cfg = QuadConfig::default();
        let s = setup(2, 1.0, 0.9);
        let res = k2_cosine_moment(&s, 2.0, &cfg);
        assert!(res.converged);
        assert!(res.abs_error <= cfg.abs_tol.max(cfg.rel_tol * res.value.norm()));
    }

    #[test]
    fn budget_exhaustion_is_flagged() {
        let cfg = QuadConfig {
            abs_tol: 1e-300,
            rel_tol: 1e-300,
            max_evals: 200,
            ..QuadConfig::default()
        };
        let res = integrate_sphere(&setup(2, 1.0, 0.5), |w| Complex64::new(w.sqrt(), 0.0), &cfg).unwrap();
        assert!(!res.converged);
        assert!(res.evals <= 200);
        assert!(matches!(res.require_converged(), Err(SpheraError::NonConvergence { .. })));
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let s = setup(2, 1.0, 0.5);
        let bad = QuadConfig { abs_tol: 0.0, ..QuadConfig::default() };
        assert!(integrate_sphere(&s, one, &bad).is_err());
        let bad = QuadConfig { max_evals: 10, ..QuadConfig::default() };
        assert!(integrate_sphere(&s, one, &bad).is_err());
        assert!(integrate_interval(|_| Complex64::new(1.0, 0.0), &[1.0, 0.0], &QuadConfig::default()).is_err());
    }

    #[test]
    fn interval_driver_handles_peaks() {
        // ∫_0^{2π} dθ/(a − b sin θ) = 2π/√(a² − b²)
        let (a, b) = (1.1, 1.0);
        let breaks: Vec<f64> = (0..=8).map(|i| 2.0 * PI * f64::from(i) / 8.0).collect();
        let res = integrate_interval(
            |t| Complex64::new(1.0 / (a - b * t.sin()), 0.0),
            &breaks,
            &QuadConfig::default(),
        )
        .unwrap();
        assert_relative_eq!(res.re(), 2.0 * PI / (a * a - b * b).sqrt(), max_relative = 1e-11);
    }
}
