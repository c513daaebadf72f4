//! Cross-module invariants over a grid of scenes.

use sphera::analysis::{
    default_suite, level_height, sign_map_i, solve_real, trace_level_curve, GridSpec, DEFAULT_STEP,
};
use sphera::transform::evaluate;
use sphera::{ComplexExponent, QuadConfig, SphereSetup};

const DIMENSIONS: [u32; 4] = [1, 2, 3, 5];
const RATIOS: [f64; 5] = [0.1, 0.5, 0.9, 1.5, 10.0];

#[test]
fn default_suite_passes_everywhere() {
    let cfg = QuadConfig::default();
    for k in DIMENSIONS {
        for ratio in RATIOS {
            let s = SphereSetup::new(k, 1.0, ratio).unwrap();
            let reports = default_suite(&s, &cfg).unwrap();
            assert!(!reports.is_empty());
            for rep in reports {
                assert!(rep.pass, "k={k}, r={ratio}: {rep:?}");
                assert_eq!(rep.pass, rep.residual_abs <= rep.tolerance);
            }
        }
    }
}

#[test]
fn real_inversion_round_trips() {
    let cfg = QuadConfig::default();
    for k in DIMENSIONS {
        for ratio in RATIOS {
            let s = SphereSetup::new(k, 1.0, ratio).unwrap();
            let half = 0.5 * f64::from(k);
            for offset in [0.4, 1.3] {
                let nu = evaluate(&s, ComplexExponent::real(half + offset), &cfg).unwrap().w;
                let roots = solve_real(&s, nu, &cfg).unwrap();
                assert_eq!(roots.roots[0] + roots.roots[1], f64::from(k));
                let back = evaluate(&s, ComplexExponent::real(roots.lambda), &cfg).unwrap().w;
                assert!((back - nu).abs() <= 1e-9 * nu.abs(), "k={k}, r={ratio}: {back} vs {nu}");
            }
        }
    }
}

#[test]
fn level_curves_at_distinct_levels_stay_ordered() {
    let cfg = QuadConfig::default();
    for (k, r) in [(1, 0.9), (3, 2.0)] {
        let s = SphereSetup::new(k, 1.0, r).unwrap();
        let p = s.strip_halfwidth().to_f64();
        let half = 0.5 * f64::from(k);
        let low = trace_level_curve(&s, (half + 0.5, 0.3 * p), DEFAULT_STEP, &cfg).unwrap();
        let high = trace_level_curve(&s, (half + 1.0, 0.3 * p), DEFAULT_STEP, &cfg).unwrap();
        assert!(high.level > low.level);
        for c in [&low, &high] {
            assert!(c.v_strictly_increasing() && c.t_nondecreasing());
            assert!(c.max_abs_residual() <= 1e-8);
            // dv/dt > 0 between every pair of stored points
            assert!(c.points.windows(2).all(|w| w[1].t > w[0].t || w[0].v == 0.0 || w[0].t == half));
        }
        let (lo, hi) = (high.start.0.max(low.start.0), low.end.0);
        for n in 1..10 {
            let t = lo + (hi - lo) * f64::from(n) / 10.0;
            if let (Some(vl), Some(vh)) = (
                level_height(&s, low.level, t, &cfg).unwrap(),
                level_height(&s, high.level, t, &cfg).unwrap(),
            ) {
                // W grows with ξ and falls with ζ: the higher level sits lower
                assert!(vh < vl, "k={k}: t={t}, {vh} ≥ {vl}");
            }
        }
    }
}

#[test]
fn equal_seeds_trace_identical_curves() {
    let cfg = QuadConfig::default();
    let s = SphereSetup::new(2, 1.0, 0.5).unwrap();
    let p = s.strip_halfwidth().to_f64();
    let a = trace_level_curve(&s, (1.5, 0.4 * p), DEFAULT_STEP, &cfg).unwrap();
    // a second seed on the same curve, found through the level itself
    let t = 0.5 * (a.start.0 + a.end.0);
    let v = level_height(&s, a.level, t, &cfg).unwrap().unwrap();
    let b = trace_level_curve(&s, (t, v), DEFAULT_STEP, &cfg).unwrap();
    assert!((a.level - b.level).abs() <= 1e-10 * a.level);
    assert!((a.start.0 - b.start.0).abs() <= 1e-8 && (a.start.1 - b.start.1).abs() <= 1e-8);
    assert!((a.end.0 - b.end.0).abs() <= 1e-8);
    for pt in &b.points {
        let va = level_height(&s, a.level, pt.t, &cfg).unwrap().unwrap();
        assert!((va - pt.v).abs() <= 1e-8, "t={}: {va} vs {}", pt.t, pt.v);
    }
}

#[test]
fn sign_maps_are_antisymmetric() {
    let cfg = QuadConfig::default();
    for k in [1, 2, 3] {
        for ratio in [0.5, 1.5] {
            let s = SphereSetup::new(k, 1.0, ratio).unwrap();
            let map = sign_map_i(&s, &GridSpec::default_for(&s), &cfg).unwrap();
            assert!(map.zero_set_on_axes(), "k={k}, r={ratio}");
            assert!(map.antisymmetric(), "k={k}, r={ratio}");
        }
    }
}
