use std::fmt::Write as _;

use num_complex::Complex64;
use serde_json::json;
use sphera::analysis::{
    closed_form_k2, default_suite, imag_along_curve, picard_search, sign_map_i, solve_real,
    trace_level_curve, verify_distance_identity, verify_imag_vanishing, verify_k1_trig,
    verify_reflection, GridSpec, VerificationReport,
};
use sphera::quadrature::integrate_distance_power;
use sphera::ratio::{path_limit, ratio_from_points, ExtendedReal, PathSpec, PathVariant, TangentSide};
use sphera::transform::{alpha_moment, evaluate, taylor};
use sphera::{ComplexExponent, QuadConfig, SphereSetup, SpheraError};

use crate::cli::{
    FArgs, IdentityName, IntegrateArgs, LimitsArgs, OmegaArgs, OptionalSetupArgs, PicardArgs,
    SetupArgs, SideName, SignmapArgs, SolveArgs, TaylorArgs, TraceArgs, VariantName, VerifyArgs,
};
use crate::output::{grid_table, kv_table, num, to_value, Csv, Emission, Status};

/// A failed run, classified by the exit code it maps to.
#[derive(Debug)]
pub enum Failure {
    /// Invalid input: exit code 1.
    Usage(String),
    /// Numerical failure or I/O trouble: exit code 2.
    Numeric(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Numeric(_) => 2,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Numeric(m) => m,
        }
    }
}

impl From<SpheraError> for Failure {
    fn from(e: SpheraError) -> Self {
        match e {
            SpheraError::Domain(_) | SpheraError::DegeneratePair | SpheraError::InversionUndefined => {
                Failure::Usage(e.to_string())
            }
            SpheraError::NoSolution { .. }
            | SpheraError::NonConvergence { .. }
            | SpheraError::CorrectorFailure { .. } => Failure::Numeric(e.to_string()),
        }
    }
}

pub type Outcome = Result<Emission, Failure>;

fn usage<T>(msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure::Usage(msg.into()))
}

fn build_setup(s: &SetupArgs) -> Result<SphereSetup, Failure> {
    Ok(SphereSetup::new(s.k, s.radius, s.r)?)
}

fn optional_setup(s: &OptionalSetupArgs) -> Result<SphereSetup, Failure> {
    match (s.k, s.radius, s.r) {
        (Some(k), Some(radius), Some(r)) => Ok(SphereSetup::new(k, radius, r)?),
        _ => usage("this check needs --k, --R and --r"),
    }
}

fn status_of(converged: bool) -> Status {
    if converged {
        Status::Ok
    } else {
        Status::NotConverged
    }
}

fn extended(x: ExtendedReal) -> String {
    match x {
        ExtendedReal::Finite(v) => num(v),
        ExtendedReal::PosInfinity => "inf".into(),
    }
}

fn vector(v: &[f64]) -> String {
    v.iter().map(|c| num(*c)).collect::<Vec<_>>().join(";")
}

fn complex(z: Complex64) -> String {
    format!("{}{:+}i", num(z.re), z.im)
}

pub fn omega(args: &OmegaArgs) -> Outcome {
    let b = ratio_from_points(&args.x, &args.y)?;
    let mut csv = Csv::new(&["omega", "l", "q", "x_star", "y_star"]);
    csv.push(vec![num(b.omega), num(b.l), num(b.q), vector(&b.x_star), vector(&b.y_star)]);
    let table = kv_table(&[
        ("omega", num(b.omega)),
        ("l = |x − y*|", num(b.l)),
        ("q = |x − y|", num(b.q)),
        ("x*", vector(&b.x_star)),
        ("y*", vector(&b.y_star)),
    ]);
    Ok(Emission {
        result: to_value(&b),
        csv,
        table,
        status: Status::Ok,
    })
}

pub fn integrate(args: &IntegrateArgs, cfg: &QuadConfig) -> Outcome {
    let setup = build_setup(&args.setup)?;
    let alpha = ComplexExponent::new(args.xi, args.zeta)?;
    let quad = if args.distance {
        if args.moment != 0 {
            return usage("--moment does not apply to --distance");
        }
        integrate_distance_power(&setup, alpha.to_complex(), cfg)?
    } else {
        alpha_moment(&setup, alpha, args.moment, cfg)?
    };
    let mut csv = Csv::new(&["re", "im", "abs_error", "evals", "converged"]);
    csv.push(vec![
        num(quad.re()),
        num(quad.im()),
        num(quad.abs_error),
        quad.evals.to_string(),
        quad.converged.to_string(),
    ]);
    let table = kv_table(&[
        ("value", complex(quad.value)),
        ("abs_error", num(quad.abs_error)),
        ("evals", quad.evals.to_string()),
        ("converged", quad.converged.to_string()),
    ]);
    Ok(Emission {
        result: to_value(&quad),
        csv,
        table,
        status: status_of(quad.converged),
    })
}

pub fn transform(args: &FArgs, cfg: &QuadConfig) -> Outcome {
    let setup = build_setup(&args.setup)?;
    let xis: Vec<f64> = match (args.xi, args.xi_from, args.xi_to) {
        (Some(xi), None, None) => vec![xi],
        (None, Some(from), Some(to)) => {
            if args.points < 2 {
                return usage("a profile needs at least 2 points");
            }
            let n = args.points - 1;
            (0..=n)
                .map(|i| if i == n { to } else { from + (to - from) * i as f64 / n as f64 })
                .collect()
        }
        _ => return usage("give either --xi or both --xi-from and --xi-to"),
    };
    let mut csv = Csv::new(&["xi", "zeta", "W", "I", "abs_error", "evals"]);
    let mut samples = Vec::with_capacity(xis.len());
    let mut converged = true;
    for xi in xis {
        let f = evaluate(&setup, ComplexExponent::new(xi, args.zeta)?, cfg)?;
        converged &= f.quad.converged;
        csv.push(vec![
            num(xi),
            num(args.zeta),
            num(f.w),
            num(f.i),
            num(f.abs_error()),
            f.quad.evals.to_string(),
        ]);
        samples.push(json!({
            "alpha": { "re": xi, "im": args.zeta },
            "W": f.w,
            "I": f.i,
            "abs_error": f.abs_error(),
            "evals": f.quad.evals,
            "converged": f.quad.converged,
        }));
    }
    let strip = to_value(&setup.strip_halfwidth());
    let (result, table) = if args.xi.is_some() {
        let row = &csv.rows[0];
        let table = kv_table(&[
            ("W", row[2].clone()),
            ("I", row[3].clone()),
            ("abs_error", row[4].clone()),
            ("evals", row[5].clone()),
            ("strip half-width p", extended_strip(&setup)),
        ]);
        let mut value = samples.pop().expect("one sample");
        value["strip_halfwidth"] = strip;
        (value, table)
    } else {
        (json!({ "samples": samples, "strip_halfwidth": strip }), grid_table(&csv))
    };
    Ok(Emission {
        result,
        csv,
        table,
        status: status_of(converged),
    })
}

fn extended_strip(setup: &SphereSetup) -> String {
    setup.strip_halfwidth().finite().map_or_else(|| "inf".into(), num)
}

fn required(name: &str, v: Option<f64>) -> Result<f64, Failure> {
    v.ok_or_else(|| Failure::Usage(format!("this check needs --{name}")))
}

fn single_identity(args: &VerifyArgs, id: IdentityName, cfg: &QuadConfig) -> Result<VerificationReport, Failure> {
    let report = match id {
        IdentityName::Reflection => {
            let setup = optional_setup(&args.setup)?;
            let alpha = ComplexExponent::new(required("xi", args.xi)?, args.zeta)?;
            verify_reflection(&setup, alpha, cfg)?
        }
        IdentityName::DistancePower => {
            let setup = optional_setup(&args.setup)?;
            let alpha = ComplexExponent::new(required("xi", args.xi)?, args.zeta)?;
            verify_distance_identity(&setup, alpha, cfg)?
        }
        IdentityName::ImagVanishing => {
            let setup = optional_setup(&args.setup)?;
            verify_imag_vanishing(&setup, required("b", args.b)?, args.m, cfg)?
        }
        IdentityName::ClosedFormK2 => {
            let setup = optional_setup(&args.setup)?;
            closed_form_k2(&setup, required("b", args.b)?, cfg)?
        }
        IdentityName::K1Trig => {
            let p = Complex64::new(required("p-re", args.p_re)?, args.p_im);
            verify_k1_trig(p, required("trig-a", args.trig_a)?, required("trig-b", args.trig_b)?, cfg)?
        }
    };
    Ok(report)
}

pub fn verify(args: &VerifyArgs, cfg: &QuadConfig) -> Outcome {
    let reports = match (args.suite, args.identity) {
        (Some(_), _) => default_suite(&optional_setup(&args.setup)?, cfg)?,
        (None, Some(id)) => vec![single_identity(args, id, cfg)?],
        (None, None) => return usage("give --suite or --identity"),
    };
    let mut csv = Csv::new(&[
        "identity",
        "parameters",
        "lhs_re",
        "lhs_im",
        "rhs_re",
        "rhs_im",
        "residual_abs",
        "residual_rel",
        "tolerance",
        "pass",
        "inconclusive",
    ]);
    for r in &reports {
        let identity = to_value(&r.identity);
        let params = r
            .parameters
            .iter()
            .map(|(k, v)| format!("{k}={}", num(*v)))
            .collect::<Vec<_>>()
            .join(";");
        csv.push(vec![
            identity.as_str().unwrap_or_default().to_string(),
            params,
            num(r.lhs.re),
            num(r.lhs.im),
            num(r.rhs.re),
            num(r.rhs.im),
            num(r.residual_abs),
            num(r.residual_rel),
            num(r.tolerance),
            r.pass.to_string(),
            r.inconclusive.to_string(),
        ]);
    }
    let all_pass = reports.iter().all(|r| r.pass);
    let any_inconclusive = reports.iter().any(|r| r.inconclusive);
    let status = if !all_pass {
        Status::VerifyFailed
    } else if any_inconclusive {
        Status::NotConverged
    } else {
        Status::Ok
    };
    let mut table = String::new();
    for (r, row) in reports.iter().zip(&csv.rows) {
        let verdict = match (r.pass, r.inconclusive) {
            (true, false) => "PASS",
            (true, true) => "PASS?",
            (false, _) => "FAIL",
        };
        let _ = writeln!(
            table,
            "{verdict:<5}  {:<15} {:<32} residual {:.3e} (tol {:.3e})",
            row[0], row[1], r.residual_abs, r.tolerance
        );
    }
    let passed = reports.iter().filter(|r| r.pass).count();
    let _ = writeln!(table, "{passed}/{} passed", reports.len());
    Ok(Emission {
        result: json!({
            "reports": reports,
            "all_pass": all_pass,
            "any_inconclusive": any_inconclusive,
        }),
        csv,
        table,
        status,
    })
}

pub fn solve(args: &SolveArgs, cfg: &QuadConfig) -> Outcome {
    let setup = build_setup(&args.setup)?;
    let roots = solve_real(&setup, args.nu, cfg)?;
    let mut csv = Csv::new(&["root", "residual", "minimum"]);
    for r in &roots.roots {
        csv.push(vec![num(*r), num(roots.residual), num(roots.minimum)]);
    }
    let table = kv_table(&[
        ("roots", roots.roots.iter().map(|r| num(*r)).collect::<Vec<_>>().join(", ")),
        ("residual", num(roots.residual)),
        ("minimum F(k/2)", num(roots.minimum)),
        ("iterations", roots.iterations.to_string()),
    ]);
    Ok(Emission {
        result: to_value(&roots),
        csv,
        table,
        status: Status::Ok,
    })
}

pub fn trace(args: &TraceArgs, cfg: &QuadConfig) -> Outcome {
    let setup = build_setup(&args.setup)?;
    let Some(p) = setup.strip_halfwidth().finite() else {
        return usage("level curves need a finite strip: r must differ from 0");
    };
    let b = match (args.b, args.b_frac) {
        (Some(b), _) => b,
        (None, Some(f)) => f * p,
        (None, None) => return usage("give --b or --b-frac"),
    };
    let curve = trace_level_curve(&setup, (args.a, b), args.step, cfg)?;
    let imag = imag_along_curve(&curve, &setup, cfg)?;
    let mut csv = Csv::new(&["t", "v", "W_residual", "I"]);
    for pt in &curve.points {
        csv.push(vec![num(pt.t), num(pt.v), num(pt.w_residual), num(pt.i)]);
    }
    let mut table = kv_table(&[
        ("level W(a, b)", num(curve.level)),
        ("start", format!("({}, {})", num(curve.start.0), num(curve.start.1))),
        ("end", format!("({}, {})", num(curve.end.0), num(curve.end.1))),
        ("points", curve.points.len().to_string()),
        ("max |W − level|", num(curve.max_abs_residual())),
        ("I increasing", imag.strictly_increasing.to_string()),
    ]);
    table.push('\n');
    table.push_str(&grid_table(&csv));
    Ok(Emission {
        result: json!({ "curve": curve, "imag": imag }),
        csv,
        table,
        status: Status::Ok,
    })
}

pub fn taylor_series(args: &TaylorArgs, cfg: &QuadConfig) -> Outcome {
    let setup = build_setup(&args.setup)?;
    let series = taylor(&setup, args.order, cfg)?;
    let mut csv = Csv::new(&["m", "coeff", "abs_error"]);
    for (m, (c, e)) in series.coeffs.iter().zip(&series.coeff_errors).enumerate() {
        csv.push(vec![m.to_string(), num(*c), num(*e)]);
    }
    let mut table = grid_table(&csv);
    let mut result = json!({ "series": series });
    let mut status = Status::Ok;
    if let Some(xi) = args.at_xi {
        let alpha = ComplexExponent::new(xi, args.at_zeta)?;
        let approx = series.eval(alpha.to_complex());
        let exact = evaluate(&setup, alpha, cfg)?;
        status = status_of(exact.quad.converged);
        let rel_error = (approx - exact.value()).norm() / exact.value().norm();
        result["evaluation"] = json!({
            "alpha": { "re": xi, "im": args.at_zeta },
            "series": { "re": approx.re, "im": approx.im },
            "exact": { "re": exact.w, "im": exact.i },
            "rel_error": rel_error,
        });
        table.push('\n');
        table.push_str(&kv_table(&[
            ("series", complex(approx)),
            ("F", complex(exact.value())),
            ("relative error", num(rel_error)),
        ]));
    }
    Ok(Emission {
        result,
        csv,
        table,
        status,
    })
}

pub fn signmap(args: &SignmapArgs, cfg: &QuadConfig) -> Outcome {
    let setup = build_setup(&args.setup)?;
    let mut grid = GridSpec::default_for(&setup);
    grid.xi_min = args.xi_min.unwrap_or(grid.xi_min);
    grid.xi_max = args.xi_max.unwrap_or(grid.xi_max);
    grid.n_xi = args.n_xi.unwrap_or(grid.n_xi);
    grid.zeta_min = args.zeta_min.unwrap_or(grid.zeta_min);
    grid.zeta_max = args.zeta_max.unwrap_or(grid.zeta_max);
    grid.n_zeta = args.n_zeta.unwrap_or(grid.n_zeta);
    let map = sign_map_i(&setup, &grid, cfg)?;
    let mut csv = Csv::new(&["xi", "zeta", "I", "abs_error", "sign"]);
    for (j, zeta) in map.zeta.iter().enumerate() {
        for (i, xi) in map.xi.iter().enumerate() {
            csv.push(vec![
                num(*xi),
                num(*zeta),
                num(map.values[j][i]),
                num(map.errors[j][i]),
                map.signs[j][i].to_string(),
            ]);
        }
    }
    // ζ increases upwards, ξ to the right
    let mut table = String::new();
    for (j, zeta) in map.zeta.iter().enumerate().rev() {
        let row: String = map.signs[j]
            .iter()
            .map(|s| match s {
                1 => '+',
                -1 => '-',
                _ => '0',
            })
            .collect();
        let _ = writeln!(table, "{:>10.4}  {row}", zeta);
    }
    let _ = writeln!(
        table,
        "ξ from {} to {} ({} nodes); centre k/2 = {}",
        num(grid.xi_min),
        num(grid.xi_max),
        grid.n_xi,
        num(map.center)
    );
    let zero_set = map.zero_set_on_axes();
    let antisymmetric = map.antisymmetric();
    Ok(Emission {
        result: json!({
            "map": map,
            "zero_set_on_axes": zero_set,
            "antisymmetric": antisymmetric,
        }),
        csv,
        table,
        status: Status::Ok,
    })
}

pub fn limits(args: &LimitsArgs) -> Outcome {
    if args.y.len() < 2 {
        return usage("y needs at least two coordinates");
    }
    let radius = args.y.iter().map(|c| c * c).sum::<f64>().sqrt();
    let setup = SphereSetup::new(args.y.len() as u32 - 1, radius, 0.0)?;
    let variant = match args.variant {
        VariantName::OnSphere => PathVariant::OnSphere,
        VariantName::TangentPlane => PathVariant::TangentPlane,
        VariantName::TangentSphere => PathVariant::TangentSphere {
            delta: required("delta", args.delta)?,
            side: match args.side {
                SideName::Toward => TangentSide::TowardOrigin,
                SideName::Away => TangentSide::AwayFromOrigin,
            },
        },
        VariantName::StraightLine => PathVariant::StraightLine {
            gamma0: required("gamma0", args.gamma0)?,
        },
    };
    let spec = PathSpec {
        variant,
        y: args.y.clone(),
        samples: args.samples,
    };
    let limit = path_limit(&spec, &setup)?;
    let mut csv = Csv::new(&["index", "distance", "omega", "l"]);
    for (i, ((d, w), l)) in limit
        .distances
        .iter()
        .zip(&limit.omegas)
        .zip(&limit.l_values)
        .enumerate()
    {
        csv.push(vec![i.to_string(), num(*d), num(*w), num(*l)]);
    }
    let mut table = kv_table(&[("limit", extended(limit.limit))]);
    table.push('\n');
    table.push_str(&grid_table(&csv));
    Ok(Emission {
        result: to_value(&limit),
        csv,
        table,
        status: Status::Ok,
    })
}

pub fn picard(args: &PicardArgs, cfg: &QuadConfig) -> Outcome {
    let setup = build_setup(&args.setup)?;
    let beta = ComplexExponent::new(args.beta_xi, args.beta_zeta)?;
    let found = picard_search(&setup, beta, args.rho, cfg)?;
    let mut csv = Csv::new(&["re", "im", "residual", "in_strip", "origin"]);
    for r in &found.roots {
        csv.push(vec![
            num(r.alpha.re),
            num(r.alpha.im),
            num(r.residual),
            r.in_strip.to_string(),
            to_value(&r.origin).as_str().unwrap_or_default().to_string(),
        ]);
    }
    let mut table = kv_table(&[
        ("F(β)", complex(found.target)),
        ("starts converged", format!("{}/{}", found.converged_starts, found.starts)),
        ("partial", found.partial.to_string()),
    ]);
    table.push('\n');
    table.push_str(&grid_table(&csv));
    Ok(Emission {
        result: to_value(&found),
        csv,
        table,
        status: Status::Ok,
    })
}
