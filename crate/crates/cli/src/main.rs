mod cli;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;
use serde_json::Value;
use sphera::QuadConfig;

use crate::cli::{Cli, Command, OutputArgs, QuadArgs};
use crate::commands::Failure;
use crate::output::{envelope, render, to_value, write_atomic, Status};

const DEFAULT_TOL: f64 = 1e-10;
const TOL_ENV: &str = "SPHERA_TOL";

/// Quadrature settings from the flags, then the environment, then defaults.
fn quad_config(q: &QuadArgs) -> Result<QuadConfig, Failure> {
    let tol = match q.tol {
        Some(t) => t,
        None => match std::env::var(TOL_ENV) {
            Ok(s) => s
                .trim()
                .parse::<f64>()
                .map_err(|_| Failure::Usage(format!("{TOL_ENV}={s:?} is not a number")))?,
            Err(_) => DEFAULT_TOL,
        },
    };
    let mut cfg = QuadConfig::with_tolerance(tol);
    if let Some(n) = q.max_evals {
        cfg.max_evals = n;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// The argument vector minus any output path, with the effective tolerance
/// pinned so that a replay does not depend on the environment.
fn replay_args(raw: &[String], tol: Option<f64>) -> Vec<String> {
    let mut out = Vec::with_capacity(raw.len() + 2);
    let mut has_tol = false;
    let mut iter = raw.iter();
    while let Some(arg) = iter.next() {
        if arg == "-o" || arg == "--output" {
            iter.next();
            continue;
        }
        if arg.starts_with("--output=") || (arg.starts_with("-o") && arg.len() > 2 && !arg.starts_with("--")) {
            continue;
        }
        has_tol |= arg == "--tol" || arg.starts_with("--tol=");
        out.push(arg.clone());
    }
    if let (Some(t), false) = (tol, has_tol) {
        out.push("--tol".into());
        out.push(format!("{t:?}"));
    }
    out
}

fn run(cli: Cli, raw: &[String]) -> Result<Status, Failure> {
    let (name, args_value, out, quad): (&str, Value, &OutputArgs, Option<&QuadArgs>) = match &cli.command {
        Command::Omega(a) => ("omega", to_value(a), &a.out, None),
        Command::Integrate(a) => ("integrate", to_value(a), &a.out, Some(&a.quad)),
        Command::F(a) => ("f", to_value(a), &a.out, Some(&a.quad)),
        Command::Verify(a) => ("verify", to_value(a), &a.out, Some(&a.quad)),
        Command::Solve(a) => ("solve", to_value(a), &a.out, Some(&a.quad)),
        Command::Trace(a) => ("trace", to_value(a), &a.out, Some(&a.quad)),
        Command::Taylor(a) => ("taylor", to_value(a), &a.out, Some(&a.quad)),
        Command::Signmap(a) => ("signmap", to_value(a), &a.out, Some(&a.quad)),
        Command::Limits(a) => ("limits", to_value(a), &a.out, None),
        Command::Picard(a) => ("picard", to_value(a), &a.out, Some(&a.quad)),
    };
    let cfg = quad.map(quad_config).transpose()?;
    let mut inputs = args_value;
    if let (Some(c), Value::Object(map)) = (&cfg, &mut inputs) {
        map.insert("tol".into(), c.abs_tol.into());
        map.insert("max_evals".into(), c.max_evals.into());
    }
    let c = cfg.unwrap_or_default();
    let emission = match &cli.command {
        Command::Omega(a) => commands::omega(a),
        Command::Integrate(a) => commands::integrate(a, &c),
        Command::F(a) => commands::transform(a, &c),
        Command::Verify(a) => commands::verify(a, &c),
        Command::Solve(a) => commands::solve(a, &c),
        Command::Trace(a) => commands::trace(a, &c),
        Command::Taylor(a) => commands::taylor_series(a, &c),
        Command::Signmap(a) => commands::signmap(a, &c),
        Command::Limits(a) => commands::limits(a),
        Command::Picard(a) => commands::picard(a, &c),
    }?;
    let replay = replay_args(raw, cfg.map(|c| c.abs_tol));
    let document = envelope(name, inputs, &replay, emission.result.clone());
    let text = render(out.format, &document, &emission);
    match &out.output {
        Some(path) => write_atomic(path, &text)
            .map_err(|e| Failure::Numeric(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    Ok(emission.status)
}

fn main() -> ExitCode {
    let raw: Vec<String> = std::env::args().skip(1).collect();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli, &raw) {
        Ok(status) => {
            match status {
                Status::Ok => {}
                Status::NotConverged => eprintln!("warning: quadrature did not reach the requested tolerance"),
                Status::VerifyFailed => eprintln!("verification failed"),
            }
            ExitCode::from(status_code(status))
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.exit_code())
        }
    }
}

fn status_code(status: Status) -> u8 {
    match status {
        Status::Ok => 0,
        Status::NotConverged => 2,
        Status::VerifyFailed => 3,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strings(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn exit_codes() {
        assert_eq!(status_code(Status::Ok), 0);
        assert_eq!(status_code(Status::NotConverged), 2);
        assert_eq!(status_code(Status::VerifyFailed), 3);
        assert_eq!(Failure::from(sphera::SpheraError::DegeneratePair).exit_code(), 1);
        let nc = sphera::SpheraError::NonConvergence { abs_error: 1.0, evals: 1 };
        assert_eq!(Failure::from(nc).exit_code(), 2);
    }

    #[test]
    fn replay_drops_output_and_pins_tolerance() {
        let raw = strings(&["f", "--k", "2", "-o", "x.json", "--output=y", "-oz", "--xi", "1"]);
        assert_eq!(replay_args(&raw, Some(1e-9)), strings(&["f", "--k", "2", "--xi", "1", "--tol", "1e-9"]));
        let raw = strings(&["f", "--tol=1e-8"]);
        assert_eq!(replay_args(&raw, Some(1e-8)), raw);
        assert_eq!(replay_args(&strings(&["omega"]), None), strings(&["omega"]));
    }
}
