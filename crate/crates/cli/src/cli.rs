use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(
    name = "sphera",
    version,
    about = "Spherical ratio of two points: the transform F(α) = ∫ ω^α dS, its identities and level curves"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Spherical ratio ω(x, y) of two points with its geometric breakdown
    Omega(OmegaArgs),
    /// Raw sphere integral ∫ ω^α (ln ω)^n dS, or ∫ |x − y|^{−α} dS
    Integrate(IntegrateArgs),
    /// The transform F(α) = W + iI at a point, or a profile along ξ
    F(FArgs),
    /// Identity checks with pass/fail reports
    Verify(VerifyArgs),
    /// Real solutions of F(λ) = ν
    Solve(SolveArgs),
    /// Level curve of W through a seed in the quadrant [k/2, ∞) × [0, p]
    Trace(TraceArgs),
    /// Even Taylor coefficients of F about k/2
    Taylor(TaylorArgs),
    /// Sign of I on a grid inside the strip
    Signmap(SignmapArgs),
    /// Limit of ω(x, y) as x → y along a path family
    Limits(LimitsArgs),
    /// Exploratory search for further α with F(α) = F(β)
    Picard(PicardArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Args, Clone, Debug, Serialize)]
pub struct OutputArgs {
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Write to this file (atomically) instead of standard output
    #[arg(long, short)]
    #[serde(skip)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Clone, Debug, Serialize)]
pub struct QuadArgs {
    /// Absolute and relative quadrature tolerance [default: $SPHERA_TOL or 1e-10]
    #[arg(long)]
    pub tol: Option<f64>,
    /// Integrand evaluation budget per integral
    #[arg(long)]
    pub max_evals: Option<usize>,
}

#[derive(Args, Clone, Debug, Serialize)]
pub struct SetupArgs {
    /// Dimension k of the sphere S^k
    #[arg(long)]
    pub k: u32,
    /// Sphere radius R
    #[arg(long = "R", id = "R")]
    #[serde(rename = "R")]
    pub radius: f64,
    /// Distance r of the point x from the centre
    #[arg(long)]
    pub r: f64,
}

/// Setup flags for commands where some modes do not need a sphere.
#[derive(Args, Clone, Debug, Serialize)]
pub struct OptionalSetupArgs {
    /// Dimension k of the sphere S^k
    #[arg(long)]
    pub k: Option<u32>,
    /// Sphere radius R
    #[arg(long = "R", id = "R")]
    #[serde(rename = "R")]
    pub radius: Option<f64>,
    /// Distance r of the point x from the centre
    #[arg(long)]
    pub r: Option<f64>,
}

#[derive(Args, Debug, Serialize)]
pub struct OmegaArgs {
    /// Point x, comma separated
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub x: Vec<f64>,
    /// Point y, comma separated
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub y: Vec<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct IntegrateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub setup: SetupArgs,
    #[arg(long, allow_negative_numbers = true)]
    pub xi: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
    pub zeta: f64,
    /// Power n of ln ω in the integrand
    #[arg(long, default_value_t = 0)]
    pub moment: u32,
    /// Integrate |x − y|^{−α} instead of ω^α (ln ω)^n
    #[arg(long)]
    pub distance: bool,
    #[command(flatten)]
    #[serde(flatten)]
    pub quad: QuadArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct FArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub setup: SetupArgs,
    /// Real part ξ of α
    #[arg(long, allow_negative_numbers = true, conflicts_with_all = ["xi_from", "xi_to"])]
    pub xi: Option<f64>,
    /// Imaginary part ζ of α
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
    pub zeta: f64,
    /// Profile mode: first ξ
    #[arg(long, allow_negative_numbers = true, requires = "xi_to")]
    pub xi_from: Option<f64>,
    /// Profile mode: last ξ
    #[arg(long, allow_negative_numbers = true, requires = "xi_from")]
    pub xi_to: Option<f64>,
    /// Profile mode: number of samples
    #[arg(long, default_value_t = 41)]
    pub points: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub quad: QuadArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutputArgs,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Default,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum IdentityName {
    Reflection,
    ImagVanishing,
    DistancePower,
    K1Trig,
    ClosedFormK2,
}

#[derive(Args, Debug, Serialize)]
pub struct VerifyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub setup: OptionalSetupArgs,
    /// Run a whole battery of checks
    #[arg(long, value_enum, conflicts_with = "identity")]
    pub suite: Option<Suite>,
    /// Run a single identity check
    #[arg(long, value_enum)]
    pub identity: Option<IdentityName>,
    /// ξ for reflection / distance-power
    #[arg(long, allow_negative_numbers = true)]
    pub xi: Option<f64>,
    /// ζ for reflection / distance-power
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
    pub zeta: f64,
    /// Frequency b for imag-vanishing / closed-form-k2
    #[arg(long, allow_negative_numbers = true)]
    pub b: Option<f64>,
    /// Moment index m for imag-vanishing
    #[arg(long, default_value_t = 0)]
    pub m: u32,
    /// Exponent p (real part) for k1-trig
    #[arg(long, allow_negative_numbers = true)]
    pub p_re: Option<f64>,
    /// Exponent p (imaginary part) for k1-trig
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
    pub p_im: f64,
    /// Trigonometric parameter a for k1-trig
    #[arg(long)]
    pub trig_a: Option<f64>,
    /// Trigonometric parameter b for k1-trig
    #[arg(long)]
    pub trig_b: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub quad: QuadArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct SolveArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub setup: SetupArgs,
    /// Target value ν
    #[arg(long, allow_negative_numbers = true)]
    pub nu: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub quad: QuadArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct TraceArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub setup: SetupArgs,
    /// Seed abscissa a ≥ k/2
    #[arg(long)]
    pub a: f64,
    /// Seed height b ∈ [0, p]
    #[arg(long, conflicts_with = "b_frac", required_unless_present = "b_frac")]
    pub b: Option<f64>,
    /// Seed height as a fraction of the strip half-width p
    #[arg(long)]
    pub b_frac: Option<f64>,
    /// Arc-length continuation step
    #[arg(long, default_value_t = sphera::analysis::DEFAULT_STEP)]
    pub step: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub quad: QuadArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct TaylorArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub setup: SetupArgs,
    /// Truncation order M: terms up to (α − k/2)^{2M}
    #[arg(long, default_value_t = 8)]
    pub order: usize,
    /// Evaluate the series (and F) at this ξ
    #[arg(long, allow_negative_numbers = true)]
    pub at_xi: Option<f64>,
    /// ... and this ζ
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
    pub at_zeta: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub quad: QuadArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct SignmapArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub setup: SetupArgs,
    #[arg(long, allow_negative_numbers = true)]
    pub xi_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub xi_max: Option<f64>,
    #[arg(long)]
    pub n_xi: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub zeta_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub zeta_max: Option<f64>,
    #[arg(long)]
    pub n_zeta: Option<usize>,
    #[command(flatten)]
    #[serde(flatten)]
    pub quad: QuadArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutputArgs,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VariantName {
    OnSphere,
    TangentPlane,
    TangentSphere,
    StraightLine,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SideName {
    Toward,
    Away,
}

#[derive(Args, Debug, Serialize)]
pub struct LimitsArgs {
    /// Path family
    #[arg(long, value_enum)]
    pub variant: VariantName,
    /// Point y on the sphere (its norm is the radius), comma separated
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub y: Vec<f64>,
    /// Tangent-sphere radius δ
    #[arg(long)]
    pub delta: Option<f64>,
    /// Tangent-sphere side
    #[arg(long, value_enum, default_value_t = SideName::Toward)]
    pub side: SideName,
    /// Angle between the line and the inward normal, in (0, π/2]
    #[arg(long)]
    pub gamma0: Option<f64>,
    /// Number of approach samples
    #[arg(long, default_value_t = 20)]
    pub samples: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct PicardArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub setup: SetupArgs,
    #[arg(long, allow_negative_numbers = true)]
    pub beta_xi: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
    pub beta_zeta: f64,
    /// Radius of the ring of Newton starts about k/2
    #[arg(long, default_value_t = 10.0)]
    pub rho: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub quad: QuadArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutputArgs,
}
