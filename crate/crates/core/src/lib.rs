//! Numerical toolkit for the spherical ratio of two points.
//!
//! For a fixed point `x` and the sphere `S^k(R)` centred at the origin, the
//! spherical ratio `ω(x, y) = ||x|² − |y|²| / |x − y|²` depends on `y ∈ S^k(R)`
//! only through the polar angle, which turns the transform
//! `F(α) = ∫ ω^α dS` into a weighted one-dimensional integral. The crate
//! evaluates that transform for complex `α`, its derivatives and log-moments,
//! and checks and inverts the identities it satisfies.
//!
//! * [`ratio`]: exact geometric constructions (ratio, star points, inversion,
//!   tangent-sphere levels, path limits).
//! * [`quadrature`]: the zonal reduction and adaptive Gauss–Kronrod driver.
//! * [`transform`]: `F = W + iI`, its derivatives, log-moments, the Taylor
//!   series at `k/2` and the strip half-width.
//! * [`wire`]: the JSON shapes of complex numbers and extended reals.
//! * [`analysis`]: verification reports, real inversion, level-curve tracing,
//!   sign maps and the exploratory search for additional complex preimages.

pub mod analysis;
pub mod error;
pub mod quadrature;
pub mod ratio;
pub mod transform;
pub mod wire;

pub use error::{Result, SpheraError};
pub use quadrature::{QuadConfig, QuadResult};
pub use ratio::{ExtendedReal, RatioBreakdown, SphereSetup, StripHalfwidth};
pub use transform::{ComplexExponent, TaylorSeries, TransformValue};

/// Version string echoed into machine-readable outputs.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
