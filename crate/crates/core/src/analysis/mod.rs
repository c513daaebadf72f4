//! Verification of the transform identities and the constructive machinery
//! behind the uniqueness statements: real inversion, level curves of `W`,
//! monotonicity of `I` along them, the sign map of `I`, and a best-effort
//! search for further complex preimages outside the strip.

mod level;
mod picard;
mod report;
mod signmap;
mod solve;
mod verify;

pub use level::{
    imag_along_curve, level_height, trace_level_curve, CurvePoint, ImagProfile, LevelCurve,
    DEFAULT_STEP,
};
pub use picard::{picard_search, PicardResult, PicardRoot, RootOrigin, PICARD_STARTS};
pub use report::{identity_tolerance, Component, Identity, VerificationReport};
pub use signmap::{sign_map_i, GridSpec, SignMap};
pub use solve::{solve_real, RealRoots};
pub use verify::{
    closed_form_k2, closed_form_k2_value, default_suite, verify_distance_identity,
    verify_imag_vanishing, verify_k1_trig, verify_reflection,
};
