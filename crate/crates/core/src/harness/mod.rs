//! Quantitative checks of the regularity theory on discrete solutions.
//!
//! Every continuum inequality is checked with an explicit discrete slack
//! (multiples of `h` or `h²`) that vanishes under refinement. Universal
//! constants are reported, never asserted.

mod barrier;
mod blowup;
mod hessian;
mod monotonicity;
mod nondegeneracy;
mod projection;
mod thickness;

pub use barrier::{
    barrier_value, cone_barrier, cone_barrier_report, AlphaConvention, BarrierEval,
    ConeBarrierReport, ConeBarrierSpec, ConventionReport, BARRIER_BETA_MAX, BARRIER_PASS_FLOOR,
};
pub use blowup::{
    halfspace_fit, monotonicity_cone, rescale, rescale_mask, ConeResult, HalfspaceFit,
    FIT_DIRECTIONS, FIT_GAMMAS, UNFIT_THRESHOLD,
};
pub use hessian::hessian_sup;
pub use monotonicity::{directional_monotonicity, monotonicity_threshold, MonotonicityCheck, MonotonicityVariant};
pub use nondegeneracy::{nondegeneracy_check, nondegeneracy_rhs, NondegeneracyRecord, CIRCLE_SAMPLES};
pub use projection::{dyadic_projection_track, dyadic_radii, volume_decay, ProjectionRecord, VolumeRecord};
pub use thickness::{min_diameter, ThicknessRecord, MIN_DIRECTIONS};

/// Space dimension of every grid check.
pub const DIM: usize = 2;
