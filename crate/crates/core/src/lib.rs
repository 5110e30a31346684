//! Geometric model of a distal-stable beam: a reference rod, a parallel rod
//! at constant offset and a convergent rod whose offset tapers to zero at the
//! tip. Holding the three rod lengths fixed pins the tip angle and the
//! average tangent angle, which in turn keeps the tip on a fixed line through
//! the base.
//!
//! * [`curvature`]: Fourier curvature fields and cumulative quadrature.
//! * [`geometry`]: rod curves, lengths and distal-posture invariants.
//! * [`constraints`]: the linear length constraints, their nullspace and deformation sweeps.
//! * [`oracle`]: an independent chain of rigid guide disks for cross-checking.
//! * [`scenario`], [`export`], [`cli`]: JSON scenarios, CSV/SVG output and the command-line front-end.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod constraints;
pub mod curvature;
pub mod error;
pub mod export;
pub mod geometry;
pub mod oracle;
pub mod scenario;

pub use constraints::{
    amplitude_limit, build_constraint_matrix, fit_initial_curvature, fit_tip_position, nullspace,
    sweep, ConstraintMatrix, DeformationBasis, TipFit,
};
pub use curvature::{eval_basis, ArcGrid, BasisKind, FourierCurvature, DEFAULT_GRID_N};
pub use error::{Error, Result};
pub use geometry::{invariant_report, BeamConfig, InvariantReport, SampledCurve, TipPosture};
