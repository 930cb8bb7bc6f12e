//! The unit disk with boundary unitaries diagonal in the angular Fourier
//! basis `e^{imθ}`, `|m| <= M_max`.
//!
//! Each mode carries either a Dirichlet flag or a Robin coefficient `k_m`,
//! giving the diagonal entry `λ_m = C(-k_m)` of the boundary unitary. Radial
//! problems are discretized with P1 elements in the measure `r dr`.

mod halfplane;
mod model;
mod modes;
mod radial;

pub use halfplane::{halfplane_boundary_demo, HalfplaneDemo, MIN_Y};
pub use model::{
    mode_gap_check, modewise_compose, DiskModeModel, DiskModelSpec, GrowthDeclaration,
    ModeCondition, ModeConditionSpec, ModeEntrySpec, ModeGapCheck, MIN_RADIAL_CELLS,
};
pub use modes::{lambda_lift, lambda_unlift, sobolev_norm, BoundaryModeVector};
pub use radial::{
    assemble_radial, dirichlet_decompose, disk_spectrum, harmonic_extension, laplacian_residual,
    radial_operator, radial_spectrum, DirichletSplit, DiskState, RadialOperator,
};
