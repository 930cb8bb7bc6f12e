//! Self-adjoint Laplacian extensions parametrized by boundary unitaries, the
//! Cayley-transform boundary calculus, and the composition law for rapidly
//! alternating boundary conditions.
//!
//! Every routine is generic over the real scalar ([`Real`], `f32` or `f64`);
//! the `*F64` aliases below fix the common double-precision instantiation.

pub mod boundary_algebra;
pub mod disk_cavity;
pub mod error;
pub mod interval_cavity;
pub mod linalg;
pub mod quadrature;
pub mod reference;
pub mod sampling;
pub mod scalar;
pub mod trotter_engine;

pub use boundary_algebra::{
    classify, compose, compose_with, decompose, eigenprojection_one, gap_diagnostics,
    projection_meet, reconstruct_unitary, validate_unitary, BoundaryClass, BoundaryUnitary,
    ExtensionDecomposition, GapDiagnostics, Tolerances,
};
pub use error::{Error, Result};
pub use scalar::{CMatrix, CVector, Cx, Real};

pub type BoundaryUnitaryF64 = BoundaryUnitary<f64>;
pub type ExtensionDecompositionF64 = ExtensionDecomposition<f64>;
pub type Cavity1DF64 = interval_cavity::Cavity1D<f64>;
pub type StateVectorF64 = interval_cavity::StateVector<f64>;
pub type TrotterReportF64 = trotter_engine::TrotterReport<f64>;
pub type DiskModeModelF64 = disk_cavity::DiskModeModel<f64>;
pub type DiskStateF64 = disk_cavity::DiskState<f64>;
pub type BoundaryModeVectorF64 = disk_cavity::BoundaryModeVector<f64>;
