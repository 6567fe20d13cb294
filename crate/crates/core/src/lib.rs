//! Dirichlet and Neumann spectra of the polyharmonic operators `(-Δ)^m` on
//! intervals and rectangles, together with numerical certificates for the
//! inequalities relating them.
//!
//! * [`oned`]: exact interval spectra from boundary determinants.
//! * [`galerkin`]: conforming Legendre–Galerkin spectra on rectangles.
//! * [`trial`]: plane-wave trial spaces built from roots of unity.
//! * [`harness`]: claim checks producing [`VerificationReport`]s.

pub mod config;
pub mod error;
pub mod galerkin;
pub mod harness;
pub mod linalg;
pub mod model;
pub mod oned;
pub mod poly;
pub mod trial;

pub use error::{PhlabError, Result};
pub use model::{
    n_poly_dim, BoundaryKind, ClaimRecord, Domain, Method, OperatorOrder, Rect, ReportStatus, Spectrum,
    ToleranceConfig, VerificationReport,
};
