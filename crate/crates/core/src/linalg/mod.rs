//! Dense linear algebra and quadrature kernel.

mod cholesky;
mod eigen;
mod legendre;
mod matrix;
mod quadrature;

pub use cholesky::{cholesky_spd, Cholesky};
pub use eigen::{generalized_sym_eig, symmetric_eig, EigenDecomposition, MAX_PENCIL_DIM};
pub use legendre::{legendre_eval, legendre_table};
pub use matrix::{dot, Matrix, SymMatrix};
pub use quadrature::{gauss_legendre, QuadratureRule, MAX_GAUSS_NODES};
