//! Dense complex linear algebra used throughout the simulator.

mod eigen;
mod lu;
mod matrix;
mod takagi;

pub use eigen::hermitian_eigenvalues;
pub use lu::{det, inverse, SINGULAR_PIVOT};
pub use matrix::{ComplexMatrix, C64};
pub use takagi::{takagi, TakagiFactorization, SYMMETRY_TOL};

pub(crate) use lu::det_in_place;
pub(crate) use matrix::{ONE, ZERO};
