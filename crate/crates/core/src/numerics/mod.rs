//! Dense complex linear algebra and time integration.

mod eigen;
mod linsolve;
mod matrix;
mod ode;
mod optimize;

pub use eigen::{hermitian_eig, singular_values, HermitianEigen, HERMITIAN_TOL};
pub use linsolve::{solve_linear, solve_linear_with_tol, Lu, DEFAULT_PIVOT_TOL};
pub use matrix::{kron, matmul_into, ComplexMatrix, ComplexVector};
pub use ode::{integrate_adaptive, integrate_adaptive_with_stats, OdeOptions, OdeStats};
pub use optimize::golden_section_max;

pub use num_complex::Complex64 as C64;
