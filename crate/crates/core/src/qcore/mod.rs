//! Dense complex linear algebra and entropy primitives.

mod bloch;
mod density;
mod entropy;
mod matrix;
pub mod random;

pub use bloch::{bloch_to_density, density_to_bloch, BlochVector};
pub use density::{partial_trace, DensityMatrix, STATE_TOL};
pub use entropy::{binary_h, entropy_of_eigenvalues, relative_entropy, von_neumann_entropy, EIGEN_ZERO};
pub use matrix::{commutator, eigenvalues_2x2, tensor, tensor_all, ComplexMatrix, HermitianEigen, C64, HERMITIAN_TOL};

pub(crate) use density::leading_kron_identity;
pub(crate) use entropy::{binary_h_clamped, xlog2x_neg};
pub(crate) use matrix::{I, ONE, ZERO};
