//! Small linear-algebra toolbox shared by assembly and the solvers:
//! Gauss quadrature, a symmetric sparse matrix in upper-triangle CSR form,
//! a skyline LDLᵀ factorization with reverse Cuthill-McKee ordering, and
//! symmetric eigensolvers (dense and shift-invert Lanczos).

mod eigen;
mod gauss;
mod skyline;
mod sparse;

pub use eigen::{dense_generalized_eig, lanczos_smallest, EigenPair};
pub use gauss::GaussRule;
pub use skyline::{reverse_cuthill_mckee, SkylineFactor};
pub use sparse::{PatternBuilder, SymCsr};
