//! Exact linear algebra over prime fields.

pub mod dense;
pub mod generic;
mod rank;
mod sparse;
mod subspace;

pub use rank::rank;
pub use sparse::{SparseMatrix, SparseVec};
pub use subspace::{image_basis, induced_map, kernel_basis, quotient_basis, quotient_coordinates, Echelon, Subspace};
