//! Exact Hochschild, cyclic, periodic cyclic and Tate homology of
//! finite-dimensional algebras over prime fields.

pub mod algebra;
pub mod bar;
pub mod cache;
pub mod cartier;
pub mod complexes;
pub mod cyclic;
pub mod derham;
pub mod error;
pub mod exec;
pub mod field;
pub mod lambda;
pub mod linalg;

pub use error::{Error, Result};
pub use field::PrimeField;
pub use linalg::{SparseMatrix, SparseVec, Subspace};
