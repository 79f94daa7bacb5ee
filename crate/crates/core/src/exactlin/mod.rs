//! Exact sparse linear algebra over Q and F_p.

pub mod echelon;
pub mod field;
pub mod ops;
pub mod sparse;

pub use echelon::{Echelon, Reduction};
pub use field::{Field, PrimeField, Rationals, ScalarField};
pub use ops::{
    homology_at, quotient_presentation, rank, rank_kernel_image, HomologyResult,
    QuotientPresentation, RankKernelImage, SubspacePresentation,
};
pub use sparse::{lincomb, MatrixBuilder, SparseMatrix, SparseVec};
