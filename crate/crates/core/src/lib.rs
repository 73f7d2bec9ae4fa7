//! Frobenius algebras, completely positive maps and entanglement-assisted
//! symmetry transformations of quantum and classical channels.

pub mod coding;
pub mod cpmaps;
pub mod eigen;
pub mod error;
pub mod frobenius;
pub mod groups;
pub mod linalg;
pub mod sample;
pub mod symmetry;

pub use error::{Error, Result};
pub use frobenius::{
    bh_iso, bh_iso_inverse, check_algebra, matrix_algebra, multimatrix_algebra, tensor_product,
    AlgebraReport, FrobeniusAlgebra,
};
pub use linalg::{DenseMatrix, Tolerance, C64};
