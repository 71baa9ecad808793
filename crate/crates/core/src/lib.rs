//! Exact linear algebra for the Weyr form, the commutant of a nilpotent Weyr
//! matrix, and the normal form of commuting nilpotent pairs with a
//! one-dimensional common kernel.

pub mod commutant;
pub mod decomposition;
pub mod error;
pub mod field;
pub mod harness;
pub mod io;
pub mod matrix;
pub mod normal_form;
pub mod rational;
pub mod structure;

pub use commutant::{commutant_basis, h_pattern, k_matrix, CommutantBasis, CommutantPattern, Flag, KMatrix};
pub use decomposition::{weyr_decomposition, WeyrDecomposition};
pub use error::{Error, Result};
pub use field::{FieldDescriptor, Scalar};
pub use matrix::{Matrix, Vector};
pub use rational::Rational;
pub use normal_form::{
    common_kernel_dimension, reduce_pair, verify_normal_form, CommutingPair, NormalFormReport, NormalFormResult,
};
pub use structure::{build_weyr_matrix, weyr_characteristic, SegreStructure, WeyrStructure};
