//! Numerical potential theory on uniform grids: Fourier multipliers,
//! Sobolev norms of negative order, singular and direction kernels, and
//! checkers that compare both sides of sharp Hardy-type inequalities.

pub mod error;
pub mod fft;
pub mod field;
pub mod grid;
pub mod kernel;
pub mod lab;
pub mod quad;
pub mod recipe;
pub mod reduce;
pub mod special;
pub mod spectral;
pub mod sphere;

pub use error::{Error, Result};
pub use field::{MatrixField, ScalarField, VectorField};
pub use grid::Grid;
pub use recipe::{FieldRecipe, GeneratedField, RecipeKind};
pub use spectral::{FrequencyQuadrature, SpectralField};
