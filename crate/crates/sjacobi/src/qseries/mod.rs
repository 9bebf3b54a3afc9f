//! Exact Fourier-Jacobi expansions, the index-one corpus and Eisenstein series.

pub mod corpus;
pub mod eisenstein;
pub mod eval;
pub mod ez;
pub mod golden;
pub mod series;

pub use corpus::*;
pub use eisenstein::*;
pub use series::*;
pub use ez::*;
pub use eval::*;
