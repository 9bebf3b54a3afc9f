//! Numerical certification of covariance, invariance and connection claims.

pub mod checks;
pub mod covariance;
pub mod report;
pub mod sampling;
pub mod suite;

pub use checks::*;
pub use covariance::*;
pub use report::*;
pub use sampling::*;
pub use suite::*;
