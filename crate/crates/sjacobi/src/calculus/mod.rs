//! Matrix calculus on the Siegel-Jacobi space.
//!
//! Truncated Taylor jets supply exact mixed partials; this module adds the
//! symmetrized gradient layout, an analytic test-function family, a
//! finite-difference oracle, and closed-form derivative identities.

pub mod expoly;
pub mod fd;
pub mod jet;
pub mod lemmas;

pub use expoly::ExpPolyTestFunction;
pub use fd::{fd_oracle, FdEstimate};
pub use jet::{jet_space, Jet, JetSpace};
pub use lemmas::*;
