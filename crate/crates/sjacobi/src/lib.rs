//! Geometry and differential operators on the Siegel-Jacobi space.
//!
//! Points, the Jacobi group and its slash action live in [`space`]; exact
//! derivatives come from truncated Taylor jets in [`calculus`]; the invariant
//! metric and its connection are in [`metric`]; [`operators`] holds the
//! covariant differential operators; [`qseries`] supplies exact Fourier-Jacobi
//! expansions and Eisenstein series; [`verify`] certifies the claims numerically.

pub mod calculus;
pub mod cli;
pub mod error;
pub mod matrix;
pub mod metric;
pub mod operators;
pub mod parallel;
pub mod qseries;
pub mod space;
pub mod verify;

pub use error::{Result, SjError};
pub use matrix::Mat;
pub use space::{
    act, automorphy_factor, slash, Coords, Dir, JacobiGroupElement, Layout, SiegelJacobiPoint,
    SmoothMap, WeightIndex,
};
