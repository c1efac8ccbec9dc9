//! Rank-1 lattice quadrature for nonperiodic integrands.
//!
//! Plain lattice rules only converge fast for periodic functions. This crate
//! builds rank-1 lattice rules by component-by-component search, folds them
//! with the tent transformation or symmetrizes them, and measures the result
//! through squared worst-case errors in four reproducing-kernel Hilbert
//! spaces:
//!
//! | space                 | node set                 | module             |
//! |-----------------------|--------------------------|--------------------|
//! | Korobov               | plain lattice            | [`wce`]            |
//! | half-period cosine    | tent-transformed lattice | [`wce`]            |
//! | Korobov plus cosine   | symmetrized lattice      | [`wce`]            |
//! | unanchored Sobolev    | any                      | [`wce`] double sum |
//!
//! The [`bench`] module runs convergence studies on product test functions
//! and [`cli`] exposes everything on the command line.

pub mod bench;
pub mod cbc;
pub mod cli;
pub mod coeff;
pub mod error;
pub mod kernels;
pub mod points;
pub mod special;
pub mod wce;

pub use error::{Error, Result};
pub use kernels::{Family, KernelValue, SpaceSpec, TruncationPolicy};
pub use points::{LatticeRule, WeightedPointSet};
pub use wce::{WceMethod, WceResult};
