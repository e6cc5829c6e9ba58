//! Exact-arithmetic computation of dominance regions for cluster algebras:
//! matrix mutation, piecewise-linear mutation maps, C/G-vector frames,
//! green and red sequences, folding, affine-type structure, and exact
//! rational polyhedral geometry. All computations are over the integers
//! and rationals; there is no floating point.

pub mod error;
pub mod num;
pub mod matrix;
pub mod exchange;
pub mod polyhedra;
pub mod classify;
pub mod folding;
pub mod mutmap;
pub mod frames;
pub mod affine;
pub mod dominance;

pub use error::{Error, Result};
pub use exchange::{ExchangeMatrix, ExtendedExchangeMatrix, MutationSequence, SquareExtension};
pub use matrix::IntMat;
