//! Totally nonnegative flag varieties of SL(n) and the contractive flow of
//! the principal element `τ = Σ (e_i + f_i)`.
//!
//! The modules build on each other in order: [`chevalley`] (pinning and group
//! elements), [`totpos`] (positive parts and flags), [`embedding`]
//! (highest-weight representations and the eigenbasis chart), [`flow`] (the
//! flow in chart coordinates and its verification), [`cells`] (the SL₃ cell
//! decomposition and figure), [`folding`] (diagram automorphisms) and
//! [`suite`] (the end-to-end verification report).

pub mod cells;
pub mod chevalley;
pub mod embedding;
pub mod error;
pub mod flow;
pub mod folding;
pub mod matrix;
pub mod scalar;
pub mod suite;
pub mod totpos;

pub use error::{Error, Result};
pub use matrix::Matrix;
pub use scalar::{Scalar, Q};
