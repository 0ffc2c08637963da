//! Exact arithmetic in the braid group `B_N` plus a memory-bounded
//! length-based solver for equation systems `X·Wᵢ = bᵢ` over random finitely
//! generated subgroups, with an experiment harness, logistic success model,
//! and SVG reporting.
//!
//! The crate is organised around six pieces:
//!
//! - [`word`] / [`perm`] / [`normal`]: braid words, permutation braids and
//!   left canonical (Garside) normal forms with multiplication, inversion and
//!   identity testing.
//! - [`length`]: the reduced Garside length used for scoring, plus a naive
//!   baseline.
//! - [`solver`]: the beam solver, its conjugacy / membership / parametric
//!   specializations, failure detection and backtracking.
//! - [`instance`]: seeded generation of random subgroups and equation
//!   systems, parameter grids, and the instance file format.
//! - [`stats`]: the logistic success model (built-in constants, IRLS fitting
//!   with significance filtering) and closed-form cost estimates.
//! - [`harness`] / [`plot`]: CSV experiment runs and self-contained SVG
//!   charts.

pub mod error;
pub mod harness;
pub mod instance;
pub mod length;
pub mod normal;
pub mod perm;
pub mod plot;
pub mod solver;
pub mod stats;
pub mod word;

pub use error::BraidError;
pub use length::{naive_garside_length, rg_length, LengthValue};
pub use normal::GarsideNormalForm;
pub use perm::PermutationBraid;
pub use word::BraidWord;
