//! Finite characterizations of modal formulas by examples.
//!
//! The crate covers model checking on finite Kripke models, (weak)
//! simulation solving, construction and brute-force verification of example
//! sets that characterize a formula within a fragment, refuters for `□⊥`,
//! and a membership-query learner.

pub mod budget;
pub mod characterize;
pub mod error;
pub mod kripke;
pub mod learn;
pub mod semantics;
pub mod simulation;
pub mod syntax;
pub mod verify;

pub use budget::Budget;
pub use error::{Error, Result};
