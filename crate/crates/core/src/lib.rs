//! Hybrid-dynamic propositional logic over finite Kripke models.

pub mod checker;
pub mod error;
pub mod fixtures;
pub mod gameboard;
pub mod games;
pub mod kripke;
pub mod omega;
pub mod random;
pub mod syntax;

pub use error::{Error, Result};
