//! Executable class field theory for rational and elliptic function fields.

pub mod error;
pub mod abgroup;
pub mod artin;
pub mod cli;
pub mod ecfun;
pub mod ffield;
pub mod pairings;
pub mod ratfun;

pub use error::{Error, Result};
