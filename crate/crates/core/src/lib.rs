//! Team-semantics model checking for dependence and independence logic with
//! monotone generalized quantifiers, an ESO(Q) evaluator, and translations
//! between the two.

pub mod error;
pub mod eval;
pub mod harness;
pub mod model;
pub mod quantifiers;
pub mod syntax;
pub mod transform;

pub use error::{Error, Result};
