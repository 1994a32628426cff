//! Monadic second-order theories of labeled chains, computed and composed
//! by the composition method, together with first-order interpretations
//! checked on finite models.

pub mod chain;
pub mod error;
pub mod formula;
pub mod guards;
pub mod interp;
pub mod theory;

pub use error::{Error, Result};
pub use guards::Guards;
