//! Interacting particle systems, their McKean–Vlasov counterparts, and the
//! extremes of both.

pub mod error;
pub mod extremes;
pub mod girsanov;
pub mod harness;
pub mod limits;
pub mod model;
pub mod rng;
pub mod sde;

pub use error::{Error, Result};
