//! Numerical toolkit for Orlicz spaces on finite measure carriers.

pub mod charges;
pub mod conjugation;
pub mod duality;
pub mod error;
pub mod ext;
pub mod measure;
pub mod norms;
pub mod oracle;
pub mod orlicz;
pub mod rng;
pub mod search;

pub use error::{Error, Result};
pub use ext::ExtReal;
