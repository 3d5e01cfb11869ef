//! Brute-force reference computations.
//!
//! Each oracle evaluates a defining formula directly (subset enumeration,
//! quadratic-time suprema, partition sums) and shares no code path with the
//! fast routine it is compared against.

pub mod charges;
pub mod conjugate;
