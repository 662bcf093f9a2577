//! Order-theoretic quantum logic on explicitly enumerated finite spaces.

#![allow(clippy::needless_range_loop)]

pub mod chu;
pub mod context;
pub mod error;
pub mod geometry;
pub mod ontic;
pub mod quantum;
pub mod order;
pub mod real;
pub mod report;
pub mod tensor;
pub mod verify;

pub use error::{Error, Result};
pub use order::{BoolVal, Id, StateSpace};
pub use real::RealSpace;
