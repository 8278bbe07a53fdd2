//! Secret-key capacity of reciprocal MIMO channel probing against a multi-antenna eavesdropper.

pub mod channel;
pub mod error;
pub mod experiments;
pub mod mc;
pub mod numerics;
pub mod skc;
pub mod verify;

pub use error::{Error, Result};
