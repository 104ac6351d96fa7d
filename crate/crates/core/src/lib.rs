//! Coverage analysis of dense wireless networks with Fox's H-distributed
//! channel gains, together with a Monte Carlo cross-check.

pub mod coverage;
pub mod error;
pub mod fading;
pub mod foxh;
pub mod quad;
pub mod selftest;
pub mod simulator;
pub mod special;

pub use error::{Error, Result};
