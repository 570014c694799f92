pub mod cli;
pub mod dynsys;
pub mod error;
pub mod interval;
pub mod mpfloat;
pub mod orbit;
pub mod runerr;

pub use error::{Error, Result};
